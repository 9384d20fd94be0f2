"""Run-configuration loading and provider wiring."""

import json

import pytest

from scriptmorph.config import load_config, resolve_path
from scriptmorph.errors import ConfigError
from scriptmorph.gateway import MockProvider, RateLimiter
from scriptmorph.gateway.providers import HttpProvider


def minimal_doc(tmp_path):
    return {
        "provider": {"id": "mock"},
        "search": {"p": 2, "seed": 7},
        "paths": {
            "modules_dir": "pkg:modules",
            "signature_rules": "pkg:rules/signatures.json",
            "input": "pkg:corpus/s01.msl",
            "campaign_dir": str(tmp_path / "c"),
        },
        "schedule": ["comment-insert"],
    }


def write(tmp_path, doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_pkg_paths_resolve_into_the_installed_data():
    modules = resolve_path("pkg:modules")
    assert modules.is_dir()
    assert (modules / "comment-insert.json").exists()


def test_relative_input_paths_resolve_against_the_config(tmp_path):
    doc = minimal_doc(tmp_path)
    (tmp_path / "local.msl").write_text("echo 1;")
    doc["paths"]["input"] = "local.msl"
    cfg = load_config(write(tmp_path, doc))
    assert cfg.input_path == tmp_path / "local.msl"


def test_mock_provider_built(tmp_path):
    cfg = load_config(write(tmp_path, minimal_doc(tmp_path)))
    assert isinstance(cfg.build_provider(), MockProvider)
    assert cfg.build_rate_limiter() is None


def test_rate_limiter_from_config(tmp_path):
    doc = minimal_doc(tmp_path)
    doc["provider"]["rate_limit_per_minute"] = 30
    cfg = load_config(write(tmp_path, doc))
    limiter = cfg.build_rate_limiter()
    assert isinstance(limiter, RateLimiter)
    assert limiter.per_minute == 30


def test_http_provider_requires_connection_fields(tmp_path):
    doc = minimal_doc(tmp_path)
    doc["provider"] = {"id": "http"}
    cfg = load_config(write(tmp_path, doc))
    with pytest.raises(ConfigError):
        cfg.build_provider()
    doc["provider"] = {
        "id": "http",
        "endpoint": "https://example.test/v1/chat/completions",
        "model": "m",
        "api_key_env": "SOME_KEY",
    }
    cfg = load_config(write(tmp_path, doc))
    assert isinstance(cfg.build_provider(), HttpProvider)


def test_unknown_provider_rejected(tmp_path):
    doc = minimal_doc(tmp_path)
    doc["provider"] = {"id": "telepathy"}
    cfg = load_config(write(tmp_path, doc))
    with pytest.raises(ConfigError):
        cfg.build_provider()


def test_seed_override(tmp_path):
    cfg = load_config(write(tmp_path, minimal_doc(tmp_path)), seed_override=42)
    assert cfg.search.seed == 42


def test_missing_required_path_rejected(tmp_path):
    doc = minimal_doc(tmp_path)
    del doc["paths"]["modules_dir"]
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, doc))


def test_schedule_or_select_required(tmp_path):
    doc = minimal_doc(tmp_path)
    del doc["schedule"]
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, doc))


def test_bundled_sample_config_loads(tmp_path, monkeypatch):
    from pathlib import Path

    monkeypatch.chdir(tmp_path)
    cfg = load_config(resolve_path("pkg:configs/mock.json"))
    assert cfg.provider_id == "mock"
    assert cfg.search.p == 3
    # the output directory stays invocation-relative
    assert cfg.campaign_dir == Path("campaign-demo")
