"""Run configuration: one JSON file wires a whole campaign together.

Path values may use the ``pkg:`` prefix to point into the data bundled
with the package (modules, rule files, the fixture corpus), so a config
works no matter where the package is installed.  Credentials are never
stored in the config; only the *name* of the environment variable holding
the API key is.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .gateway import HttpProvider, MockProvider, Provider, RateLimiter
from .harness.scanning import ScanPolicy
from .search import SearchParams

PKG_PREFIX = "pkg:"


def resolve_path(value: str, base: Optional[Path] = None) -> Path:
    """Resolve a config path; ``pkg:`` points into the bundled data."""
    if value.startswith(PKG_PREFIX):
        root = resources.files("scriptmorph.data")
        return Path(str(root.joinpath(value[len(PKG_PREFIX) :])))
    path = Path(value)
    if base is not None and not path.is_absolute():
        return base / path
    return path


@dataclass
class RunConfig:
    provider_id: str
    provider_options: dict
    search: SearchParams
    modules_dir: Path
    precedence_rules: Optional[Path]
    signature_rules: Path
    input_path: Path
    campaign_dir: Path
    schedule: Optional[list[str]]
    select: Optional[list[str]]
    scan_policy: ScanPolicy
    detector_bank: bool
    step_limit: int

    def build_provider(self) -> Provider:
        if self.provider_id == "mock":
            return MockProvider()
        if self.provider_id == "http":
            required = {"endpoint", "model", "api_key_env"}
            missing = required - set(self.provider_options)
            if missing:
                raise ConfigError(f"http provider config missing: {sorted(missing)}")
            return HttpProvider(
                endpoint=self.provider_options["endpoint"],
                model=self.provider_options["model"],
                api_key_env=self.provider_options["api_key_env"],
            )
        raise ConfigError(f"unknown provider id {self.provider_id!r}")

    def build_rate_limiter(self) -> Optional[RateLimiter]:
        per_minute = self.provider_options.get("rate_limit_per_minute")
        return RateLimiter(per_minute) if per_minute else None


def load_config(path: Path, seed_override: Optional[int] = None) -> RunConfig:
    path = Path(path)
    base = path.parent
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

    provider = doc.get("provider", {})
    provider_id = provider.get("id", "mock")

    search_doc = dict(doc.get("search", {}))
    if "p" not in search_doc:
        raise ConfigError("search.p is required")
    if seed_override is not None:
        search_doc["seed"] = seed_override
    try:
        search = SearchParams.from_dict(search_doc)
    except TypeError as exc:
        raise ConfigError(f"bad search parameters: {exc}") from exc

    paths = doc.get("paths", {})
    for key in ("modules_dir", "signature_rules", "input", "campaign_dir"):
        if key not in paths:
            raise ConfigError(f"paths.{key} is required")
    modules_dir = resolve_path(paths["modules_dir"], base)
    signature_rules = resolve_path(paths["signature_rules"], base)
    input_path = resolve_path(paths["input"], base)
    # inputs resolve against the config file; the output directory against
    # the invocation directory
    campaign_dir = resolve_path(paths["campaign_dir"])
    precedence = (
        resolve_path(paths["precedence_rules"], base)
        if paths.get("precedence_rules")
        else None
    )
    for label, p in (
        ("modules_dir", modules_dir),
        ("signature_rules", signature_rules),
        ("input", input_path),
    ):
        if not p.exists():
            raise ConfigError(f"paths.{label} does not exist: {p}")
    if precedence is not None and not precedence.exists():
        raise ConfigError(f"paths.precedence_rules does not exist: {precedence}")

    schedule = doc.get("schedule")
    select = doc.get("select")
    if schedule is None and select is None:
        raise ConfigError("either schedule or select must be given")

    aggregation = doc.get("aggregation", {})
    policy = ScanPolicy(
        threshold=int(aggregation.get("threshold", 1)),
        rounds=int(aggregation.get("rounds", 3)),
    )
    detectors = doc.get("detectors", {})
    return RunConfig(
        provider_id=provider_id,
        provider_options=provider,
        search=search,
        modules_dir=modules_dir,
        precedence_rules=precedence,
        signature_rules=signature_rules,
        input_path=input_path,
        campaign_dir=campaign_dir,
        schedule=list(schedule) if schedule is not None else None,
        select=list(select) if select is not None else None,
        scan_policy=policy,
        detector_bank=bool(detectors.get("bank", False)),
        step_limit=int(doc.get("step_limit", 100_000)),
    )
