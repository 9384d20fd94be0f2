"""Command-line entry point wiring all stages together.

Subcommands: ``dedup`` a corpus, ``plan`` a module schedule, ``run`` a
campaign, ``eval`` its winners, ``report`` the metrics table.  Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import load_config
from .dedup import dedup as run_dedup
from .errors import ScriptMorphError
from .harness import (
    MetricsReport,
    compute_metrics,
    format_metrics_table,
    scan,
    signature_bank,
    signature_detector,
    survival_check,
)
from .search import SearchOrchestrator, WINNERS_DIR, resume as resume_campaign
from .strategies import load_modules, load_rules, plan_schedule, validate_schedule

METRICS_FILE = "metrics.json"


def _formatter(prog):
    return argparse.HelpFormatter(prog, width=96)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scriptmorph",
        description="Rewrite-search engine over a mini scripting language: "
        "dedup corpora, plan module schedules, run vote-pruned campaigns, "
        "and score the outputs.",
        formatter_class=_formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dedup = sub.add_parser(
        "dedup",
        help="three-stage duplicate removal over a corpus directory",
        formatter_class=_formatter,
    )
    p_dedup.add_argument("input_dir", help="directory of scripts to filter")
    p_dedup.add_argument("output_dir", help="directory for hash-named survivors")
    p_dedup.add_argument("--report", metavar="FILE", help="write the JSON report here")

    p_plan = sub.add_parser(
        "plan",
        help="order selected modules into a valid schedule",
        formatter_class=_formatter,
    )
    p_plan.add_argument("--modules", required=True, metavar="DIR", help="module definition directory")
    p_plan.add_argument("--rules", required=True, metavar="FILE", help="precedence rules file")
    p_plan.add_argument("--select", required=True, metavar="IDS", help="comma-separated module ids")
    p_plan.add_argument("--seed", type=int, default=0, help="campaign seed (recorded, not order-relevant)")

    p_run = sub.add_parser(
        "run",
        help="run one rewrite-search campaign",
        formatter_class=_formatter,
    )
    p_run.add_argument("--config", required=True, metavar="FILE", help="run configuration (JSON)")
    p_run.add_argument("--seed", type=int, default=None, help="override the configured seed")
    p_run.add_argument(
        "--resume", action="store_true", help="continue the checkpointed campaign"
    )

    p_eval = sub.add_parser(
        "eval",
        help="scan campaign winners and compute the metric roll-up",
        formatter_class=_formatter,
    )
    p_eval.add_argument("--campaign", required=True, metavar="DIR", help="campaign directory")
    p_eval.add_argument("--config", required=True, metavar="FILE", help="run configuration (JSON)")

    p_report = sub.add_parser(
        "report",
        help="print the metrics table of an evaluated campaign",
        formatter_class=_formatter,
    )
    p_report.add_argument("--campaign", required=True, metavar="DIR", help="campaign directory")

    return parser


class _CampaignLock:
    """Exclusive ownership of a campaign directory for one process."""

    def __init__(self, directory: Path):
        self.path = Path(directory) / "lock"
        self.acquired = False

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ScriptMorphError(
                f"campaign directory is locked by another run: {self.path}"
            ) from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        self.acquired = True
        return self

    def __exit__(self, *exc):
        if self.acquired:
            try:
                self.path.unlink()
            except OSError:
                pass
        return False


def _cmd_dedup(args) -> int:
    report = run_dedup(
        Path(args.input_dir),
        Path(args.output_dir),
        report_path=Path(args.report) if args.report else None,
    )
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    removed = report.input_count - report.survivor_count
    print(
        f"{report.input_count} files in, {report.survivor_count} survivors, "
        f"{removed} removed "
        f"({', '.join(f'stage {s.stage}: {s.removed_count}' for s in report.stages)})"
    )
    return 0


def _cmd_plan(args) -> int:
    registry = load_modules(Path(args.modules))
    rules = load_rules(Path(args.rules))
    rules.check_ids(registry)
    selected = [s for s in (part.strip() for part in args.select.split(",")) if s]
    schedule = plan_schedule(selected, rules, registry, seed=args.seed)
    report = validate_schedule(schedule, rules, registry)
    if not report.ok:
        raise ScriptMorphError(
            "planned schedule failed validation: "
            + "; ".join(v.describe() for v in report.violations)
        )
    for mid in schedule:
        print(mid)
    return 0


def _resolve_schedule(cfg, registry):
    rules = load_rules(cfg.precedence_rules) if cfg.precedence_rules else None
    if cfg.schedule is not None:
        if rules is not None:
            report = validate_schedule(cfg.schedule, rules, registry)
            if not report.ok:
                raise ScriptMorphError(
                    "configured schedule violates rules: "
                    + "; ".join(v.describe() for v in report.violations)
                )
        return cfg.schedule, rules
    from .strategies import EMPTY_RULES

    schedule = plan_schedule(cfg.select, rules or EMPTY_RULES, registry, seed=cfg.search.seed)
    return schedule, rules


def _cmd_run(args) -> int:
    cfg = load_config(Path(args.config), seed_override=args.seed)
    registry = load_modules(cfg.modules_dir)
    provider = cfg.build_provider()
    with _CampaignLock(cfg.campaign_dir):
        if args.resume:
            result = resume_campaign(cfg.campaign_dir, registry, provider)
        else:
            schedule, rules = _resolve_schedule(cfg, registry)
            orch = SearchOrchestrator(
                registry,
                provider,
                cfg.campaign_dir,
                cfg.search,
                rate_limiter=cfg.build_rate_limiter(),
            )
            result = orch.run(
                cfg.input_path.read_text(encoding="utf-8"),
                schedule,
                input_name=cfg.input_path.name,
                rules=rules,
            )
    print(f"campaign {result.campaign_id}: {result.status}")
    for path in result.winner_files:
        print(f"winner: {path}")
    return 0


def _cmd_eval(args) -> int:
    cfg = load_config(Path(args.config))
    campaign_dir = Path(args.campaign)
    winners_dir = campaign_dir / WINNERS_DIR
    winner_files = sorted(winners_dir.glob("*")) if winners_dir.exists() else []
    if not winner_files:
        raise ScriptMorphError(f"no winners to evaluate under {winners_dir}")
    campaign_doc = json.loads(
        (campaign_dir / "campaign.json").read_text(encoding="utf-8")
    )
    original = campaign_doc["input_text"]
    if cfg.detector_bank:
        detectors = signature_bank(cfg.signature_rules)
    else:
        detectors = [signature_detector(cfg.signature_rules)]
    outcomes, survivals, sizes = [], [], []
    for path in winner_files:
        text = path.read_text(encoding="utf-8")
        outcomes.append(scan(path.name, text, detectors, cfg.scan_policy))
        survivals.append(survival_check(original, text, cfg.step_limit))
        sizes.append((len(original.encode()), len(text.encode())))
    report = compute_metrics(outcomes, survivals, sizes)
    out_path = campaign_dir / METRICS_FILE
    out_path.write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(format_metrics_table({campaign_doc["campaign_id"]: report}))
    print(f"metrics written to {out_path}")
    return 0


def _cmd_report(args) -> int:
    campaign_dir = Path(args.campaign)
    metrics_path = campaign_dir / METRICS_FILE
    if not metrics_path.exists():
        raise ScriptMorphError(f"no metrics at {metrics_path}; run eval first")
    doc = json.loads(metrics_path.read_text(encoding="utf-8"))
    campaign_doc = json.loads(
        (campaign_dir / "campaign.json").read_text(encoding="utf-8")
    )
    report = MetricsReport(
        total=doc["total"],
        detected=doc["detected"],
        survived=doc["survived"],
        dr=doc["DR"],
        er=doc["ER"],
        sr=doc["SR"],
        mr=doc["MR"],
        per_detector=doc["per_detector"],
    )
    print(format_metrics_table({campaign_doc["campaign_id"]: report}))
    return 0


_COMMANDS = {
    "dedup": _cmd_dedup,
    "plan": _cmd_plan,
    "run": _cmd_run,
    "eval": _cmd_eval,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScriptMorphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
