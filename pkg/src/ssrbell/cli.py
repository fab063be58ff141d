"""Command-line scenario runner.

    ssrbell run all --seed 42 --format json --out report.json
    ssrbell run yurke-identical --restarts 64 --format text
    ssrbell list

Exit status: 0 all checks pass, 1 some check failed, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .report import emit_report
from .scenarios import SCENARIOS, ScenarioConfig, run_scenario
from .states import SeparableSpec

SEED_ENV = "SSRBELL_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("ssrbell")


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def load_specs(path: str | Path) -> tuple[SeparableSpec, ...]:
    """A spec file holds one spec object, a list of them, or ``{"specs": [...]}``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict) and "specs" in data:
        data = data["specs"]
    if isinstance(data, dict):
        data = [data]
    try:
        return tuple(SeparableSpec.from_json(item) for item in data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid spec file {path}: {exc}") from exc


def load_config(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return data


def build_configs(args, names: list[str]) -> dict[str, ScenarioConfig]:
    """defaults < config file globals < config file per-scenario < command-line flags."""
    file_cfg = load_config(args.config) if args.config else {}
    per_scenario = file_cfg.pop("scenarios", {})
    unknown = set(per_scenario) - set(SCENARIOS)
    if unknown:
        raise UsageError(f"config names unknown scenarios: {', '.join(sorted(unknown))}")

    allowed = set(ScenarioConfig.__dataclass_fields__) - {"specs"}
    for where, cfg in [("config", file_cfg), *per_scenario.items()]:
        bad = set(cfg) - allowed
        if bad:
            raise UsageError(f"unknown config keys for {where}: {', '.join(sorted(bad))}")

    flags = {"restarts": args.restarts, "samples": args.samples}
    if args.spec:
        flags["specs"] = load_specs(args.spec)
    seed = args.seed if args.seed is not None else file_cfg.get("seed", default_seed())

    base = ScenarioConfig().override(**file_cfg).override(seed=int(seed))
    return {
        name: base.override(**per_scenario.get(name, {})).override(**flags) for name in names
    }


def _run(item):
    name, config = item
    return run_scenario(name, config)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssrbell",
        description="Bell/CHSH tests of particle-separable states under particle-number superselection.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario or all of them")
    choices = sorted(SCENARIOS) + ["all"]
    run.add_argument("name", nargs="?", choices=choices, metavar="SCENARIO",
                     help="scenario name or 'all' (" + ", ".join(choices) + ")")
    run.add_argument("--scenario", choices=choices, help="same as the positional SCENARIO")
    run.add_argument("--seed", type=int, help=f"global seed (default: ${SEED_ENV} or 0)")
    run.add_argument("--restarts", type=int, help="see-saw restarts per maximization")
    run.add_argument("--samples", type=int, help="phase-twirl Monte Carlo samples")
    run.add_argument("--spec", help="JSON file of separable specs for separable-random")
    run.add_argument("--config", help="JSON config with optional per-scenario overrides")
    run.add_argument("--format", choices=("json", "csv", "text"), default="text")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    run.add_argument("--timing", action="store_true",
                     help="include wall-clock runtimes in JSON/CSV (breaks byte reproducibility)")

    sub.add_parser("list", help="list scenario names")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command == "list":
        print("\n".join(sorted(SCENARIOS)))
        return EXIT_OK

    target = args.scenario or args.name
    if target is None:
        parser.error("name a scenario or 'all'")
    if args.name and args.scenario and args.name != args.scenario:
        parser.error("positional scenario and --scenario disagree")
    names = sorted(SCENARIOS) if target == "all" else [target]

    try:
        configs = build_configs(args, names)
    except UsageError as exc:
        parser.error(str(exc))
    except json.JSONDecodeError as exc:
        parser.error(f"malformed JSON input: {exc}")
    except OSError as exc:
        print(f"ssrbell: {exc}", file=sys.stderr)
        return EXIT_IO

    items = [(name, configs[name]) for name in names]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run, items))
    else:
        reports = [_run(item) for item in items]

    seed = configs[names[0]].seed
    try:
        text = emit_report(reports, args.format, args.out, seed=seed, timing=args.timing)
    except OSError as exc:
        print(f"ssrbell: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.out is None:
        sys.stdout.write(text)

    failed = [(r.scenario, c) for r in reports for c in r.failures]
    for scenario, check in failed:
        print(f"ssrbell: FAIL {scenario}: {check}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
