"""Serialization of scenario reports: canonical JSON, flat CSV, text table."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

from .scenarios import ScenarioReport

SCHEMA_VERSION = 1
SIG_DIGITS = 12

CSV_COLUMNS = (
    "scenario",
    "paper_eq",
    "chsh_unconstrained",
    "chsh_ssr",
    "negativity_before",
    "negativity_after_dephase",
    "passed",
    "failed_checks",
    "seed",
    "runtime_ms",
)


def _num(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in report")
    y = float(f"{x:.{SIG_DIGITS}g}")
    return 0.0 if y == 0 else y


def _canonical(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _canonical(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_dict(report: ScenarioReport, timing: bool = False) -> dict:
    return _canonical(
        {
            "scenario": report.scenario,
            "paper_eq": report.paper_eq,
            "chsh_unconstrained": report.chsh_unconstrained,
            "chsh_ssr": report.chsh_ssr,
            "negativity_before": report.negativity_before,
            "negativity_after_dephase": report.negativity_after_dephase,
            "sector_table": [{"sector": lab, "weight": w} for lab, w in report.sector_table],
            "verdicts": {k: "pass" if ok else "fail" for k, ok in sorted(report.verdicts.items())},
            "passed": report.passed,
            "seed": report.seed,
            "runtime_ms": report.runtime_ms if timing else None,
            "details": report.details,
        }
    )


def to_json(reports: Sequence[ScenarioReport], seed: int, timing: bool = False) -> str:
    """Canonical JSON document; byte-identical for identical results unless ``timing``."""
    doc = {
        "schema": SCHEMA_VERSION,
        "seed": seed,
        "passed": all(r.passed for r in reports),
        "reports": [report_dict(r, timing) for r in sorted(reports, key=lambda r: r.scenario)],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def to_csv(reports: Sequence[ScenarioReport], timing: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(reports, key=lambda r: r.scenario):
        writer.writerow(
            [
                r.scenario,
                r.paper_eq,
                repr(_num(r.chsh_unconstrained)),
                repr(_num(r.chsh_ssr)),
                repr(_num(r.negativity_before)),
                repr(_num(r.negativity_after_dephase)),
                "pass" if r.passed else "fail",
                ";".join(r.failures),
                r.seed,
                f"{r.runtime_ms:.0f}" if timing else "",
            ]
        )
    return buf.getvalue()


def to_text(reports: Sequence[ScenarioReport]) -> str:
    header = f"{'scenario':<18} {'CHSH':>10} {'CHSH(SSR)':>10} {'neg':>8} {'neg(D)':>8} {'ms':>8}"
    lines = [header, "-" * len(header)]
    for r in sorted(reports, key=lambda r: r.scenario):
        lines.append(
            f"{r.scenario:<18} {r.chsh_unconstrained:>10.6f} {r.chsh_ssr:>10.6f} "
            f"{r.negativity_before:>8.4f} {r.negativity_after_dephase:>8.4f} {r.runtime_ms:>8.0f}"
        )
        for name, ok in sorted(r.verdicts.items()):
            lines.append(f"    {'✓' if ok else '✗'} {name}")
    total = sum(r.passed for r in reports)
    lines.append(f"{total}/{len(reports)} scenarios passed")
    return "\n".join(lines) + "\n"


def render(reports: Sequence[ScenarioReport], fmt: str, seed: int, timing: bool = False) -> str:
    if fmt == "json":
        return to_json(reports, seed, timing)
    if fmt == "csv":
        return to_csv(reports, timing)
    if fmt == "text":
        return to_text(reports)
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(
    reports: ScenarioReport | Sequence[ScenarioReport],
    fmt: str = "json",
    path: str | Path | None = None,
    seed: int | None = None,
    timing: bool = False,
) -> str:
    """Render ``reports`` and write them to ``path`` (or just return the text when ``path`` is None)."""
    if isinstance(reports, ScenarioReport):
        reports = [reports]
    if seed is None:
        seed = reports[0].seed if reports else 0
    text = render(reports, fmt, seed, timing)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
