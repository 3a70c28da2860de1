"""Report rendering: a fixed-layout text table and a stable JSON layout.

Structured layout (``format = "heyde-report/1"``)::

    {
      "format": "heyde-report/1",
      "scenario": str,
      "environment": {"version": str, "seed": int, "workers": int, "tolerances": {...}},
      "checks": [
        {"name", "kind", "verdict", "expected", "met", "residual", "p_value",
         "witness", "details", ["runtime"]}
      ],
      "all_met": bool
    }

Keys are sorted and floats are written with ``repr`` precision, so identical runs
produce identical bytes.  ``runtime`` is included only when timings are requested.
"""

from __future__ import annotations

import json

from .scenario import Report, _jsonable

FORMAT_ID = "heyde-report/1"

COLUMNS = (("NAME", 28), ("KIND", 24), ("VERDICT", 8), ("EXPECT", 8), ("VALUE", 12), ("STATUS", 8))


def report_dict(report: Report, timings: bool = False) -> dict:
    checks = []
    for c in report.checks:
        row = {"name": c.name, "kind": c.kind, "verdict": bool(c.verdict),
               "expected": c.expected, "met": c.met, "residual": c.residual,
               "p_value": c.p_value, "witness": c.witness, "details": c.details}
        if timings:
            row["runtime"] = c.runtime
        checks.append(row)
    return _jsonable({
        "format": FORMAT_ID,
        "scenario": report.scenario,
        "environment": {"version": report.version, "seed": report.seed,
                        "workers": report.workers, "tolerances": report.tolerances},
        "checks": checks,
        "all_met": report.all_met,
    })


def _fmt_value(c) -> str:
    if c.p_value is not None:
        return f"p={c.p_value:.3g}"
    if c.residual is not None:
        return f"{c.residual:.3e}"
    return "-"


def _cell(text: str, width: int) -> str:
    text = str(text)
    return (text[: width - 1] + "~") if len(text) > width else text.ljust(width)


def emit_report(report: Report, fmt: str = "text", timings: bool = False) -> bytes:
    if fmt == "structured":
        return (json.dumps(report_dict(report, timings), sort_keys=True, indent=2,
                           allow_nan=True) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [f"heyde report: {report.scenario}",
             f"version {report.version}  seed {report.seed}  workers {report.workers}",
             "tolerances: " + "  ".join(f"{k}={v:g}" for k, v in sorted(report.tolerances.items()))]
    if report.checks:
        cols = list(COLUMNS) + ([("TIME_S", 8)] if timings else [])
        lines.append(" ".join(_cell(h, w) for h, w in cols).rstrip())
        lines.append(" ".join("-" * w for _, w in cols))
        for c in report.checks:
            expect = "-" if c.expected is None else str(c.expected).lower()
            status = "ok" if c.met else "MISMATCH"
            cells = [c.name, c.kind, str(bool(c.verdict)).lower(), expect, _fmt_value(c), status]
            if timings:
                cells.append(f"{c.runtime:.3f}")
            lines.append(" ".join(_cell(v, w) for v, (_, w) in zip(cells, cols)).rstrip())
    return ("\n".join(lines) + "\n").encode()


__all__ = ["emit_report", "report_dict", "FORMAT_ID"]
