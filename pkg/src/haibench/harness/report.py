"""Report construction, deterministic serialization, and comparison.

One JSON report per benchmark cell plus a run aggregate and a flat CSV
summary. Reports carry the config fingerprint and tool version and contain
nothing time- or path-dependent, so identical (config, seed) runs produce
byte-identical files. The full selected metric suite is always emitted;
there is deliberately no single composite headline score.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from typing import Any, Mapping, Optional, Sequence

from .. import __version__

__all__ = [
    "aggregate_metrics",
    "dump_report",
    "summary_csv",
    "extract_metric_table",
    "compare_reports",
    "render_comparison",
]

CELL_SCHEMA = "haibench.cell-report.v1"
AGGREGATE_SCHEMA = "haibench.aggregate-report.v1"
SCORE_SCHEMA = "haibench.score-report.v1"
COMPARISON_SCHEMA = "haibench.comparison.v1"


def aggregate_metrics(
    per_session: Sequence[Mapping[str, Optional[float]]],
) -> dict[str, dict[str, float]]:
    """Mean/median/count per metric across sessions, skipping missing values."""
    names = sorted({k for m in per_session for k in m})
    out: dict[str, dict[str, float]] = {}
    for name in names:
        vals = [m[name] for m in per_session if m.get(name) is not None]
        if not vals:
            continue
        out[name] = {
            "mean": sum(vals) / len(vals),
            "median": float(statistics.median(vals)),
            "n": len(vals),
        }
    return out


def dump_report(report: Mapping[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def summary_csv(cells: Sequence[Mapping[str, Any]]) -> str:
    """Flat per-cell table: one row per cell, one column per metric mean."""
    metric_names = sorted({name for c in cells for name in c["metrics"]})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level", "schedule", "agent", "n_sessions", *metric_names])
    for c in cells:
        cell = c["cell"]
        writer.writerow(
            [
                cell.get("level") or "manual",
                cell.get("schedule", {}).get("label", ""),
                cell.get("agent", ""),
                c.get("n_sessions", ""),
                *[
                    _csv_value(c["metrics"].get(name)) for name in metric_names
                ],
            ]
        )
    return buf.getvalue()


def _csv_value(v: Optional[float]) -> str:
    if v is None:
        return ""
    return repr(v)


def report_header(
    fingerprint: str, schema: str, metric_selection: Sequence[str] = ()
) -> dict[str, Any]:
    return {
        "schema": schema,
        "tool_version": __version__,
        "config_fingerprint": fingerprint,
        "metric_selection": sorted(metric_selection),
    }


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------


def extract_metric_table(report: Mapping[str, Any]) -> dict[str, Optional[float]]:
    """Flat metric-name -> value view of any report shape.

    Cell and score reports expose their aggregate means; aggregate reports
    expose per-cell means prefixed with the cell key plus run-level design
    metrics.
    """
    schema = report.get("schema")
    if schema in (CELL_SCHEMA, SCORE_SCHEMA):
        table: dict[str, Optional[float]] = {
            name: stats.get("mean")
            for name, stats in report.get("aggregate", {}).get("metrics", {}).items()
        }
        for name, value in report.get("aggregate", {}).get("extras", {}).items():
            table[name] = value
        return table
    if schema == AGGREGATE_SCHEMA:
        table = {}
        for c in report.get("cells", []):
            cell = c["cell"]
            prefix = "{}|{}|{}".format(
                cell.get("level") or "manual",
                cell.get("schedule", {}).get("label", ""),
                cell.get("agent", ""),
            )
            for name, value in c.get("metrics", {}).items():
                table[f"{prefix}|{name}"] = value
        for name, value in report.get("design_metrics", {}).items():
            table[name] = value
        return table
    raise ValueError(f"unrecognized report schema {schema!r}")


def compare_reports(
    report_a: Mapping[str, Any], report_b: Mapping[str, Any]
) -> dict[str, Any]:
    """Per-metric deltas (b minus a) with a sign summary.

    Requires the same metric selection; a selection mismatch raises with
    the symmetric difference. A metric that one side could not compute
    (per-metric error) yields an undefined row, not a failure. Metrics
    with identical values are flagged.
    """
    sel_a = set(report_a.get("metric_selection") or ())
    sel_b = set(report_b.get("metric_selection") or ())
    if sel_a != sel_b:
        raise ValueError(
            "metric sets differ; only in first: "
            f"{sorted(sel_a - sel_b)}; only in second: {sorted(sel_b - sel_a)}"
        )
    table_a = extract_metric_table(report_a)
    table_b = extract_metric_table(report_b)
    rows = []
    n_pos = n_neg = n_zero = n_undefined = 0
    for name in sorted(set(table_a) | set(table_b)):
        a, b = table_a.get(name), table_b.get(name)
        if a is None or b is None:
            rows.append({"metric": name, "a": a, "b": b, "delta": None, "identical": a == b})
            n_undefined += 1
            continue
        delta = b - a
        identical = a == b
        if delta > 0:
            n_pos += 1
        elif delta < 0:
            n_neg += 1
        else:
            n_zero += 1
        rows.append(
            {"metric": name, "a": a, "b": b, "delta": delta, "identical": identical}
        )
    return {
        "schema": COMPARISON_SCHEMA,
        "tool_version": __version__,
        "fingerprints": [
            report_a.get("config_fingerprint"),
            report_b.get("config_fingerprint"),
        ],
        "rows": rows,
        "summary": {
            "positive": n_pos,
            "negative": n_neg,
            "zero": n_zero,
            "undefined": n_undefined,
            "identical_metrics": [r["metric"] for r in rows if r["identical"]],
        },
    }


def render_comparison(comparison: Mapping[str, Any], max_rows: int = 0) -> str:
    """Human-readable comparison table."""
    rows = comparison["rows"]
    if max_rows:
        rows = rows[:max_rows]
    name_w = max([len(r["metric"]) for r in rows] + [6])
    lines = [f"{'metric'.ljust(name_w)}  {'a':>12}  {'b':>12}  {'delta':>12}  sign"]
    for r in rows:
        a = "-" if r["a"] is None else f"{r['a']:.6g}"
        b = "-" if r["b"] is None else f"{r['b']:.6g}"
        if r["delta"] is None:
            delta, sign = "-", "?"
        else:
            delta = f"{r['delta']:+.6g}"
            sign = "=" if r["delta"] == 0 else ("+" if r["delta"] > 0 else "-")
        lines.append(f"{r['metric'].ljust(name_w)}  {a:>12}  {b:>12}  {delta:>12}  {sign}")
    s = comparison["summary"]
    lines.append(
        f"summary: +{s['positive']} / -{s['negative']} / ={s['zero']}"
        + (f" / ?{s['undefined']}" if s["undefined"] else "")
    )
    return "\n".join(lines)
