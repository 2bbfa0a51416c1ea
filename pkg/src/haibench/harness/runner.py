"""Suite execution: run every (level x schedule x agent) cell, score each
session, and write per-cell reports, a run aggregate, and a CSV summary.

Cells run on a thread pool with fully isolated per-cell seeds derived from
the master seed; results are collected and written in declaration order,
so output bytes do not depend on scheduling.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from ..causal.textio import load_model, run_queries
from ..events import Session, ingest_log
from ..judgment import heuristic_alignment
from ..sim.advisor import AutomationLevel
from ..sim.agents import AgentSpec
from ..sim.runner import derive_seed, run_session
from .config import BenchmarkConfig, ScheduleSpec
from .report import (
    AGGREGATE_SCHEMA,
    CELL_SCHEMA,
    SCORE_SCHEMA,
    aggregate_metrics,
    dump_report,
    report_header,
    summary_csv,
)
from .session_metrics import design_metrics, reliance_outcome, session_metrics

__all__ = ["run_benchmark", "score_logs", "cell_label"]


@dataclass(frozen=True)
class Cell:
    index: int
    level: Optional[AutomationLevel]
    schedule: ScheduleSpec
    agent: AgentSpec

    def key(self) -> dict[str, Any]:
        return {
            "level": self.level.value if self.level else None,
            "schedule": self.schedule.to_payload(),
            "agent": self.agent.name,
        }


def cell_label(cell: Cell) -> str:
    level = cell.level.value if cell.level else "manual"
    return f"{level}-{cell.schedule.label}-{cell.agent.name}"


def _enumerate_cells(config: BenchmarkConfig) -> list[Cell]:
    cells = []
    i = 0
    for level in config.levels:
        for sched in config.schedules:
            for agent in config.agents:
                cells.append(Cell(index=i, level=level, schedule=sched, agent=agent))
                i += 1
    return cells


def _run_cell(config: BenchmarkConfig, cell: Cell, fingerprint: str) -> dict[str, Any]:
    cell_seed = derive_seed(config.master_seed, f"cell:{cell_label(cell)}")
    sessions = []
    per_session_values = []
    outcomes = []
    for i in range(config.sessions_per_cell):
        seed = derive_seed(cell_seed, f"session:{i}")
        session = run_session(
            params=config.task,
            level=cell.level,
            schedule=cell.schedule.schedule,
            agent_spec=cell.agent,
            n_trials=config.n_trials,
            seed=seed,
            session_id=f"{cell_label(cell)}-s{i:03d}",
        )
        values, errors = session_metrics(session, config, params=config.task)
        per_session_values.append(values)
        outcome = reliance_outcome(session)
        if outcome is not None:
            outcomes.append(outcome)
        sessions.append(
            {
                "session_id": session.session_id,
                "seed": seed,
                "metrics": values,
                "errors": errors,
            }
        )

    extras, extra_errors = design_metrics(config, cell.level)
    if "alignment" in set(config.metrics.select):
        if outcomes:
            try:
                al = heuristic_alignment(outcomes)
                extras["alignment.AS"] = al.alignment_score
                extras["alignment.NHTI"] = al.nhti
                for hid, score in sorted(al.hts.items()):
                    extras[f"alignment.HTS.{hid}"] = score
            except ValueError as exc:
                extra_errors["alignment"] = str(exc)
        else:
            extra_errors["alignment"] = "no decision-level recommendations in this cell"

    report = {
        **report_header(fingerprint, CELL_SCHEMA, config.metrics.select),
        "cell": cell.key(),
        "n_sessions": config.sessions_per_cell,
        "sessions": sessions,
        "aggregate": {
            "metrics": aggregate_metrics(per_session_values),
            "extras": extras,
            "errors": extra_errors,
        },
    }
    return report


def run_benchmark(
    config: BenchmarkConfig, out_dir: Union[str, Path]
) -> dict[str, Any]:
    """Run the full suite and write all report files under out_dir.

    Returns the aggregate report. Identical (config, seed) inputs produce
    byte-identical report files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fingerprint = config.fingerprint()
    cells = _enumerate_cells(config)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        reports = list(pool.map(lambda c: _run_cell(config, c, fingerprint), cells))

    cell_summaries = []
    for cell, report in zip(cells, reports):
        path = out / f"cell-{cell_label(cell)}.json"
        path.write_text(dump_report(report), encoding="utf-8")
        means = {
            name: stats["mean"]
            for name, stats in report["aggregate"]["metrics"].items()
        }
        means.update(report["aggregate"]["extras"])
        cell_summaries.append(
            {
                "cell": report["cell"],
                "n_sessions": report["n_sessions"],
                "metrics": means,
                "errors": report["aggregate"]["errors"],
                "report_file": path.name,
            }
        )

    aggregate: dict[str, Any] = {
        **report_header(fingerprint, AGGREGATE_SCHEMA, config.metrics.select),
        "cells": cell_summaries,
        "design_metrics": {},
        "metric_names": sorted(
            {name for c in cell_summaries for name in c["metrics"]}
        ),
    }
    if config.causal is not None and "model" in config.causal:
        aggregate["causal"] = _run_causal(config.causal)
    (out / "aggregate.json").write_text(dump_report(aggregate), encoding="utf-8")
    (out / "summary.csv").write_text(summary_csv(cell_summaries), encoding="utf-8")
    return aggregate


def _load_json_or_path(value: Any) -> Any:
    if isinstance(value, (str, Path)):
        return json.loads(Path(value).read_text(encoding="utf-8"))
    return value


def _run_causal(spec: Any) -> list[dict[str, Any]]:
    try:
        model = load_model(_load_json_or_path(spec["model"]))
        queries = _load_json_or_path(spec.get("queries", []))
        return run_queries(model, queries)
    except (ValueError, KeyError, OSError) as exc:
        return [{"error": f"causal block failed: {exc}"}]


def score_logs(
    config: BenchmarkConfig,
    logs: Sequence[Union[str, Path, Session]],
) -> dict[str, Any]:
    """Score already-recorded sessions (files or Session objects) through
    the same metric pipeline as scripted runs."""
    if not logs:
        raise ValueError("no logs to score")
    sessions: list[Session] = []
    for item in logs:
        if isinstance(item, Session):
            sessions.append(item)
        else:
            with open(item, "rb") as fh:
                sessions.append(ingest_log(fh))
    rows = []
    per_session_values = []
    outcomes = []
    for session in sessions:
        values, errors = session_metrics(session, config)
        per_session_values.append(values)
        outcome = reliance_outcome(session)
        if outcome is not None:
            outcomes.append(outcome)
        rows.append(
            {
                "session_id": session.session_id,
                "subject_kind": session.subject_kind,
                "metrics": values,
                "errors": errors,
            }
        )
    extras: dict[str, Any] = {}
    extra_errors: dict[str, str] = {}
    if "alignment" in set(config.metrics.select) and outcomes:
        try:
            al = heuristic_alignment(outcomes)
            extras["alignment.AS"] = al.alignment_score
            extras["alignment.NHTI"] = al.nhti
        except ValueError as exc:
            extra_errors["alignment"] = str(exc)
    return {
        **report_header(config.fingerprint(), SCORE_SCHEMA, config.metrics.select),
        "sessions": rows,
        "aggregate": {
            "metrics": aggregate_metrics(per_session_values),
            "extras": extras,
            "errors": extra_errors,
        },
    }
