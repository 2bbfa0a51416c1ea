"""Config-driven benchmark execution, scoring, reporting, and the session service."""

from .config import BenchmarkConfig, default_config_dict, load_config
from .report import compare_reports, extract_metric_table, render_comparison
from .runner import run_benchmark, score_logs

__all__ = [
    "BenchmarkConfig",
    "load_config",
    "default_config_dict",
    "run_benchmark",
    "score_logs",
    "compare_reports",
    "extract_metric_table",
    "render_comparison",
]
