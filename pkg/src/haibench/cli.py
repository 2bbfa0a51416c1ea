"""Command-line interface.

Subcommands: run (execute a configured suite), score (score recorded
logs), compare (diff two reports), serve (start the session service),
causal (run causal queries against a model file), init-config (print the
default configuration). Exits 0 on success; failures print a structured
JSON diagnostic to stderr and exit nonzero. The HAIBENCH_OUT environment
variable overrides the configured output directory; --out overrides both.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import yaml

from . import __version__
from .causal.textio import load_model, run_queries
from .harness.config import ConfigError, default_config_dict, load_config
from .harness.report import compare_reports, dump_report, render_comparison
from .harness.runner import run_benchmark, score_logs

OUT_ENV = "HAIBENCH_OUT"


def _fail(code: str, message: str) -> None:
    sys.stderr.write(
        json.dumps({"error": {"code": code, "message": message}}, sort_keys=True) + "\n"
    )
    raise SystemExit(1)


def _resolve_out(cli_out: str | None, config_out: str) -> Path:
    if cli_out:
        return Path(cli_out)
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env)
    return Path(config_out)


@click.group()
@click.version_option(version=__version__, prog_name="haibench")
def main() -> None:
    """Benchmark harness for human-automation interaction systems."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Override the master seed.")
@click.option("--out", type=click.Path(), default=None, help="Output directory.")
def run(config_path: str, seed: int | None, out: str | None) -> None:
    """Run the configured benchmark suite and write reports."""
    try:
        config = load_config(config_path)
        if seed is not None:
            obj = yaml.safe_load(Path(config_path).read_text(encoding="utf-8"))
            obj["master_seed"] = seed
            config = load_config(obj)
        out_dir = _resolve_out(out, config.output_dir)
        aggregate = run_benchmark(config, out_dir)
    except (ConfigError, ValueError, OSError) as exc:
        _fail("run_failed", str(exc))
        return
    click.echo(f"wrote {len(aggregate['cells'])} cell reports to {out_dir}")
    click.echo(f"config fingerprint: {aggregate['config_fingerprint']}")


@main.command()
@click.argument("logs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write the report here.")
def score(logs: tuple[str, ...], config_path: str, out: str | None) -> None:
    """Score recorded event logs through the metric pipeline."""
    try:
        config = load_config(config_path)
        report = score_logs(config, list(logs))
    except (ConfigError, ValueError, OSError) as exc:
        _fail("score_failed", str(exc))
        return
    text = dump_report(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("report_a", type=click.Path(exists=True))
@click.argument("report_b", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write the comparison JSON here.")
def compare(report_a: str, report_b: str, out: str | None) -> None:
    """Compare two reports metric by metric (deltas are b minus a)."""
    try:
        a = json.loads(Path(report_a).read_text(encoding="utf-8"))
        b = json.loads(Path(report_b).read_text(encoding="utf-8"))
        comparison = compare_reports(a, b)
    except (ValueError, OSError) as exc:
        _fail("compare_failed", str(exc))
        return
    if out:
        Path(out).write_text(dump_report(comparison), encoding="utf-8")
    click.echo(render_comparison(comparison))


@main.command()
@click.option("--bind", default="127.0.0.1:8765", show_default=True, help="host:port")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Directory for session logs.")
def serve(bind: str, config_path: str, out: str | None) -> None:
    """Serve live trials to the task UI and record human sessions."""
    import uvicorn

    from .harness.service import create_app

    try:
        config = load_config(config_path)
        host, _, port_s = bind.partition(":")
        port = int(port_s or "8765")
        out_dir = _resolve_out(out, config.output_dir)
        app = create_app(config, out_dir)
    except (ConfigError, ValueError) as exc:
        _fail("serve_failed", str(exc))
        return
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")


@main.command()
@click.argument("model_path", type=click.Path(exists=True))
@click.argument("query_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write results JSON here.")
def causal(model_path: str, query_path: str, out: str | None) -> None:
    """Run causal queries from a query file against a model file."""
    try:
        model = load_model(yaml.safe_load(Path(model_path).read_text(encoding="utf-8")))
        queries = yaml.safe_load(Path(query_path).read_text(encoding="utf-8"))
        results = run_queries(model, queries)
    except (ValueError, KeyError, OSError) as exc:
        _fail("causal_failed", str(exc))
        return
    text = json.dumps({"results": results}, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@main.command("init-config")
@click.option("--seed", type=int, default=20250101, show_default=True)
def init_config(seed: int) -> None:
    """Print the default benchmark configuration as YAML."""
    click.echo(yaml.safe_dump(default_config_dict(seed), sort_keys=False))


if __name__ == "__main__":
    main()
