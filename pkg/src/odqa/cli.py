"""Command-line front door: ask, expand, eval, serve.

Thin wrappers over the library: each command builds Settings from
(config file < environment < flags), assembles the engine and calls
straight into the core package. Exit codes: 2 for configuration and
usage problems, 1 for runtime failures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
from pydantic import ValidationError

from .config import Settings, load_settings
from .dataset import parse_entries, split_and_emit
from .engine import build_engine
from .errors import ConfigError, OdqaError
from .evalharness import load_testset, render_report, run_eval
from .models import Question, RankedAnswer
from .pipeline import QueryMode

MODE_CHOICES = [m.value for m in QueryMode]


def _settings(config: str | None, **overrides) -> Settings:
    try:
        return load_settings(config, overrides=overrides)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc


@click.group()
def main() -> None:
    """Open-domain extractive question answering over web-search snippets."""


@main.command()
@click.argument("question")
@click.option("--mode", type=click.Choice(MODE_CHOICES), default="cw-union",
              show_default=True, help="Query generation procedure.")
@click.option("--offline", "offline_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Answer from recorded fixtures in this directory.")
@click.option("--top-k", type=int, default=None, help="Return at most this many results.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
def ask(question: str, mode: str, offline_dir: str | None, top_k: int | None,
        config: str | None) -> None:
    """Answer QUESTION and print ranked snippets with the span highlighted."""
    settings = _settings(config, offline_dir=offline_dir, top_k=top_k)
    try:
        engine = build_engine(settings)
        q = Question(text=question)
        queries, answers = engine.pipeline.run_question(q, QueryMode(mode))
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    except (OdqaError, ValidationError) as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"Q: {q.text}")
    click.echo(f"Mode: {mode}")
    for query in queries:
        click.echo(f"Query: {query.text}")
    click.echo()
    if not answers:
        click.echo("No answers found.")
        return
    for position, ra in enumerate(answers[: settings.top_k], start=1):
        click.echo(_render_answer(position, ra))


def _render_answer(position: int, ra: RankedAnswer) -> str:
    a = ra.answer
    if a.is_no_answer:
        marked = ra.hit.snippet
        note = " (no highlighted answer)"
    else:
        snippet = ra.hit.snippet
        marked = f"{snippet[:a.start_char]}»{a.text}«{snippet[a.end_char:]}"
        note = ""
    header = (
        f"{position}. (q={ra.combined:.4f}, c={a.confidence:.4f}, r={ra.hit.rank})"
        f" {ra.hit.title}{note}"
    )
    return f"{header}\n   {ra.hit.url}\n   {marked}\n"


@main.command()
@click.option("--in", "corpus", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Bracketed L:/Q:/A: corpus file.")
@click.option("--out-train", type=click.Path(dir_okay=False), required=True)
@click.option("--out-dev", type=click.Path(dir_okay=False), required=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--dev-ratio", type=float, default=0.1, show_default=True)
def expand(corpus: str, out_train: str, out_dev: str, seed: int, dev_ratio: float) -> None:
    """Expand a bracketed corpus into SQuAD 2.0 train/dev files."""
    try:
        entries = parse_entries(Path(corpus).read_text(encoding="utf-8"))
        report = split_and_emit(entries, seed, out_train, out_dev, dev_ratio)
    except OdqaError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"entries: {report.entries}")
    click.echo(f"pairs: {report.total_pairs} "
               f"(train {report.train_pairs}, dev {report.dev_pairs})")
    click.echo(f"expansion rule: {report.expansion_rule}")
    click.echo(f"seed: {report.seed}")


@main.command(name="eval")
@click.option("--testset", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Gold test set (JSON).")
@click.option("--offline", "offline_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Evaluate against recorded fixtures in this directory.")
@click.option("--live", is_flag=True, default=False,
              help="Evaluate against the live search API and inference backend.")
@click.option("--mode", type=click.Choice(MODE_CHOICES), default="cw-union",
              show_default=True)
@click.option("--only-top1", is_flag=True, default=False,
              help="Score answers only when the #1 result is a gold document.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the full report as JSON.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
def eval_cmd(testset: str, offline_dir: str | None, live: bool, mode: str,
             only_top1: bool, out_path: str | None, config: str | None) -> None:
    """Run the pipeline over a gold test set and print the metric table."""
    if not live and not offline_dir:
        raise click.UsageError("pass --offline <dir> or --live")
    settings = _settings(config, offline_dir=offline_dir)
    try:
        engine = build_engine(settings)
        gold = load_testset(testset)
        report = run_eval(
            gold, engine.pipeline, only_top1=only_top1, mode=QueryMode(mode)
        )
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    except OdqaError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(render_report(report))
    if out_path:
        Path(out_path).write_text(
            json.dumps(report.model_dump(), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
        click.echo(f"\nreport written to {out_path}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
def serve(port: int, host: str, config: str | None) -> None:
    """Run the REST service."""
    import uvicorn

    from .service import create_app

    settings = _settings(config)
    uvicorn.run(create_app(settings), host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
