"""Operations CLI: serve, train, replay, grade, report."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import resources
from .activities import cohort_report, write_chart_csv
from .agents import load_agent_dir, write_snapshot
from .cohort import (
    PRETRAIN_ALPHA,
    SimConfig,
    cohort_from_mix,
    curve_to_csv,
    load_archetypes_path,
    make_agents,
    train,
)
from .curriculum import load_curriculum_path
from .lang import check, grade, load_rubric_path, parse
from .lang.diagnostics import ERROR
from .service import TutorService, rebuild, session_pre_post, verify_snapshots
from .telemetry import EventLog, read_log


def _load_graph(path: str | None):
    return load_curriculum_path(path) if path else resources.default_curriculum()


@click.group()
def main():
    """Tutoring backend for the traffic-controller game."""


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--curriculum", type=click.Path(exists=True), default=None, help="Curriculum document (default: shipped).")
@click.option("--rubric", type=click.Path(exists=True), default=None, help="Grading rubric (default: shipped).")
@click.option("--agents-dir", type=click.Path(), default=None, help="Load agent snapshots at startup, write them back on exit.")
@click.option("--log-file", type=click.Path(), default="events.jsonl", show_default=True)
@click.option("--train", "train_mode", is_flag=True, help="Explore and learn online instead of pure exploitation.")
@click.option("--seed", default=0, show_default=True)
@click.option("--frontend", type=click.Path(), default=None, help="Static client bundle to serve under /app.")
def serve(port, host, curriculum, rubric, agents_dir, log_file, train_mode, seed, frontend):
    """Run the HTTP session service."""
    import uvicorn

    from .web import create_app

    graph = _load_graph(curriculum)
    rubric_doc = load_rubric_path(rubric) if rubric else resources.default_rubric()
    archetypes, mix = resources.default_archetypes()
    agents = None
    if agents_dir and Path(agents_dir).is_dir():
        loaded = load_agent_dir(agents_dir)
        if loaded:
            agents = make_agents(graph)
            agents.update(loaded)
            click.echo(f"loaded {len(loaded)} agent snapshot(s) from {agents_dir}")
    service = TutorService(
        graph,
        agents=agents,
        log=EventLog(log_file),
        rubric=rubric_doc,
        archetypes=archetypes,
        default_mix=mix,
        train_mode=train_mode,
        seed=seed,
    )
    app = create_app(service, howtoplay=resources.howtoplay_texts(), static_dir=frontend)
    try:
        uvicorn.run(app, host=host, port=port)
    finally:
        if agents_dir:
            for agent in service.agents.values():
                write_snapshot(agent, agents_dir)
            click.echo(f"wrote agent snapshots to {agents_dir}")


@main.command("train")
@click.option("--curriculum", type=click.Path(exists=True), default=None)
@click.option("--cohort", "cohort_file", type=click.Path(exists=True), default=None, help="Archetype mix document (default: shipped).")
@click.option("--episodes", "-n", default=5000, show_default=True)
@click.option("--seed", "-s", default=7, show_default=True)
@click.option("--alpha", default=PRETRAIN_ALPHA, show_default=True, help="Learning rate for the warm-up agents.")
@click.option("--out", type=click.Path(), required=True, help="Directory for agent snapshots and the learning curve.")
def train_cmd(curriculum, cohort_file, episodes, seed, alpha, out):
    """Pre-train agents against a synthetic cohort and write snapshots."""
    graph = _load_graph(curriculum)
    if cohort_file:
        archetypes, mix = load_archetypes_path(cohort_file)
    else:
        archetypes, mix = resources.default_archetypes()
    cohort = cohort_from_mix(archetypes, mix, seed)
    agents = make_agents(graph, alpha=alpha)
    result = train(agents, graph, cohort, episodes, seed, SimConfig())
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for agent in result.agents.values():
        write_snapshot(agent, out_dir)
    (out_dir / "learning_curve.csv").write_text(curve_to_csv(result.curve), encoding="utf-8")
    last = result.curve[-1][1] if result.curve else float("nan")
    click.echo(f"trained {len(agents)} agents for {episodes} episodes (seed {seed})")
    click.echo(f"mean reward, last bucket: {last:.4f}")
    click.echo(f"snapshots and learning_curve.csv written to {out_dir}")


@main.command()
@click.argument("log", type=click.Path(exists=True))
@click.option("--curriculum", type=click.Path(exists=True), default=None)
@click.option("--verify", "verify_dir", type=click.Path(exists=True), default=None, help="Compare rebuilt agents against snapshots in this directory.")
@click.option("--out", type=click.Path(), default=None, help="Write rebuilt agent snapshots here.")
def replay(log, curriculum, verify_dir, out):
    """Rebuild session and agent state from an event log."""
    graph = _load_graph(curriculum)
    events = read_log(log)
    service = rebuild(graph, events)
    click.echo(f"replayed {len(events)} events, {len(service.sessions)} session(s)")
    if out:
        for agent in service.agents.values():
            write_snapshot(agent, out)
        click.echo(f"rebuilt snapshots written to {out}")
    if verify_dir:
        saved = {
            path.stem.removesuffix(".agent"): path.read_text(encoding="utf-8")
            for path in sorted(Path(verify_dir).glob("*.agent.json"))
        }
        mismatched = verify_snapshots(service, saved)
        if mismatched:
            click.echo(f"MISMATCH: {', '.join(mismatched)}")
            sys.exit(1)
        click.echo(f"verified: {len(saved)} snapshot(s) reproduced bit-exactly")


@main.command("grade")
@click.argument("source", type=click.Path(exists=True))
@click.option("--rubric", type=click.Path(exists=True), default=None)
@click.option("--trace-csv", type=click.Path(), default=None, help="Also write the first scenario's trace as CSV.")
def grade_cmd(source, rubric, trace_csv):
    """Parse, check and grade a controller source file."""
    text = Path(source).read_text(encoding="utf-8")
    result = parse(text)
    if not result.ok:
        for d in result.diagnostics:
            click.echo(f"{source}:{d}")
        click.echo("score: 0.0")
        return
    diagnostics = check(result.program)
    for d in diagnostics:
        click.echo(f"{source}:{d}")
    if any(d.severity == ERROR for d in diagnostics):
        click.echo("score: 0.0")
        return
    rubric_doc = load_rubric_path(rubric) if rubric else resources.default_rubric()
    score, violations = grade(result.program, rubric_doc)
    for v in violations:
        where = f" [{v.scenario}]" if v.scenario else ""
        click.echo(f"violation ({v.check}){where}: {v.message}")
    click.echo(f"score: {score}")
    if trace_csv:
        from .lang import simulate, trace_to_csv

        demo = rubric_doc.scenarios[0]
        rows = simulate(result.program, demo.updates, demo.ticks)
        Path(trace_csv).write_text(trace_to_csv(rows), encoding="utf-8")
        click.echo(f"trace written to {trace_csv}")


@main.command()
@click.argument("logs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--curriculum", type=click.Path(exists=True), default=None)
@click.option("--csv", "csv_out", type=click.Path(), default=None, help="Write per-student chart data here.")
def report(logs, curriculum, csv_out):
    """Pre/post improvement per log file (one group per file)."""
    graph = _load_graph(curriculum)
    groups = []
    for log_path in logs:
        service = rebuild(graph, read_log(log_path))
        groups.append((Path(log_path).stem, session_pre_post(service)))
    reports = cohort_report(groups)
    for r in reports:
        click.echo(
            f"{r.label}: n={r.n} mean_improvement={r.mean_improvement:+.3f} regressed={r.regressed}"
        )
    if csv_out:
        write_chart_csv(reports, csv_out)
        click.echo(f"chart data written to {csv_out}")


if __name__ == "__main__":
    main()
