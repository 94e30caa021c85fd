import json

from click.testing import CliRunner

from junction import resources
from junction.cli import main
from junction.curriculum import load_curriculum_path
from junction.lang.grading import load_rubric_path
from junction.service import TutorService
from junction.telemetry import EventLog


def test_train_writes_snapshots_and_curve(tmp_path):
    out = tmp_path / "agents"
    result = CliRunner().invoke(main, ["train", "--episodes", "120", "--seed", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    snapshots = sorted(p.name for p in out.glob("*.agent.json"))
    assert len(snapshots) == 5
    curve = (out / "learning_curve.csv").read_text(encoding="utf-8")
    assert curve.startswith("episode_bucket,mean_reward")
    doc = json.loads((out / "code_task.agent.json").read_text(encoding="utf-8"))
    assert doc["format"] == "tutor-agent-v1"


def test_grade_reference_and_mutant(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["grade", str(resources.REFERENCE_PROGRAM)])
    assert result.exit_code == 0, result.output
    assert "score: 1.0" in result.output

    result = runner.invoke(main, ["grade", str(resources.MUTANT_FILES["both_green"])])
    assert result.exit_code == 0
    assert "violation (safety)" in result.output
    assert "score: 0.4" in result.output

    trace_path = tmp_path / "trace.csv"
    result = runner.invoke(main, ["grade", str(resources.REFERENCE_PROGRAM), "--trace-csv", str(trace_path)])
    assert result.exit_code == 0
    assert trace_path.read_text(encoding="utf-8").startswith("tick,state,ns,ew,elapsed")


def test_grade_reports_diagnostics(tmp_path):
    bad = tmp_path / "bad.tl"
    bad.write_text("controller {", encoding="utf-8")
    result = CliRunner().invoke(main, ["grade", str(bad)])
    assert result.exit_code == 0
    assert "error" in result.output and "score: 0.0" in result.output


def _scripted_log(tmp_path, name="run.jsonl", train_mode=True):
    graph = resources.default_curriculum()
    rubric = resources.default_rubric()
    log = EventLog(tmp_path / name, durable=False)
    ts = iter(range(1000, 10_000_000, 1000))
    service = TutorService(graph, log=log, rubric=rubric, train_mode=train_mode, seed=5, clock=lambda: next(ts))
    for score in (0.2, 0.5):
        session = service.open_session()
        service.ingest(session.id, "QuizSubmitted", {"block": "intro_quiz", "score": score})
        service.ingest(session.id, "BlockCompleted", {"block": "intro_quiz"})
        for block_id in ("binary_numbers", "state_machines"):
            service.request_assistance(session.id, block_id)
            service.ingest(session.id, "QuizSubmitted", {"block": block_id, "score": score + 0.3})
            service.ingest(session.id, "BlockCompleted", {"block": block_id})
        service.ingest(session.id, "BlockCompleted", {"block": "design_specs"})
        service.ingest(session.id, "CodeSubmitted", {"block": "code_task", "source": "x", "grade": score + 0.4})
        service.ingest(session.id, "BlockCompleted", {"block": "code_task"})
    return service


def test_replay_verify_ok_and_mismatch(tmp_path):
    service = _scripted_log(tmp_path)
    agents_dir = tmp_path / "agents"
    agents_dir.mkdir()
    for block_id, text in service.agent_snapshots().items():
        (agents_dir / f"{block_id}.agent.json").write_text(text, encoding="utf-8")

    runner = CliRunner()
    result = runner.invoke(main, ["replay", str(tmp_path / "run.jsonl"), "--verify", str(agents_dir)])
    assert result.exit_code == 0, result.output
    assert "bit-exactly" in result.output

    # Corrupt one snapshot: replay must notice and fail.
    target = agents_dir / "binary_numbers.agent.json"
    target.write_text(target.read_text(encoding="utf-8").replace('"q":[[', '"q":[["zz|zz","none","0x1p-3"],[', 1), encoding="utf-8")
    result = runner.invoke(main, ["replay", str(tmp_path / "run.jsonl"), "--verify", str(agents_dir)])
    assert result.exit_code == 1
    assert "MISMATCH" in result.output and "binary_numbers" in result.output


def test_report_groups_per_log(tmp_path):
    _scripted_log(tmp_path, name="group_a.jsonl")
    _scripted_log(tmp_path, name="group_b.jsonl")
    csv_out = tmp_path / "chart.csv"
    result = CliRunner().invoke(
        main,
        ["report", str(tmp_path / "group_a.jsonl"), str(tmp_path / "group_b.jsonl"), "--csv", str(csv_out)],
    )
    assert result.exit_code == 0, result.output
    assert "group_a: n=2" in result.output
    assert "group_b: n=2" in result.output
    lines = csv_out.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "group,student_index,pre,post,improvement"
    assert len(lines) == 5
