from dataclasses import replace

import pytest

from junction import resources
from junction.errors import MalformedDocument
from junction.lang import Violation, grade, load_rubric, parse, simulate
from junction.lang.grading import GREEN, YELLOW

EXPECTED_MUTANT_VIOLATIONS = {
    "mutant_both_green": "safety",
    "mutant_wrong_order": "cycle_order",
    "mutant_long_yellow": "yellow_dwell",
    "mutant_sensor_deaf": "sensor_response",
    "mutant_dead_state": "sensor_response",
}


def program_of(source):
    result = parse(source)
    assert result.ok
    return result.program


def brute_force_conflicts(rows):
    """Straight scan for green-vs-green or green-vs-yellow ticks."""
    bad = []
    for row in rows:
        pair = (row.ns, row.ew)
        if pair == (GREEN, GREEN) or (GREEN in pair and YELLOW in pair):
            bad.append(row.tick)
    return bad


def test_reference_scores_full_marks(corpus, rubric):
    score, violations = grade(program_of(corpus["reference"]), rubric)
    assert score == 1.0
    assert violations == []


def test_both_green_mutant_names_tick_and_state(corpus, rubric):
    score, violations = grade(program_of(corpus["mutant_both_green"]), rubric)
    assert score <= 0.6
    safety = [v for v in violations if v.check == "safety"]
    assert safety
    assert safety[0].tick is not None and safety[0].state == "ew_green"
    assert str(safety[0].tick) in safety[0].message


def test_each_mutant_fails_with_expected_violation(corpus, rubric):
    for name, expected_check in EXPECTED_MUTANT_VIOLATIONS.items():
        score, violations = grade(program_of(corpus[name]), rubric)
        assert score < 1.0, name
        assert expected_check in {v.check for v in violations}, name


def test_static_failure_scores_zero(rubric):
    program = program_of("controller C { initial state a { when ghost -> a; } }")
    score, violations = grade(program, rubric)
    assert score == 0.0
    assert violations and all(v.check == "static" for v in violations)


def test_undeclared_sensor_scores_zero(rubric):
    # The rubric scenarios drive car_ew; a program that declares some other
    # input cannot be exercised and fails at the interface.
    program = program_of("controller C { input other: bool; initial state a { when other -> a; } }")
    score, violations = grade(program, rubric)
    assert score == 0.0
    assert violations[0].check == "interface"


def test_safety_check_agrees_with_brute_force(corpus, rubric):
    for name, source in corpus.items():
        program = program_of(source)
        if program.inputs and any(d.name != "car_ew" for d in program.inputs):
            continue  # rubric scenarios only drive car_ew
        score, violations = grade(program, rubric)
        flagged = {
            (v.scenario, v.tick) for v in violations if v.check == "safety"
        }
        for scenario in rubric.scenarios:
            rows = simulate(program, scenario.updates, scenario.ticks)
            conflicts = brute_force_conflicts(rows)
            if conflicts:
                assert (scenario.name, conflicts[0]) in flagged, name
            else:
                assert all(s != scenario.name for s, _ in flagged), name


def test_removing_a_failed_check_never_lowers_score(corpus, rubric):
    for name in EXPECTED_MUTANT_VIOLATIONS:
        program = program_of(corpus[name])
        base_score, violations = grade(program, rubric)
        failed = {v.check for v in violations}
        for check_id in failed:
            slimmer = replace(rubric, checks=tuple(c for c in rubric.checks if c.id != check_id))
            slim_score, _ = grade(program, slimmer)
            assert slim_score >= base_score - 1e-12, (name, check_id)


def test_load_rubric_rejects_unknown_check():
    with pytest.raises(MalformedDocument):
        load_rubric(
            "rubric_id: x\nchecks: [{id: nonsense, weight: 1.0}]\n"
            "scenarios: [{name: s, ticks: 5, inputs: [{tick: 0, values: {}}]}]\n"
        )


def test_load_rubric_rejects_missing_scenarios():
    with pytest.raises(MalformedDocument):
        load_rubric("rubric_id: x\nchecks: [{id: safety, weight: 1.0}]\nscenarios: []\n")


def test_violation_fields_serializable(corpus, rubric):
    _, violations = grade(program_of(corpus["mutant_both_green"]), rubric)
    for v in violations:
        assert isinstance(v, Violation)
        assert v.message
