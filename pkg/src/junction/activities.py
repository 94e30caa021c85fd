"""Mini-game and assessment engines.

Binary-to-decimal matching rounds, the phase-ordering puzzle, item-keyed
quiz scoring, and pre/post improvement reports for whole cohorts. Every
scoring operation returns a value in [0, 1].
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import NotAPermutation, OutOfRangeScore, TooManyPairs, UnknownItemId

BIT_WIDTHS = (4, 6, 8)

ACCURACY_WEIGHT = 0.7
SPEED_WEIGHT = 0.3


@dataclass(frozen=True)
class BinaryRound:
    pairs: tuple[tuple[str, int], ...]  # (binary string, decimal value)
    distractors: tuple[int, ...]
    time_limit: float  # seconds
    difficulty: int  # bit width

    def options(self) -> list[int]:
        """All decimal choices shown to the player, sorted."""
        return sorted([value for _, value in self.pairs] + list(self.distractors))


def gen_binary_round(
    difficulty: int,
    count: int,
    seed: int,
    distractors: int | None = None,
    time_limit: float = 60.0,
) -> BinaryRound:
    """Deterministic matching round at the given bit width.

    By default the round carries min(count, remaining values) distractors;
    asking for more distractors than the value space allows is an error.
    """
    if difficulty not in BIT_WIDTHS:
        raise ValueError(f"difficulty must be one of {BIT_WIDTHS}, got {difficulty}")
    if count < 1:
        raise ValueError("count must be at least 1")
    space = 2**difficulty
    if count > space:
        raise TooManyPairs(f"{count} pairs cannot fit in {space} distinct {difficulty}-bit values")
    remaining = space - count
    if distractors is None:
        distractors = min(count, remaining)
    elif distractors > remaining:
        raise TooManyPairs(f"{distractors} distractors requested but only {remaining} values remain")

    rng = random.Random(seed)
    values = rng.sample(range(space), count + distractors)
    pair_values, distractor_values = values[:count], values[count:]
    pairs = tuple((format(v, f"0{difficulty}b"), v) for v in pair_values)
    return BinaryRound(
        pairs=pairs,
        distractors=tuple(distractor_values),
        time_limit=time_limit,
        difficulty=difficulty,
    )


def score_binary_round(round: BinaryRound, responses: Mapping[str, int], elapsed: float) -> float:
    """0.7 * accuracy + 0.3 * speed; speed decays linearly to 0 at the limit."""
    if elapsed < 0:
        raise ValueError("elapsed must be non-negative")
    correct = sum(1 for binary, value in round.pairs if responses.get(binary) == value)
    accuracy = correct / len(round.pairs)
    speed = max(0.0, min(1.0, (round.time_limit - elapsed) / round.time_limit))
    return ACCURACY_WEIGHT * accuracy + SPEED_WEIGHT * speed


@dataclass(frozen=True)
class PhaseOrderPuzzle:
    reference_cycle: tuple[str, ...]
    submitted: tuple[str, ...]


def check_phase_order(puzzle: PhaseOrderPuzzle) -> tuple[bool, float]:
    """Correct iff the submission is some cyclic rotation of the reference.

    A light cycle has no distinguished first phase, so rotations are all
    equally right. Returns (correct, score) with score 1.0 or 0.0.
    """
    if not puzzle.submitted:
        raise NotAPermutation("submitted order is empty")
    if sorted(puzzle.submitted) != sorted(puzzle.reference_cycle):
        raise NotAPermutation("submitted phases are not a permutation of the reference cycle")
    n = len(puzzle.reference_cycle)
    reference = puzzle.reference_cycle
    correct = any(puzzle.submitted == reference[k:] + reference[:k] for k in range(n))
    return correct, 1.0 if correct else 0.0


def score_test(answer_key: Mapping[str, object], responses: Mapping[str, object]) -> float:
    """Equally weighted items; unanswered counts as wrong."""
    if not answer_key:
        raise ValueError("answer key is empty")
    for item in responses:
        if item not in answer_key:
            raise UnknownItemId(f"response for unknown item {item!r}")
    correct = sum(1 for item, answer in answer_key.items() if item in responses and responses[item] == answer)
    return correct / len(answer_key)


@dataclass(frozen=True)
class CohortReport:
    label: str
    rows: tuple[tuple[float, float, float], ...]  # (pre, post, improvement)
    n: int
    mean_improvement: float
    regressed: int


def cohort_report(groups: Sequence[tuple[str, Sequence[tuple[float, float]]]]) -> list[CohortReport]:
    """One report per (label, [(pre, post), ...]) group."""
    reports = []
    for label, scores in groups:
        rows = []
        for pre, post in scores:
            if not 0.0 <= pre <= 1.0:
                raise OutOfRangeScore(f"group {label!r}: pre score {pre!r} outside [0, 1]")
            if not 0.0 <= post <= 1.0:
                raise OutOfRangeScore(f"group {label!r}: post score {post!r} outside [0, 1]")
            rows.append((pre, post, post - pre))
        n = len(rows)
        mean = sum(r[2] for r in rows) / n if n else 0.0
        regressed = sum(1 for r in rows if r[2] < 0)
        reports.append(
            CohortReport(label=label, rows=tuple(rows), n=n, mean_improvement=mean, regressed=regressed)
        )
    return reports


def chart_rows(reports: Iterable[CohortReport]) -> list[tuple[str, int, float, float, float]]:
    rows = []
    for report in reports:
        for i, (pre, post, delta) in enumerate(report.rows):
            rows.append((report.label, i, pre, post, delta))
    return rows


def write_chart_csv(reports: Iterable[CohortReport], path: str | Path | None = None) -> str:
    """Per-student improvement table consumable by any plotting tool."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["group", "student_index", "pre", "post", "improvement"])
    for row in chart_rows(reports):
        writer.writerow(row)
    text = buffer.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
