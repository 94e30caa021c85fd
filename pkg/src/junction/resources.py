"""Access to the data files shipped with the package."""

from __future__ import annotations

from pathlib import Path

import yaml

from .cohort import StudentArchetype, load_archetypes_path
from .curriculum import BlockGraph, load_curriculum_path
from .lang.grading import Rubric, load_rubric_path

DATA_DIR = Path(__file__).parent / "data"
CORPUS_DIR = DATA_DIR / "corpus"
MALFORMED_DIR = CORPUS_DIR / "malformed"

CURRICULUM_FILE = DATA_DIR / "curriculum.yaml"
RUBRIC_FILE = DATA_DIR / "rubric.yaml"
ARCHETYPES_FILE = DATA_DIR / "archetypes.yaml"
HOWTOPLAY_FILE = DATA_DIR / "howtoplay.yaml"
REFERENCE_PROGRAM = CORPUS_DIR / "reference.tl"

MUTANT_FILES = {
    "both_green": CORPUS_DIR / "mutant_both_green.tl",
    "wrong_order": CORPUS_DIR / "mutant_wrong_order.tl",
    "long_yellow": CORPUS_DIR / "mutant_long_yellow.tl",
    "sensor_deaf": CORPUS_DIR / "mutant_sensor_deaf.tl",
    "dead_state": CORPUS_DIR / "mutant_dead_state.tl",
}


def default_curriculum() -> BlockGraph:
    return load_curriculum_path(CURRICULUM_FILE)


def default_rubric() -> Rubric:
    return load_rubric_path(RUBRIC_FILE)


def default_archetypes() -> tuple[dict[str, StudentArchetype], list[tuple[str, int]]]:
    return load_archetypes_path(ARCHETYPES_FILE)


def howtoplay_texts() -> dict[str, str]:
    return yaml.safe_load(HOWTOPLAY_FILE.read_text(encoding="utf-8"))


def corpus_programs() -> dict[str, str]:
    """All valid corpus programs, name -> source text."""
    return {
        path.stem: path.read_text(encoding="utf-8")
        for path in sorted(CORPUS_DIR.glob("*.tl"))
    }


def malformed_programs() -> list[dict]:
    """Malformed corpus entries with their expected diagnostic positions."""
    manifest = yaml.safe_load((MALFORMED_DIR / "manifest.yaml").read_text(encoding="utf-8"))
    for entry in manifest:
        entry["source"] = (MALFORMED_DIR / entry["file"]).read_text(encoding="utf-8")
    return manifest
