"""Adaptive tutoring backend for a traffic-logic serious game.

The engine is curriculum-driven: content blocks form a prerequisite DAG,
telemetry aggregates per-block features, and one tabular Q-learning agent
per block picks assistance actions rewarded by student score deltas. The
game-specific pieces are a traffic-light controller language (parser,
simulator, autograder) and the mini-game scorers.
"""

__version__ = "0.1.0"
