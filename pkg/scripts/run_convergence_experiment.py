#!/usr/bin/env python3
"""Train tutor agents on the shipped synthetic cohort and inspect the policy.

Prints, per block, the greedy action for every state the agents visited at
least 50 times, alongside the action the generating archetype actually
responds to best. Writes the learning curve (and a plot when matplotlib is
around) next to the snapshots.

Usage: python3 scripts/run_convergence_experiment.py [--episodes N] [--seed S] [--out DIR]
"""

import argparse
from pathlib import Path

from junction import resources
from junction.agents import write_snapshot
from junction.cohort import PRETRAIN_ALPHA, SimConfig, cohort_from_mix, curve_to_csv, make_agents, train
from junction.telemetry import TutorState

EMOTION_TO_ARCHETYPE = {"frustrated": "novice", "neutral": "tinkerer", "bored": "disengaged"}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--episodes", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", type=Path, default=Path("out/convergence"))
    args = parser.parse_args()

    graph = resources.default_curriculum()
    archetypes, mix = resources.default_archetypes()
    cohort = cohort_from_mix(archetypes, mix, args.seed)
    agents = make_agents(graph, alpha=PRETRAIN_ALPHA)
    result = train(agents, graph, cohort, args.episodes, args.seed, SimConfig())

    matched = total = 0
    print(f"{'block':<16} {'state':<28} {'greedy':<22} {'archetype best':<22} visits")
    for block_id in graph.topo_order:
        agent = agents[block_id]
        catalog = list(graph.block(block_id).assistance)
        for state_key in sorted(agent.visited_states()):
            visits = agent.state_visits(state_key)
            if visits < 50:
                continue
            emotion = TutorState.from_key(state_key).emotion.value
            best = archetypes[EMOTION_TO_ARCHETYPE[emotion]].best_kind(catalog)
            greedy = agent.best_action(state_key)
            total += 1
            matched += greedy == best
            mark = " " if greedy == best else "!"
            print(f"{mark}{block_id:<15} {state_key:<28} {greedy:<22} {best:<22} {visits}")
    print(f"\npolicy match: {matched}/{total} ({matched / total:.1%})")

    args.out.mkdir(parents=True, exist_ok=True)
    for agent in agents.values():
        write_snapshot(agent, args.out)
    (args.out / "learning_curve.csv").write_text(curve_to_csv(result.curve), encoding="utf-8")
    print(f"snapshots and learning_curve.csv in {args.out}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        buckets = [b for b, _ in result.curve]
        means = [m for _, m in result.curve]
        plt.figure(figsize=(7, 4))
        plt.plot(buckets, means)
        plt.xlabel("episode")
        plt.ylabel("mean step reward (100-episode buckets)")
        plt.title("tutor agent warm-up")
        plt.tight_layout()
        plt.savefig(args.out / "learning_curve.png", dpi=120)
        print(f"plot written to {args.out / 'learning_curve.png'}")
    except ImportError:
        pass


if __name__ == "__main__":
    main()
