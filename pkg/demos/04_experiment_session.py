#!/usr/bin/env python3
"""Simulate the full two-condition experiment for six participants.

Each participant hears all ten phrases once per condition (counterbalanced
order), simulated ratings go into per-participant JSONL logs, and the pooled
records are summarized the way the session CSV export lays them out.
"""

import random
import tempfile
from pathlib import Path

from vibroaffect import (
    NullBackend,
    Pipeline,
    Player,
    SessionLog,
    default_phrases,
    export_summary_csv,
    plan_session,
    run_scripted_session,
    summarize,
)


def main():
    phrases = default_phrases()
    pipeline = Pipeline()  # lexicon estimator by default
    player = Player(NullBackend())
    rng = random.Random(42)
    out_dir = Path(tempfile.mkdtemp(prefix="vibroaffect_session_"))

    all_trials, all_ios = [], []
    for index in range(6):
        plan = plan_session(index, phrases, seed=2024)
        print(f"participant {plan.participant_id}: first condition = {plan.condition_order[0]}")
        log = SessionLog(out_dir / f"{plan.participant_id}.jsonl")
        runner = run_scripted_session(
            plan,
            phrases,
            pipeline,
            log=log,
            player=player,
            rate_fn=lambda c, pid: (rng.randint(1, 9), rng.randint(1, 9)),
            ios_fn=lambda c: rng.randint(1, 7),
        )
        all_trials.extend(runner.trials)
        all_ios.extend(runner.ios_records)
    player.close()

    report = summarize(all_trials, all_ios)
    print(f"\npooled: {len(all_trials)} trials, {len(all_ios)} closeness ratings")
    for condition, stats in report.conditions.items():
        print(
            f"  {condition:<14} n={stats.n:>3}  valence mean {stats.valence_mean:.2f} "
            f"median {stats.valence_median}  arousal mean {stats.arousal_mean:.2f}"
        )
    for condition, mean in report.ios_means.items():
        print(f"  {condition:<14} closeness mean {mean:.2f}")

    csv_path = out_dir / "summary.csv"
    export_summary_csv(report, csv_path)
    print(f"\nlogs and summary in {out_dir}")


if __name__ == "__main__":
    main()
