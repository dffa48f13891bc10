#!/usr/bin/env python3
"""Estimate circumplex affect percentages for a handful of utterances.

Runs the offline lexicon backend (no network, fully deterministic). If
AFFECT_API_KEY is set, the same texts are also sent to the remote
chat-completion estimator for comparison.
"""

import os

from vibroaffect import Backend, EstimatorConfig, estimate_affect, format_affect

TEXTS = [
    "Every day is just so much fun!",
    "I feel like I'm under a lot of stress.",
    "It was a calm day today.",
    "Ouch, ouch! Don't hit me.",
    "Nothing special happened today.",
    "毎日がとても楽しいです",
]


def main():
    print("offline lexicon estimator")
    print("-" * 72)
    for text in TEXTS:
        score = estimate_affect(text)
        print(f"{format_affect(score)}   <- {text}")

    if os.environ.get("AFFECT_API_KEY"):
        print()
        print("remote estimator (gpt-4o-mini)")
        print("-" * 72)
        config = EstimatorConfig(backend=Backend.REMOTE_LLM)
        for text in TEXTS:
            score = estimate_affect(text, config)
            print(f"{format_affect(score)}   <- {text}")
    else:
        print("\n(set AFFECT_API_KEY to also query the remote estimator)")


if __name__ == "__main__":
    main()
