#!/usr/bin/env python3
"""Sweep the affect plane and show how it lands on vibration parameters.

Frequency follows valence (60 Hz unpleasant -> 500 Hz pleasant), amplitude
follows arousal (8000 -> 32767), and duration follows the kana/kanji count of
the text on top of the 0.5 s base.
"""

from vibroaffect import (
    AffectScore,
    arousal_to_amplitude,
    compute_duration,
    map_affect,
    valence_to_frequency,
)


def main():
    print("valence -> frequency")
    for v in range(0, 101, 10):
        bar = "#" * int(valence_to_frequency(v) / 12)
        print(f"  {v:>3}% -> {valence_to_frequency(v):6.1f} Hz {bar}")

    print("\narousal -> amplitude")
    for a in range(0, 101, 10):
        amp = arousal_to_amplitude(a)
        print(f"  {a:>3}% -> {amp:>6} {'#' * (amp // 800)}")

    print("\ntext -> duration")
    for text in ["", "こんにちは", "漢字だよ", "コーヒー", "Hello, world!", "お腹が空きました"]:
        print(f"  {compute_duration(text):.1f} s <- {text!r}")

    print("\ncomposed")
    for score, text in [
        (AffectScore(100, 0, 100, 0), ""),
        (AffectScore(0, 100, 0, 100), ""),
        (AffectScore.neutral(), "こんにちは"),
        (AffectScore.from_valence_arousal(75.0, 30.0), "穏やかな一日でした"),
    ]:
        params = map_affect(score, text)
        print(
            f"  pleasure={score.pleasure:5.1f} arousal={score.arousal:5.1f} "
            f"-> {params.frequency_hz:6.1f} Hz, amp {params.amplitude}, "
            f"{params.duration_s:.1f} s"
        )


if __name__ == "__main__":
    main()
