#!/usr/bin/env python3
"""Generate a synthetic study ratings CSV for exercising the studystats CLI.

Ratings are seeded random draws with a configurable per-mode bias, so the
report's ANOVA and preference sections have something to find.
"""

import argparse
import random
from pathlib import Path

MODES_BIAS = {"Smooth": 0.0, "Detent": 0.6, "Spring": 1.2}
CATEGORIES = ("comfort", "flexibility", "ease_of_control", "helpfulness")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--participants", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("ratings.csv"))
    args = parser.parse_args()

    rng = random.Random(args.seed)
    lines = ["participant,mode,category,rating"]
    for i in range(args.participants):
        for mode, bias in MODES_BIAS.items():
            for category in CATEGORIES:
                rating = round(rng.gauss(6.5 + bias, 1.6))
                rating = min(10, max(1, rating))
                lines.append(f"P{i:02d},{mode},{category},{rating}")
    args.out.write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out} ({args.participants} participants)")


if __name__ == "__main__":
    main()
