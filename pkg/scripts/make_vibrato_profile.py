#!/usr/bin/env python3
"""Write a vibrato gesture profile JSON for the devicesim CLI.

Example:
    python scripts/make_vibrato_profile.py --depth 45 --rate 5 --duration 3 \
        --out vibrato.json
    devicesim --mode spring --profile vibrato.json --out samples.csv
"""

import argparse
import json
from pathlib import Path

from hapticknob.simulator import make_vibrato_gesture, profile_to_json


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depth", type=float, default=45.0, help="degrees, 0..90")
    parser.add_argument("--rate", type=float, default=5.0, help="Hz, 0..20")
    parser.add_argument("--duration", type=float, default=3.0, help="seconds")
    parser.add_argument("--out", type=Path, default=Path("vibrato.json"))
    args = parser.parse_args()

    profile = make_vibrato_gesture(args.depth, args.rate, args.duration)
    args.out.write_text(json.dumps(profile_to_json(profile), indent=2))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
