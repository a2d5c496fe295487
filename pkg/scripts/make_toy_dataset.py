#!/usr/bin/env python3
"""Generate the synthetic two-class audio fixture (tone vs noise WAVs)."""

import argparse
from pathlib import Path

from quanvaudio.toydata import make_toy_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--per-class", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    root = make_toy_dataset(args.out, n_per_class=args.per_class, seed=args.seed)
    n = sum(1 for _ in root.rglob("*.wav"))
    print(f"wrote {n} WAVs under {root}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
