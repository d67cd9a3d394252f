#!/usr/bin/env python3
"""Train-fraction classification sweep on the synthetic six-class dataset
(or on a directory of labeled PGM images)."""

import argparse
from pathlib import Path

from slepmoments import classification_sweep, load_labeled_directory, make_synthetic_dataset
from slepmoments.harness import DEFAULT_SEED, default_basis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-dir", default=None,
                    help="directory tree <root>/<class>/<image>.pgm")
    ap.add_argument("--classes", type=int, default=6)
    ap.add_argument("--per-class", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--out", default=None, help="optional CSV output path")
    args = ap.parse_args()

    basis = default_basis()
    if args.data_dir:
        ds = load_labeled_directory(args.data_dir, basis=basis)
    else:
        ds = make_synthetic_dataset(
            args.classes, args.per_class, 1, seed=args.seed, basis=basis
        )
    report = classification_sweep(ds, repeats=args.repeats, seed=args.seed)
    print(report.to_csv(precision=4))
    if args.out:
        Path(args.out).write_text(report.to_csv())


if __name__ == "__main__":
    main()
