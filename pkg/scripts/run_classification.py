"""Held-out accuracy of common-feature classification for both match methods."""

import argparse

import numpy as np

from cifa.apps.classify import METHODS
from cifa.experiments import classification_run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=20)
    parser.add_argument("--train", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    args = parser.parse_args()
    for frac in args.train:
        for method in METHODS:
            acc = [classification_run(seed, frac, method=method)["accuracy"] for seed in range(args.runs)]
            print(f"train {frac:.0%} {method:<11} accuracy {np.mean(acc):6.2f}±{np.std(acc):5.2f}")


if __name__ == "__main__":
    main()
