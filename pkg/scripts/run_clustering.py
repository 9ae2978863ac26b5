"""Clustering accuracy/NMI as a function of the number of removed common components."""

import argparse

import numpy as np

from cifa.experiments import clustering_run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=20)
    parser.add_argument("--c", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    args = parser.parse_args()
    runs = [clustering_run(seed, tuple(args.c)) for seed in range(args.runs)]
    for c in args.c:
        acc = np.array([r[c]["accuracy"] for r in runs])
        score = np.array([r[c]["nmi"] for r in runs])
        print(f"c={c}: accuracy {acc.mean():6.2f}±{acc.std():5.2f}  NMI {score.mean():6.2f}±{score.std():5.2f}")


if __name__ == "__main__":
    main()
