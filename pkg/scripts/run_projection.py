"""Accuracy and wall-clock of the projected path against plain extraction (I=5000)."""

import argparse

import numpy as np

from cifa.experiments import projection_run
from cifa.multiblock import derive_seed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ip", type=int, nargs="+", default=[50, 100, 200])
    args = parser.parse_args()
    runs = [projection_run(derive_seed(args.seed, i), tuple(args.ip)) for i in range(args.runs)]
    print(f"plain extraction: {np.mean([r['time']['full'] for r in runs]):.3f} s/run")
    for i_p in args.ip:
        worst = [float(r["corr"][i_p].min()) if r["corr"][i_p].size else 0.0 for r in runs]
        t = np.mean([r["time"][i_p] for r in runs])
        print(f"I_P={i_p:<4} min corr mean {np.mean(worst):.5f}  worst {min(worst):.5f}  {t:.3f} s/run")


if __name__ == "__main__":
    main()
