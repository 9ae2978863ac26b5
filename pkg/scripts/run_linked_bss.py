"""Mean SIR per shared source for COBE, COBEc and stacked PCA, each followed by AMUSE."""

import argparse

import numpy as np

from cifa.experiments import METHODS, linked_bss_run
from cifa.multiblock import derive_seed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--snr", type=float, nargs="+", default=[20.0])
    args = parser.parse_args()
    for snr in args.snr:
        runs = [linked_bss_run(derive_seed(args.seed, i), snr_db=snr) for i in range(args.runs)]
        print(f"SNR {snr:g} dB, {args.runs} runs")
        for m in METHODS:
            sir = np.array([r["sir"][m] for r in runs])
            t = np.mean([r["time"][m] for r in runs])
            cells = "  ".join(f"{mu:6.2f}±{sd:5.2f}" for mu, sd in zip(sir.mean(0), sir.std(0)))
            print(f"  {m:<6} {cells}   {t:.3f} s/run")


if __name__ == "__main__":
    main()
