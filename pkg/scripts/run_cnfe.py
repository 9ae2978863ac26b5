"""Nonnegative common features on the overlaid-image construction."""

import argparse

from cifa.experiments import cnfe_run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--max-iter", type=int, default=5000)
    args = parser.parse_args()
    print("seed  mode  iters  fit-error  source-error  max-increase")
    for seed in range(args.runs):
        for full in (False, True):
            r = cnfe_run(seed, nonnegative_mixing=full, max_iter=args.max_iter)
            mode = "full" if full else "semi"
            print(f"{seed:<5} {mode}  {r['iterations']:<5}  {r['rel_error']:.2e}   {r['source_error']:.2e}      {r['max_increase']:.1e}")


if __name__ == "__main__":
    main()
