#!/usr/bin/env python3
"""Boundary-model comparison on the cartoon scene.

Sweeps the fidelity weight for periodic, reflective and antireflective
restorations of a synthetically blurred and noisy image, then writes the
SNR-versus-alpha table to CSV. The antireflective model should win, with
periodic trailing by several dB at low noise.
"""

import argparse
import time

import numpy as np

from tvdeblur import (Experiment, SolveParams, builtin_truth, gaussian_psf,
                      sweep, write_sweep_csv)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--hsize", type=int, default=9)
    ap.add_argument("--delta", type=float, default=2.0)
    ap.add_argument("--sigma2", type=float, default=1e-6)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--points", type=int, default=12, help="alpha grid size")
    ap.add_argument("--out", default="bc_comparison.csv")
    args = ap.parse_args()

    exp = Experiment(
        truth=builtin_truth("cartoon", args.size, args.size),
        psf=gaussian_psf(args.hsize, args.delta),
        sigma2=args.sigma2,
        modes=("periodic", "reflective", "antireflective"),
        alphas=tuple(np.logspace(2, 7, args.points)),
        params=SolveParams(alpha=1.0),
        seed=args.seed,
    )
    start = time.perf_counter()
    result = sweep(exp)
    write_sweep_csv(result, args.out)
    print(f"wrote {args.out} in {time.perf_counter() - start:.1f}s")
    for mode in exp.modes:
        row = result.best(mode)
        print(f"  {mode:>15}: best SNR {row.snr_db:6.2f} dB at alpha {row.alpha:g}")


if __name__ == "__main__":
    main()
