#!/usr/bin/env python3
"""Certified rate equalities against the resisting oracle.

Writes ``results/rates.csv`` (per-step distances of tuned GD and two-phase GD
next to their closed forms) and ``results/break_even.csv``.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from secant_forge import formats
from secant_forge.algorithms import GradientDescent, TwoPhaseGD
from secant_forge.core import ClassParams, break_even_steps, first_step_constant
from secant_forge.harness import run_vs_adversary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=0.1)
    ap.add_argument("--L", type=float, default=1.0, dest="ell")
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    p = ClassParams(args.mu, args.ell)
    q = p.contraction
    gd = run_vs_adversary(GradientDescent(p.mu / p.ell ** 2), p, args.dim)
    two = run_vs_adversary(TwoPhaseGD(), p, args.dim)
    base = two.g0_norm ** 2 / (4 * p.mu ** 2)
    rows = []
    for i in range(gd.dist_sq.size):
        rows.append([i, gd.dist_sq[i], q ** i, q ** (i + 1), two.dist_sq[i],
                     base * q ** (i - 1) if i else math.nan])
    out = Path(args.outdir)
    formats.write_csv(out / "rates.csv",
                      ["step", "gd_dist_sq", "gd_upper", "gd_lower", "gd2_dist_sq", "gd2_closed"],
                      rows)

    table = []
    for kappa in (2, 5, 10, 30, 100, 1000):
        k = ClassParams(1.0, float(kappa))
        table.append([kappa, first_step_constant(k), break_even_steps(k)])
    formats.write_csv(out / "break_even.csv", ["kappa", "constant", "break_even_steps"], table)

    gd_err = np.max(np.abs(gd.dist_sq[1:] / gd.dist_sq[:-1] - q))
    print(f"GD alpha=mu/L^2: bounds {gd.bounds}, max |step ratio - {q}| = {gd_err:.2e}")
    print(f"two-phase GD: dist_sq[1] = {two.dist_sq[1]:.12g} vs |g0|^2/(4 mu^2) = {base:.12g}")
    for kappa, c, n in table:
        print(f"kappa={kappa:>5}: constant {c:.6f}, break-even {n:.2f} steps")


if __name__ == "__main__":
    main()
