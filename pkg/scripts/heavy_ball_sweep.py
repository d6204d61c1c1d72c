#!/usr/bin/env python3
"""Heavy-ball (alpha, beta) grid against the resisting oracle.

Each cell is an adversarial lower bound on that tuning's worst-case rate.
Writes ``results/hb_sweep.csv`` and prints the grid as a text heat map.
"""

import argparse
from pathlib import Path

import numpy as np

from secant_forge import formats
from secant_forge.core import ClassParams
from secant_forge.harness import SWEEP_HEADER, sweep_argmin, sweep_heavy_ball, sweep_workers


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=0.1)
    ap.add_argument("--L", type=float, default=1.0, dest="ell")
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--alpha", nargs=3, type=float, default=[0.02, 0.2, 21],
                    metavar=("LO", "HI", "N"))
    ap.add_argument("--beta", nargs=3, type=float, default=[0.0, 0.9, 21],
                    metavar=("LO", "HI", "N"))
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    p = ClassParams(args.mu, args.ell)
    alphas = np.linspace(args.alpha[0], args.alpha[1], int(args.alpha[2]))
    betas = np.linspace(args.beta[0], args.beta[1], int(args.beta[2]))
    cells = sweep_heavy_ball(p, args.dim, args.dim - 1, alphas, betas, workers=sweep_workers())
    formats.write_csv(Path(args.outdir) / "hb_sweep.csv", SWEEP_HEADER,
                      [[c.alpha, c.beta, c.rho_hat, c.diverged] for c in cells])

    grid = np.array([c.rho_hat for c in cells]).reshape(alphas.size, betas.size)
    print("beta ->  " + " ".join(f"{b:5.2f}" for b in betas))
    for a, row in zip(alphas, grid):
        print(f"a={a:.3f} " + " ".join("  inf" if not np.isfinite(v) else f"{v:5.3f}"
                                      for v in row))
    best = sweep_argmin(cells)
    print(f"argmin alpha={best.alpha:.4f} beta={best.beta:.3f} rho={best.rho_hat:.9f}"
          f" (floor {p.contraction})")


if __name__ == "__main__":
    main()
