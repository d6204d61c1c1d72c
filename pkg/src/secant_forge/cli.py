"""Command-line front end: ``secant-forge {run,sweep,check,build,trace}``.

Exit status is 0 on success, 1 when a certified bound or a feasibility check
fails, and 2 on configuration or input errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from secant_forge import formats
from secant_forge.adversary import alpha0_interval, transcript_header, transcript_rows
from secant_forge.algorithms import METHODS, make_method
from secant_forge.core import DEFAULT_TOL, ClassParams
from secant_forge.harness import (
    RUN_HEADER,
    SWEEP_HEADER,
    analyze_trace,
    run_vs_adversary,
    sweep_argmin,
    sweep_heavy_ball,
    sweep_workers,
)
from secant_forge.interpolation import (
    InfeasibleFamily,
    InterpFamily,
    build_interpolant,
    check_family,
    verify_membership,
)

EXIT_OK, EXIT_BOUND, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    mu: float = 0.1
    ell: float = 1.0
    dim: int = 64
    steps: Optional[int] = None
    alpha0: Optional[float] = None
    method: str = "gd"
    alpha: Optional[float] = None
    beta: float = 0.0
    alpha_grid: tuple = (0.0, 0.2, 21)
    beta_grid: tuple = (0.0, 0.9, 21)
    seed: Optional[int] = None
    out: Optional[str] = None
    tol: float = DEFAULT_TOL

    def params(self) -> ClassParams:
        try:
            return ClassParams(self.mu, self.ell)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self):
        params = self.params()
        if self.dim < 3:
            raise ConfigError("dim must be >= 3")
        if self.steps is None:
            self.steps = self.dim - 1
        if not 1 <= self.steps <= self.dim - 1:
            raise ConfigError(f"steps must be ≤ dim−1 (and ≥ 1), got steps={self.steps}, dim={self.dim}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.alpha0 is not None and not params.degenerate:
            lo, hi = alpha0_interval(params)
            if not lo * (1 - 1e-12) <= self.alpha0 <= hi * (1 + 1e-12):
                raise ConfigError(f"alpha0 must lie in [{lo}, {hi}]")
        if not self.tol >= 0:
            raise ConfigError("tol must be nonnegative")
        return params


def parse_grid(text: str) -> tuple:
    try:
        a, b, n = text.split(":")
        grid = (float(a), float(b), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:n, got {text!r}") from exc
    if grid[2] < 1:
        raise argparse.ArgumentTypeError("grid count must be >= 1")
    return grid


def grid_values(grid) -> np.ndarray:
    a, b, n = grid
    return np.linspace(a, b, n)


def _emit(obj, out_path=None):
    text = formats.json_text(obj)
    sys.stdout.write(text)
    if out_path is not None:
        formats.atomic_write_text(out_path, text)


def _sibling(out: str, suffix: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + suffix)


def cmd_run(cfg: Config) -> int:
    params = cfg.validate()
    method = make_method(cfg.method, params, cfg.alpha, cfg.beta)
    rec = run_vs_adversary(method, params, cfg.dim, alpha0=cfg.alpha0, steps=cfg.steps,
                           g0_seed=cfg.seed)
    if rec.trivial:
        print("notice: L == mu, the lower bounds are trivial; ran on mu/2 |x - x*|^2",
              file=sys.stderr)
    summary = {
        "method": rec.method, "mu": params.mu, "L": params.ell, "dim": cfg.dim,
        "steps": cfg.steps, "alpha0": rec.alpha0, "rho_hat": rec.rho_hat,
        "bounds": rec.bounds, "certified_xstar": rec.xstar.tolist(),
        "diverged": rec.diverged, "trivial": rec.trivial,
    }
    if cfg.out:
        formats.write_csv(cfg.out, RUN_HEADER, rec.csv_rows())
        X = np.array([p.x for p in rec.transcript])
        G = np.array([p.g for p in rec.transcript])
        F = np.array([p.f for p in rec.transcript])
        _, keep = np.unique(X, axis=0, return_index=True)
        keep.sort()
        formats.write_family(_sibling(cfg.out, ".family.csv"), X[keep], G[keep], rec.xstar, F[keep])
        if rec.session is not None:
            write_transcript(_sibling(cfg.out, ".transcript.csv"), rec.session)
    _emit(summary, _sibling(cfg.out, ".json") if cfg.out else None)
    return EXIT_OK if rec.all_bounds_ok else EXIT_BOUND


def write_transcript(path, session):
    """Adversary transcript export (``step,f,grad_norm,dist_to_center,radius,x..,g..``)."""
    formats.write_csv(path, transcript_header(session.dim), transcript_rows(session))


def cmd_sweep(cfg: Config) -> int:
    params = cfg.validate()
    if params.degenerate:
        raise ConfigError("sweep needs L > mu")
    cells = sweep_heavy_ball(params, cfg.dim, cfg.steps, grid_values(cfg.alpha_grid),
                             grid_values(cfg.beta_grid), workers=sweep_workers())
    best = sweep_argmin(cells)
    if cfg.out:
        formats.write_csv(cfg.out, SWEEP_HEADER,
                          [[c.alpha, c.beta, c.rho_hat, c.diverged] for c in cells])
    _emit({"argmin_alpha": best.alpha, "argmin_beta": best.beta, "min_rho": best.rho_hat,
           "cells": len(cells), "dim": cfg.dim, "steps": cfg.steps,
           "mu": params.mu, "L": params.ell},
          _sibling(cfg.out, ".json") if cfg.out else None)
    return EXIT_OK


def _load_family(path) -> InterpFamily:
    try:
        X, G, F, xstar = formats.read_family(path)
        return InterpFamily(X=X, G=G, xstar=xstar, F=F)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def cmd_check(path, cfg: Config) -> int:
    params = cfg.params()
    fam = _load_family(path)
    verdict = check_family(fam, params, cfg.tol)
    points = []
    for i, r in enumerate(verdict.residuals):
        points.append({"index": i, "feasible": r.feasible(params, cfg.tol),
                       "rsi_residual": r.rsi_residual, "eb_residual": r.eb_residual,
                       "value_residual": r.value_residual if fam.F is not None else None,
                       "rsi_ratio": r.rsi_ratio, "eb_ratio": r.eb_ratio})
    _emit({"status": verdict.status, "feasible": verdict.feasible,
           "offending": verdict.offending, "values_consistent": verdict.values_consistent,
           "value_offending": verdict.value_offending, "points": points}, cfg.out)
    return EXIT_OK if verdict.feasible else EXIT_BOUND


def cmd_build(path, cfg: Config, samples: int) -> int:
    params = cfg.params()
    fam = _load_family(path)
    try:
        fn = build_interpolant(fam, params, cfg.tol)
    except InfeasibleFamily as exc:
        _emit({"error": str(exc), "offending": exc.offending}, cfg.out)
        return EXIT_BOUND
    rep = verify_membership(fn, samples=samples, seed=0 if cfg.seed is None else cfg.seed)
    report = {"mode": fn.mode, "epsilon": fn.epsilon, "beta": fn.beta,
              "samples": rep.samples, "min_rsi_residual": rep.min_rsi_residual,
              "min_eb_residual": rep.min_eb_residual, "max_interp_error": rep.max_interp_error,
              "max_value_error": rep.max_value_error, "ok": rep.ok(cfg.tol)}
    if fn.constants is not None:
        report.update({k: v for k, v in fn.constants.as_dict().items()
                       if k not in ("epsilon", "beta")})
    _emit(report, cfg.out)
    return EXIT_OK if rep.ok(cfg.tol) else EXIT_BOUND


def cmd_trace(path, cfg: Config, with_params: bool) -> int:
    try:
        X, G, _, xstar = formats.read_family(path)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    params = cfg.params() if with_params else None
    try:
        res = analyze_trace(X, G, xstar, params, cfg.tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.out:
        formats.write_csv(cfg.out, ["step", "rsi", "eb", "skipped"],
                          [[i, res.rsi[i], res.eb[i], bool(res.skipped[i])]
                           for i in range(res.rsi.size)])
    _emit({"mu_hat": res.mu_hat, "L_hat": res.L_hat, "kappa_hat": res.kappa_hat,
           "interpolable": res.interpolable, "within_class": res.within_class,
           "steps": int(res.rsi.size), "skipped": int(res.skipped.sum())},
          _sibling(cfg.out, ".json") if cfg.out else None)
    return EXIT_OK if res.interpolable else EXIT_BOUND


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secant-forge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mu=0.1, ell=1.0):
        p.add_argument("--mu", type=float, default=mu)
        p.add_argument("--L", type=float, default=ell, dest="ell")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)

    def run_opts(p):
        p.add_argument("--dim", type=int, default=64)
        p.add_argument("--steps", type=int, default=None)

    p = sub.add_parser("run", help="run one method against the resisting oracle")
    common(p)
    run_opts(p)
    p.add_argument("--method", choices=METHODS, default="gd")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--alpha0", type=float, default=None)

    p = sub.add_parser("sweep", help="heavy-ball (alpha, beta) grid against the oracle")
    common(p)
    run_opts(p)
    p.add_argument("--alpha-grid", type=parse_grid, default=(0.0, 0.2, 21))
    p.add_argument("--beta-grid", type=parse_grid, default=(0.0, 0.9, 21))

    p = sub.add_parser("check", help="check interpolation conditions of a family file")
    common(p)
    p.add_argument("family")

    p = sub.add_parser("build", help="build and verify an explicit interpolating function")
    common(p)
    p.add_argument("family")
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("trace", help="per-step RSI/EB ratios of a trace file")
    common(p, mu=None, ell=None)
    p.add_argument("trace")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    fields = {k: v for k, v in vars(args).items() if k in Config.__dataclass_fields__}
    cfg = Config(**fields)
    try:
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "check":
            return cmd_check(args.family, cfg)
        if args.command == "build":
            return cmd_build(args.family, cfg, args.samples)
        with_params = args.mu is not None or args.ell is not None
        cfg.mu = 0.1 if args.mu is None else args.mu
        cfg.ell = 1.0 if args.ell is None else args.ell
        return cmd_trace(args.trace, cfg, with_params)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
