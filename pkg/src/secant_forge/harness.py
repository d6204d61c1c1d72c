"""Algorithms against the resisting oracle: certified bounds and rate estimates."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from secant_forge.adversary import alpha0_interval, default_g0, open_session
from secant_forge.algorithms import GradientDescent, HeavyBall, TwoPhaseGD
from secant_forge.core import DEFAULT_TOL, ClassParams, OraclePoint
from secant_forge.geometry import farthest_on_sphere

DIVERGENCE_LIMIT = 1e150
BOUND_SLACK = 1e-9


@dataclass
class RunRecord:
    method: str
    params: ClassParams
    dim: int
    alpha0: float
    steps: int
    transcript: list
    iterates: list
    xstar: np.ndarray
    dist_sq: np.ndarray
    radii: np.ndarray
    g0_norm: float
    upper_ok: Optional[bool]
    uniform_lower_ok: bool
    per_step_lower_ok: bool
    per_step_dist_sq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    diverged: bool = False
    trivial: bool = False
    rho_hat: float = math.nan
    session: object = None

    @property
    def bounds(self) -> dict:
        return {"upper_ok": self.upper_ok,
                "uniform_lower_ok": self.uniform_lower_ok,
                "per_step_lower_ok": self.per_step_lower_ok}

    @property
    def all_bounds_ok(self) -> bool:
        return all(v for v in self.bounds.values() if v is not None)

    def csv_rows(self):
        """Rows for the run CSV; the final iterate has no oracle answer."""
        rows = []
        for i, dsq in enumerate(self.dist_sq):
            if i < len(self.transcript):
                p = self.transcript[i]
                f, gn = p.f, float(np.linalg.norm(p.g))
            else:
                f, gn = math.nan, math.nan
            rows.append([i, dsq, self.radii[i] ** 2, f, gn])
        return rows


RUN_HEADER = ["step", "dist_sq", "radius_sq", "f", "grad_norm"]


def default_alpha0(method, params: ClassParams) -> float:
    lo, hi = alpha0_interval(params)
    return hi if isinstance(method, TwoPhaseGD) else lo


def _is_tuned_gd(method, params: ClassParams) -> bool:
    return (isinstance(method, GradientDescent)
            and math.isclose(method.alpha, params.mu / params.ell ** 2, rel_tol=1e-12))


def _diverging(x) -> bool:
    return not np.all(np.isfinite(x)) or np.linalg.norm(x) > DIVERGENCE_LIMIT


def _upper_ok(method, params, dist_sq, g0_norm):
    q = params.contraction
    i = np.arange(dist_sq.size)
    if _is_tuned_gd(method, params):
        bound = q ** i * dist_sq[0]
        return bool(np.all(dist_sq <= bound * (1 + BOUND_SLACK)))
    if isinstance(method, TwoPhaseGD) and params.kappa >= math.sqrt(2.0):
        bound = g0_norm ** 2 / (4 * params.mu ** 2) * q ** (i[1:] - 1.0)
        return bool(np.all(dist_sq[1:] <= bound * (1 + BOUND_SLACK)))
    return None


def _trivial_run(method, params, dim, steps, g0_seed) -> RunRecord:
    """``L == mu``: run on ``mu/2 |x - x*|^2`` where every bound is trivial."""
    mu = params.mu
    g0 = default_g0(params, dim, 1.0 / mu, g0_seed)
    x0 = np.zeros(dim)
    xstar = x0 - g0 / mu
    history = [OraclePoint(x=x0, f=0.5 * mu * float(g0 @ g0) / mu ** 2, g=g0)]
    iterates = [x0]
    diverged = False
    for k in range(steps):
        x = method(history, params)
        iterates.append(x)
        if _diverging(x):
            diverged = True
            break
        if k < steps - 1:
            d = x - xstar
            history.append(OraclePoint(x=x, f=0.5 * mu * float(d @ d), g=mu * d))
    dist_sq = np.array([float((x - xstar) @ (x - xstar)) for x in iterates])
    return RunRecord(
        method=getattr(method, "name", "custom"), params=params, dim=dim, alpha0=1.0 / mu,
        steps=steps, transcript=history, iterates=iterates, xstar=xstar, dist_sq=dist_sq,
        radii=np.zeros(dist_sq.size), g0_norm=float(np.linalg.norm(g0)),
        upper_ok=_upper_ok(method, params, dist_sq, float(np.linalg.norm(g0))),
        uniform_lower_ok=True, per_step_lower_ok=True, diverged=diverged, trivial=True,
        rho_hat=math.inf if diverged else _safe_rate(dist_sq),
    )


def run_vs_adversary(method, params: ClassParams, dim: int, alpha0=None, steps=None,
                     g0_seed=None) -> RunRecord:
    """Run ``method`` from the origin against a fresh resisting oracle.

    ``steps`` iterations produce ``x_1 .. x_steps``; the oracle answers
    ``x_0 .. x_{steps-1}``, so ``steps <= dim - 1``.
    """
    steps = dim - 1 if steps is None else steps
    if steps < 1 or steps > dim - 1:
        raise ValueError(f"steps must be in [1, dim-1] = [1, {dim - 1}], got {steps}")
    if params.degenerate:
        return _trivial_run(method, params, dim, steps, g0_seed)
    if alpha0 is None:
        alpha0 = default_alpha0(method, params)

    session = open_session(params, dim, alpha0=alpha0, seed=g0_seed)
    history = [session.transcript[0]]
    iterates = [session.transcript[0].x]
    diverged = False
    for k in range(steps):
        x = np.asarray(method(history, params), dtype=float)
        iterates.append(x)
        if _diverging(x):
            diverged = True
            break
        if k < steps - 1:
            session.answer(x)
            history.append(session.transcript[-1])

    if diverged:
        iterates.pop()
    xstar = session.certify_minimizer(iterates[-1])
    dist_sq = np.array([float((x - xstar) @ (x - xstar)) for x in iterates])
    idx = np.arange(dist_sq.size)
    radii = session.initial_radius * params.contraction ** (idx / 2.0)

    # one x* for every step: |x_i - x*|^2 = |x_i - c_i|^2 + r_i^2 >= r_i^2
    uniform_ok = bool(np.all(dist_sq >= radii ** 2 * (1 - BOUND_SLACK)))
    # a fresh x* per step, farthest on the sphere the step was taken from
    per_step = np.array([
        float(np.sum((iterates[i] - farthest_on_sphere(session.spheres[i - 1], iterates[i])) ** 2))
        for i in range(1, len(iterates))
    ])
    per_step_ok = bool(np.all(per_step >= radii[:-1] ** 2 * (1 - BOUND_SLACK)))

    record = RunRecord(
        method=getattr(method, "name", "custom"), params=params, dim=dim,
        alpha0=float(alpha0), steps=steps, transcript=list(session.transcript),
        iterates=iterates, xstar=xstar, dist_sq=dist_sq, radii=radii,
        g0_norm=session.g0_norm,
        upper_ok=_upper_ok(method, params, dist_sq, session.g0_norm),
        uniform_lower_ok=uniform_ok, per_step_lower_ok=per_step_ok,
        per_step_dist_sq=per_step, diverged=diverged, session=session,
    )
    record.rho_hat = math.inf if diverged else _safe_rate(dist_sq)
    return record


def _safe_rate(dist_sq, burn_in=1):
    try:
        return estimate_rate(dist_sq, burn_in=burn_in)
    except ValueError:
        if dist_sq.size > 1 and dist_sq[0] > 0 and not np.any(dist_sq[1:]):
            return 0.0  # landed on the minimizer in one step
        return math.nan


def estimate_rate(record, burn_in: int = 1, method: str = "lstsq") -> float:
    """Per-step contraction of the squared distance.

    ``"lstsq"`` exponentiates the least-squares slope of ``log dist_sq[i]``
    over ``i >= burn_in``.  ``"endpoint"`` is ``(dist_sq[n] / dist_sq[burn_in])
    ** (1 / (n - burn_in))``, the normalized worst-case ratio itself.
    A window that reaches exactly zero means finite convergence and gives 0.
    """
    if isinstance(record, RunRecord):
        if record.diverged:
            return math.inf
        dist_sq = record.dist_sq
    else:
        dist_sq = np.asarray(record, dtype=float)
    y = dist_sq[burn_in:]
    if y.size < 2:
        raise ValueError("need at least two steps after burn-in")
    if not np.any(y > 0):
        raise ValueError("all distances are zero")
    if np.any(y <= 0):
        return 0.0
    if method == "endpoint":
        return float((y[-1] / y[0]) ** (1.0 / (y.size - 1)))
    if method != "lstsq":
        raise ValueError(f"unknown estimator {method!r}")
    i = np.arange(y.size, dtype=float)
    slope = np.polyfit(i, np.log(y), 1)[0]
    return float(math.exp(slope))


@dataclass(frozen=True)
class SweepCell:
    alpha: float
    beta: float
    rho_hat: float
    diverged: bool


def _sweep_cell(args):
    params, dim, steps, alpha, beta, estimator = args
    rec = run_vs_adversary(HeavyBall(alpha=alpha, beta=beta), params, dim, steps=steps)
    if rec.diverged:
        return SweepCell(alpha, beta, math.inf, True)
    rho = estimate_rate(rec, burn_in=0 if estimator == "endpoint" else 1, method=estimator)
    return SweepCell(alpha, beta, rho, False)


def sweep_workers() -> int:
    cap = os.environ.get("SECANT_FORGE_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def sweep_heavy_ball(params: ClassParams, dim: int, steps: int, alpha_grid, beta_grid,
                     workers: int = 1, estimator: str = "endpoint") -> list[SweepCell]:
    """Heavy-ball rates over an ``(alpha, beta)`` grid, one oracle session per cell.

    Each cell is a lower bound on the true worst-case rate of that tuning.
    The default estimator is the endpoint ratio over the whole run, which the
    lower-bound construction keeps at or above ``1 - mu^2/L^2``.
    """
    alpha_grid = [float(a) for a in alpha_grid]
    beta_grid = [float(b) for b in beta_grid]
    if not alpha_grid or not beta_grid:
        raise ValueError("grids must be non-empty")
    if steps > dim - 1:
        raise ValueError(f"steps must be <= dim - 1 = {dim - 1}")
    jobs = [(params, dim, steps, a, b, estimator) for a in alpha_grid for b in beta_grid]
    if workers <= 1 or len(jobs) < 8:
        return [_sweep_cell(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def sweep_argmin(cells) -> SweepCell:
    return min(cells, key=lambda c: (c.rho_hat, c.alpha, c.beta))


SWEEP_HEADER = ["alpha", "beta", "rho_hat", "diverged"]


@dataclass
class TraceAnalysis:
    rsi: np.ndarray
    eb: np.ndarray
    skipped: np.ndarray
    mu_hat: float
    L_hat: float
    kappa_hat: float
    interpolable: bool
    within_class: Optional[bool] = None


def analyze_trace(X, G, xstar, params: Optional[ClassParams] = None,
                  tol: float = DEFAULT_TOL) -> TraceAnalysis:
    """Per-step ``RSI_i = <g_i, x_i - x*> / |x_i - x*|^2`` and ``EB_i = |g_i| / |x_i - x*|``.

    Steps sitting exactly on ``xstar`` are skipped.  The trace is
    interpolable with ``(mu_hat, L_hat)`` whenever ``mu_hat > 0``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    G = np.atleast_2d(np.asarray(G, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("empty trace")
    if X.shape != G.shape:
        raise ValueError("X and G shapes differ")
    D = X - np.asarray(xstar, dtype=float)
    dsq = np.einsum("ij,ij->i", D, D)
    skipped = dsq == 0
    rsi = np.full(dsq.shape, math.nan)
    eb = np.full(dsq.shape, math.nan)
    ok = ~skipped
    rsi[ok] = np.einsum("ij,ij->i", G[ok], D[ok]) / dsq[ok]
    eb[ok] = np.linalg.norm(G[ok], axis=1) / np.sqrt(dsq[ok])
    if not np.any(ok):
        raise ValueError("every trace point coincides with xstar")
    mu_hat = float(np.min(rsi[ok]))
    L_hat = float(np.max(eb[ok]))
    within = None
    if params is not None:
        within = bool(mu_hat >= params.mu * (1 - tol) and L_hat <= params.ell * (1 + tol))
    return TraceAnalysis(rsi=rsi, eb=eb, skipped=skipped, mu_hat=mu_hat, L_hat=L_hat,
                         kappa_hat=L_hat / mu_hat if mu_hat > 0 else math.inf,
                         interpolable=mu_hat > 0, within_class=within)
