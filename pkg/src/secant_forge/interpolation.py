"""Interpolation of finite first-order families by functions of the class.

A family ``(x_i, g_i)`` with candidate minimizer ``x*`` is interpolable as
soon as each point on its own satisfies

    |g_i| <= L |x_i - x*|    and    <g_i, x_i - x*> >= mu |x_i - x*|^2

(there are no cross-point constraints).  :func:`build_interpolant` produces an
explicit interpolating function: a quadratic bowl around ``x*``, perturbed
inside small balls around each ``x_i`` by a cosine bump that tilts the
gradient to ``g_i`` at the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from secant_forge.core import DEFAULT_TOL, ClassParams, OraclePoint, residuals

CENTER_GUARD = 1e-300
TAYLOR_CONST = math.pi ** 2 / 4.0 - math.pi ** 4 / 48.0


class InfeasibleFamily(ValueError):
    def __init__(self, offending, message=None):
        self.offending = list(offending)
        super().__init__(message or f"family is not interpolable at indices {self.offending}")


@dataclass(frozen=True)
class InterpFamily:
    X: np.ndarray
    G: np.ndarray
    xstar: np.ndarray
    F: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        xstar = np.asarray(self.xstar, dtype=float)
        if X.shape != G.shape:
            raise ValueError(f"X and G shapes differ: {X.shape} vs {G.shape}")
        if xstar.shape != (X.shape[1],):
            raise ValueError("xstar dimension does not match the points")
        F = None
        if self.F is not None:
            F = np.asarray(self.F, dtype=float).reshape(-1)
            if F.size != X.shape[0]:
                raise ValueError("F must have one value per point")
        if len({row.tobytes() for row in X}) != X.shape[0]:
            raise ValueError("family points must be pairwise distinct")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "xstar", xstar)
        object.__setattr__(self, "F", F)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def point(self, i: int) -> OraclePoint:
        f = self.F[i] if self.F is not None else math.nan
        return OraclePoint(x=self.X[i], f=f, g=self.G[i])

    def subfamily(self, idx) -> "InterpFamily":
        idx = list(idx)
        F = None if self.F is None else self.F[idx]
        return InterpFamily(X=self.X[idx], G=self.G[idx], xstar=self.xstar, F=F)


@dataclass
class FamilyVerdict:
    status: str  # "feasible", "infeasible" or "inconclusive"
    residuals: list
    offending: list
    value_offending: list = field(default_factory=list)
    has_values: bool = False

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    @property
    def values_consistent(self) -> Optional[bool]:
        if not self.has_values:
            return None
        return not self.value_offending


def check_family(family: InterpFamily, params: ClassParams,
                 tol: float = DEFAULT_TOL) -> FamilyVerdict:
    """Check each point against ``X* = {xstar}``.

    Zero gradients away from ``xstar`` would be fine for a larger convex
    minimizer set containing those points; if those are the only failures
    the verdict is ``"inconclusive"`` rather than ``"infeasible"``.
    """
    res, offending, zero_grad, value_bad = [], [], [], []
    for i in range(family.n):
        r = residuals(family.point(i), family.xstar, params)
        res.append(r)
        if not r.feasible(params, tol):
            offending.append(i)
            if not np.any(family.G[i]):
                zero_grad.append(i)
        if family.F is not None and not r.value_consistent(params, tol):
            value_bad.append(i)
    if not offending:
        status = "feasible"
    elif len(zero_grad) == len(offending):
        status = "inconclusive"
    else:
        status = "infeasible"
    return FamilyVerdict(status=status, residuals=res, offending=offending,
                         value_offending=value_bad, has_values=family.F is not None)


@dataclass(frozen=True)
class InterpConstants:
    eps0: float
    eps1: float
    C0: float
    C1: float
    C2: float
    M0: float
    M1: float
    epsilon: float
    beta: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def select_constants(family: InterpFamily, params: ClassParams,
                     safety: float = 0.5) -> InterpConstants:
    """Ball radius ``epsilon`` and exponent ``beta`` small enough for membership.

    Both are ``safety`` times the smallest of the sufficient ceilings.
    """
    mu, L = params.mu, params.ell
    if not L > mu:
        raise ValueError("general construction needs L > mu")
    if family.n < 2:
        raise ValueError("general construction needs at least two points")
    dstar = np.linalg.norm(family.X - family.xstar, axis=1)
    if not np.any(dstar > 0):
        raise ValueError("every point is a minimizer; no perturbation needed")
    pair = np.linalg.norm(family.X[:, None, :] - family.X[None, :, :], axis=2)
    eps0 = 0.5 * float(np.min(pair[~np.eye(family.n, dtype=bool)]))
    eps1 = 0.5 * float(np.min(dstar[dstar > 0]))
    dmax = float(np.max(dstar))
    C0 = TAYLOR_CONST * (L - mu) / 2.0 * eps1
    C1 = mu + 3.0 * L
    C2 = math.pi ** 2 / 2.0 * (3.0 * L + mu) / 2.0 * dmax
    M0 = 4.0 * (mu + L) * dmax + (L + 3.0 * mu) * eps1
    M1 = C2 * (dmax + eps1)
    epsilon = safety * min(eps0, eps1, C0 / (2.0 * C1), C0 / (2.0 * M0))
    beta = safety * min(0.5, C0 / (2.0 * C2), C0 / (2.0 * M1))
    return InterpConstants(eps0=eps0, eps1=eps1, C0=C0, C1=C1, C2=C2, M0=M0, M1=M1,
                           epsilon=epsilon, beta=beta)


def bump(u, epsilon: float, beta: float):
    """``(1 + cos(pi (u/eps)^beta)) / 2`` on ``[0, eps]``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        t = np.exp(beta * np.log(u / epsilon))
    return 0.5 * (1.0 + np.cos(np.pi * t))


@dataclass(frozen=True)
class InterpFunction:
    family: InterpFamily
    params: ClassParams
    mode: str
    minimizer: np.ndarray
    constants: Optional[InterpConstants] = None
    offset: float = 0.0

    @property
    def epsilon(self) -> float:
        return self.constants.epsilon if self.constants else math.nan

    @property
    def beta(self) -> float:
        return self.constants.beta if self.constants else math.nan

    def evaluate(self, x):
        val, grad = self.evaluate_many(np.asarray(x, dtype=float)[None, :])
        return float(val[0]), grad[0]

    def evaluate_many(self, X):
        """Values and gradients at the rows of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        mu, L = self.params.mu, self.params.ell
        fam = self.family

        if self.mode in ("mu-equals-L", "all-minimizers"):
            diff = X - fam.xstar
            return 0.5 * mu * np.einsum("ij,ij->i", diff, diff), mu * diff

        if self.mode == "single-pair":
            xi, gi = fam.X[0], fam.G[0]
            diff = X - xi
            val = self.offset + diff @ gi + (mu + L) / 4.0 * np.einsum("ij,ij->i", diff, diff)
            return val, gi + (mu + L) / 2.0 * diff

        eps, beta = self.constants.epsilon, self.constants.beta
        diff = X - fam.xstar
        val = (mu + L) / 4.0 * np.einsum("ij,ij->i", diff, diff)
        grad = (mu + L) / 2.0 * diff

        dist = np.linalg.norm(X[:, None, :] - fam.X[None, :, :], axis=2)
        nearest = np.argmin(dist, axis=1)
        u = dist[np.arange(X.shape[0]), nearest]
        inside = np.flatnonzero(u < eps)
        if inside.size == 0:
            return val, grad

        idx = nearest[inside]
        ui = u[inside]
        tilt = fam.G[idx] - (mu + L) / 2.0 * (fam.X[idx] - fam.xstar)
        local = X[inside] - fam.X[idx]
        lam = bump(ui, eps, beta)
        val[inside] += lam * np.einsum("ij,ij->i", tilt, local)

        at_center = ui < CENTER_GUARD
        safe_u = np.where(at_center, 1.0, ui)
        e = local / safe_u[:, None]
        t = np.exp(beta * np.log(safe_u / eps))
        radial = -0.5 * np.pi * beta * t * np.sin(np.pi * t) * np.einsum("ij,ij->i", tilt, e)
        g_in = grad[inside] + lam[:, None] * tilt + radial[:, None] * e
        # removable singularity: the gradient tends to g_i at the center
        g_in[at_center] = fam.G[idx[at_center]]
        grad[inside] = g_in
        return val, grad


def build_interpolant(family: InterpFamily, params: ClassParams,
                      tol: float = DEFAULT_TOL) -> InterpFunction:
    """Explicit interpolating function for a feasible family.

    Raises :class:`InfeasibleFamily` when some point fails the conditions.
    """
    verdict = check_family(family, params, tol)
    if not verdict.feasible:
        raise InfeasibleFamily(verdict.offending)
    mu, L = params.mu, params.ell
    xstar = family.xstar
    dstar = family.X - xstar

    if params.degenerate:
        err = np.linalg.norm(family.G - mu * dstar, axis=1)
        bad = np.flatnonzero(err > tol * mu * np.maximum(np.linalg.norm(dstar, axis=1), 1e-300))
        if bad.size:
            raise InfeasibleFamily(bad.tolist(), "for L == mu every g_i must equal mu (x_i - x*)")
        return InterpFunction(family, params, "mu-equals-L", minimizer=xstar.copy())
    if not np.any(dstar):
        return InterpFunction(family, params, "all-minimizers", minimizer=xstar.copy())
    if family.n == 1:
        xi, gi = family.X[0], family.G[0]
        # constant shift so that f(x_i) carries the consistent value
        offset = (mu + L) / 4.0 * float(dstar[0] @ dstar[0])
        return InterpFunction(family, params, "single-pair",
                              minimizer=xi - 2.0 * gi / (mu + L), offset=offset)
    return InterpFunction(family, params, "general", minimizer=xstar.copy(),
                          constants=select_constants(family, params))


@dataclass
class MembershipReport:
    samples: int
    min_rsi_residual: float
    min_eb_residual: float
    worst_rsi_point: np.ndarray
    worst_eb_point: np.ndarray
    max_interp_error: float
    max_value_error: float

    def ok(self, tol: float = DEFAULT_TOL) -> bool:
        return self.min_rsi_residual >= -tol and self.min_eb_residual >= -tol


def _unit_rows(rng, n, d):
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def membership_samples(fn: InterpFunction, samples: int, rng) -> np.ndarray:
    """Test points stratified around the bumps and across the bowl.

    Inside each ball the radius fraction ``u / eps`` is drawn uniformly, then
    log-uniformly down to ``1e-290``, then just below 1; outside, just above
    the ball boundary and in a box around the family.
    """
    fam = fn.family
    d = fam.dim
    spread = max(float(np.max(np.linalg.norm(fam.X - fam.xstar, axis=1))), 1.0)
    if fn.mode != "general":
        n_near = samples // 4
        pts = fn.minimizer + spread * 2.0 * rng.uniform(-1, 1, (samples - n_near, d))
        near = fn.minimizer + _unit_rows(rng, n_near, d) * 10.0 ** rng.uniform(-12, 0, (n_near, 1))
        anchor = fam.X + spread * 1e-3 * _unit_rows(rng, fam.n, d)
        return np.vstack([pts, near, anchor])

    eps = fn.constants.epsilon
    n_inside = int(0.7 * samples)
    per_center = max(n_inside // fam.n, 3)
    blocks = []
    for xi in fam.X:
        k = per_center // 3
        fracs = np.concatenate([
            rng.uniform(0.0, 1.0, per_center - 2 * k),
            10.0 ** rng.uniform(-290, 0, k),
            1.0 - 10.0 ** rng.uniform(-15, -1, k),
        ])
        blocks.append(xi + (eps * fracs)[:, None] * _unit_rows(rng, fracs.size, d))
    n_rest = max(samples - per_center * fam.n, 2)
    n_edge = n_rest // 2
    which = rng.integers(0, fam.n, n_edge)
    fracs = 1.0 + 10.0 ** rng.uniform(-15, 0, n_edge)
    blocks.append(fam.X[which] + (eps * fracs)[:, None] * _unit_rows(rng, n_edge, d))
    lo = np.minimum(fam.X.min(axis=0), fam.xstar) - spread
    hi = np.maximum(fam.X.max(axis=0), fam.xstar) + spread
    blocks.append(rng.uniform(lo, hi, (n_rest - n_edge, d)))
    return np.vstack(blocks)


def verify_membership(fn: InterpFunction, samples: int = 10_000, seed: int = 0,
                      points=None) -> MembershipReport:
    """Sampled check of both class conditions, relative to the local scale.

    Residuals are normalized: ``(⟨g, d⟩ - mu |d|^2) / (mu |d|^2)`` and
    ``(L |d| - |g|) / (L |d|)`` with ``d = x - minimizer``.
    """
    rng = np.random.default_rng(seed)
    P = membership_samples(fn, samples, rng) if points is None else np.atleast_2d(points)
    _, grads = fn.evaluate_many(P)
    D = P - fn.minimizer
    dsq = np.einsum("ij,ij->i", D, D)
    keep = dsq > 0
    mu, L = fn.params.mu, fn.params.ell
    dn = np.sqrt(dsq[keep])
    rsi = (np.einsum("ij,ij->i", grads[keep], D[keep]) - mu * dsq[keep]) / (mu * dsq[keep])
    eb = (L * dn - np.linalg.norm(grads[keep], axis=1)) / (L * dn)
    kept = P[keep]

    vals, g_at = fn.evaluate_many(fn.family.X)
    interp_err = float(np.max(np.linalg.norm(g_at - fn.family.G, axis=1)))
    # mu/2 == (mu+L)/4 in the L == mu modes, so one target covers every mode
    target = (mu + L) / 4.0 * np.sum((fn.family.X - fn.family.xstar) ** 2, axis=1)
    value_err = float(np.max(np.abs(vals - target)))
    return MembershipReport(
        samples=int(P.shape[0]),
        min_rsi_residual=float(rsi.min()),
        min_eb_residual=float(eb.min()),
        worst_rsi_point=kept[int(np.argmin(rsi))],
        worst_eb_point=kept[int(np.argmin(eb))],
        max_interp_error=interp_err,
        max_value_error=value_err,
    )


def project_ball(x, center, radius: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    offset = x - center
    nrm = np.linalg.norm(offset)
    if nrm <= radius:
        return x.copy()
    return center + radius * offset / nrm


def projection_gap(x, x_i, xstar, xistar) -> tuple[float, float]:
    """``(|x - x* - (x_i - x_i*)|, 2 |x - x_i|)`` for projections onto one convex set."""
    x, x_i = np.asarray(x, dtype=float), np.asarray(x_i, dtype=float)
    lhs = float(np.linalg.norm(x - np.asarray(xstar) - (x_i - np.asarray(xistar))))
    return lhs, 2.0 * float(np.linalg.norm(x - x_i))
