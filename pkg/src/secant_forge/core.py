"""Class parameters, per-point condition residuals and closed-form rates.

The function class studied throughout the package is the intersection of

* the lower restricted secant inequality ``<grad f(x), x - x*> >= mu |x - x*|^2``
* the upper error bound ``|grad f(x)| <= L |x - x*|``

where ``x*`` is the projection of ``x`` onto the minimizer set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ClassParams:
    """The pair ``(mu, L)``; ``ell`` is the error-bound modulus ``L``."""

    mu: float
    ell: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.ell)):
            raise ValueError("mu and L must be finite")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.ell < self.mu:
            # The class has no point with x != x* in that regime.
            raise ValueError(f"L must be >= mu, got mu={self.mu}, L={self.ell}")

    @property
    def kappa(self) -> float:
        return self.ell / self.mu

    @property
    def contraction(self) -> float:
        """``1 - mu^2 / L^2``, the squared-distance factor gradient descent achieves."""
        return 1.0 - (self.mu / self.ell) ** 2

    @property
    def degenerate(self) -> bool:
        return self.ell == self.mu


@dataclass(frozen=True)
class OraclePoint:
    """One first-order observation ``(x, f(x), grad f(x))``."""

    x: np.ndarray
    f: float
    g: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("x must be a non-empty vector")
        if g.shape != x.shape:
            raise ValueError(f"dimension mismatch: x has {x.size}, g has {g.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "f", float(self.f))

    @property
    def dim(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class ConditionResiduals:
    rsi_residual: float
    eb_residual: float
    value_residual: float
    rsi_ratio: float
    eb_ratio: float
    dist: float
    ratio_defined: bool

    def feasible(self, params: ClassParams, tol: float = DEFAULT_TOL) -> bool:
        """Per-point feasibility, with ``tol`` relative to ``mu d^2`` and ``L d``.

        At ``x = x*`` both scales vanish, so feasibility there means ``g = 0``.
        """
        d = self.dist
        return (self.rsi_residual >= -tol * params.mu * d * d
                and self.eb_residual >= -tol * params.ell * d)

    def value_consistent(self, params: ClassParams, tol: float = DEFAULT_TOL) -> bool:
        scale = (params.mu + params.ell) / 4.0 * self.dist ** 2
        return abs(self.value_residual) <= tol * max(scale, 1e-300)


def _as_vector(v, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return v


def residuals(p: OraclePoint, xstar, params: ClassParams) -> ConditionResiduals:
    xstar = _as_vector(xstar, "xstar")
    if xstar.shape != p.x.shape:
        raise ValueError(f"dimension mismatch: x has {p.x.size}, xstar has {xstar.size}")
    diff = p.x - xstar
    dist_sq = float(diff @ diff)
    dist = math.sqrt(dist_sq)
    inner = float(p.g @ diff)
    gnorm = float(np.linalg.norm(p.g))
    defined = dist > 0.0
    return ConditionResiduals(
        rsi_residual=inner - params.mu * dist_sq,
        eb_residual=params.ell * dist - gnorm,
        value_residual=p.f - (params.mu + params.ell) / 4.0 * dist_sq,
        rsi_ratio=inner / dist_sq if defined else math.nan,
        eb_ratio=gnorm / dist if defined else math.nan,
        dist=dist,
        ratio_defined=defined,
    )


def gd_rate(params: ClassParams) -> float:
    return params.contraction


def _require_above_sqrt2(params: ClassParams):
    if not params.kappa > math.sqrt(2.0):
        raise ValueError(f"requires L/mu > sqrt(2), got L/mu = {params.kappa}")


def first_step_constant(params: ClassParams) -> float:
    """Gain ``L^2 / (2 (L^2 - mu^2))`` of the ``1/(2 mu)`` first step over plain GD."""
    _require_above_sqrt2(params)
    L2, m2 = params.ell ** 2, params.mu ** 2
    return L2 / (2.0 * (L2 - m2))


def break_even_steps(params: ClassParams) -> float:
    """Number of GD steps needed to make up a factor 2; real-valued, not rounded."""
    _require_above_sqrt2(params)
    return -math.log(2.0) / math.log1p(-(params.mu / params.ell) ** 2) - 1.0


@dataclass(frozen=True)
class FeasibleRegion:
    """Where the minimizer may lie after observing ``g0`` at ``x0``.

    ``x*`` must be in the closed ball ``rsi_center, rsi_radius`` and outside
    the open ball ``eb_center, eb_radius``.
    """

    rsi_center: np.ndarray
    rsi_radius: float
    eb_center: np.ndarray
    eb_radius: float

    def contains(self, xstar, tol: float = DEFAULT_TOL) -> bool:
        xstar = _as_vector(xstar, "xstar")
        in_rsi = np.linalg.norm(xstar - self.rsi_center) <= self.rsi_radius * (1.0 + tol)
        out_eb = np.linalg.norm(xstar - self.eb_center) >= self.eb_radius * (1.0 - tol)
        return bool(in_rsi and out_eb)


def feasible_region(x0, g0, params: ClassParams) -> FeasibleRegion:
    x0 = _as_vector(x0, "x0")
    g0 = _as_vector(g0, "g0")
    if g0.shape != x0.shape:
        raise ValueError("dimension mismatch between x0 and g0")
    gnorm = float(np.linalg.norm(g0))
    if gnorm == 0.0:
        raise ValueError("g0 must be non-zero")
    return FeasibleRegion(
        rsi_center=x0 - g0 / (2.0 * params.mu),
        rsi_radius=gnorm / (2.0 * params.mu),
        eb_center=x0.copy(),
        eb_radius=gnorm / params.ell,
    )
