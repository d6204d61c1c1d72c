"""Resisting first-order oracle.

The oracle keeps a shrinking sphere of minimizer locations that are all still
consistent with every answer given so far.  Each new query ``x`` is answered
with a gradient of norm exactly ``L |x - x*|`` for every ``x*`` left on the
sphere, and a function value ``(mu + L) / 4 |x - x*|^2``, so the transcript
is interpolable by a function of the class minimized at any surviving point.

Usage::

    session = open_session(params, dim=64, x0=np.zeros(64), alpha0=0.1)
    answer = session.answer(x1)
    xstar = session.certify_minimizer(x_last)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from secant_forge.core import ClassParams, OraclePoint
from secant_forge.geometry import (
    DEGENERATE_TOL,
    SphereState,
    farthest_on_sphere,
    slice_sphere,
    sphere_in_hyperplane,
)

ALPHA0_SLACK = 1e-12


class BudgetExhausted(RuntimeError):
    """Raised when more than ``dim - 1`` queries are made in one session."""


@dataclass(frozen=True)
class OracleAnswer:
    f: float
    g: np.ndarray


def alpha0_interval(params: ClassParams) -> tuple[float, float]:
    lo = params.mu / params.ell ** 2
    return lo, max(lo, 1.0 / (2.0 * params.mu))


def default_g0(params: ClassParams, dim: int, alpha0: float, seed=None) -> np.ndarray:
    """Initial gradient scaled so that ``|x0 - x*| = 1`` on the first sphere.

    With ``seed=None`` the direction is the first axis, otherwise a seeded
    uniformly random unit direction.
    """
    if seed is None:
        direction = np.zeros(dim)
        direction[0] = 1.0
    else:
        direction = np.random.default_rng(seed).standard_normal(dim)
        direction /= np.linalg.norm(direction)
    return math.sqrt(params.mu / alpha0) * direction


@dataclass
class AdversarySession:
    params: ClassParams
    alpha0: float
    dim: int
    sphere: SphereState
    transcript: list = field(default_factory=list)
    g0_norm: float = 0.0
    query_count: int = 0
    # spheres[i] is the sphere after the i-th answer
    spheres: list = field(default_factory=list)

    @property
    def budget(self) -> int:
        return self.dim - 1

    @property
    def initial_radius(self) -> float:
        a = self.alpha0
        return math.sqrt(a / self.params.mu - a * a) * self.g0_norm

    def expected_radius(self, i: int) -> float:
        """Closed-form radius after ``i`` inductive answers."""
        return self.initial_radius * self.params.contraction ** (i / 2.0)

    def answer(self, x_next) -> OracleAnswer:
        x = np.asarray(x_next, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {x.shape}")
        if self.query_count >= self.budget:
            raise BudgetExhausted(
                f"query budget of {self.budget} answers exhausted (dim={self.dim})")
        mu, L = self.params.mu, self.params.ell
        ratio = mu / L
        s = self.sphere

        for prev in self.transcript:
            if np.array_equal(prev.x, x):
                # Earlier answers stay valid on every sub-sphere, so shrink
                # along an arbitrary in-sphere direction and repeat ourselves.
                self.sphere = slice_sphere(s, s.basis[0], ratio)
                return self._record(OraclePoint(x=x, f=prev.f, g=prev.g))

        coef = s.basis @ (x - s.center)
        nrm = np.linalg.norm(coef)
        if nrm < DEGENERATE_TOL * max(s.radius, 1.0):
            v = s.basis[0]
        else:
            v = (coef / nrm) @ s.basis
        new = slice_sphere(s, v, ratio)
        self.sphere = new

        offset = x - new.center
        dist_c_sq = float(offset @ offset)
        dist_c = math.sqrt(dist_c_sq)
        dist_star = math.sqrt(dist_c_sq + new.radius ** 2)
        f = (mu + L) / 4.0 * (dist_c_sq + (1.0 - ratio * ratio) * s.radius ** 2)
        g = L * (dist_star / dist_c) * offset
        return self._record(OraclePoint(x=x, f=f, g=g))

    def _record(self, point: OraclePoint) -> OracleAnswer:
        self.transcript.append(point)
        self.spheres.append(self.sphere)
        self.query_count += 1
        return OracleAnswer(f=point.f, g=point.g.copy())

    def certify_minimizer(self, x_query) -> np.ndarray:
        """A surviving minimizer at least ``radius`` away from ``x_query``."""
        if not self.transcript:
            raise ValueError("no query has been answered yet")
        return farthest_on_sphere(self.sphere, x_query)

    def transcript_arrays(self, unique: bool = False):
        """``(X, F, G)`` stacked from the transcript, optionally deduplicated."""
        pts = self.transcript
        if unique:
            seen, kept = set(), []
            for p in pts:
                key = p.x.tobytes()
                if key not in seen:
                    seen.add(key)
                    kept.append(p)
            pts = kept
        X = np.array([p.x for p in pts])
        F = np.array([p.f for p in pts])
        G = np.array([p.g for p in pts])
        return X, F, G


def open_session(params: ClassParams, dim: int, x0=None, alpha0=None, g0=None,
                 seed=None) -> AdversarySession:
    """Start a session and answer the query at ``x0``.

    ``alpha0`` defaults to ``mu / L^2`` and ``g0`` to :func:`default_g0`.
    """
    if params.degenerate:
        raise ValueError("the resisting oracle needs L > mu; for L == mu the bound is trivial")
    if dim < 3:
        raise ValueError(f"dim must be >= 3, got {dim}")
    lo, hi = alpha0_interval(params)
    if alpha0 is None:
        alpha0 = lo
    if not (lo * (1 - ALPHA0_SLACK) <= alpha0 <= hi * (1 + ALPHA0_SLACK)):
        raise ValueError(f"alpha0 must lie in [{lo}, {hi}], got {alpha0}")
    x0 = np.zeros(dim) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (dim,):
        raise ValueError("x0 has the wrong dimension")
    g0 = default_g0(params, dim, alpha0, seed) if g0 is None else np.asarray(g0, dtype=float)
    if g0.shape != (dim,):
        raise ValueError("g0 has the wrong dimension")
    g0_norm = float(np.linalg.norm(g0))
    if g0_norm == 0.0:
        raise ValueError("g0 must be non-zero")

    mu, L = params.mu, params.ell
    radius = math.sqrt(alpha0 / mu - alpha0 ** 2) * g0_norm
    sphere = sphere_in_hyperplane(x0 - alpha0 * g0, radius, g0)
    session = AdversarySession(params=params, alpha0=float(alpha0), dim=dim,
                               sphere=sphere, g0_norm=g0_norm)
    f0 = (mu + L) / (4.0 * mu) * alpha0 * g0_norm ** 2
    session._record(OraclePoint(x=x0, f=f0, g=g0))
    return session


TRANSCRIPT_COLUMNS = ("step", "f", "grad_norm", "dist_to_center", "radius")


def transcript_header(dim: int) -> list[str]:
    return (list(TRANSCRIPT_COLUMNS)
            + [f"x{k + 1}" for k in range(dim)]
            + [f"g{k + 1}" for k in range(dim)])


def transcript_rows(session: AdversarySession):
    """Rows of the transcript export, matching :func:`transcript_header`.

    ``dist_to_center`` and ``radius`` refer to the sphere in force right
    after the point was answered.
    """
    rows = []
    for step, (p, s) in enumerate(zip(session.transcript, session.spheres)):
        rows.append([step, p.f, float(np.linalg.norm(p.g)),
                     float(np.linalg.norm(p.x - s.center)), s.radius,
                     *p.x.tolist(), *p.g.tolist()])
    return rows
