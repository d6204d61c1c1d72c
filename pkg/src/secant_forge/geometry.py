"""Nested spheres living in affine subspaces.

A :class:`SphereState` is the set ``{center + radius * u}`` where ``u`` ranges
over unit vectors of ``span(basis)``.  The rows of ``basis`` are orthonormal
and span the direction space of the supporting affine subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-12
SPAN_TOL = 1e-9
DEGENERATE_TOL = 1e-12


def gram_schmidt(rows):
    """Modified Gram-Schmidt on the rows of ``rows`` (two passes)."""
    Q = np.array(rows, dtype=float, copy=True)
    for _ in range(2):
        for i in range(Q.shape[0]):
            for j in range(i):
                Q[i] -= (Q[i] @ Q[j]) * Q[j]
            nrm = np.linalg.norm(Q[i])
            if nrm == 0.0:
                raise ValueError("rows are linearly dependent")
            Q[i] /= nrm
    return Q


def orthonormality_defect(basis) -> float:
    if basis.shape[0] == 0:
        return 0.0
    G = basis @ basis.T
    return float(np.max(np.abs(G - np.eye(basis.shape[0]))))


def householder_complement(basis, coef):
    """Orthonormal rows spanning ``{b in span(basis) : b perp basis.T @ coef}``.

    ``coef`` must be a unit vector of coordinates in ``basis``. A Householder
    reflection sends ``coef`` onto the first axis; the remaining reflected rows
    are the complement.  When ``coef`` is the first axis this simply drops the
    first basis vector.
    """
    k = basis.shape[0]
    w = np.array(coef, dtype=float, copy=True)
    w[0] += 1.0 if w[0] >= 0 else -1.0
    w /= np.linalg.norm(w)
    reflected = basis - 2.0 * np.outer(w, w @ basis)
    out = reflected[1:k]
    if orthonormality_defect(out) > ORTHO_TOL:
        out = gram_schmidt(out)
    return out


@dataclass(frozen=True)
class SphereState:
    center: np.ndarray
    radius: float
    basis: np.ndarray
    level: int = 0

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or (basis.size and basis.shape[1] != center.size):
            raise ValueError("basis must be a (k, d) array matching the center")
        if basis.size == 0:
            basis = basis.reshape(0, center.size)
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if orthonormality_defect(basis) > ORTHO_TOL:
            basis = gram_schmidt(basis)
        center.setflags(write=False)
        basis.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def subspace_dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, x, tol: float = 1e-10) -> bool:
        """Membership up to an absolute tolerance scaled by ``max(radius, 1)``."""
        x = np.asarray(x, dtype=float)
        diff = x - self.center
        coef = self.basis @ diff
        off = np.linalg.norm(diff - self.basis.T @ coef)
        scale = max(self.radius, 1.0)
        return bool(off <= tol * scale
                    and abs(np.linalg.norm(coef) - self.radius) <= tol * scale)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` points drawn uniformly from the sphere, one per row."""
        coef = rng.standard_normal((n, self.subspace_dim))
        coef /= np.linalg.norm(coef, axis=1, keepdims=True)
        return self.center + self.radius * (coef @ self.basis)


def sphere_in_hyperplane(center, radius, normal) -> SphereState:
    """The sphere of ``radius`` around ``center`` inside the hyperplane ``perp normal``."""
    normal = np.asarray(normal, dtype=float)
    nrm = np.linalg.norm(normal)
    if nrm == 0.0:
        raise ValueError("normal must be non-zero")
    full = np.eye(normal.size)
    basis = householder_complement(full, normal / nrm)
    return SphereState(center=center, radius=radius, basis=basis, level=0)


def project_affine(x, s: SphereState) -> np.ndarray:
    """Orthogonal projection of ``x`` onto ``center + span(basis)``."""
    x = np.asarray(x, dtype=float)
    if x.shape != s.center.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {s.dim}")
    return s.center + (s.basis @ (x - s.center)) @ s.basis


def slice_sphere(s: SphereState, v, offset_ratio: float) -> SphereState:
    """Intersect ``s`` with the hyperplane ``<x - center, v> = -offset_ratio * radius``.

    The result is centered at ``center - offset_ratio * radius * v`` and has
    radius ``radius * sqrt(1 - offset_ratio^2)``.
    """
    if not abs(offset_ratio) < 1.0:
        raise ValueError(f"|offset_ratio| must be < 1, got {offset_ratio}")
    if s.subspace_dim == 0:
        raise ValueError("cannot slice a sphere with an empty basis")
    v = np.asarray(v, dtype=float)
    coef = s.basis @ v
    if np.linalg.norm(v - s.basis.T @ coef) > SPAN_TOL:
        raise ValueError("v is not in the span of the sphere's basis")
    nrm = np.linalg.norm(coef)
    if abs(nrm - 1.0) > SPAN_TOL:
        raise ValueError("v must be a unit vector")
    coef = coef / nrm
    v = coef @ s.basis
    return SphereState(
        center=s.center - offset_ratio * s.radius * v,
        radius=s.radius * math.sqrt(1.0 - offset_ratio * offset_ratio),
        basis=householder_complement(s.basis, coef),
        level=s.level + 1,
    )


def farthest_on_sphere(s: SphereState, x) -> np.ndarray:
    """Point of ``s`` maximizing the distance to ``x``.

    When ``x - center`` has no component in ``span(basis)`` every sphere point
    is equally far, and ``center + radius * basis[0]`` is returned.
    """
    if s.subspace_dim == 0:
        raise ValueError("sphere has an empty basis")
    x = np.asarray(x, dtype=float)
    if x.shape != s.center.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {s.dim}")
    coef = s.basis @ (x - s.center)
    nrm = np.linalg.norm(coef)
    if nrm < DEGENERATE_TOL * s.radius or nrm == 0.0:
        return s.center + s.radius * s.basis[0]
    return s.center - s.radius * ((coef / nrm) @ s.basis)
