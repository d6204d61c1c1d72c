import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secant_forge.core import (
    ClassParams,
    OraclePoint,
    break_even_steps,
    feasible_region,
    first_step_constant,
    gd_rate,
    residuals,
)

P = ClassParams(0.1, 1.0)


def test_params_validation():
    with pytest.raises(ValueError):
        ClassParams(0.0, 1.0)
    with pytest.raises(ValueError):
        ClassParams(1.0, 0.5)
    with pytest.raises(ValueError):
        ClassParams(float("nan"), 1.0)
    assert P.kappa == pytest.approx(10.0)
    assert ClassParams(1.0, 1.0).degenerate


def test_oracle_point_dimension_check():
    with pytest.raises(ValueError):
        OraclePoint(x=[1.0, 0.0], f=0.0, g=[1.0])


def test_residuals_boundary_feasible():
    r = residuals(OraclePoint([1, 0], 1.1 / 4, [0.1, 0]), [0, 0], P)
    assert r.rsi_residual == pytest.approx(0.0, abs=1e-15)
    assert r.eb_residual == pytest.approx(0.9)
    assert r.value_residual == pytest.approx(0.0, abs=1e-15)
    assert r.feasible(P)


def test_residuals_eb_violation():
    r = residuals(OraclePoint([1, 0], 0.275, [0, 2]), [0, 0], P)
    assert r.eb_residual == pytest.approx(-1.0)
    assert not r.feasible(P)


def test_residuals_rsi_violation():
    r = residuals(OraclePoint([1, 0], 0.275, [0.05, 0]), [0, 0], P)
    assert r.rsi_residual == pytest.approx(-0.05)
    assert not r.feasible(P)


def test_residuals_at_minimizer():
    r = residuals(OraclePoint([1, 1], 0.0, [0, 0]), [1, 1], P)
    assert not r.ratio_defined and math.isnan(r.rsi_ratio)
    assert r.feasible(P)
    r = residuals(OraclePoint([1, 1], 0.0, [1e-3, 0]), [1, 1], P)
    assert not r.feasible(P)


def test_residuals_dimension_mismatch():
    with pytest.raises(ValueError):
        residuals(OraclePoint([1, 0], 0.0, [0, 0]), [0, 0, 0], P)


def test_gd_rate_examples():
    assert gd_rate(P) == pytest.approx(0.99, abs=1e-15)
    assert gd_rate(ClassParams(2.0, 2.0)) == 0.0
    assert gd_rate(ClassParams(1.0, 10.0)) == pytest.approx(0.99, abs=1e-15)


def test_first_step_constant_examples():
    assert first_step_constant(ClassParams(1.0, 10.0)) == pytest.approx(100 / 198, rel=1e-14)
    assert first_step_constant(ClassParams(1.0, 100.0)) == pytest.approx(10000 / 19998, rel=1e-14)
    with pytest.raises(ValueError):
        first_step_constant(ClassParams(1.0, math.sqrt(2.0)))


def test_break_even_examples():
    n10 = break_even_steps(ClassParams(1.0, 10.0))
    assert n10 == pytest.approx(-math.log(2) / math.log(0.99) - 1, rel=1e-14)
    assert round(n10) == 68
    assert break_even_steps(ClassParams(1.0, 100.0)) == pytest.approx(6930, abs=1.0)
    assert break_even_steps(ClassParams(1.0, 2.0)) == pytest.approx(1.409, abs=5e-4)
    with pytest.raises(ValueError):
        break_even_steps(ClassParams(1.0, 1.2))


@given(st.floats(1.5, 1e3))
def test_break_even_halves(kappa):
    p = ClassParams(1.0, kappa)
    n = break_even_steps(p)
    assert (1 - 1 / kappa ** 2) ** (n + 1) == pytest.approx(0.5, rel=1e-9)


@given(st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
def test_gd_rate_properties(a, b):
    lo, hi = sorted((a, b))
    ell = 1.0
    assert 0.0 <= gd_rate(ClassParams(hi, ell)) <= gd_rate(ClassParams(lo, ell)) < 1.0


def test_feasible_region_examples():
    reg = feasible_region([0, 0], [1, 0], P)
    np.testing.assert_allclose(reg.rsi_center, [-5, 0])
    assert reg.rsi_radius == pytest.approx(5.0)
    np.testing.assert_allclose(reg.eb_center, [0, 0])
    assert reg.eb_radius == pytest.approx(1.0)
    assert reg.contains([-10, 0])
    assert not reg.contains([-0.5, 0])
    with pytest.raises(ValueError):
        feasible_region([0, 0], [0, 0], P)


def test_feasible_region_agrees_with_residuals():
    # Independent characterizations of one-point feasibility on 10^5 samples.
    rng = np.random.default_rng(1)
    n, d = 100_000, 3
    G = rng.standard_normal((n, d))
    S = rng.uniform(-12, 2, (n, d))
    x0 = np.zeros(d)
    agree = 0
    for g, s in zip(G[:2000], S[:2000]):
        reg = feasible_region(x0, g, P)
        r = residuals(OraclePoint(x0, 0.0, g), s, P)
        agree += reg.contains(s, tol=0) == r.feasible(P, tol=0)
    assert agree == 2000
    # vectorized sweep of the rest with the closed-form balls
    diff = x0 - S
    inner = np.einsum("ij,ij->i", G, diff)
    dsq = np.einsum("ij,ij->i", diff, diff)
    gn = np.linalg.norm(G, axis=1)
    by_res = (inner - P.mu * dsq >= 0) & (P.ell * np.sqrt(dsq) - gn >= 0)
    c = x0 - G / (2 * P.mu)
    in_rsi = np.linalg.norm(S - c, axis=1) <= gn / (2 * P.mu)
    out_eb = np.linalg.norm(S - x0, axis=1) >= gn / P.ell
    mismatch = by_res != (in_rsi & out_eb)
    # disagreements can only come from rounding on the sphere boundaries
    if mismatch.any():
        edge = np.minimum(np.abs(np.linalg.norm(S - c, axis=1) - gn / (2 * P.mu)),
                          np.abs(np.linalg.norm(S - x0, axis=1) - gn / P.ell))
        assert np.all(edge[mismatch] < 1e-9)


@settings(max_examples=200)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_boundary_gradient_family_is_feasible(xs, t, s):
    # g = a (x - x*) + perpendicular part stays feasible iff it obeys both balls
    x = np.array(xs)
    if np.linalg.norm(x) < 1e-3:
        return
    mu, L = P.mu, P.ell
    a = mu + t * (L - mu)
    perp = np.cross(x, [1.0, 2.0, 3.0])
    if np.linalg.norm(perp) < 1e-9:
        return
    perp /= np.linalg.norm(perp)
    room = math.sqrt(max(L ** 2 - a ** 2, 0.0)) * np.linalg.norm(x)
    g = a * x + s * room * perp
    r = residuals(OraclePoint(x, 0.0, g), np.zeros(3), P)
    assert r.feasible(P)
    assert feasible_region(x, g, P).contains(np.zeros(3), tol=1e-9)
