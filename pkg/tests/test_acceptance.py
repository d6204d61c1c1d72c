"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line with its runtime.  Run
``python3 tests/test_acceptance.py`` for just the summary lines, or
``pytest tests/test_acceptance.py -v -s``.
"""

import math
import sys
import time

import numpy as np
import pytest

from secant_forge.adversary import open_session
from secant_forge.algorithms import GradientDescent, HeavyBall, TwoPhaseGD
from secant_forge.core import ClassParams, break_even_steps
from secant_forge.harness import run_vs_adversary, sweep_argmin, sweep_heavy_ball, sweep_workers
from secant_forge.interpolation import (
    InterpFamily,
    build_interpolant,
    check_family,
    projection_gap,
    project_ball,
    verify_membership,
)

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from oracles import random_feasible_family  # noqa: E402

P = ClassParams(0.1, 1.0)
LINES = []  # collected for the pytest terminal summary


def report(num, title, checks, elapsed, limit):
    """Print one line; ``checks`` maps a short label to a bool."""
    failed = [k for k, v in checks.items() if not v]
    fast = elapsed < limit
    ok = not failed and fast
    why = "" if ok else "  <- " + ", ".join(failed + ([] if fast else [f"runtime>{limit}s"]))
    line = f"[{'PASS' if ok else 'FAIL'}] {num}. {title} ({elapsed:.2f}s < {limit}s){why}"
    LINES.append(line)
    print(line, flush=True)
    return ok


def criterion_1():
    t = time.perf_counter()
    alpha0 = 0.1
    s = open_session(P, 64, alpha0=alpha0)
    rng = np.random.default_rng(0)
    worst = abs(s.sphere.radius / s.expected_radius(0) - 1)
    for i in range(1, 63):
        s.answer(rng.standard_normal(64))
        want = math.sqrt(alpha0 / P.mu - alpha0 ** 2) * s.g0_norm * 0.99 ** (i / 2)
        worst = max(worst, abs(s.sphere.radius - want) / want)
    return report(1, "radius recursion, d=64, i<=62",
                  {f"rel err {worst:.1e} <= 1e-12": worst <= 1e-12},
                  time.perf_counter() - t, 1.0)


def criterion_2():
    t = time.perf_counter()
    rec = run_vs_adversary(GradientDescent(0.1), P, 32, alpha0=0.1, steps=31)
    ratio = rec.dist_sq / rec.dist_sq[0]
    i = np.arange(ratio.size)
    upper = bool(np.all(ratio <= 0.99 ** i * (1 + 1e-9)))
    lower = bool(np.all(ratio >= 0.99 ** (i + 1) * (1 - 1e-9)))
    r_prev = rec.radii[:-1] ** 2
    antipodal = bool(np.all(rec.per_step_dist_sq >= r_prev * (1 - 1e-9)))
    return report(2, "tightness sandwich, GD alpha=0.1 vs oracle, d=32",
                  {"upper": upper, "lower": lower, "per-step antipodal": antipodal,
                   "31 steps": rec.per_step_dist_sq.size == 31},
                  time.perf_counter() - t, 1.0)


def criterion_3():
    t = time.perf_counter()
    rec = run_vs_adversary(TwoPhaseGD(), P, 32)
    base = rec.g0_norm ** 2 / (4 * P.mu ** 2)
    first = abs(rec.dist_sq[1] / base - 1) <= 1e-9
    i = np.arange(1, 32)
    tail = bool(np.all(np.abs(rec.dist_sq[1:] / (base * 0.99 ** (i - 1)) - 1) <= 1e-9))
    n = break_even_steps(ClassParams(1.0, 10.0))
    return report(3, "first-step optimality, two-phase GD; break-even kappa=10",
                  {"dist_sq[1]": first, "dist_sq[i], i<=31": tail,
                   f"break_even={n:.4f} in [68, 69)": 68 <= n < 69},
                  time.perf_counter() - t, 1.0)


def criterion_4():
    t = time.perf_counter()
    methods = [GradientDescent(0.05), GradientDescent(0.1), GradientDescent(0.15),
               TwoPhaseGD(), HeavyBall(0.1, 0.3), HeavyBall(0.05, 0.8)]
    checks = {}
    for m in methods:
        label = f"{m.name}{'' if isinstance(m, TwoPhaseGD) else vars(m)}"
        checks[label] = run_vs_adversary(m, P, 64).per_step_lower_ok
    return report(4, "universal lower bound, six methods, d=64", checks,
                  time.perf_counter() - t, 5.0)


def criterion_5():
    t = time.perf_counter()
    alphas, betas = np.linspace(0.02, 0.2, 21), np.linspace(0.0, 0.9, 21)
    cells = sweep_heavy_ball(P, 64, 63, alphas, betas, workers=sweep_workers())
    best = sweep_argmin(cells)
    live = [c.rho_hat for c in cells if not c.diverged]
    # 0.1 is not a node of this grid; its nearest node is 0.101
    nearest = float(alphas[np.argmin(np.abs(alphas - 0.1))])
    elapsed = time.perf_counter() - t
    return report(5, "heavy-ball 21x21 sweep, d=64, 63 steps",
                  {f"argmin=({best.alpha:.3f},{best.beta:g}) at (~0.1, 0)":
                       best.beta == 0.0 and best.alpha == nearest
                       and abs(best.alpha - 0.1) <= 0.5 * (alphas[1] - alphas[0]),
                   f"min_rho={best.rho_hat:.9f}": abs(best.rho_hat - 0.99) <= 1e-6,
                   "floor": min(live) >= 0.99 - 1e-6,
                   "441 cells": len(cells) == 441},
                  elapsed, 60.0)


def criterion_6():
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_fd = worst_cont = 0.0
    worst_rsi = worst_eb = math.inf
    analytic = True
    for _ in range(20):
        X, G, xs = random_feasible_family(rng, 5, 4, P.mu, P.ell)
        fn = build_interpolant(InterpFamily(X=X, G=G, xstar=xs), P)
        eps = fn.epsilon
        _, g_at = fn.evaluate_many(X)
        analytic &= bool(np.array_equal(g_at, G))
        for xi in X:
            # finite differences at an off-center point of each ball
            e = rng.standard_normal(4)
            e /= np.linalg.norm(e)
            x = xi + 0.5 * eps * e
            g = fn.evaluate(x)[1]
            h = 1e-6
            fd = np.array([(fn.evaluate(x + h * b)[0] - fn.evaluate(x - h * b)[0]) / (2 * h)
                           for b in np.eye(4)])
            worst_fd = max(worst_fd, float(np.linalg.norm(fd - g)))
            u = rng.standard_normal((100, 4))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            v_in = fn.evaluate_many(xi + eps * (1 - 1e-12) * u)[0]
            v_out = fn.evaluate_many(xi + eps * (1 + 1e-12) * u)[0]
            worst_cont = max(worst_cont, float(np.max(np.abs(v_in - v_out))))
        rep = verify_membership(fn, samples=10_000, seed=int(rng.integers(1 << 31)))
        worst_rsi = min(worst_rsi, rep.min_rsi_residual)
        worst_eb = min(worst_eb, rep.min_eb_residual)
    return report(6, "interpolant builder, 20 families d=4 n=5",
                  {"grad(x_i)=g_i analytic": analytic,
                   f"fd err {worst_fd:.1e} <= 1e-5": worst_fd <= 1e-5,
                   f"continuity {worst_cont:.1e} <= 1e-10": worst_cont <= 1e-10,
                   f"min residuals ({worst_rsi:.1e},{worst_eb:.1e}) >= -1e-9":
                       min(worst_rsi, worst_eb) >= -1e-9},
                  time.perf_counter() - t, 30.0)


def criterion_7():
    t = time.perf_counter()
    ok_all = True
    rng = np.random.default_rng(7)
    runs = [run_vs_adversary(m, P, 32) for m in
            (GradientDescent(0.1), TwoPhaseGD(), HeavyBall(0.05, 0.8), HeavyBall(0.18, 0.6))]
    sessions = [r.session for r in runs]
    for k in range(8):
        s = open_session(P, 16, alpha0=float(rng.uniform(0.1, 5.0)), seed=k)
        for j in range(14):
            x = (s.transcript[j // 2].x.copy() if j % 5 == 4
                 else s.sphere.center + rng.standard_normal(16) * rng.uniform(0.0, 2.0))
            s.answer(x)
        sessions.append(s)
    for s in sessions:
        X, F, G = s.transcript_arrays(unique=True)
        xs = s.certify_minimizer(s.transcript[-1].x)
        v = check_family(InterpFamily(X=X, G=G, xstar=xs, F=F), P, 1e-9)
        ok_all &= v.feasible and bool(v.values_consistent)
    return report(7, f"transcript interpolability, {len(sessions)} sessions",
                  {"feasible and value-consistent": ok_all}, time.perf_counter() - t, 1.0)


def criterion_8():
    t = time.perf_counter()
    rng = np.random.default_rng(8)
    worst = -math.inf
    for _ in range(100_000):
        d = int(rng.integers(1, 6))
        c, r = rng.standard_normal(d), float(rng.uniform(0.0, 2.0))
        x, xi = 3 * rng.standard_normal(d), 3 * rng.standard_normal(d)
        lhs, rhs = projection_gap(x, xi, project_ball(x, c, r), project_ball(xi, c, r))
        worst = max(worst, lhs - rhs)
    return report(8, "projection-difference inequality, 1e5 ball trials",
                  {f"max(lhs-rhs)={worst:.2e} <= 0": worst <= 1e-12},
                  time.perf_counter() - t, 5.0)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
