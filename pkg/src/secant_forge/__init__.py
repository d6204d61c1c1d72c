"""Worst-case analysis toolkit for first-order methods on RSI⁻(μ) ∩ EB⁺(L).

A resisting oracle certifies lower bounds against any first-order method,
an interpolation checker and builder decide and realize class membership of
finite families, and a harness runs reference methods against the oracle.
"""

from secant_forge.adversary import AdversarySession, BudgetExhausted, open_session
from secant_forge.algorithms import GradientDescent, HeavyBall, TwoPhaseGD, make_method
from secant_forge.core import ClassParams, OraclePoint, gd_rate, residuals
from secant_forge.geometry import SphereState
from secant_forge.harness import RunRecord, estimate_rate, run_vs_adversary, sweep_heavy_ball
from secant_forge.interpolation import InterpFamily, build_interpolant, check_family

__version__ = "0.1.0"

__all__ = [
    "AdversarySession", "BudgetExhausted", "ClassParams", "GradientDescent", "HeavyBall",
    "InterpFamily", "OraclePoint", "RunRecord", "SphereState", "TwoPhaseGD",
    "build_interpolant", "check_family", "estimate_rate", "gd_rate", "make_method",
    "open_session", "residuals", "run_vs_adversary", "sweep_heavy_ball",
]
