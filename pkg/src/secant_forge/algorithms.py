"""First-order methods as maps from the full oracle history to the next iterate.

A history is a sequence of :class:`~secant_forge.core.OraclePoint`, oldest
first.  Methods see full coordinates; nothing restricts iterates to the span
of observed gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from secant_forge.core import ClassParams


def _last(history):
    if not history:
        raise ValueError("history must be non-empty")
    return history[-1]


def gd_step(history, alpha: float) -> np.ndarray:
    p = _last(history)
    return p.x - alpha * p.g


def gd_two_phase_step(history, params: ClassParams) -> np.ndarray:
    """Step ``1/(2 mu)`` out of the initial point, ``mu / L^2`` afterwards."""
    p = _last(history)
    if len(history) == 1:
        alpha = 1.0 / (2.0 * params.mu)
    else:
        alpha = params.mu / params.ell ** 2
    return p.x - alpha * p.g


def heavy_ball_step(history, alpha: float, beta: float) -> np.ndarray:
    p = _last(history)
    # x_{-1} := x_0, so the first step carries no momentum.
    prev = history[-2].x if len(history) > 1 else p.x
    return p.x - alpha * p.g + beta * (p.x - prev)


@dataclass(frozen=True)
class GradientDescent:
    alpha: float
    name: str = "gd"

    def __call__(self, history, params: ClassParams) -> np.ndarray:
        return gd_step(history, self.alpha)


@dataclass(frozen=True)
class TwoPhaseGD:
    name: str = "gd2"

    def __call__(self, history, params: ClassParams) -> np.ndarray:
        return gd_two_phase_step(history, params)


@dataclass(frozen=True)
class HeavyBall:
    alpha: float
    beta: float
    name: str = "hb"

    def __call__(self, history, params: ClassParams) -> np.ndarray:
        return heavy_ball_step(history, self.alpha, self.beta)


METHODS = ("gd", "gd2", "hb")


def make_method(name: str, params: ClassParams, alpha=None, beta=None):
    """Build a method from its config name; ``alpha`` defaults to ``mu / L^2``."""
    if alpha is None:
        alpha = params.mu / params.ell ** 2
    if name == "gd":
        return GradientDescent(alpha=alpha)
    if name == "gd2":
        return TwoPhaseGD()
    if name == "hb":
        return HeavyBall(alpha=alpha, beta=0.0 if beta is None else beta)
    raise ValueError(f"unknown method {name!r}; expected one of {METHODS}")
