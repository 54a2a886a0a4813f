"""Modulation functions of pulse sequences and their harmonic content.

The elementary block is one period ``T`` with two pi-pulses centred at
``T/4`` and ``3T/4``.  Outside pulse windows the modulation function
``F_z`` is +1, -1, +1; inside the n-th window it follows a pulse profile
scaled by ``(-1)^(n+1)`` so that ``F_z`` runs continuously +1 -> -1 -> +1.
Harmonic weights are

    f_l = (2/T) int_0^T F_z(s) cos(l omega_m s) ds,   omega_m = 2 pi / T.

Closed forms cover instantaneous and top-hat pulses; the general numeric
path integrates constant segments exactly and pulse windows by composite
Gauss-Legendre quadrature with a panel count that scales with the number
of carrier oscillations inside the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureNotConverged",
    "SequencePlan",
    "ModulationFunction",
    "instantaneous_modulation",
    "tophat_modulation",
    "shaped_modulation",
    "f_l_instantaneous",
    "f_l_tophat",
    "f_l_numeric",
    "required_alpha",
]

TWO_PI = 2.0 * np.pi

# 8-point Gauss-Legendre rule on [-1, 1], reused across panels.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class QuadratureNotConverged(RuntimeError):
    """Refinement exhausted before the requested tolerance was met."""


@dataclass(frozen=True)
class SequencePlan:
    """Timing plan of a periodic two-pulse decoupling block.

    Parameters
    ----------
    period : float
        Base period ``T`` in seconds.
    t_pi : float
        Pulse duration in seconds; must satisfy ``t_pi < T/2`` so windows
        centred at ``T/4`` and ``3T/4`` never overlap.
    n_periods : int
        Number of repetitions; the sequence applies ``2 * n_periods``
        pulses over ``t_f = n_periods * T``.
    phase_pattern : str
        Cycle of pulse phases, e.g. ``"XYXYYXYX"`` (X: phi=0, Y: phi=pi/2).
    """

    period: float
    t_pi: float
    n_periods: int = 1
    phase_pattern: str = "XYXYYXYX"

    def __post_init__(self) -> None:
        if self.period <= 0.0:
            raise ValueError("period must be positive")
        if self.t_pi < 0.0 or self.t_pi >= self.period / 2.0:
            raise ValueError(
                f"t_pi = {self.t_pi} must lie in [0, T/2) for T = {self.period}"
            )
        if self.n_periods < 1:
            raise ValueError("n_periods must be >= 1")
        if set(self.phase_pattern) - {"X", "Y"}:
            raise ValueError("phase_pattern may contain only 'X' and 'Y'")

    @property
    def t_f(self) -> float:
        return self.n_periods * self.period

    @property
    def pulse_count(self) -> int:
        return 2 * self.n_periods

    @property
    def window_edges(self) -> tuple[float, float, float, float]:
        """Pulse edges (t_1, t_2, t_3, t_4) within one period."""
        half = 0.5 * self.t_pi
        return (
            0.25 * self.period - half,
            0.25 * self.period + half,
            0.75 * self.period - half,
            0.75 * self.period + half,
        )

    def alpha(self, l: int) -> float:
        """Pulse width in periods of the target harmonic: ``t_pi * l / T``."""
        return self.t_pi * l / self.period


@dataclass(frozen=True)
class ModulationFunction:
    """Piecewise modulation function over one period.

    ``profile(u)`` maps window-local offsets ``u in [0, t_pi]`` to the
    first-pulse trajectory (+1 at the leading edge, -1 at the trailing
    edge); the second window applies ``-profile``.  ``oscillations`` hints
    how many internal oscillations the profile itself contains, which
    sizes quadrature panels for shaped pulses.
    """

    period: float
    t_pi: float
    profile: Callable[[np.ndarray], np.ndarray] | None
    oscillations: float = 0.0

    def __post_init__(self) -> None:
        if self.t_pi < 0.0 or self.t_pi >= self.period / 2.0:
            raise ValueError("t_pi must lie in [0, T/2)")
        if self.t_pi > 0.0 and self.profile is None:
            raise ValueError("finite-width pulses need a profile")

    @property
    def window_edges(self) -> tuple[float, float, float, float]:
        half = 0.5 * self.t_pi
        return (
            0.25 * self.period - half,
            0.25 * self.period + half,
            0.75 * self.period - half,
            0.75 * self.period + half,
        )

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        """Vectorised ``F_z(t)`` on [0, T] (values in [-1, 1])."""
        t = np.asarray(t, dtype=float)
        t1, t2, t3, t4 = self.window_edges
        out = np.where((t > t2) & (t < t3), -1.0, 1.0)
        if self.t_pi > 0.0 and self.profile is not None:
            in1 = (t >= t1) & (t <= t2)
            in2 = (t >= t3) & (t <= t4)
            if np.any(in1):
                out[in1] = self.profile(t[in1] - t1)
            if np.any(in2):
                out[in2] = -self.profile(t[in2] - t3)
        return out


def instantaneous_modulation(plan: SequencePlan) -> ModulationFunction:
    """Square-wave modulation of zero-width pulses at T/4 and 3T/4."""
    return ModulationFunction(period=plan.period, t_pi=0.0, profile=None)


def tophat_modulation(plan: SequencePlan) -> ModulationFunction:
    """Modulation of constant-amplitude pulses: ``cos(pi u / t_pi)`` in-window."""
    if plan.t_pi == 0.0:
        return instantaneous_modulation(plan)
    t_pi = plan.t_pi

    def profile(u: np.ndarray) -> np.ndarray:
        return np.cos(np.pi * np.asarray(u) / t_pi)

    return ModulationFunction(period=plan.period, t_pi=t_pi, profile=profile)


def shaped_modulation(
    plan: SequencePlan,
    profile: Callable[[np.ndarray], np.ndarray],
    oscillations: float,
) -> ModulationFunction:
    """Modulation with an arbitrary in-window trajectory (+1 -> -1)."""
    return ModulationFunction(
        period=plan.period,
        t_pi=plan.t_pi,
        profile=profile,
        oscillations=float(oscillations),
    )


def _sign_prefactor(l: int) -> float:
    return 4.0 * (-1.0) ** ((l + 1) // 2)


def f_l_instantaneous(l: int) -> float:
    """Harmonic weight of the square-wave modulation (zero-width pulses).

    Zero for even ``l``; for odd ``l`` the top-hat closed form evaluated at
    alpha = 0, i.e. ``4 (-1)^((l+1)/2) / (-l pi)``.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if l % 2 == 0:
        return 0.0
    return _sign_prefactor(l) / (-l * np.pi)


def f_l_tophat(l: int, alpha: float) -> float:
    """Harmonic weight of top-hat pulses of width ``alpha`` target periods.

    ``f_l(alpha) = 4 (-1)^((l+1)/2) cos(alpha pi) / ((4 alpha^2 - 1) l pi)``
    for odd ``l``; the removable singularity at ``alpha = 1/2`` is handled
    as the analytic limit.  ``alpha = t_pi * l / T``.
    """
    if l < 1 or l % 2 == 0:
        raise ValueError("the top-hat closed form holds for odd l >= 1")
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    denom = 4.0 * alpha**2 - 1.0
    if abs(denom) < 1e-12:
        # l'Hopital at alpha = 1/2: cos(alpha pi)/(4 alpha^2 - 1) -> -pi sin(alpha pi)/(8 alpha)
        ratio = -np.pi * np.sin(alpha * np.pi) / (8.0 * alpha)
    else:
        ratio = np.cos(alpha * np.pi) / denom
    return _sign_prefactor(l) * ratio / (l * np.pi)


def _constant_segment_integral(c: float, a: float, b: float, w: float) -> float:
    """Exact ``int_a^b c cos(w s) ds``."""
    if b <= a:
        return 0.0
    return c * (math.sin(w * b) - math.sin(w * a)) / w


def _window_integral(
    f: ModulationFunction,
    start: float,
    sign: float,
    l: int,
    n_panels: int,
) -> float:
    """Composite Gauss-Legendre ``int window sign * profile(u) cos(l w (start+u)) du``."""
    w = l * TWO_PI / f.period
    edges = np.linspace(0.0, f.t_pi, n_panels + 1)
    a = edges[:-1]
    half = 0.5 * (edges[1:] - a)
    mid = a + half
    # nodes: (n_panels, n_gl)
    u = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = sign * f.profile(u.ravel()).reshape(u.shape) * np.cos(w * (start + u))
    return float(np.sum(vals * _GL_WEIGHTS[None, :] * half[:, None]))


def f_l_numeric(
    f: ModulationFunction,
    l: int,
    atol: float = 1e-9,
    max_refinements: int = 6,
) -> float:
    """Harmonic weight of an arbitrary modulation function by quadrature.

    Constant segments are integrated in closed form; each pulse window uses
    composite Gauss-Legendre with at least ``64 * alpha`` panels (more when
    the profile itself oscillates), then panel doubling until two levels
    agree within ``atol``.

    Raises
    ------
    QuadratureNotConverged
        If doubling ``max_refinements`` times never reaches ``atol``.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    w = l * TWO_PI / f.period
    t1, t2, t3, t4 = f.window_edges
    const_part = (
        _constant_segment_integral(+1.0, 0.0, t1, w)
        + _constant_segment_integral(-1.0, t2, t3, w)
        + _constant_segment_integral(+1.0, t4, f.period, w)
    )
    if f.t_pi == 0.0:
        return 2.0 / f.period * const_part

    alpha_eff = f.t_pi * l / f.period
    n0 = max(16, math.ceil(64.0 * max(alpha_eff, f.oscillations, 1.0)))
    prev = None
    n = n0
    for _ in range(max_refinements + 1):
        windows = _window_integral(f, t1, +1.0, l, n) + _window_integral(
            f, t3, -1.0, l, n
        )
        total = 2.0 / f.period * (const_part + windows)
        if prev is not None and abs(total - prev) <= atol:
            return total
        prev = total
        n *= 2
    raise QuadratureNotConverged(
        f"f_{l} quadrature did not reach atol={atol:g} after {max_refinements} refinements"
    )


def required_alpha(b_z: float, gamma_n: float, omega_max: float) -> float:
    """Pulse width (in target-harmonic periods) forced by a Rabi cap.

    From ``Omega = (pi/alpha)(l/T) ~ gamma_n B_z / (2 alpha)``:
    ``alpha = gamma_n B_z / (2 Omega_max)``.  Approaches zero as the
    available Rabi frequency grows (instantaneous-pulse limit).
    """
    if b_z <= 0.0 or omega_max <= 0.0:
        raise ValueError("b_z and omega_max must be positive")
    return abs(gamma_n) * b_z / (2.0 * omega_max)
