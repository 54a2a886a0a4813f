"""Synthesis of shaped pi-pulses with vanishing target-harmonic overlap.

A shaped pulse of integer width ``alpha`` (in periods of the target
harmonic ``l``) imposes the in-window modulation trajectory

    F(u) = cos(pi u / t_pi) - beta exp(-(u - t_p)^2 / 2 c^2) sin(2 pi alpha u / t_pi)

with ``c = t_pi / gamma`` and ``t_p = t_pi / 2``.  ``beta`` is fixed by
requiring zero overlap between F and ``cos(l omega_m t)`` over the window,
either through the closed form (Gaussian tails extended to infinity, good
to ~e^{-gamma^2/8}) or by root-finding on the overlap quadrature.  The
drive envelope follows as ``Omega(t) = d/dt arccos F(t)``, normalised so a
full window accumulates exactly a pi rotation.

Numerical note: the Gaussian does not vanish identically at the window
edges, so the exact envelope has an integrable ~u^{-1/2} spike within
~1e-7 t_pi of each edge.  The spike carries < 1e-4 rad of rotation angle,
far below any realisable waveform resolution; sampled envelopes therefore
use the carrier value pi/t_pi at the edge samples, while the pulse-area
quadrature resolves the layer explicitly on a geometrically refined grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "FOutOfRange",
    "SingularEndpoint",
    "beta_analytic",
    "overlap_closed_forms",
    "modulation_profile",
    "profile_derivative",
    "verify_overlap",
    "refine_beta",
    "envelope_area",
    "ShapedPulse",
]

TWO_PI = 2.0 * np.pi

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class FOutOfRange(ValueError):
    """|F| exceeds 1 somewhere in the window; arccos inversion impossible."""


class SingularEndpoint(ValueError):
    """F grazes +-1 strictly inside the window with non-vanishing slope."""


def beta_analytic(alpha: int, gamma: float) -> float:
    """Closed-form Gaussian-correction amplitude for integer ``alpha``.

    ``beta = 4 sqrt(2) gamma alpha / ((4 alpha^2 - 1) pi^{3/2})
    / [1 - exp(-8 alpha^2 pi^2 / gamma^2)]``.  Vanishes as gamma -> 0
    (the correction term carries no weight for a vanishing Gaussian).
    """
    if alpha < 1 or int(alpha) != alpha:
        raise ValueError("alpha must be a positive integer")
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    num = 4.0 * math.sqrt(2.0) * gamma * alpha
    den = (4.0 * alpha**2 - 1.0) * math.pi**1.5
    window = 1.0 - math.exp(-8.0 * alpha**2 * math.pi**2 / gamma**2)
    return num / den / window


def overlap_closed_forms(
    alpha: int, gamma: float, t_pi: float
) -> tuple[float, float]:
    """Closed forms of the two window integrals that fix ``beta``.

    Returns ``(carrier_overlap, gaussian_overlap)`` in seconds:

    * carrier: ``int cos(pi u/t_pi) cos(l omega_m t) du
      = t_pi [1/((2 alpha + 1) pi) + 1/((2 alpha - 1) pi)]``
    * gaussian: ``int exp(...) sin(2 pi alpha u/t_pi) cos(l omega_m t) du
      ~ c sqrt(pi/2) [1 - exp(-8 alpha^2 pi^2 / gamma^2)]``

    Their ratio reproduces :func:`beta_analytic` identically.
    """
    if alpha < 1 or int(alpha) != alpha:
        raise ValueError("alpha must be a positive integer")
    c = t_pi / gamma
    i_carrier = t_pi * (
        1.0 / ((2.0 * alpha + 1.0) * math.pi) + 1.0 / ((2.0 * alpha - 1.0) * math.pi)
    )
    i_gauss = (
        c
        * math.sqrt(math.pi / 2.0)
        * (1.0 - math.exp(-8.0 * alpha**2 * math.pi**2 / gamma**2))
    )
    return i_carrier, i_gauss


def modulation_profile(
    u: np.ndarray, t_pi: float, alpha: int, beta: float, gamma: float
) -> np.ndarray:
    """In-window modulation trajectory F(u), window-local ``u in [0, t_pi]``."""
    u = np.asarray(u, dtype=float)
    c = t_pi / gamma
    t_p = 0.5 * t_pi
    gauss = np.exp(-((u - t_p) ** 2) / (2.0 * c**2))
    return np.cos(np.pi * u / t_pi) - beta * gauss * np.sin(TWO_PI * alpha * u / t_pi)


def profile_derivative(
    u: np.ndarray, t_pi: float, alpha: int, beta: float, gamma: float
) -> np.ndarray:
    """Analytic dF/du of :func:`modulation_profile`."""
    u = np.asarray(u, dtype=float)
    c = t_pi / gamma
    t_p = 0.5 * t_pi
    w_a = TWO_PI * alpha / t_pi
    gauss = np.exp(-((u - t_p) ** 2) / (2.0 * c**2))
    term = beta * gauss * (
        -(u - t_p) / c**2 * np.sin(w_a * u) + w_a * np.cos(w_a * u)
    )
    return -np.pi / t_pi * np.sin(np.pi * u / t_pi) - term


def _overlap_quadrature(
    profile: Callable[[np.ndarray], np.ndarray],
    t_pi: float,
    start: float,
    omega_c: float,
    n_panels: int,
) -> float:
    """``int_0^{t_pi} profile(u) cos(omega_c (start + u)) du`` by panelled GL."""
    edges = np.linspace(0.0, t_pi, n_panels + 1)
    a = edges[:-1]
    half = 0.5 * (edges[1:] - a)
    u = (a + half)[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = profile(u.ravel()).reshape(u.shape) * np.cos(omega_c * (start + u))
    return float(np.sum(vals * _GL_WEIGHTS[None, :] * half[:, None]))


def verify_overlap(
    t_pi: float,
    alpha: int,
    beta: float,
    gamma: float,
    l: int,
    period: float,
    n_panels: int | None = None,
) -> float:
    """Normalised overlap of the window trajectory with the target harmonic.

    Integrates ``F(u) cos(l omega_m u)`` over the first pulse window
    (``t_1 = T/4 - t_pi/2`` in the resonant geometry) and divides by
    ``t_pi``.  Zero overlap restores the instantaneous-pulse harmonic
    weight.
    """
    omega_c = l * TWO_PI / period
    start = 0.25 * period - 0.5 * t_pi
    if n_panels is None:
        n_panels = max(32, math.ceil(96.0 * max(alpha, t_pi * l / period)))

    def prof(u: np.ndarray) -> np.ndarray:
        return modulation_profile(u, t_pi, alpha, beta, gamma)

    return _overlap_quadrature(prof, t_pi, start, omega_c, n_panels) / t_pi


def refine_beta(
    alpha: int,
    gamma: float,
    t_pi: float,
    l: int,
    period: float,
    beta0: float | None = None,
) -> float:
    """Root of the overlap residual in ``beta`` (residual is linear in it).

    Brackets around the closed-form value and solves with Brent's method;
    removes the Gaussian-tail truncation of the closed form, which matters
    for small ``gamma``.
    """
    if beta0 is None:
        beta0 = beta_analytic(alpha, gamma)

    def residual(beta: float) -> float:
        return verify_overlap(t_pi, alpha, beta, gamma, l, period)

    lo, hi = 0.0, max(4.0 * beta0, 1.0)
    r_lo, r_hi = residual(lo), residual(hi)
    expand = 0
    while r_lo * r_hi > 0.0 and expand < 8:
        hi *= 4.0
        r_hi = residual(hi)
        expand += 1
    if r_lo * r_hi > 0.0:
        raise RuntimeError("could not bracket the overlap root in beta")
    return float(brentq(residual, lo, hi, xtol=1e-18, rtol=1e-15, maxiter=200))


def _omega_from_f(
    u: np.ndarray,
    t_pi: float,
    alpha: int,
    beta: float,
    gamma: float,
    guard_interior: bool = True,
) -> np.ndarray:
    """Envelope ``Omega(u) = -F'(u) / sqrt(1 - F(u)^2)`` at interior points."""
    f = modulation_profile(u, t_pi, alpha, beta, gamma)
    fp = profile_derivative(u, t_pi, alpha, beta, gamma)
    one_minus = 1.0 - f * f
    if guard_interior:
        bad = one_minus < 1e-14
        if np.any(bad & (np.abs(fp) > 1e-4 * np.pi / t_pi)):
            raise SingularEndpoint(
                "F grazes +-1 inside the window with non-vanishing slope; "
                "the (alpha, gamma) combination has no invertible envelope"
            )
    return -fp / np.sqrt(np.maximum(one_minus, 1e-300))


def envelope_area(
    t_pi: float,
    alpha: int,
    beta: float,
    gamma: float,
    core_points: int = 32768,
    tail_eps: float = 2e-10,
    tail_ratio: float = 1.15,
) -> float:
    """Trapezoid ``int Omega dt`` on a grid that resolves the edge layers.

    Geometric tails run from ``tail_eps * t_pi`` up to the uniform core
    spacing at both edges; the rotation angle missed below ``tail_eps`` is
    O(sqrt(tail_eps)) ~ 1e-7 rad.  For a valid pulse this returns pi within
    1e-6.
    """
    h = t_pi / core_points
    lo = tail_eps * t_pi
    tail = [lo]
    while tail[-1] * tail_ratio < h:
        tail.append(tail[-1] * tail_ratio)
    tail = np.asarray(tail)
    core = np.linspace(h, t_pi - h, core_points - 1)
    u = np.concatenate([tail, core, t_pi - tail[::-1]])
    omega = _omega_from_f(u, t_pi, alpha, beta, gamma)
    return float(np.trapezoid(omega, u))


@dataclass(frozen=True)
class ShapedPulse:
    """A synthesised shaped pi-pulse.

    ``times``/``f_z``/``omega`` sample the window on a uniform grid (edge
    samples carry the carrier value ``pi/t_pi``, see module note).
    ``peak_rabi`` is the interior envelope maximum, ``area`` the
    edge-resolved trapezoid of Omega (= pi for a valid pulse) and
    ``overlap_residual`` the normalised target-harmonic overlap actually
    achieved by ``beta``.
    """

    alpha: int
    gamma: float
    beta: float
    t_pi: float
    period: float
    harmonic: int
    times: np.ndarray
    f_z: np.ndarray
    omega: np.ndarray
    peak_rabi: float
    area: float
    overlap_residual: float
    monotone_envelope: bool
    refined: bool

    @property
    def c(self) -> float:
        """Gaussian width ``t_pi / gamma`` in seconds."""
        return self.t_pi / self.gamma

    @property
    def t_p(self) -> float:
        """Gaussian centre = window midpoint, window-local."""
        return 0.5 * self.t_pi

    def profile(self, u: np.ndarray) -> np.ndarray:
        """F(u) on window-local offsets."""
        return modulation_profile(u, self.t_pi, self.alpha, self.beta, self.gamma)

    def rabi(self, u: np.ndarray) -> np.ndarray:
        """Analytic signed envelope Omega(u) (rad/s) at interior offsets."""
        return _omega_from_f(u, self.t_pi, self.alpha, self.beta, self.gamma)

    @classmethod
    def design(
        cls,
        alpha: int,
        gamma: float,
        l: int,
        period: float,
        refine: bool = False,
        grid_points: int | None = None,
    ) -> "ShapedPulse":
        """Synthesise the pulse for harmonic ``l`` of base period ``period``.

        The window spans ``t_pi = alpha * period / l`` (an integer number
        of target-harmonic oscillations).  ``refine=True`` replaces the
        closed-form ``beta`` with the overlap-quadrature root.

        Raises
        ------
        FOutOfRange
            If |F| exceeds 1 anywhere in the window (retune gamma).
        """
        if alpha < 1 or int(alpha) != alpha:
            raise ValueError("alpha must be a positive integer")
        if l < 1:
            raise ValueError("l must be >= 1")
        t_pi = alpha * period / l
        if t_pi >= period / 2.0:
            raise ValueError(
                f"alpha = {alpha} at harmonic {l} gives t_pi >= T/2; pulses overlap"
            )
        beta = beta_analytic(alpha, gamma)
        if refine:
            beta = refine_beta(alpha, gamma, t_pi, l, period, beta0=beta)

        # Range scan: the arccos inversion needs |F| <= 1 everywhere.
        scan = modulation_profile(
            np.linspace(0.0, t_pi, 65537), t_pi, alpha, beta, gamma
        )
        max_abs = float(np.max(np.abs(scan)))
        if max_abs > 1.0 + 1e-12:
            raise FOutOfRange(
                f"max |F| = {max_abs:.6f} > 1 for alpha={alpha}, gamma={gamma}; "
                "increase gamma (narrower Gaussian) or alpha"
            )

        m = grid_points or max(4096, 256 * alpha)
        times = np.linspace(0.0, t_pi, m + 1)
        f_z = modulation_profile(times, t_pi, alpha, beta, gamma)
        omega = np.empty_like(times)
        omega[1:-1] = _omega_from_f(times[1:-1], t_pi, alpha, beta, gamma)
        omega[0] = omega[-1] = np.pi / t_pi
        peak = float(np.max(np.abs(omega[1:-1])))
        area = envelope_area(t_pi, alpha, beta, gamma)
        residual = verify_overlap(t_pi, alpha, beta, gamma, l, period)
        return cls(
            alpha=int(alpha),
            gamma=float(gamma),
            beta=float(beta),
            t_pi=float(t_pi),
            period=float(period),
            harmonic=int(l),
            times=times,
            f_z=f_z,
            omega=omega,
            peak_rabi=peak,
            area=area,
            overlap_residual=float(residual),
            monotone_envelope=bool(np.all(omega[1:-1] > 0.0)),
            refined=bool(refine),
        )

    @classmethod
    def from_duration(
        cls,
        alpha: int,
        gamma: float,
        l: int,
        t_pi: float,
        refine: bool = False,
        grid_points: int | None = None,
    ) -> "ShapedPulse":
        """Same synthesis, parameterised by the pulse duration directly."""
        period = t_pi * l / alpha
        return cls.design(alpha, gamma, l, period, refine=refine, grid_points=grid_points)
