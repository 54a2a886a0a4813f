"""Physical model: spin systems, hyperfine couplings and Hamiltonians.

The NV centre is treated as the two-level system {|0>, |1>}; all dynamics
are expressed in the frame rotating with the electron free evolution, where
the Hamiltonian of one NV-nucleus pair is

    H = -omega_n (w_hat . I) + (1/2) sigma_z (A . I) + (Omega(t)/2) sigma_phi

with the nuclear resonance vector ``omega_n_vec = (-Ax/2, -Ay/2,
omega_L - Az/2)``.  Multiple nuclei couple to the NV independently (no
internuclear terms, a deliberate modelling assumption).  A classical
target is an oscillating field that enters as ``(Omega_s/2) sigma_z
cos(omega_s t)`` per tone.

All frequencies are angular (rad/s).  Interfaces that speak MHz / kHz /
gauss live in :mod:`ddshape.config`, which converts at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.constants import hbar, mu_0

from .quantum import (
    ID2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    sigma_phi,
    tensor_all,
)

__all__ = [
    "GAMMA_E",
    "GAMMA_H",
    "ZERO_FIELD_SPLITTING",
    "PhysicalConstants",
    "ZeroDistance",
    "ValidityViolation",
    "Nucleus",
    "NuclearFrame",
    "SpinSystem",
    "ClassicalSignal",
    "Drive",
    "hyperfine_from_position",
    "nucleus_operator",
    "static_hamiltonian",
    "drive_operator",
    "build_sim_hamiltonian",
    "build_effective_hamiltonian",
    "build_classical_hamiltonian",
]

TWO_PI = 2.0 * np.pi

# Electron gyromagnetic ratio of the NV ground state (sign included).
GAMMA_E = -TWO_PI * 28.024e9  # rad/s/T
# Proton gyromagnetic ratio.
GAMMA_H = TWO_PI * 42.57e6  # rad/s/T
# NV ground-state zero-field splitting.
ZERO_FIELD_SPLITTING = TWO_PI * 2.87e9  # rad/s


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants entering the model; defaults are the standard NV values."""

    d_split: float = ZERO_FIELD_SPLITTING  # rad/s
    gamma_e: float = GAMMA_E  # rad/s/T
    gamma_n: float = GAMMA_H  # rad/s/T, default species is the proton
    mu0: float = mu_0  # T^2 m^3 / J


class ZeroDistance(ValueError):
    """Nuclear position coincides with the sensor."""


class ValidityViolation(ValueError):
    """Requested harmonic violates |gamma_n B_z| >= ratio * k * |A_perp|."""


def hyperfine_from_position(
    r: Sequence[float], gamma_n: float, gamma_e: float = GAMMA_E
) -> np.ndarray:
    """Dipolar hyperfine vector of a nucleus at position ``r`` (metres).

    Returns ``(mu0 hbar gamma_e gamma_n / (4 pi |r|^3)) [z_hat - 3 (z_hat .
    r_hat) r_hat]`` in rad/s.  The sensor sits at the origin with its
    quantisation axis along ``z_hat``.

    Raises
    ------
    ZeroDistance
        If ``|r|`` is zero.
    """
    r = np.asarray(r, dtype=float)
    dist = np.linalg.norm(r)
    if dist == 0.0:
        raise ZeroDistance("nuclear position must not coincide with the sensor")
    r_hat = r / dist
    z_hat = np.array([0.0, 0.0, 1.0])
    prefactor = mu_0 * hbar * gamma_e * gamma_n / (4.0 * np.pi * dist**3)
    return prefactor * (z_hat - 3.0 * (z_hat @ r_hat) * r_hat)


@dataclass(frozen=True)
class Nucleus:
    """A target nucleus: gyromagnetic ratio and hyperfine vector (rad/s)."""

    gamma_n: float
    hyperfine: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.hyperfine, dtype=float)
        if a.shape != (3,):
            raise ValueError(f"hyperfine must be a 3-vector, got shape {a.shape}")
        object.__setattr__(self, "hyperfine", a)

    @classmethod
    def from_position(cls, r: Sequence[float], gamma_n: float = GAMMA_H) -> "Nucleus":
        return cls(gamma_n=gamma_n, hyperfine=hyperfine_from_position(r, gamma_n))


@dataclass(frozen=True)
class NuclearFrame:
    """Derived resonance frame of one nucleus at a given field.

    ``omega_n_vec = (-Ax/2, -Ay/2, omega_L - Az/2)`` sets the resonance
    frequency ``omega_n = |omega_n_vec|``; the transverse coupling is
    ``a_perp = |A - (A . w_hat) w_hat| = |w_hat x A|``.  ``x_hat`` and
    ``y_hat`` complete the frame used by the effective resonance
    Hamiltonian.
    """

    omega_larmor: float
    omega_n_vec: np.ndarray
    omega_n: float
    omega_hat: np.ndarray
    a_perp: float
    x_hat: np.ndarray
    y_hat: np.ndarray


def _frame_for(nucleus: Nucleus, b_z: float) -> NuclearFrame:
    a = nucleus.hyperfine
    omega_larmor = nucleus.gamma_n * b_z
    vec = np.array([-0.5 * a[0], -0.5 * a[1], omega_larmor - 0.5 * a[2]])
    omega_n = float(np.linalg.norm(vec))
    if omega_n == 0.0:
        raise ValueError("nuclear resonance vector vanishes; frame is ill-conditioned")
    omega_hat = vec / omega_n
    a_par = float(a @ omega_hat)
    perp_vec = a - a_par * omega_hat
    a_perp = float(np.linalg.norm(perp_vec))
    if a_perp > 0.0:
        x_hat = perp_vec / a_perp
        y_hat = np.cross(omega_hat, a) / a_perp
    else:
        x_hat = np.array([1.0, 0.0, 0.0])
        y_hat = np.array([0.0, 1.0, 0.0])
    return NuclearFrame(
        omega_larmor=omega_larmor,
        omega_n_vec=vec,
        omega_n=omega_n,
        omega_hat=omega_hat,
        a_perp=a_perp,
        x_hat=x_hat,
        y_hat=y_hat,
    )


@dataclass(frozen=True)
class SpinSystem:
    """NV qubit plus a list of nuclei in a static field ``b_z`` (tesla)."""

    b_z: float
    nuclei: tuple[Nucleus, ...]
    frames: tuple[NuclearFrame, ...] = field(init=False)

    def __init__(self, b_z: float, nuclei: Sequence[Nucleus]):
        if b_z <= 0.0:
            raise ValueError(
                "b_z must be positive: the nuclear resonance frame degenerates at zero field"
            )
        if not nuclei:
            raise ValueError("at least one nucleus is required")
        object.__setattr__(self, "b_z", float(b_z))
        object.__setattr__(self, "nuclei", tuple(nuclei))
        object.__setattr__(
            self, "frames", tuple(_frame_for(n, b_z) for n in self.nuclei)
        )

    @property
    def dim(self) -> int:
        return 2 ** (1 + len(self.nuclei))

    def check_harmonic_validity(self, k: int, ratio: float = 10.0) -> None:
        """Require ``|gamma_n B_z| >= ratio * k * a_perp`` for every nucleus.

        This is the regime in which the single-harmonic resonance reduction
        is trustworthy; violating it makes harmonic-``k`` predictions
        unreliable.
        """
        for i, (nuc, frame) in enumerate(zip(self.nuclei, self.frames)):
            bound = ratio * k * frame.a_perp
            if abs(nuc.gamma_n * self.b_z) < bound:
                raise ValidityViolation(
                    f"nucleus {i}: |gamma_n B_z| = {abs(nuc.gamma_n * self.b_z):.4e}"
                    f" < {ratio} * {k} * a_perp = {bound:.4e}"
                )


@dataclass(frozen=True)
class ClassicalSignal:
    """Oscillating target field: list of (amplitude rad/s, frequency rad/s)."""

    components: tuple[tuple[float, float], ...]

    def __init__(self, components: Sequence[tuple[float, float]]):
        if not components:
            raise ValueError("classical signal needs at least one tone")
        comps = []
        for amp, freq in components:
            if freq <= 0.0:
                raise ValueError(f"tone frequency must be positive, got {freq}")
            comps.append((float(amp), float(freq)))
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def from_field(
        cls,
        b_s: float,
        frequencies: Sequence[float],
        gamma_e: float = GAMMA_E,
    ) -> "ClassicalSignal":
        """Tones of common amplitude ``Omega_s = gamma_e * B_s`` (field along z)."""
        amp = gamma_e * b_s
        return cls([(amp, f) for f in frequencies])


@dataclass(frozen=True)
class Drive:
    """Microwave drive: envelope ``omega(t)`` in rad/s and phase ``phi``.

    ``omega`` must return zero outside pulse windows so that a single
    callable can describe a stroboscopic drive.
    """

    omega: Callable[[float], float]
    phi: float = 0.0


def _spin_dot(vec: np.ndarray) -> np.ndarray:
    """``vec . I`` for a single spin-1/2 (2x2)."""
    return 0.5 * (vec[0] * SIGMA_X + vec[1] * SIGMA_Y + vec[2] * SIGMA_Z)


def nucleus_operator(
    n_nuclei: int, index: int, op: np.ndarray, nv_op: np.ndarray = ID2
) -> np.ndarray:
    """Embed ``nv_op (x) op_at_nucleus`` into the full product space."""
    ops = [nv_op] + [ID2] * n_nuclei
    ops[1 + index] = op
    return tensor_all(ops)


def static_hamiltonian(system: SpinSystem) -> np.ndarray:
    """Drive-free NV-nuclei Hamiltonian in the simulation frame.

    Sums ``-(omega_n_vec_i . I_i) + (1/2) sigma_z (A_i . I_i)`` over
    nuclei.  Time independent, so free-evolution segments admit exact
    propagators.
    """
    n = len(system.nuclei)
    dim = system.dim
    h = np.zeros((dim, dim), dtype=complex)
    for i, (nucleus, frame) in enumerate(zip(system.nuclei, system.frames)):
        h -= nucleus_operator(n, i, _spin_dot(frame.omega_n_vec))
        h += 0.5 * nucleus_operator(n, i, _spin_dot(nucleus.hyperfine), nv_op=SIGMA_Z)
    return h


def drive_operator(n_nuclei: int, phi: float) -> np.ndarray:
    """``sigma_phi (x) identity`` on the full space (multiply by Omega/2)."""
    return tensor_all([sigma_phi(phi)] + [ID2] * n_nuclei)


def build_sim_hamiltonian(
    system: SpinSystem, drive: Drive | None = None
) -> Callable[[float], np.ndarray]:
    """Time-dependent Hamiltonian ``H(t)`` on the 2 * 2^n space.

    With ``drive=None`` the result is constant in time.  The returned
    callable is pure and safe to share.
    """
    h0 = static_hamiltonian(system)
    if drive is None:
        return lambda t: h0
    sig_phi = drive_operator(len(system.nuclei), drive.phi)

    def h_of_t(t: float) -> np.ndarray:
        return h0 + 0.5 * drive.omega(t) * sig_phi

    return h_of_t


def build_effective_hamiltonian(
    system: SpinSystem,
    f_k: float,
    k: int,
    nucleus_index: int = 0,
    validity_ratio: float = 10.0,
) -> np.ndarray:
    """Static resonance Hamiltonian ``(f_k/4) a_perp sigma_z (x) I_x``.

    Valid on resonance ``k omega_m = omega_n`` of the selected nucleus;
    used for analytic signal predictions, never integrated alongside the
    simulation frame.

    Raises
    ------
    ValidityViolation
        When ``|gamma_n B_z| < validity_ratio * k * a_perp``.
    """
    system.check_harmonic_validity(k, ratio=validity_ratio)
    frame = system.frames[nucleus_index]
    i_x = _spin_dot(frame.x_hat)
    return 0.25 * f_k * frame.a_perp * np.kron(SIGMA_Z, i_x)


def build_classical_hamiltonian(
    signal: ClassicalSignal, drive: Drive | None = None
) -> Callable[[float], np.ndarray]:
    """Time-dependent 2x2 Hamiltonian of a classical multi-tone target.

    ``H(t) = sum_i (Omega_si/2) cos(omega_si t) sigma_z`` plus the drive
    term inside pulse windows.
    """
    amps = np.array([c[0] for c in signal.components])
    freqs = np.array([c[1] for c in signal.components])
    if drive is None:

        def h_free(t: float) -> np.ndarray:
            coeff = 0.5 * np.sum(amps * np.cos(freqs * t))
            return coeff * SIGMA_Z

        return h_free

    sig_phi = sigma_phi(drive.phi)

    def h_of_t(t: float) -> np.ndarray:
        coeff = 0.5 * np.sum(amps * np.cos(freqs * t))
        return coeff * SIGMA_Z + 0.5 * drive.omega(t) * sig_phi

    return h_of_t
