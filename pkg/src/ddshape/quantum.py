"""Dense complex linear algebra for small spin Hilbert spaces (dim <= 16).

Operators and states are plain ``numpy.ndarray`` of dtype complex128.
Hamiltonians carry angular-frequency units (rad/s); propagators are
dimensionless unitaries.  Everything here is a pure function of its
arguments, so values can be shared freely across threads.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "ID2",
    "DimensionMismatch",
    "NonHermitianInput",
    "sigma_phi",
    "sigma_phi_perp",
    "spin_half_ops",
    "identity",
    "tensor",
    "tensor_all",
    "check_hermitian",
    "check_unitary",
    "check_density_matrix",
    "expm_hermitian",
    "expectation",
]

# Relative Frobenius tolerance for H = H^dagger.
HERMITICITY_TOL = 1e-12
# Absolute Frobenius tolerance for U^dagger U = 1.
UNITARITY_TOL = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


class DimensionMismatch(ValueError):
    """Operator/state dimensions are incompatible."""


class NonHermitianInput(ValueError):
    """A Hamiltonian argument failed the Hermiticity check."""


def sigma_phi(phi: float) -> np.ndarray:
    """Qubit drive operator for a pulse of phase ``phi``.

    Equals ``cos(phi) * sigma_x + sin(phi) * sigma_y``, i.e. the raising /
    lowering combination ``|1><0| e^{i phi} + |0><1| e^{-i phi}`` in the
    basis ordering used throughout (``sigma_z = |1><1| - |0><0|``).
    """
    return np.cos(phi) * SIGMA_X + np.sin(phi) * SIGMA_Y


def sigma_phi_perp(phi: float) -> np.ndarray:
    """Axis orthogonal to both ``sigma_z`` and ``sigma_phi(phi)``.

    ``-i (|1><0| e^{i phi} - |0><1| e^{-i phi})``; for ``phi = 0`` this is
    ``sigma_y``.
    """
    return -np.sin(phi) * SIGMA_X + np.cos(phi) * SIGMA_Y


def spin_half_ops() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-1/2 vector operators ``(I_x, I_y, I_z)`` = Pauli matrices / 2."""
    return SIGMA_X / 2.0, SIGMA_Y / 2.0, SIGMA_Z / 2.0


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two operators (dim = dim(a) * dim(b))."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(ops: list[np.ndarray]) -> np.ndarray:
    """Left-associated Kronecker product of a non-empty operator list."""
    if not ops:
        raise ValueError("tensor_all needs at least one operator")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def check_hermitian(h: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    """Raise :class:`NonHermitianInput` unless ``h = h^dagger``.

    The deviation is measured as a Frobenius norm relative to ``norm(h)``
    (absolute for a numerically zero operator).
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    scale = np.linalg.norm(h)
    dev = np.linalg.norm(h - h.conj().T)
    if dev > tol * max(scale, 1.0):
        raise NonHermitianInput(
            f"matrix is not Hermitian: |H - H^dag| = {dev:.3e} (scale {scale:.3e})"
        )


def check_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> None:
    """Raise ``ValueError`` unless ``u^dagger u = 1`` within ``tol`` (Frobenius)."""
    u = np.asarray(u)
    dev = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))
    if dev > tol:
        raise ValueError(f"matrix is not unitary: |U^dag U - 1| = {dev:.3e}")


def check_density_matrix(rho: np.ndarray, tol: float = 1e-12) -> None:
    """Validate trace one (within ``tol``) and positivity (min eig >= -tol)."""
    rho = np.asarray(rho)
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace {tr} != 1")
    check_hermitian(rho, tol=1e-10)
    w = np.linalg.eigvalsh(rho)
    if w.min() < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {w.min():.3e}")


def expm_hermitian(h: np.ndarray, dt: float) -> np.ndarray:
    """Unitary propagator ``exp(-i h dt)`` of a Hermitian generator.

    Uses the eigendecomposition of ``h``, which keeps the result unitary to
    machine precision regardless of ``|h| dt``.

    Parameters
    ----------
    h : ndarray
        Hermitian matrix, angular-frequency units (rad/s).
    dt : float
        Evolution time in seconds.

    Raises
    ------
    NonHermitianInput
        If ``h`` fails the Hermiticity check.
    """
    h = np.asarray(h, dtype=complex)
    check_hermitian(h)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Expectation value ``Tr(rho obs)`` of a Hermitian observable.

    The imaginary part must vanish below 1e-10 (asserted, then discarded).

    Raises
    ------
    DimensionMismatch
        If the state and observable dimensions differ.
    """
    rho = np.asarray(rho)
    obs = np.asarray(obs)
    if rho.shape != obs.shape:
        raise DimensionMismatch(
            f"state shape {rho.shape} does not match observable shape {obs.shape}"
        )
    val = np.trace(rho @ obs)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)
