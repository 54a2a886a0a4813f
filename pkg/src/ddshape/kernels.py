"""Hot numeric kernels: piecewise-constant propagation and unitary chaining.

Both kernels exist twice, as numba ``@njit`` code and as plain numpy loops.
The active backend is chosen once at import from the ``DDSHAPE_BACKEND``
environment variable ("numba" or "numpy", default numba when importable)
and can be overridden per call, which the benchmark and the backend
equivalence tests use.  Matrices stay tiny (dim <= 16) so the win comes
from removing per-step Python dispatch, not from vectorisation.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "NUMBA_AVAILABLE",
    "active_backend",
    "propagate_steps",
    "chain_product",
]

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    NUMBA_AVAILABLE = False

_ENV_VAR = "DDSHAPE_BACKEND"


def _backend_from_env() -> str:
    choice = os.environ.get(_ENV_VAR, "numba" if NUMBA_AVAILABLE else "numpy").lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba" and not NUMBA_AVAILABLE:
        choice = "numpy"
    return choice


_ACTIVE = _backend_from_env()


def active_backend() -> str:
    """Backend selected at import time ('numba' or 'numpy')."""
    return _ACTIVE


def _propagate_steps_np(h_stack: np.ndarray, dts: np.ndarray) -> np.ndarray:
    d = h_stack.shape[1]
    u_tot = np.eye(d, dtype=np.complex128)
    for i in range(h_stack.shape[0]):
        w, v = np.linalg.eigh(h_stack[i])
        u_step = (v * np.exp(-1j * dts[i] * w)) @ v.conj().T
        u_tot = u_step @ u_tot
    return u_tot


def _chain_product_np(mats: np.ndarray, order: np.ndarray) -> np.ndarray:
    d = mats.shape[1]
    u_tot = np.eye(d, dtype=np.complex128)
    for k in order:
        u_tot = mats[k] @ u_tot
    return u_tot


if NUMBA_AVAILABLE:

    @njit(cache=True, nogil=True)
    def _propagate_steps_nb(h_stack, dts):  # pragma: no cover - compiled
        d = h_stack.shape[1]
        u_tot = np.eye(d, dtype=np.complex128)
        for i in range(h_stack.shape[0]):
            w, v = np.linalg.eigh(h_stack[i])
            u_step = (v * np.exp(-1j * dts[i] * w)) @ np.conj(v).T
            u_tot = u_step @ u_tot
        return u_tot

    @njit(cache=True, nogil=True)
    def _chain_product_nb(mats, order):  # pragma: no cover - compiled
        d = mats.shape[1]
        u_tot = np.eye(d, dtype=np.complex128)
        for i in range(order.shape[0]):
            u_tot = mats[order[i]] @ u_tot
        return u_tot


def _resolve(backend: str | None) -> str:
    if backend is None:
        return _ACTIVE
    if backend not in ("numba", "numpy"):
        raise ValueError(f"backend must be 'numba' or 'numpy', got {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def propagate_steps(
    h_stack: np.ndarray, dts: np.ndarray, backend: str | None = None
) -> np.ndarray:
    """Total unitary of a piecewise-constant Hamiltonian trajectory.

    Computes ``U = exp(-i H_n dt_n) ... exp(-i H_1 dt_1)`` (time order:
    index 0 acts first) where each exponential is taken by Hermitian
    eigendecomposition, so the product is unitary to machine precision.

    Parameters
    ----------
    h_stack : ndarray, shape (n, d, d)
        Hermitian midpoint samples of H(t), rad/s.
    dts : ndarray, shape (n,)
        Step durations in seconds.
    backend : str, optional
        Force 'numba' or 'numpy'; default is the import-time choice.
    """
    h_stack = np.ascontiguousarray(h_stack, dtype=np.complex128)
    dts = np.ascontiguousarray(dts, dtype=np.float64)
    if h_stack.ndim != 3 or h_stack.shape[1] != h_stack.shape[2]:
        raise ValueError(f"h_stack must be (n, d, d), got {h_stack.shape}")
    if dts.shape[0] != h_stack.shape[0]:
        raise ValueError("dts length must match h_stack")
    if _resolve(backend) == "numba":
        return _propagate_steps_nb(h_stack, dts)
    return _propagate_steps_np(h_stack, dts)


def chain_product(
    mats: np.ndarray, order: np.ndarray, backend: str | None = None
) -> np.ndarray:
    """Ordered product ``mats[order[-1]] @ ... @ mats[order[0]]``.

    ``order`` indexes into a stack of pre-built segment unitaries;
    ``order[0]`` acts first in time.
    """
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    order = np.ascontiguousarray(order, dtype=np.int64)
    if order.size and (order.min() < 0 or order.max() >= mats.shape[0]):
        raise ValueError("order indexes outside the matrix stack")
    if _resolve(backend) == "numba":
        return _chain_product_nb(mats, order)
    return _chain_product_np(mats, order)
