"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex arrays. Bipartite operators use the
slow-first tensor convention: in ``kron(A, B)`` the index of ``A`` is the
outer (block) index, so block ``(i, j)`` of a bipartite operator acts on the
second subsystem.

Hermitian eigenproblems are solved by cyclic Jacobi rotations. The rotation
kernel is compiled with Cython when available; otherwise a numpy fallback is
used. :data:`BACKEND` names the active kernel.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _jacobi_py

try:
    from . import _jacobi as _jacobi_c
except ImportError:  # extension not built
    _jacobi_c = None

__all__ = [
    "BACKEND",
    "BipartiteDims",
    "DimensionMismatch",
    "NoConvergence",
    "NotHermitian",
    "available_backends",
    "dagger",
    "eigh",
    "hermitian_eigenvalues",
    "is_psd",
    "kron",
    "min_eigenvalue",
    "partial_transpose",
    "set_backend",
]

HERMITIAN_TOL = 1e-10
MAX_SWEEPS = 100
OFFDIAG_REL_THRESHOLD = 1e-13

_KERNELS = {"python": _jacobi_py.jacobi_sweeps}
if _jacobi_c is not None:
    _KERNELS["compiled"] = _jacobi_c.jacobi_sweeps

BACKEND = "compiled" if "compiled" in _KERNELS else "python"
_kernel = _KERNELS[BACKEND]


class NotHermitian(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


class DimensionMismatch(ValueError):
    pass


class BipartiteDims(NamedTuple):
    """Local dimensions of a two-party system."""

    dA: int
    dB: int

    @property
    def total(self) -> int:
        return self.dA * self.dB

    def validate(self) -> "BipartiteDims":
        if self.dA < 2 or self.dB < 2:
            raise DimensionMismatch(f"subsystem dimensions must be >= 2, got {tuple(self)}")
        return self


def available_backends() -> list[str]:
    return sorted(_KERNELS)


def set_backend(name: str) -> None:
    """Select the Jacobi kernel (``"compiled"`` or ``"python"``)."""
    global BACKEND, _kernel
    if name not in _KERNELS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    BACKEND = name
    _kernel = _KERNELS[name]


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, ``out[ia*rb + ib, ja*cb + jb] = a[ia, ja] * b[ib, jb]``."""
    a = np.asarray(a)
    b = np.asarray(b)
    ra, ca = a.shape
    rb, cb = b.shape
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(ra * rb, ca * cb)


def _check_hermitian(h: np.ndarray, tol: float) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    dev = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if dev > tol:
        raise NotHermitian(f"max |H - H^dagger| = {dev:.3e} exceeds {tol:.1e}")
    return h


def eigh(h: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ``w`` ascending and the columns of ``v`` the
    corresponding orthonormal eigenvectors.

    Raises :class:`NotHermitian` if ``max|H - H^dagger| > tol`` and
    :class:`NoConvergence` if 100 sweeps do not bring the off-diagonal
    Frobenius norm below ``1e-13 * ||H||_F``.
    """
    h = _check_hermitian(h, tol)
    n = h.shape[0]
    # symmetrize so the kernel sees an exactly Hermitian matrix
    a = np.ascontiguousarray(0.5 * (h + h.conj().T), dtype=np.complex128)
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if n == 0 or scale == 0.0:
        return np.zeros(n), v
    sweeps = _kernel(a, v, OFFDIAG_REL_THRESHOLD * scale, MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps (n={n})")
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    return eigh(h, tol)[0]


def min_eigenvalue(h: np.ndarray, tol: float = HERMITIAN_TOL) -> float:
    return float(eigh(h, tol)[0][0])


def is_psd(h: np.ndarray, tol: float = 1e-9) -> bool:
    return min_eigenvalue(h) >= -tol


def partial_transpose(rho: np.ndarray, dims: BipartiteDims | tuple[int, int]) -> np.ndarray:
    """Transpose every ``dB x dB`` block of ``rho`` in place of the block."""
    dA, dB = dims
    rho = np.asarray(rho)
    if rho.shape != (dA * dB, dA * dB):
        raise DimensionMismatch(f"operator shape {rho.shape} does not match dims {(dA, dB)}")
    t = rho.reshape(dA, dB, dA, dB).transpose(0, 3, 2, 1)
    return t.reshape(dA * dB, dA * dB).copy()
