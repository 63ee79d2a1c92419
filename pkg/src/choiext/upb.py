"""Unextendable product bases in 3 x 3 and the PPT entangled states they define."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import BipartiteDims, DimensionMismatch, eigh, kron

__all__ = [
    "BasisComplete",
    "BasisNotOrthonormal",
    "DensityOperator",
    "ProductBasisSet",
    "complete_product_basis",
    "maximally_entangled_state",
    "product_state",
    "pyramid",
    "tiles",
    "unextendability_seesaw",
    "upb_complement_state",
]


class BasisNotOrthonormal(ValueError):
    pass


class BasisComplete(ValueError):
    pass


@dataclass(frozen=True)
class ProductBasisSet:
    """Orthonormal product vectors ``a_i kron b_i``."""

    dims: BipartiteDims
    factors: tuple[tuple[np.ndarray, np.ndarray], ...]
    label: str = ""

    def __post_init__(self):
        dA, dB = self.dims
        for a, b in self.factors:
            if a.shape != (dA,) or b.shape != (dB,):
                raise DimensionMismatch(f"factor shapes {a.shape}, {b.shape} do not match {self.dims}")
            if abs(np.linalg.norm(a) - 1) > 1e-12 or abs(np.linalg.norm(b) - 1) > 1e-12:
                raise BasisNotOrthonormal("product factors must have unit norm")

    @cached_property
    def vectors(self) -> np.ndarray:
        """Joint vectors as rows, shape ``(k, dA*dB)``."""
        return np.array([kron(a[:, None], b[:, None])[:, 0] for a, b in self.factors])

    def __len__(self) -> int:
        return len(self.factors)

    def gram(self) -> np.ndarray:
        v = self.vectors
        return v.conj() @ v.T

    def is_orthonormal(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.gram() - np.eye(len(self)))) <= tol)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    dims: BipartiteDims
    label: str = field(default="")

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.dims[0] * self.dims[1]
        if m.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {tuple(self.dims)}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density operator must be Hermitian")
        if abs(np.trace(m) - 1) > 1e-12:
            raise ValueError(f"density operator trace is {np.trace(m).real:.15g}, expected 1")
        w = eigh(m)[0]
        if w[0] < -1e-10:
            raise ValueError(f"density operator has negative eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", BipartiteDims(*self.dims))


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def tiles() -> ProductBasisSet:
    e0, e1, e2 = np.eye(3, dtype=complex)
    s = e0 + e1 + e2
    factors = (
        (e0, _unit(e0 - e1)),
        (_unit(e0 - e1), e2),
        (e2, _unit(e1 - e2)),
        (_unit(e1 - e2), e0),
        (_unit(s), _unit(s)),
    )
    return ProductBasisSet(BipartiteDims(3, 3), factors, "tiles")


def pyramid_vectors() -> np.ndarray:
    """The five apex vectors of the pyramid, as rows."""
    h = 0.5 * np.sqrt(1 + np.sqrt(5))
    norm = 2 / np.sqrt(5 + np.sqrt(5))
    ang = 2 * np.pi * np.arange(5) / 5
    return norm * np.stack([np.cos(ang), np.sin(ang), np.full(5, h)], axis=1)


def pyramid() -> ProductBasisSet:
    v = pyramid_vectors().astype(complex)
    factors = tuple((v[j], v[(2 * j) % 5]) for j in range(5))
    return ProductBasisSet(BipartiteDims(3, 3), factors, "pyramid")


def complete_product_basis(dims: BipartiteDims | tuple[int, int] = (3, 3)) -> ProductBasisSet:
    dA, dB = dims
    ea = np.eye(dA, dtype=complex)
    eb = np.eye(dB, dtype=complex)
    factors = tuple((ea[i], eb[j]) for i in range(dA) for j in range(dB))
    return ProductBasisSet(BipartiteDims(dA, dB), factors, "computational")


def upb_complement_state(basis: ProductBasisSet) -> DensityOperator:
    """Normalized projector onto the orthogonal complement of ``basis``."""
    n = basis.dims[0] * basis.dims[1]
    k = len(basis)
    if not basis.is_orthonormal():
        raise BasisNotOrthonormal("basis vectors are not orthonormal within 1e-10")
    if k >= n:
        raise BasisComplete(f"{k} vectors span the full {n}-dimensional space")
    v = basis.vectors
    proj = v.T @ v.conj()
    rho = (np.eye(n) - proj) / (n - k)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityOperator(rho, basis.dims, f"complement[{basis.label}]")


def product_state(sigma: np.ndarray, tau: np.ndarray, label: str = "product") -> DensityOperator:
    sigma = np.asarray(sigma)
    tau = np.asarray(tau)
    return DensityOperator(kron(sigma, tau), BipartiteDims(sigma.shape[0], tau.shape[0]), label)


def maximally_entangled_state(d: int) -> DensityOperator:
    psi = np.eye(d).reshape(-1) / np.sqrt(d)
    return DensityOperator(np.outer(psi, psi), BipartiteDims(d, d), f"maxent{d}")


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def unextendability_seesaw(
    basis: ProductBasisSet,
    restarts: int = 50,
    seed: int = 0,
    iters: int = 500,
    history: list | None = None,
) -> float:
    """Smallest total overlap ``sum_i |<psi_i|x kron y>|^2`` found over unit product vectors.

    A clearly positive result is numerical evidence that no product vector
    is orthogonal to the whole basis; it is not a proof.
    """
    a = np.array([f[0] for f in basis.factors])
    b = np.array([f[1] for f in basis.factors])
    dA, dB = basis.dims
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        x = _random_unit(rng, dA)
        y = _random_unit(rng, dB)
        trace = []
        prev = np.inf
        for _ in range(iters):
            wb = np.abs(b.conj() @ y) ** 2
            x = eigh((a.T * wb) @ a.conj())[1][:, 0]
            wa = np.abs(a.conj() @ x) ** 2
            w, vecs = eigh((b.T * wa) @ b.conj())
            y = vecs[:, 0]
            val = float(max(w[0], 0.0))
            trace.append(val)
            if prev - val < 1e-14:
                break
            prev = val
        if history is not None:
            history.append(trace)
        best = min(best, trace[-1])
    return float(min(max(best, 0.0), 1.0))
