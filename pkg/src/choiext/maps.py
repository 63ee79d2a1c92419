"""Linear maps on d x d matrices: Choi maps, the Cho-Kye family, and their automorphisms.

A map is stored by its action tensor ``T`` (shape ``d^2 x d^2``) with
``vec(phi(X)) = T @ vec(X)`` under column-major vectorization. Composition,
equality, and Choi-matrix extraction are then plain tensor algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import DimensionMismatch, dagger, eigh, is_psd, kron

__all__ = [
    "ChoKyeParams",
    "MapSpec",
    "NonRealValue",
    "NotCP",
    "OperatorFactor",
    "SingularInput",
    "apply_map",
    "biquadratic_form",
    "cho_kye_t",
    "choi_c1",
    "choi_c2",
    "choi_matrix",
    "clamp_to_operation",
    "compose",
    "conjugation_map",
    "diagonal_scaling_extension",
    "generalized_choi",
    "identity_map",
    "inner_automorphism",
    "is_cp",
    "kraus_from_choi",
    "map_from_function",
    "operator_factor",
    "outer_automorphism",
    "positivity_seesaw",
    "transpose_map",
    "unitary_u",
]

CP_TOL = 1e-9
DET_TOL = 1e-12
UNITARY_TOL = 1e-10


class NotCP(ValueError):
    pass


class SingularInput(ValueError):
    pass


class NonRealValue(ValueError):
    pass


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


@dataclass(frozen=True, eq=False)
class MapSpec:
    """A linear map on ``dim x dim`` matrices with a provenance label."""

    dim: int
    action: np.ndarray
    label: str = ""

    def __post_init__(self):
        action = np.asarray(self.action, dtype=complex)
        if action.shape != (self.dim**2, self.dim**2):
            raise DimensionMismatch(
                f"action tensor shape {action.shape} does not fit dim={self.dim}"
            )
        action.setflags(write=False)
        object.__setattr__(self, "action", action)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return apply_map(self, x)

    def residual(self, other: "MapSpec") -> float:
        """Max-norm distance between action tensors."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims differ: {self.dim} vs {other.dim}")
        return float(np.max(np.abs(self.action - other.action)))


@dataclass(frozen=True)
class ChoKyeParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise ValueError(f"Cho-Kye parameter {name}={val} must be finite and >= 0")


@dataclass(frozen=True, eq=False)
class OperatorFactor:
    """A full-rank operator ``A`` acting as the CP map ``X -> A X A^dagger``."""

    matrix: np.ndarray
    is_unitary: bool
    label: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def operator_factor(matrix: np.ndarray, label: str = "") -> OperatorFactor:
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {m.shape}")
    if abs(np.linalg.det(m)) <= DET_TOL:
        raise SingularInput(f"|det A| <= {DET_TOL:g}; operator is not full rank")
    unitary = bool(np.max(np.abs(m @ dagger(m) - np.eye(m.shape[0]))) <= UNITARY_TOL)
    m.setflags(write=False)
    return OperatorFactor(m, unitary, label or "A")


def apply_map(phi: MapSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (phi.dim, phi.dim):
        raise DimensionMismatch(f"input shape {x.shape} does not match map dim {phi.dim}")
    return unvec(phi.action @ vec(x), phi.dim)


def map_from_function(dim: int, fn: Callable[[np.ndarray], np.ndarray], label: str = "") -> MapSpec:
    """Tabulate a linear function on matrix units into an action tensor."""
    action = np.zeros((dim * dim, dim * dim), dtype=complex)
    for j in range(dim):
        for i in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            action[:, i + j * dim] = vec(fn(unit))
    return MapSpec(dim, action, label)


def identity_map(dim: int) -> MapSpec:
    return MapSpec(dim, np.eye(dim * dim), f"id{dim}")


def transpose_map(dim: int) -> MapSpec:
    # vec(X^T) is a permutation of vec(X)
    perm = np.arange(dim * dim).reshape(dim, dim).T.reshape(-1)
    return MapSpec(dim, np.eye(dim * dim)[perm], f"T{dim}")


def generalized_choi(p: ChoKyeParams) -> MapSpec:
    """The Cho-Kye map: cyclic weighted diagonal, off-diagonals negated, overall factor 1/2.

    Diagonal of the image is ``(a x11 + b x22 + c x33, a x22 + b x33 + c x11,
    a x33 + b x11 + c x22) / 2``.
    """
    d = 3
    action = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for i in range(d):
            if i != j:
                k = i + j * d
                action[k, k] = -0.5
    for i in range(d):
        row = i + i * d
        for shift, w in enumerate((p.a, p.b, p.c)):
            src = (i + shift) % d
            action[row, src + src * d] += 0.5 * w
    return MapSpec(d, action, f"choi[a={p.a:g},b={p.b:g},c={p.c:g}]")


def choi_c1() -> MapSpec:
    phi = generalized_choi(ChoKyeParams(1.0, 1.0, 0.0))
    return MapSpec(3, phi.action, "choi1")


def choi_c2() -> MapSpec:
    phi = generalized_choi(ChoKyeParams(1.0, 0.0, 1.0))
    return MapSpec(3, phi.action, "choi2")


def cho_kye_t(t: float) -> ChoKyeParams:
    """Extremal Cho-Kye parameters on the curve ``a+b+c = 2``, ``bc = (1-a)^2``."""
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"t must be finite and >= 0, got {t}")
    den = 1.0 - t + t * t
    return ChoKyeParams((1.0 - t) ** 2 / den, t * t / den, 1.0 / den)


def unitary_u(theta: float) -> OperatorFactor:
    """Rotation by ``theta`` in the (first, third) coordinate plane of C^3."""
    if not np.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    c, s = np.cos(theta), np.sin(theta)
    m = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]], dtype=complex)
    m.setflags(write=False)
    return OperatorFactor(m, True, f"U({theta:.17g})")


def conjugation_map(a: OperatorFactor) -> MapSpec:
    """Action tensor of ``X -> A X A^dagger``: ``conj(A) kron A`` for column-major vec."""
    m = a.matrix
    return MapSpec(a.dim, kron(m.conj(), m), f"Ad[{a.label}]")


def compose(outer: MapSpec, inner: MapSpec, label: str | None = None) -> MapSpec:
    """``outer o inner``."""
    if outer.dim != inner.dim:
        raise DimensionMismatch(f"cannot compose dim {outer.dim} with dim {inner.dim}")
    return MapSpec(outer.dim, outer.action @ inner.action, label or f"{outer.label}o{inner.label}")


def inner_automorphism(phi: MapSpec, a: OperatorFactor) -> MapSpec:
    """``phi o A``: ``X -> phi(A X A^dagger)``."""
    return compose(phi, conjugation_map(a), f"{phi.label}o{a.label}")


def outer_automorphism(a: OperatorFactor, phi: MapSpec) -> MapSpec:
    """``A o phi``: ``X -> A phi(X) A^dagger``."""
    return compose(conjugation_map(a), phi, f"{a.label}o{phi.label}")


def diagonal_scaling_extension(phi: MapSpec, scales) -> MapSpec:
    """Map whose biquadratic form is ``F(a_1 x_1, ..., a_n x_n; y)``.

    Built directly from the form: the image of ``E_ij`` is scaled by
    ``a_i conj(a_j)``. This does not go through :func:`inner_automorphism`,
    so the two can be checked against each other.
    """
    a = np.asarray(scales, dtype=complex)
    if a.shape != (phi.dim,):
        raise DimensionMismatch(f"need {phi.dim} scales, got {a.shape}")
    if np.any(a == 0):
        raise SingularInput("diagonal scales must all be nonzero")
    col_weights = vec(np.outer(a, a.conj()))
    return MapSpec(phi.dim, phi.action * col_weights[None, :], f"{phi.label}[diag]")


def clamp_to_operation(a: np.ndarray) -> OperatorFactor:
    """Rescale ``A`` so its largest singular value is 1 (hence ``A A^dagger <= I``)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {m.shape}")
    if abs(np.linalg.det(m)) <= DET_TOL:
        raise SingularInput(f"|det A| <= {DET_TOL:g}; operator is not full rank")
    top = np.sqrt(eigh(m @ dagger(m))[0][-1])
    return operator_factor(m / top)


def choi_matrix(phi: MapSpec) -> np.ndarray:
    """``C = sum_ij E_ij kron phi(E_ij)``."""
    d = phi.dim
    # action[:, i + j d] is vec(phi(E_ij)); C[i d + k, j d + l] = phi(E_ij)[k, l]
    images = phi.action.reshape(d, d, d, d, order="F")  # [k, l, i, j]
    return images.transpose(2, 0, 3, 1).reshape(d * d, d * d)


def is_cp(phi: MapSpec, tol: float = CP_TOL) -> bool:
    return is_psd(choi_matrix(phi), tol)


def kraus_from_choi(phi: MapSpec, tol: float = CP_TOL) -> list[np.ndarray]:
    """Kraus operators from the spectral decomposition of the Choi matrix.

    Raises :class:`NotCP` if the Choi matrix has an eigenvalue below ``-tol``.
    """
    d = phi.dim
    w, v = eigh(choi_matrix(phi))
    if w[0] < -tol:
        raise NotCP(f"Choi matrix has eigenvalue {w[0]:.3e} < -{tol:g}")
    ops = []
    for lam, col in zip(w, v.T):
        if lam <= tol:
            continue
        # col[i d + k] = K[k, i] / sqrt(lam)
        ops.append(np.sqrt(lam) * col.reshape(d, d).T)
    return ops


def biquadratic_form(phi: MapSpec, x: np.ndarray, y: np.ndarray) -> float:
    """``<y| phi(|x><x|) |y>``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != (phi.dim,) or y.shape != (phi.dim,):
        raise DimensionMismatch(f"vectors must have length {phi.dim}")
    val = np.vdot(y, apply_map(phi, np.outer(x, x.conj())) @ y)
    if abs(val.imag) > 1e-9:
        raise NonRealValue(f"biquadratic form has imaginary part {val.imag:.3e}")
    return float(val.real)


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def _min_eigvec(h: np.ndarray) -> np.ndarray:
    # the forms here are Hermitian only up to rounding of the map entries
    return eigh(0.5 * (h + dagger(h)), tol=1e-8)[1][:, 0]


def positivity_seesaw(
    phi: MapSpec,
    restarts: int = 50,
    iters: int = 200,
    seed: int = 0,
    history: list | None = None,
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Minimize the biquadratic form over unit vectors by alternating exact steps.

    With ``x`` fixed the optimal ``y`` is the lowest eigenvector of
    ``phi(|x><x|)``; with ``y`` fixed the form equals ``u^dagger K u`` for
    ``u = conj(x)`` and ``K[i, j] = <y|phi(E_ij)|y>``.

    Returns the smallest value over all restarts and its ``(x, y)``. If
    ``history`` is a list, each restart appends its per-step objective values.
    """
    d = phi.dim
    images = phi.action.reshape(d, d, d, d, order="F")  # [k, l, i, j] = phi(E_ij)[k, l]
    rng = np.random.default_rng(seed)
    best = (np.inf, None)
    for _ in range(restarts):
        x = _random_unit(rng, d)
        y = _random_unit(rng, d)
        trace = []
        prev = np.inf
        for _ in range(iters):
            y = _min_eigvec(apply_map(phi, np.outer(x, x.conj())))
            k = np.einsum("k,klij,l->ij", y.conj(), images, y)
            x = _min_eigvec(k).conj()
            val = biquadratic_form(phi, x, y)
            trace.append(val)
            if prev - val < 1e-13:
                break
            prev = val
        if history is not None:
            history.append(trace)
        if trace[-1] < best[0]:
            best = (trace[-1], (x, y))
    return best
