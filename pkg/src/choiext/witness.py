"""Entanglement detection by positive maps acting on the second subsystem.

The main entry point is :func:`sweep`, which runs the rotated family
``theta -> phi o U(theta)`` over a grid and records the smallest eigenvalue
of ``(I kron phi_theta) rho`` at each point.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import DimensionMismatch, is_psd, kron, min_eigenvalue, partial_transpose
from .maps import MapSpec, inner_automorphism, unitary_u
from .upb import DensityOperator

__all__ = [
    "DetectionReport",
    "GridMismatch",
    "SweepConfig",
    "SweepCurve",
    "apply_to_second",
    "apply_to_second_kron",
    "curve_shift_distance",
    "detect",
    "detection_intervals",
    "ppt_check",
    "rotated_map",
    "sweep",
]

NEGATIVITY_TOL = 1e-9
BISECTION_STEPS = 30


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    theta_start: float = 0.0
    theta_end: float = 2 * math.pi
    samples: int = 721
    negativity_tol: float = NEGATIVITY_TOL

    def __post_init__(self):
        if not self.theta_end > self.theta_start:
            raise ValueError("theta_end must exceed theta_start")
        if self.samples < 2:
            raise ValueError("samples must be >= 2")
        if not self.negativity_tol > 0:
            raise ValueError("negativity_tol must be positive")

    def grid(self) -> np.ndarray:
        return np.linspace(self.theta_start, self.theta_end, self.samples)


@dataclass
class SweepCurve:
    """Sampled ``(theta, lambda_min)`` records.

    ``evaluate`` (when set) recomputes ``lambda_min`` at any angle; it is used
    to refine interval endpoints and is not serialized.
    """

    thetas: np.ndarray
    lambda_min: np.ndarray
    map_label: str = ""
    state_label: str = ""
    evaluate: Callable[[float], float] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.lambda_min = np.asarray(self.lambda_min, dtype=float)
        if self.thetas.shape != self.lambda_min.shape or self.thetas.ndim != 1:
            raise ValueError("thetas and lambda_min must be 1-d arrays of equal length")
        if np.any(np.diff(self.thetas) <= 0):
            raise ValueError("thetas must be strictly increasing")

    @property
    def records(self) -> list[tuple[float, float]]:
        return list(zip(self.thetas.tolist(), self.lambda_min.tolist()))

    def __len__(self) -> int:
        return len(self.thetas)


@dataclass(frozen=True)
class DetectionReport:
    intervals: list[tuple[float, float]]
    global_min: float
    global_argmin: float

    @property
    def detected(self) -> bool:
        return bool(self.intervals)


def _blocks_to_second(action: np.ndarray, rho: np.ndarray, dA: int, dB: int) -> np.ndarray:
    r = rho.reshape(dA, dB, dA, dB)
    # blocks[i, j] as column-major vec: index k + l*dB -> axes (l, k)
    blocks = r.transpose(0, 2, 3, 1).reshape(dA, dA, dB * dB)
    out = (blocks @ action.T).reshape(dA, dA, dB, dB)  # [i, j, l, k]
    return out.transpose(0, 3, 1, 2).reshape(dA * dB, dA * dB)


def apply_to_second(phi: MapSpec, rho: DensityOperator | np.ndarray, dims=None) -> np.ndarray:
    """``(I kron phi) rho``: apply ``phi`` to every ``dB x dB`` block of ``rho``."""
    if isinstance(rho, DensityOperator):
        dims, m = rho.dims, rho.matrix
    else:
        m = np.asarray(rho)
    dA, dB = dims
    if phi.dim != dB:
        raise DimensionMismatch(f"map dim {phi.dim} does not match second subsystem dim {dB}")
    if m.shape != (dA * dB, dA * dB):
        raise DimensionMismatch(f"operator shape {m.shape} does not match dims {(dA, dB)}")
    return _blocks_to_second(phi.action, m, dA, dB)


def apply_to_second_kron(phi: MapSpec, rho: DensityOperator | np.ndarray, dims=None) -> np.ndarray:
    """Same as :func:`apply_to_second`, built from ``I kron E`` sandwiches.

    Each action-tensor entry ``T[k + l d, k' + l' d]`` is the map
    ``X -> E_kk' X E_l'l``, so the extension is a sum of
    ``(I kron E_kk') rho (I kron E_l'l)`` terms.
    """
    if isinstance(rho, DensityOperator):
        dims, m = rho.dims, rho.matrix
    else:
        m = np.asarray(rho)
    dA, dB = dims
    if phi.dim != dB:
        raise DimensionMismatch(f"map dim {phi.dim} does not match second subsystem dim {dB}")
    eye = np.eye(dA)
    units = np.zeros((dB, dB, dB, dB))
    for k in range(dB):
        for l in range(dB):
            units[k, l, k, l] = 1.0
    left = [[kron(eye, units[k, kp]) for kp in range(dB)] for k in range(dB)]
    out = np.zeros_like(m, dtype=complex)
    for row in range(dB * dB):
        k, l = row % dB, row // dB
        for col in range(dB * dB):
            coeff = phi.action[row, col]
            if coeff == 0:
                continue
            kp, lp = col % dB, col // dB
            out += coeff * (left[k][kp] @ m @ left[lp][l])
    return out


def detect(phi: MapSpec, rho: DensityOperator, tol: float = NEGATIVITY_TOL) -> tuple[bool, float]:
    """One-sided test: ``True`` means ``rho`` is certified entangled by ``phi``."""
    lam = min_eigenvalue(apply_to_second(phi, rho), tol=1e-9)
    return lam < -tol, lam


def ppt_check(rho: DensityOperator, tol: float = 1e-10) -> bool:
    return is_psd(partial_transpose(rho.matrix, rho.dims), tol)


def rotated_map(base: MapSpec, theta: float) -> MapSpec:
    return inner_automorphism(base, unitary_u(theta))


def sweep(
    base: MapSpec,
    rho: DensityOperator,
    cfg: SweepConfig = SweepConfig(),
    workers: int | None = None,
) -> SweepCurve:
    """Minimum eigenvalue of ``(I kron base o U(theta)) rho`` on an even theta grid.

    ``workers > 1`` evaluates grid points on a thread pool; records are
    always returned in theta order.
    """
    if base.dim != 3 or rho.dims[1] != 3:
        raise DimensionMismatch("the rotation family acts on C^3; map and second subsystem must be 3-dimensional")

    def evaluate(theta: float) -> float:
        return detect(rotated_map(base, theta), rho)[1]

    thetas = cfg.grid()
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            lams = list(pool.map(evaluate, thetas))
    else:
        lams = [evaluate(t) for t in thetas]
    return SweepCurve(thetas, np.array(lams), base.label, rho.label, evaluate)


def _refine(f: Callable[[float], float], lo: float, hi: float, steps: int) -> float:
    # f(lo) and f(hi) have opposite signs
    flo = f(lo)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def detection_intervals(curve: SweepCurve, tol: float = NEGATIVITY_TOL, steps: int = BISECTION_STEPS) -> DetectionReport:
    """Maximal theta ranges where ``lambda_min < -tol``.

    Endpoints inside the grid are refined by bisection on ``curve.evaluate``
    when available, otherwise by linear interpolation between samples.
    Runs touching the ends of the grid keep the grid endpoint.
    """
    th, lam = curve.thetas, curve.lambda_min
    if len(th) == 0:
        raise ValueError("empty curve")
    neg = lam < -tol

    if curve.evaluate is not None:
        def crossing(i: int) -> float:
            return _refine(lambda t: curve.evaluate(t) + tol, th[i], th[i + 1], steps)
    else:
        def crossing(i: int) -> float:
            f0, f1 = lam[i] + tol, lam[i + 1] + tol
            return th[i] + (th[i + 1] - th[i]) * f0 / (f0 - f1)

    intervals = []
    i, n = 0, len(th)
    while i < n:
        if not neg[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and neg[j + 1]:
            j += 1
        lo = th[0] if i == 0 else crossing(i - 1)
        hi = th[-1] if j == n - 1 else crossing(j)
        if hi > lo:
            intervals.append((float(lo), float(hi)))
        i = j + 1
    k = int(np.argmin(lam))
    return DetectionReport(intervals, float(lam[k]), float(th[k]))


def curve_shift_distance(c1: SweepCurve, c2: SweepCurve, shift: float) -> float:
    """``max_theta |c1(theta) - c2((theta + shift) mod 2 pi)|`` on a shared full-period grid."""
    th = c1.thetas
    if c2.thetas.shape != th.shape or np.max(np.abs(c2.thetas - th)) > 1e-12:
        raise GridMismatch("curves are not sampled on the same grid")
    period = th[-1] - th[0]
    if abs(period - 2 * math.pi) > 1e-12:
        raise GridMismatch(f"grid spans {period!r}, not a full period 2*pi")
    m = len(th) - 1  # last sample duplicates the first
    step = period / m
    steps = shift / step
    s = round(steps)
    if abs(steps - s) > 1e-9:
        raise GridMismatch(f"shift {shift!r} is not a whole number of grid steps ({step!r})")
    # wrap only indices that leave [0, m], so a zero shift compares like with like
    idx = np.arange(m + 1) + (s % m if s >= 0 else -((-s) % m))
    idx = np.where(idx > m, idx - m, idx)
    idx = np.where(idx < 0, idx + m, idx)
    return float(np.max(np.abs(c1.lambda_min - c2.lambda_min[idx])))
