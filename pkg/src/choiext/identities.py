"""Residual checks for the automorphism identities relating the Choi-type maps."""

from __future__ import annotations

import math

import numpy as np

from .maps import (
    MapSpec,
    cho_kye_t,
    choi_c1,
    choi_c2,
    diagonal_scaling_extension,
    generalized_choi,
    inner_automorphism,
    operator_factor,
    outer_automorphism,
    unitary_u,
)

DEFAULT_T_VALUES = (0.2, 0.5, 2.0, 5.0)
DEFAULT_DIAG = (1.0, 0.5, 2.0)


def quarter_turn_conjugate(phi: MapSpec) -> MapSpec:
    """``U(3 pi/2) o phi o U(pi/2)``."""
    return outer_automorphism(unitary_u(1.5 * math.pi), inner_automorphism(phi, unitary_u(0.5 * math.pi)))


def choi_relation_residual() -> float:
    return choi_c1().residual(quarter_turn_conjugate(choi_c2()))


def cho_kye_relation_residual(t: float) -> float:
    lhs = generalized_choi(cho_kye_t(t))
    rhs = quarter_turn_conjugate(generalized_choi(cho_kye_t(1.0 / t)))
    return lhs.residual(rhs)


def diagonal_extension_residual(phi: MapSpec, scales) -> float:
    direct = diagonal_scaling_extension(phi, scales)
    via_inner = inner_automorphism(phi, operator_factor(np.diag(np.asarray(scales, dtype=complex))))
    return direct.residual(via_inner)


def identity_residuals(t_values=DEFAULT_T_VALUES, diag=DEFAULT_DIAG) -> dict[str, float]:
    """All identity residuals keyed by a short name."""
    out = {"choi1 = U(3pi/2) o choi2 o U(pi/2)": choi_relation_residual()}
    for t in t_values:
        out[f"phi_t = U(3pi/2) o phi_1/t o U(pi/2), t={t:g}"] = cho_kye_relation_residual(t)
    for name, phi in (("choi1", choi_c1()), ("choi2", choi_c2())):
        out[f"diag-scaling({name}) = {name} o diag{tuple(diag)}"] = diagonal_extension_residual(phi, diag)
    return out
