import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choiext.linalg import DimensionMismatch, hermitian_eigenvalues, is_psd
from choiext.maps import (
    ChoKyeParams,
    MapSpec,
    NonRealValue,
    NotCP,
    SingularInput,
    apply_map,
    biquadratic_form,
    cho_kye_t,
    choi_c1,
    choi_c2,
    choi_matrix,
    clamp_to_operation,
    diagonal_scaling_extension,
    generalized_choi,
    identity_map,
    inner_automorphism,
    is_cp,
    kraus_from_choi,
    map_from_function,
    operator_factor,
    outer_automorphism,
    positivity_seesaw,
    transpose_map,
    unitary_u,
)
from choiext.witness import apply_to_second

from conftest import random_hermitian, random_unitary
from oracles import fibonacci_sphere

E = np.eye(3)


def unit(i, j, d=3):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1
    return m


def choi1_formula(x):
    """The first Choi map written out entry by entry."""
    y = -x.copy()
    y[0, 0] = x[0, 0] + x[1, 1]
    y[1, 1] = x[1, 1] + x[2, 2]
    y[2, 2] = x[2, 2] + x[0, 0]
    return y / 2


def choi2_formula(x):
    y = -x.copy()
    y[0, 0] = x[0, 0] + x[2, 2]
    y[1, 1] = x[1, 1] + x[0, 0]
    y[2, 2] = x[2, 2] + x[1, 1]
    return y / 2


def random_matrix(rng, d=3):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


# -- apply_map and the Choi maps ---------------------------------------------


def test_apply_map_examples():
    assert np.array_equal(apply_map(choi_c1(), np.eye(3)), np.eye(3))
    assert np.array_equal(apply_map(choi_c1(), unit(0, 0)), 0.5 * np.diag([1, 0, 1]))
    assert np.array_equal(apply_map(transpose_map(3), unit(0, 1)), unit(1, 0))
    with pytest.raises(DimensionMismatch):
        apply_map(choi_c1(), np.eye(2))


def test_choi_maps_on_diagonal_input():
    x = np.diag([2.0, 4.0, 6.0])
    assert np.array_equal(apply_map(choi_c1(), x), np.diag([3, 5, 4]))
    assert np.array_equal(apply_map(choi_c2(), x), np.diag([4, 3, 5]))


@pytest.mark.parametrize("seed", range(3))
def test_choi_maps_match_entrywise_formulas(seed):
    x = random_matrix(np.random.default_rng(seed))
    assert np.abs(apply_map(choi_c1(), x) - choi1_formula(x)).max() < 1e-15
    assert np.abs(apply_map(choi_c2(), x) - choi2_formula(x)).max() < 1e-15


def test_choi_maps_are_generalized_endpoints():
    assert np.array_equal(choi_c1().action, generalized_choi(ChoKyeParams(1, 1, 0)).action)
    assert np.array_equal(choi_c2().action, generalized_choi(ChoKyeParams(1, 0, 1)).action)
    assert np.array_equal(apply_map(generalized_choi(ChoKyeParams(2, 0, 0)), np.eye(3)), np.eye(3))


def test_generalized_choi_diagonal_is_cyclic():
    a, b, c = 0.3, 0.7, 1.1
    phi = generalized_choi(ChoKyeParams(a, b, c))
    x = random_matrix(np.random.default_rng(9))
    y = apply_map(phi, x)
    d = np.diag(x)
    expected = 0.5 * np.array([a * d[0] + b * d[1] + c * d[2], a * d[1] + b * d[2] + c * d[0], a * d[2] + b * d[0] + c * d[1]])
    assert np.abs(np.diag(y) - expected).max() < 1e-15
    off = ~np.eye(3, dtype=bool)
    assert np.array_equal(y[off], -0.5 * x[off])


def test_map_from_function_round_trip():
    phi = map_from_function(3, choi1_formula, "tab")
    assert phi.residual(choi_c1()) == 0.0


def test_map_spec_rejects_bad_shape():
    with pytest.raises(DimensionMismatch):
        MapSpec(3, np.eye(4))


def test_chokye_params_validation():
    with pytest.raises(ValueError):
        ChoKyeParams(-1, 0, 0)
    with pytest.raises(ValueError):
        ChoKyeParams(math.inf, 0, 0)


# -- Cho-Kye parameterization ------------------------------------------------


@pytest.mark.parametrize(
    "t, expected",
    [(0.0, (1, 0, 1)), (1.0, (0, 1, 1)), (2.0, (1 / 3, 4 / 3, 1 / 3))],
)
def test_cho_kye_t_values(t, expected):
    p = cho_kye_t(t)
    assert (p.a, p.b, p.c) == pytest.approx(expected, abs=1e-15)


def test_cho_kye_endpoints_are_choi_maps():
    # t = 0 lands on the second Choi map; large t approaches the first
    assert generalized_choi(cho_kye_t(0.0)).residual(choi_c2()) == 0.0
    assert generalized_choi(cho_kye_t(1e8)).residual(choi_c1()) < 1e-7


def test_cho_kye_t_rejects_negative():
    with pytest.raises(ValueError):
        cho_kye_t(-0.5)


def test_cho_kye_algebra_random_t():
    rng = np.random.default_rng(2024)
    for t in rng.uniform(0, 10, size=50):
        p = cho_kye_t(t)
        assert abs(p.a + p.b + p.c - 2) < 1e-12
        assert abs(p.b * p.c - (1 - p.a) ** 2) < 1e-12


# -- U(theta) ----------------------------------------------------------------


def test_unitary_u_examples():
    assert np.array_equal(unitary_u(0).matrix, np.eye(3))
    u = unitary_u(math.pi / 2).matrix
    assert np.abs(u - np.array([[0, 0, 1], [0, 1, 0], [-1, 0, 0]])).max() < 1e-15
    u = unitary_u(0.7).matrix
    assert np.abs(u @ u.conj().T - np.eye(3)).max() < 1e-14
    assert unitary_u(0.7).is_unitary


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(-10, 10))
def test_unitary_u_is_one_parameter_subgroup(a, b):
    prod = unitary_u(a).matrix @ unitary_u(b).matrix
    assert np.abs(prod - unitary_u(a + b).matrix).max() < 1e-12


# -- automorphisms -----------------------------------------------------------


def test_inner_outer_with_identity_factor():
    i3 = operator_factor(np.eye(3))
    phi = choi_c1()
    assert np.array_equal(inner_automorphism(phi, i3).action, phi.action)
    assert np.array_equal(outer_automorphism(i3, phi).action, phi.action)


def test_choi1_from_choi2_by_quarter_turns():
    rhs = outer_automorphism(unitary_u(3 * math.pi / 2), inner_automorphism(choi_c2(), unitary_u(math.pi / 2)))
    assert choi_c1().residual(rhs) <= 1e-12


@pytest.mark.parametrize("t", [0.2, 0.5, 2.0, 5.0])
def test_cho_kye_inversion_relation(t):
    rhs = outer_automorphism(
        unitary_u(3 * math.pi / 2),
        inner_automorphism(generalized_choi(cho_kye_t(1 / t)), unitary_u(math.pi / 2)),
    )
    assert generalized_choi(cho_kye_t(t)).residual(rhs) <= 1e-12


def test_diagonal_scaling_is_inner_automorphism():
    scales = [1.5, -0.25, 3.0]
    for phi in (choi_c1(), choi_c2(), generalized_choi(cho_kye_t(0.4))):
        direct = diagonal_scaling_extension(phi, scales)
        inner = inner_automorphism(phi, operator_factor(np.diag(scales)))
        assert direct.residual(inner) <= 1e-12


def test_diagonal_scaling_matches_form_definition():
    # F_a(x; y) = F(a*x; y) on random vectors
    rng = np.random.default_rng(4)
    scales = np.array([2.0, 0.5, -1.0])
    phi = choi_c1()
    ext = diagonal_scaling_extension(phi, scales)
    for _ in range(5):
        x = rng.normal(size=3)
        y = rng.normal(size=3)
        assert abs(biquadratic_form(ext, x, y) - biquadratic_form(phi, scales * x, y)) < 1e-12
    with pytest.raises(SingularInput):
        diagonal_scaling_extension(phi, [1, 0, 1])


def test_automorphism_definitions_on_random_inputs():
    rng = np.random.default_rng(8)
    phi = choi_c1()
    for _ in range(20):
        a = operator_factor(random_matrix(rng))
        x = random_matrix(rng)
        m = a.matrix
        assert np.abs(apply_map(inner_automorphism(phi, a), x) - apply_map(phi, m @ x @ m.conj().T)).max() <= 1e-12
        assert np.abs(apply_map(outer_automorphism(a, phi), x) - m @ apply_map(phi, x) @ m.conj().T).max() <= 1e-12


def test_outer_unitary_preserves_image_spectrum_of_identity():
    u = operator_factor(random_unitary(np.random.default_rng(1), 3))
    phi = generalized_choi(ChoKyeParams(0.5, 1.0, 0.25))
    a = hermitian_eigenvalues(apply_map(outer_automorphism(u, phi), np.eye(3)))
    b = hermitian_eigenvalues(apply_map(phi, np.eye(3)))
    assert np.abs(a - b).max() < 1e-12


def test_inner_unitary_keeps_unitality():
    rng = np.random.default_rng(5)
    for phi in (choi_c1(), choi_c2(), generalized_choi(cho_kye_t(0.3))):
        for _ in range(5):
            u = operator_factor(random_unitary(rng, 3))
            ext = inner_automorphism(phi, u)
            assert np.abs(apply_map(ext, np.eye(3)) - apply_map(phi, np.eye(3))).max() < 1e-12
            assert np.abs(apply_map(ext, np.eye(3)) - np.eye(3)).max() < 1e-12


def test_operator_factor_rejects_singular():
    with pytest.raises(SingularInput):
        operator_factor(np.diag([1, 0, 1]))
    assert not operator_factor(np.diag([1, 2, 3])).is_unitary


def test_dimension_mismatch_in_composition():
    with pytest.raises(DimensionMismatch):
        inner_automorphism(choi_c1(), operator_factor(np.eye(2)))


# -- clamp_to_operation --------------------------------------------------------


def test_clamp_examples():
    assert np.abs(clamp_to_operation(2 * np.eye(3)).matrix - np.eye(3)).max() < 1e-15
    d = np.diag([1, 1 / 2, 1 / 3])
    assert np.abs(clamp_to_operation(d).matrix - d).max() < 1e-15
    assert np.abs(clamp_to_operation(np.diag([4.0, 2.0])).matrix - np.diag([1, 0.5])).max() < 1e-15
    with pytest.raises(SingularInput):
        clamp_to_operation(np.zeros((2, 2)))


def test_clamp_gives_contraction():
    a = clamp_to_operation(random_matrix(np.random.default_rng(12))).matrix
    top = np.linalg.svd(a, compute_uv=False)[0]
    assert top == pytest.approx(1.0, abs=1e-12)
    assert is_psd(np.eye(3) - a @ a.conj().T, 1e-12)


# -- Choi matrix, CP, Kraus -----------------------------------------------------


def test_choi_matrix_examples():
    w = hermitian_eigenvalues(choi_matrix(identity_map(3)))
    assert np.abs(w - np.array([0] * 8 + [3])).max() < 1e-12
    swap = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            swap[i * 3 + j, j * 3 + i] = 1
    c = choi_matrix(transpose_map(3))
    assert np.array_equal(c, swap)
    w = hermitian_eigenvalues(c)
    assert np.abs(w - np.array([-1] * 3 + [1] * 6)).max() < 1e-12
    assert hermitian_eigenvalues(choi_matrix(choi_c1()))[0] < 0


def test_choi_matrix_definition():
    phi = generalized_choi(ChoKyeParams(0.2, 0.9, 1.3))
    ref = sum(np.kron(unit(i, j), apply_map(phi, unit(i, j))) for i in range(3) for j in range(3))
    assert np.abs(choi_matrix(phi) - ref).max() == 0


def test_is_cp_examples():
    assert is_cp(identity_map(3))
    assert not is_cp(choi_c1())
    for theta in (0.3, 1.1, 2.5):
        assert not is_cp(inner_automorphism(choi_c1(), unitary_u(theta)))
    assert not is_cp(transpose_map(3))


def test_non_cp_preserved_by_random_unitaries():
    rng = np.random.default_rng(77)
    for _ in range(10):
        u = operator_factor(random_unitary(rng, 3))
        assert not is_cp(inner_automorphism(choi_c1(), u))


def test_kraus_examples():
    ops = kraus_from_choi(identity_map(3))
    assert len(ops) == 1
    k = ops[0]
    phase = k[0, 0] / abs(k[0, 0])
    assert np.abs(k / phase - np.eye(3)).max() < 1e-12
    a = np.diag([1, 1 / 2, 1 / 3])
    conj_map = map_from_function(3, lambda x: a @ x @ a.conj().T)
    ops = kraus_from_choi(conj_map)
    assert len(ops) == 1
    k = ops[0]
    phase = k[0, 0] / abs(k[0, 0])
    assert np.abs(k / phase - a).max() < 1e-12


def test_kraus_round_trip_random_cp():
    rng = np.random.default_rng(21)
    a1, a2 = random_matrix(rng), random_matrix(rng)
    phi = map_from_function(3, lambda x: a1 @ x @ a1.conj().T + a2 @ x @ a2.conj().T)
    ops = kraus_from_choi(phi)
    rebuilt = map_from_function(3, lambda x: sum(k @ x @ k.conj().T for k in ops))
    assert phi.residual(rebuilt) <= 1e-9


def test_kraus_rejects_non_cp():
    with pytest.raises(NotCP):
        kraus_from_choi(choi_c1())


# -- biquadratic form and positivity seesaw ------------------------------------


def test_biquadratic_examples():
    rng = np.random.default_rng(0)
    x = rng.normal(size=3) + 1j * rng.normal(size=3)
    y = rng.normal(size=3) + 1j * rng.normal(size=3)
    assert biquadratic_form(identity_map(3), x, y) == pytest.approx(abs(np.vdot(x, y)) ** 2, rel=1e-12)
    assert biquadratic_form(choi_c1(), E[0], E[0]) == 0.5
    assert biquadratic_form(choi_c1(), E[0], E[1]) == 0.0


def test_biquadratic_rejects_non_hermitian_map():
    skew = MapSpec(3, 1j * np.eye(9), "i*id")
    with pytest.raises(NonRealValue):
        biquadratic_form(skew, E[0], E[0])


def test_seesaw_identity_map():
    val, (x, y) = positivity_seesaw(identity_map(3), restarts=5, seed=1)
    assert abs(val) < 1e-10
    assert abs(np.vdot(x, y)) < 1e-5


def test_seesaw_choi_map_is_positive():
    val, _ = positivity_seesaw(choi_c1(), restarts=20, seed=0)
    assert val >= -1e-9


def test_seesaw_finds_negative_witness():
    def shifted_transpose(x):
        return x.T - 0.1 * np.trace(x) * np.eye(3)

    phi = map_from_function(3, shifted_transpose, "T-0.1tr")
    val, (x, y) = positivity_seesaw(phi, restarts=10, seed=0)
    # brute force over real unit vectors: F = (x.y)^2 - 0.1 |x|^2 |y|^2
    pts = fibonacci_sphere(400)
    grid_min = np.min((pts @ pts.T) ** 2 - 0.1)
    assert grid_min < 0
    assert val < 0
    assert val == pytest.approx(grid_min, abs=1e-3)
    assert biquadratic_form(phi, x, y) == pytest.approx(val, abs=1e-12)


def test_seesaw_deterministic_and_monotone():
    phi = generalized_choi(cho_kye_t(0.7))
    hist: list = []
    v1, _ = positivity_seesaw(phi, restarts=5, seed=3, history=hist)
    v2, _ = positivity_seesaw(phi, restarts=5, seed=3)
    assert v1 == v2
    for trace in hist:
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


# -- invariants ---------------------------------------------------------------


ALL_MAPS = [
    choi_c1(),
    choi_c2(),
    generalized_choi(cho_kye_t(0.3)),
    transpose_map(3),
    inner_automorphism(choi_c1(), unitary_u(0.9)),
    outer_automorphism(operator_factor(np.diag([1, 2j, 3])), choi_c2()),
    diagonal_scaling_extension(choi_c1(), [1, -2, 0.5]),
]


@pytest.mark.parametrize("phi", ALL_MAPS, ids=lambda p: p.label)
def test_hermiticity_preservation(phi):
    for i in range(3):
        for j in range(3):
            h = unit(i, j) + unit(j, i)
            k = 1j * (unit(i, j) - unit(j, i))
            for m in (apply_map(phi, h), apply_map(phi, k)):
                assert np.abs(m - m.conj().T).max() <= 1e-12


def test_outer_unitary_spectrum_invariance():
    rng = np.random.default_rng(31)
    for _ in range(10):
        rho = random_hermitian(rng, 9)
        u = operator_factor(random_unitary(rng, 3))
        phi = inner_automorphism(choi_c1(), unitary_u(rng.uniform(0, 2 * math.pi)))
        a = hermitian_eigenvalues(apply_to_second(outer_automorphism(u, phi), rho, (3, 3)))
        b = hermitian_eigenvalues(apply_to_second(phi, rho, (3, 3)))
        assert np.abs(a - b).max() <= 1e-9
