import numpy as np
import pytest

from hyperquadric import algebra as la
from hyperquadric.errors import StructuralError


def rotation_generators():
    l1 = np.array([[0.0, 0, 0], [0, 0, -1], [0, 1, 0]])
    l2 = np.array([[0.0, 0, 1], [0, 0, 0], [-1, 0, 0]])
    l3 = np.array([[0.0, -1, 0], [1, 0, 0], [0, 0, 0]])
    return l1, l2, l3


def su2_paper_basis():
    e1 = np.array([[1j, 0], [0, -1j]])
    e2 = np.array([[0, 1], [-1, 0]], dtype=complex)
    e3 = np.array([[0, 1j], [1j, 0]])
    return e1, e2, e3


def test_bracket_antisymmetry():
    so3 = la.so_algebra(3)
    x = so3.element([0.3, -1.2, 0.7])
    assert np.max(np.abs(la.bracket(x, x).matrix)) == 0.0


def test_so3_bracket_matches_multiplication_oracle():
    l1, l2, l3 = rotation_generators()
    # oracle: direct 3x3 multiplication
    assert np.array_equal(l1 @ l2 - l2 @ l1, l3)
    so3 = la.so_algebra(3)
    b = la.bracket(so3.from_matrix(l1), so3.from_matrix(l2))
    np.testing.assert_allclose(b.matrix, l3, atol=1e-14)


def test_su2_bracket_matches_complex_oracle():
    e1, e2, e3 = su2_paper_basis()
    # oracle: direct 2x2 complex multiplication
    assert np.allclose(e1 @ e2 - e2 @ e1, 2 * e3)
    su2 = la.su_algebra(2)
    b = la.bracket(su2.from_matrix(la.complex_to_real(e1)),
                   su2.from_matrix(la.complex_to_real(e2)))
    np.testing.assert_allclose(b.matrix, la.complex_to_real(2 * e3), atol=1e-14)


def test_su2_killing_values():
    e1, _, _ = su2_paper_basis()
    su2 = la.su_algebra(2)
    x = su2.from_matrix(la.complex_to_real(e1))
    # 4 tr(E1^2) = 4 * (-2)
    assert la.killing_form(su2, x, x) == pytest.approx(-8.0, abs=1e-12)
    x1 = su2.element(x.coords / (2 * np.sqrt(2.0)))
    assert la.invariant_inner_product(su2, x1, x1) == pytest.approx(1.0, abs=1e-12)


def test_killing_symmetry():
    su3 = la.su_algebra(3)
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = su3.element(rng.standard_normal(su3.dim))
        y = su3.element(rng.standard_normal(su3.dim))
        assert la.killing_form(su3, x, y) == pytest.approx(
            la.killing_form(su3, y, x), rel=1e-12)


def test_su3_diagonal_inner_product_matches_adtrace_oracle():
    su3 = la.su_algebra(3)
    h = su3.from_matrix(la.complex_to_real(np.diag([1j, -1j, 0])))
    oracle = -la.ad_trace_killing(su3, h, h)
    assert oracle == pytest.approx(12.0, abs=1e-9)
    assert la.invariant_inner_product(su3, h, h) == pytest.approx(oracle, rel=1e-9)


SHIPPED = [
    la.so_algebra(3), la.so_algebra(5), la.su_algebra(2), la.su_algebra(3),
    la.sp_algebra(2),
    la.direct_sum(la.circle_algebra(), la.so_algebra(4), "iR+so(4)"),
    la.direct_sum(la.so_algebra(3), la.so_algebra(4), "so(3)+so(4)"),
]


@pytest.mark.parametrize("alg", SHIPPED, ids=lambda a: a.label)
def test_jacobi_identity(alg):
    assert la.jacobi_residual(alg) < 1e-12


@pytest.mark.parametrize("alg", SHIPPED, ids=lambda a: a.label)
def test_bracket_closure(alg):
    assert la.closure_residual(alg) < 1e-10


@pytest.mark.parametrize("alg", SHIPPED, ids=lambda a: a.label)
def test_killing_scale_against_adtrace(alg):
    assert la.killing_scale_residual(alg, n_pairs=100) < 1e-9


def test_killing_scale_su6_sp3():
    assert la.killing_scale_residual(la.su_algebra(6), n_pairs=30) < 1e-9
    assert la.killing_scale_residual(la.sp_algebra(3), n_pairs=30) < 1e-9


@pytest.mark.parametrize("alg", SHIPPED, ids=lambda a: a.label)
def test_inner_product_ad_invariance(alg):
    rng = np.random.default_rng(1)
    for _ in range(100):
        z, x, y = (alg.element(rng.standard_normal(alg.dim)) for _ in range(3))
        lhs = la.invariant_inner_product(alg, la.bracket(z, x), y)
        rhs = la.invariant_inner_product(alg, x, la.bracket(z, y))
        assert abs(lhs + rhs) < 1e-10 * max(1.0, abs(lhs))


def test_inner_product_positive_definite():
    sp2 = la.sp_algebra(2)
    rng = np.random.default_rng(2)
    for _ in range(20):
        x = sp2.element(rng.standard_normal(sp2.dim))
        assert la.invariant_inner_product(sp2, x, x) > 0


@pytest.mark.parametrize("alg", SHIPPED, ids=lambda a: a.label)
def test_exponential_orthogonal(alg):
    rng = np.random.default_rng(3)
    for t in (10.0, -10.0, 3.7):
        x = alg.element(rng.standard_normal(alg.dim))
        x = alg.element(x.coords / np.linalg.norm(x.coords))
        g = la.exp_element(x, t)
        assert np.max(np.abs(g @ g.T - np.eye(alg.ambient_dim))) < 1e-10


def test_orbit_rank_fixed_point():
    so3 = la.so_algebra(3)
    basis = [so3.element(c) for c in np.eye(3)]
    assert la.orbit_tangent_rank(basis, la.matrix_action, np.zeros(3)) == 0
    assert la.orbit_tangent_rank([], la.matrix_action, np.ones(3)) == 0


def test_orbit_rank_sphere():
    so3 = la.so_algebra(3)
    basis = [so3.element(c) for c in np.eye(3)]
    v = np.array([0.0, 0.0, 1.0])
    # oracle: sphere orbit through a unit vector is two-dimensional
    assert la.orbit_tangent_rank(basis, la.matrix_action, v) == 2


def test_orbit_rank_bdi2_flat_element():
    from hyperquadric import sympair as sp

    pair = sp.build_pair("BDI2(3)")
    h = sp.regular_element(pair, 0.4)
    hm = pair.p_matrix(h)

    def act(k_coords, _):
        km = pair.k_matrix(k_coords)
        return pair.to_p_coords(km @ hm - hm @ km)

    rank = la.orbit_tangent_rank(list(np.eye(pair.dim_k)), act, None)
    assert rank == pair.n == 4


def test_structural_errors():
    so3, so4 = la.so_algebra(3), la.so_algebra(4)
    with pytest.raises(StructuralError):
        la.bracket(so3.element([1, 0, 0]), so4.element([1, 0, 0, 0, 0, 0]))
    with pytest.raises(StructuralError):
        so3.from_matrix(np.eye(3))  # symmetric, outside span
    with pytest.raises(StructuralError):
        so3.element([1.0, 2.0])


def test_coords_matrix_agreement():
    su3 = la.su_algebra(3)
    rng = np.random.default_rng(4)
    coords = rng.standard_normal(su3.dim)
    x = su3.element(coords)
    back = su3.from_matrix(x.matrix)
    assert np.max(np.abs(back.coords - coords)) < 1e-12
