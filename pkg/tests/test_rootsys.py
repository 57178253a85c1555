import itertools
from fractions import Fraction

import pytest

from hyperquadric import rootsys as rsy
from hyperquadric.errors import ConfigurationError, DomainError

A1 = rsy.build_root_system("A", 1)
A2 = rsy.build_root_system("A", 2)
C3 = rsy.build_root_system("C", 3)
F4 = rsy.build_root_system("F", 4)


def test_positive_root_counts():
    assert len(A1.positive_roots) == 1
    assert len(A2.positive_roots) == 3
    assert len(C3.positive_roots) == 9
    assert len(F4.positive_roots) == 24


def test_delta_is_weight_sum():
    for rs in (A1, A2, C3, F4):
        total = tuple(sum(col) for col in zip(*rs.fundamental_weights))
        assert rs.delta == total


def test_a1_delta_is_first_weight():
    assert A1.delta == A1.fundamental_weights[0]


def test_cartan_matrix_entries_exact():
    for rs in (A1, A2, C3, F4):
        for i, ai in enumerate(rs.simple_roots):
            for j, aj in enumerate(rs.simple_roots):
                num = 2 * rs.inner_basic(ai, aj)
                den = rs.inner_basic(ai, ai)
                assert Fraction(num, 1) / den == rs.cartan_matrix[i][j]


def test_f4_highest_root_coordinates():
    # generate-and-close oracle: highest root by root-coordinate height
    def root_coords(rs, root):
        # solve sum c_i alpha_i = root over the simple roots exactly
        cols = list(zip(*rs.simple_roots))
        mat = [[rs.simple_roots[j][i] for j in range(rs.rank)]
               for i in range(len(root))]
        # overdetermined; use the first rank independent rows
        import numpy as np

        sol = np.linalg.lstsq(np.array(mat, dtype=float),
                              np.array([float(x) for x in root]), rcond=None)[0]
        return tuple(Fraction(round(2 * s), 2) for s in sol)

    best = max(F4.positive_roots,
               key=lambda r: sum(root_coords(F4, r)))
    assert root_coords(F4, best) == (2, 3, 4, 2)


@pytest.mark.parametrize("m,expected", [(0, 0), (4, 3), (6, 6)])
def test_a1_casimir_values(m, expected):
    w = rsy.dominant_weight(A1, (m,))
    assert rsy.casimir_eigenvalue(A1, w) == expected


def test_a1_casimir_closed_form():
    for m in range(12):
        w = rsy.dominant_weight(A1, (m,))
        assert rsy.casimir_eigenvalue(A1, w) == Fraction(m * (m + 2), 8)


def test_a2_casimir_published_value():
    assert rsy.casimir_eigenvalue(A2, rsy.dominant_weight(A2, (3, 0))) == 2
    assert rsy.casimir_eigenvalue(A2, rsy.dominant_weight(A2, (0, 3))) == 2


def test_weight_root_coords_published():
    assert rsy.dominant_weight(A2, (3, 0)).p_coords == (2, 1)
    assert rsy.dominant_weight(C3, (1, 0, 1)).p_coords == (2, 3, 2)
    assert rsy.dominant_weight(F4, (0, 0, 1, 0)).p_coords == (2, 4, 6, 3)


def test_enumerations_match_published_sets():
    got = [w.m_coords for w in rsy.dominant_weights_below(A2, 2)]
    assert got == [(0, 0), (0, 3), (1, 1), (3, 0)]
    got = [w.m_coords for w in rsy.dominant_weights_below(C3, Fraction(3, 2))]
    assert got == [(0, 0, 0), (0, 1, 0), (1, 0, 1), (2, 0, 0)]
    got = [w.m_coords for w in rsy.dominant_weights_below(F4, Fraction(4, 3))]
    assert got == [(0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (1, 0, 0, 0)]


@pytest.mark.parametrize("rs,cap,box", [
    (A2, Fraction(2), 8), (C3, Fraction(3, 2), 6), (F4, Fraction(4, 3), 5),
    (A1, Fraction(6), 10),
])
def test_enumeration_equals_bruteforce_oracle(rs, cap, box):
    # oracle: filter the full box; verify the quadratic form exceeds the cap
    # on the box boundary so nothing outside can qualify
    brute = []
    for m in itertools.product(range(box + 1), repeat=rs.rank):
        w = rsy.dominant_weight(rs, m)
        if not rsy.spherical_candidate(w):
            continue
        if rsy.casimir_eigenvalue(rs, w) <= cap:
            assert all(c < box for c in m), "box too small for the oracle"
            brute.append(m)
    for j in range(rs.rank):
        edge = tuple(box if i == j else 0 for i in range(rs.rank))
        assert rsy.casimir_eigenvalue(rs, rsy.dominant_weight(rs, edge)) > cap
    got = [w.m_coords for w in rsy.dominant_weights_below(rs, cap)]
    assert got == sorted(brute)


def test_weyl_dimension_values():
    for m in range(8):
        assert rsy.weyl_dimension(A1, rsy.dominant_weight(A1, (m,))) == m + 1
    assert rsy.weyl_dimension(A2, rsy.dominant_weight(A2, (3, 0))) == 10
    assert rsy.weyl_dimension(C3, rsy.dominant_weight(C3, (1, 0, 1))) == 70
    assert rsy.weyl_dimension(F4, rsy.dominant_weight(F4, (0, 0, 1, 0))) == 273


def test_weyl_dimension_diagram_automorphism():
    assert rsy.weyl_dimension(A2, rsy.dominant_weight(A2, (3, 0))) == \
        rsy.weyl_dimension(A2, rsy.dominant_weight(A2, (0, 3)))
    assert rsy.weyl_dimension(A2, rsy.dominant_weight(A2, (0, 0))) == 1


def test_casimir_positive_on_nonzero_dominant():
    for rs in (A1, A2, C3, F4):
        for m in itertools.product(range(3), repeat=rs.rank):
            if all(c == 0 for c in m):
                continue
            assert rsy.casimir_eigenvalue(rs, rsy.dominant_weight(rs, m)) > 0


@pytest.mark.parametrize("rs", [A2, C3, F4], ids=["A2", "C3", "F4"])
def test_m_p_round_trip(rs):
    for m in itertools.product(range(7), repeat=rs.rank):
        w = rsy.dominant_weight(rs, m)
        assert rsy.m_from_p(rs, w.p_coords) == m


def test_center_condition_case_verdicts():
    assert rsy.center_condition(rsy.hermitian_case("AIII2", 2)) is True
    for m in (3, 4, 7):
        assert rsy.center_condition(rsy.hermitian_case("AIII2", m)) is False
    assert rsy.center_condition(rsy.hermitian_case("BII2")) is True
    assert rsy.center_condition(rsy.hermitian_case("DII2")) is True
    assert rsy.center_condition(rsy.hermitian_case("DIII2")) is False
    assert rsy.center_condition(rsy.hermitian_case("EIII")) is False


def test_errors():
    with pytest.raises(ConfigurationError):
        rsy.build_root_system("E", 6)
    with pytest.raises(ConfigurationError):
        rsy.build_root_system("A", 0)
    with pytest.raises(DomainError):
        rsy.dominant_weight(A2, (-1, 0))
    with pytest.raises(DomainError):
        rsy.dominant_weights_below(A2, -1)
    with pytest.raises(ConfigurationError):
        rsy.hermitian_case("AIII2", 1)
    with pytest.raises(ConfigurationError):
        rsy.hermitian_case("XYZ")


def test_dump_format():
    text = rsy.dump_root_system(C3)
    assert "type: C3" in text
    assert "1/2" in text  # exact rationals rendered as p/q
    assert "positive_root_count: 9" in text
