"""Rank-2 compact symmetric pairs: catalog, construction, restricted roots.

Each matrix-realizable catalog row is built from an explicit ambient
algebra, an involution given by conjugation with an orthogonal matrix,
and a documented two-dimensional flat.  The isotropy/horizontal split and
the restricted-root data are then produced by one generic pipeline:
orthonormalize, split by the involution, and jointly diagonalize the
squared bracket operators of the flat.

Sign conventions: a restricted-root functional is stored as the real pair
(value on H1, value on H2), normalized to be positive on the reference
element at angle 1/sqrt(2); descent bases satisfy [H, X_i] = gamma(H) Y_i
and [H, Y_i] = -gamma(H) X_i.  The orientation (H1, H2) of each flat is
fixed data, chosen to match the deformation-family construction for the
two rows that have one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import atan2, asin, cos, sin, sqrt

import numpy as np

from . import algebra as la
from .errors import (
    ConfigurationError,
    DegeneracyError,
    SingularElementError,
    StructuralError,
    UnsupportedCaseError,
)

GENERIC_ANGLE = 1.0 / sqrt(2.0)
CLUSTER_TOL = 1e-6
GAP_TOL = 1e-4
STDBASIS_TOL = 1e-9
REGULAR_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogRow:
    family: str
    g: int
    type_label: str
    pair_name: str
    dim_n: str
    mult: str
    orbit: str
    matrix_realizable: bool
    default_params: tuple[int, ...]


_CATALOG: tuple[CatalogRow, ...] = (
    CatalogRow("S1xBDII", 1, "S^1 x BDII", "(S^1 x SO(n+2), SO(n+1)) (n>=1)",
               "n", "n", "S^n", True, (3,)),
    CatalogRow("BDIIxBDII", 2, "BDII x BDII",
               "(SO(p+2) x SO(n+2-p), SO(p+1) x SO(n+1-p)) (1<=p<=n-1)",
               "n", "p, n-p", "S^p x S^{n-p}", True, (1, 3)),
    CatalogRow("AI2", 3, "AI_2", "(SU(3), SO(3))", "3", "1, 1",
               "SO(3)/(Z_2+Z_2)", True, ()),
    CatalogRow("a2", 3, "a_2", "(SU(3) x SU(3), SU(3))", "6", "2, 2",
               "SU(3)/T^2", True, ()),
    CatalogRow("AII2", 3, "AII_2", "(SU(6), Sp(3))", "12", "4, 4",
               "Sp(3)/Sp(1)^3", True, ()),
    CatalogRow("EIV", 3, "EIV", "(E_6, F_4)", "24", "8, 8",
               "F_4/Spin(8)", False, ()),
    CatalogRow("b2", 4, "b_2", "(SO(5) x SO(5), SO(5))", "8", "2, 2",
               "SO(5)/T^2", True, ()),
    CatalogRow("AIII2", 4, "AIII_2", "(SU(m+2), S(U(m) x U(2))) (m>=2)",
               "4m-2", "2, 2m-3", "S(U(m) x U(2))/(SU(m-2) x T^2)", True, (3,)),
    CatalogRow("BDI2", 4, "BDI_2", "(SO(m+2), SO(2) x SO(m)) (m>=3)",
               "2m-2", "1, m-2", "(SO(2) x SO(m))/(SO(m-2) x Z_2)", True, (3,)),
    CatalogRow("CII2", 4, "CII_2", "(Sp(m+2), Sp(m) x Sp(2)) (m>=2)",
               "8m-2", "4, 4m-5", "(Sp(m) x Sp(2))/(Sp(m-2) x Sp(1)^2)", True, (2,)),
    CatalogRow("DIII2", 4, "DIII_2", "(SO(10), U(5))", "18", "4, 5",
               "U(5)/(SU(2) x SU(2) x T^1)", True, ()),
    CatalogRow("EIII", 4, "EIII", "(E_6, Spin(10).T)", "30", "6, 9",
               "(Spin(10).T)/(SU(4).T)", False, ()),
    CatalogRow("g2", 6, "g_2", "(G_2 x G_2, G_2)", "12", "2, 2",
               "G_2/T^2", False, ()),
    CatalogRow("G2SO4", 6, "G", "(G_2, SO(4))", "6", "1, 1",
               "SO(4)/(Z_2+Z_2)", False, ()),
)


@dataclass(frozen=True)
class PairDescriptor:
    pair_id: str
    family: str
    g: int
    n: int
    multiplicities: tuple[int, ...]
    space_u: str
    space_k: str
    orbit_space: str
    matrix_realizable: bool
    params: tuple[int, ...] = ()


def catalog_rows() -> tuple[CatalogRow, ...]:
    return _CATALOG


def descriptor(family: str, *params: int) -> PairDescriptor:
    """Concrete descriptor for a catalog family with bound parameters."""
    row = next((r for r in _CATALOG if r.family == family), None)
    if row is None:
        raise ConfigurationError(f"unknown pair family {family!r}")
    params = tuple(params) if params else row.default_params
    if family == "S1xBDII":
        (n,) = params
        if n < 1:
            raise ConfigurationError("S1xBDII requires n >= 1")
        return PairDescriptor(f"S1xBDII({n})", family, 1, n, (n,),
                              f"S^1 x SO({n + 2})", f"SO({n + 1})", "S^n",
                              True, params)
    if family == "BDIIxBDII":
        p, n = params
        if not 1 <= p <= n - 1:
            raise ConfigurationError("BDIIxBDII requires 1 <= p <= n-1")
        return PairDescriptor(f"BDIIxBDII({p},{n})", family, 2, n, (p, n - p),
                              f"SO({p + 2}) x SO({n + 2 - p})",
                              f"SO({p + 1}) x SO({n + 1 - p})",
                              f"S^{p} x S^{n - p}", True, params)
    if family == "AIII2":
        (m,) = params
        if m < 2:
            raise ConfigurationError("AIII2 requires m >= 2")
        return PairDescriptor(f"AIII2({m})", family, 4, 4 * m - 2, (2, 2 * m - 3),
                              f"SU({m + 2})", f"S(U({m}) x U(2))",
                              row.orbit, True, params)
    if family == "BDI2":
        (m,) = params
        if m < 3:
            raise ConfigurationError("BDI2 requires m >= 3")
        return PairDescriptor(f"BDI2({m})", family, 4, 2 * m - 2, (1, m - 2),
                              f"SO({m + 2})", f"SO(2) x SO({m})",
                              row.orbit, True, params)
    if family == "CII2":
        (m,) = params
        if m < 2:
            raise ConfigurationError("CII2 requires m >= 2")
        return PairDescriptor(f"CII2({m})", family, 4, 8 * m - 2, (4, 4 * m - 5),
                              f"Sp({m + 2})", f"Sp({m}) x Sp(2)",
                              row.orbit, True, params)
    fixed = {
        "AI2": (3, 3, (1, 1), "SU(3)", "SO(3)"),
        "a2": (3, 6, (2, 2), "SU(3) x SU(3)", "SU(3)"),
        "AII2": (3, 12, (4, 4), "SU(6)", "Sp(3)"),
        "EIV": (3, 24, (8, 8), "E_6", "F_4"),
        "b2": (4, 8, (2, 2), "SO(5) x SO(5)", "SO(5)"),
        "DIII2": (4, 18, (4, 5), "SO(10)", "U(5)"),
        "EIII": (4, 30, (6, 9), "E_6", "Spin(10).T"),
        "g2": (6, 12, (2, 2), "G_2 x G_2", "G_2"),
        "G2SO4": (6, 6, (1, 1), "G_2", "SO(4)"),
    }
    g, n, mult, su, sk = fixed[family]
    return PairDescriptor(family, family, g, n, mult, su, sk,
                          row.orbit, row.matrix_realizable, ())


def load_catalog() -> list[PairDescriptor]:
    """All catalog rows as descriptors (parameterized rows at defaults)."""
    return [descriptor(row.family, *row.default_params) for row in _CATALOG]


def matrix_realizable_descriptors() -> list[PairDescriptor]:
    return [d for d in load_catalog() if d.matrix_realizable]


def parse_pair_id(pair_id: str) -> PairDescriptor:
    """Descriptor from an id string like ``BDI2(4)`` or ``AI2``."""
    name = pair_id.strip()
    if "(" in name:
        family, rest = name.split("(", 1)
        params = tuple(int(tok) for tok in rest.rstrip(")").split(","))
        return descriptor(family, *params)
    return descriptor(name)


# ---------------------------------------------------------------------------
# raw builders: ambient algebra, involution, flat, deformation generator
# ---------------------------------------------------------------------------

def _embed_block(mat: np.ndarray, offset: int, total: int) -> np.ndarray:
    out = np.zeros((total, total))
    k = mat.shape[0]
    out[offset:offset + k, offset:offset + k] = mat
    return out


def _so_unit(n: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[i, j], m[j, i] = 1.0, -1.0
    return m


def _swap_matrix(half: int) -> np.ndarray:
    s = np.zeros((2 * half, 2 * half))
    s[:half, half:] = np.eye(half)
    s[half:, :half] = np.eye(half)
    return s


def _raw_pair(desc: PairDescriptor):
    """Return (u, involution S, (H1_raw, H2_raw), z_raw or None)."""
    fam, params = desc.family, desc.params
    if fam == "AI2":
        u = la.su_algebra(3)
        s = np.diag([1.0] * 3 + [-1.0] * 3)
        h1 = la.complex_to_real(np.diag([1j, -1j, 0]))
        h2 = la.complex_to_real(np.diag([1j, 1j, -2j]))
        return u, s, (h1, h2), None
    if fam == "a2":
        u = la.direct_sum(la.su_algebra(3), la.su_algebra(3), "su(3)+su(3)")
        s = _swap_matrix(6)
        d1 = la.complex_to_real(np.diag([1j, -1j, 0]))
        d2 = la.complex_to_real(np.diag([1j, 1j, -2j]))
        h1 = np.block([[d1, np.zeros((6, 6))], [np.zeros((6, 6)), -d1]])
        h2 = np.block([[d2, np.zeros((6, 6))], [np.zeros((6, 6)), -d2]])
        return u, s, (h1, h2), None
    if fam == "AII2":
        u = la.su_algebra(6)
        jc = np.zeros((6, 6), dtype=complex)
        jc[:3, 3:] = np.eye(3)
        jc[3:, :3] = -np.eye(3)
        s = la.complex_to_real(jc) @ np.diag([1.0] * 6 + [-1.0] * 6)
        h1 = la.complex_to_real(np.diag([1j, -1j, 0, 1j, -1j, 0]))
        h2 = la.complex_to_real(np.diag([1j, 1j, -2j, 1j, 1j, -2j]))
        return u, s, (h1, h2), None
    if fam == "b2":
        u = la.direct_sum(la.so_algebra(5), la.so_algebra(5), "so(5)+so(5)")
        s = _swap_matrix(5)
        e12, e34 = _so_unit(5, 0, 1), _so_unit(5, 2, 3)
        zero = np.zeros((5, 5))
        h1 = np.block([[e12, zero], [zero, -e12]])
        h2 = np.block([[e34, zero], [zero, -e34]])
        return u, s, (h1, h2), None
    if fam == "AIII2":
        (m,) = params
        u = la.su_algebra(m + 2)
        s = np.diag(([1.0] * m + [-1.0] * 2) * 2)
        a1 = np.zeros((m + 2, m + 2), dtype=complex)
        a1[0, m], a1[m, 0] = 1.0, -1.0
        a2 = np.zeros((m + 2, m + 2), dtype=complex)
        a2[1, m + 1], a2[m + 1, 1] = 1.0, -1.0
        return u, s, (la.complex_to_real(a1), la.complex_to_real(a2)), None
    if fam == "CII2":
        (m,) = params
        u = la.sp_algebra(m + 2)
        s = np.diag((([1.0] * m + [-1.0] * 2) * 2) * 2)
        k = m + 2

        def sp_elem(a):
            big = np.zeros((2 * k, 2 * k), dtype=complex)
            big[:k, :k] = a
            big[k:, k:] = np.conj(a)
            return la.complex_to_real(big)

        a1 = np.zeros((k, k), dtype=complex)
        a1[0, m], a1[m, 0] = 1.0, -1.0
        a2 = np.zeros((k, k), dtype=complex)
        a2[1, m + 1], a2[m + 1, 1] = 1.0, -1.0
        return u, s, (sp_elem(a1), sp_elem(a2)), None
    if fam == "BDI2":
        (m,) = params
        u = la.so_algebra(m + 2)
        s = np.diag([1.0] * 2 + [-1.0] * m)
        h2 = _so_unit(m + 2, 0, 2)   # "e_1"
        h1 = _so_unit(m + 2, 1, 3)   # "e_2"
        z = np.zeros((m + 2, m + 2))
        z[0, 1], z[1, 0] = -1.0, 1.0
        return u, s, (h1, h2), z
    if fam == "DIII2":
        u = la.so_algebra(10)
        jr = np.zeros((10, 10))
        jr[:5, 5:] = -np.eye(5)
        jr[5:, :5] = np.eye(5)
        s = jr
        b1, b2 = _so_unit(5, 0, 1), _so_unit(5, 2, 3)
        h1 = np.block([[np.zeros((5, 5)), b1], [b1, np.zeros((5, 5))]])
        h2 = np.block([[np.zeros((5, 5)), b2], [b2, np.zeros((5, 5))]])
        return u, s, (h1, h2), None
    if fam == "BDIIxBDII":
        p, n = params
        q = n - p
        u = la.direct_sum(la.so_algebra(p + 2), la.so_algebra(q + 2),
                          f"so({p + 2})+so({q + 2})")
        s = np.diag([-1.0] + [1.0] * (p + 1) + [-1.0] + [1.0] * (q + 1))
        d = p + q + 4
        h2 = _embed_block(_so_unit(p + 2, 0, 1), 0, d)
        h1 = _embed_block(_so_unit(q + 2, 0, 1), p + 2, d)
        z = None
        if p == 1:
            zf = np.zeros((3, 3))
            zf[1, 2], zf[2, 1] = -1.0, 1.0
            z = _embed_block(zf, 0, d)
        return u, s, (h1, h2), z
    if fam == "S1xBDII":
        (n,) = params
        u = la.direct_sum(la.circle_algebra(), la.so_algebra(n + 2),
                          f"iR+so({n + 2})")
        s = np.diag([1.0, -1.0] + [-1.0] + [1.0] * (n + 1))
        d = n + 4
        h1 = _embed_block(np.array([[0.0, -1.0], [1.0, 0.0]]), 0, d)
        h2 = _embed_block(_so_unit(n + 2, 0, 1), 2, d)
        return u, s, (h1, h2), None
    raise UnsupportedCaseError(f"{desc.pair_id} has no matrix realization")


# ---------------------------------------------------------------------------
# the symmetric pair object
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class RestrictedRoot:
    gamma: np.ndarray          # (2,) values on (H1, H2)
    multiplicity: int
    y_pcoords: np.ndarray      # (mult, n+2)
    x_kcoords: np.ndarray      # (mult, dim_k)


@dataclass(eq=False)
class SymmetricPair:
    descriptor: PairDescriptor
    u: la.MatrixLieAlgebra
    k_basis: np.ndarray        # (dim_k, d, d), orthonormal
    p_basis: np.ndarray        # (n+2, d, d), rows 0,1 = H1, H2
    restricted_roots: list[RestrictedRoot] | None = None
    k0_kcoords: np.ndarray | None = None
    center_kcoords: np.ndarray | None = None
    center_in_m: bool | None = None
    hermitian_z: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    # -- metric and coordinates ------------------------------------------
    @property
    def dim_k(self) -> int:
        return len(self.k_basis)

    @property
    def dim_p(self) -> int:
        return len(self.p_basis)

    @property
    def n(self) -> int:
        return self.dim_p - 2

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return -self.u.killing_pairing(a, b)

    def _metric_flat(self, mats: np.ndarray) -> np.ndarray:
        """Stack W(m) with <m, x> = W(m) . x.ravel() for each row m."""
        out = np.zeros((len(mats), self.u.ambient_dim ** 2))
        d = self.u.ambient_dim
        for blk in self.u.killing_blocks:
            w = np.zeros((len(mats), d, d))
            sl = slice(blk.start, blk.stop)
            w[:, sl, sl] = -float(blk.scale) * np.transpose(mats[:, sl, sl], (0, 2, 1))
            out += w.reshape(len(mats), -1)
        return out

    @property
    def p_dual(self) -> np.ndarray:
        if "p_dual" not in self._cache:
            self._cache["p_dual"] = self._metric_flat(self.p_basis)
        return self._cache["p_dual"]

    @property
    def k_dual(self) -> np.ndarray:
        if "k_dual" not in self._cache:
            self._cache["k_dual"] = self._metric_flat(self.k_basis)
        return self._cache["k_dual"]

    def to_p_coords(self, mat: np.ndarray) -> np.ndarray:
        return self.p_dual @ mat.ravel()

    def to_k_coords(self, mat: np.ndarray) -> np.ndarray:
        return self.k_dual @ mat.ravel()

    def p_matrix(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(coords, self.p_basis, axes=1)

    def k_matrix(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(coords, self.k_basis, axes=1)

    # -- structure tensors -------------------------------------------------
    @property
    def ad_k_on_p(self) -> np.ndarray:
        """(dim_k, n+2, n+2): matrix of [k_i, .] on horizontal coordinates.

        Axis order is (generator, output coordinate, input coordinate), so
        ``ad_k_on_p[i] @ v`` is [k_i, v].
        """
        if "adk" not in self._cache:
            br = np.einsum("iab,jbc->ijac", self.k_basis, self.p_basis) \
                - np.einsum("jab,ibc->ijac", self.p_basis, self.k_basis)
            self._cache["adk"] = np.einsum(
                "af,ijf->iaj", self.p_dual, br.reshape(self.dim_k, self.dim_p, -1)
            )
        return self._cache["adk"]

    @property
    def pp_to_k(self) -> np.ndarray:
        """(n+2, n+2, dim_k): bracket of horizontal vectors over k coords."""
        if "ppk" not in self._cache:
            br = np.einsum("iab,jbc->ijac", self.p_basis, self.p_basis)
            br = br - np.transpose(br, (1, 0, 2, 3))
            self._cache["ppk"] = np.einsum(
                "lf,ijf->ijl", self.k_dual, br.reshape(self.dim_p, self.dim_p, -1)
            )
        return self._cache["ppk"]

    @property
    def ad_k_on_k(self) -> np.ndarray:
        """(dim_k, dim_k, dim_k): adjoint structure constants of k."""
        if "adkk" not in self._cache:
            br = np.einsum("iab,jbc->ijac", self.k_basis, self.k_basis)
            br = br - np.transpose(br, (1, 0, 2, 3))
            self._cache["adkk"] = np.einsum(
                "lf,ijf->ijl", self.k_dual, br.reshape(self.dim_k, self.dim_k, -1)
            )
        return self._cache["adkk"]

    def bracket_pp(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """[a, b] in k coords for horizontal coordinate vectors a, b."""
        return np.einsum("i,j,ijl->l", a, b, self.pp_to_k)

    def ad_rotation(self, group_elem: np.ndarray) -> np.ndarray:
        """Orthogonal matrix of Ad(g) on horizontal coordinates."""
        conj = np.einsum("ab,ibc,dc->iad", group_elem, self.p_basis, group_elem)
        return self.p_dual @ conj.reshape(self.dim_p, -1).T

    def ad_rotation_k(self, group_elem: np.ndarray) -> np.ndarray:
        """Orthogonal matrix of Ad(g) on isotropy coordinates."""
        conj = np.einsum("ab,ibc,dc->iad", group_elem, self.k_basis, group_elem)
        return self.k_dual @ conj.reshape(self.dim_k, -1).T

    def k_exp(self, k_coords: np.ndarray, t: float = 1.0) -> np.ndarray:
        """Group element exp(t xi) for xi given in isotropy coordinates."""
        return la.expm(t * self.k_matrix(k_coords))

    @property
    def positive_roots_sorted(self) -> list[RestrictedRoot]:
        if self.restricted_roots is None:
            raise StructuralError("restricted-root decomposition not yet computed")
        return sorted(self.restricted_roots,
                      key=lambda r: atan2(r.gamma[1], r.gamma[0]))

    @property
    def y_stack(self) -> np.ndarray:
        """(n, n+2) all Y vectors in root order: the tangent frame at H."""
        if "ystack" not in self._cache:
            self._cache["ystack"] = np.vstack(
                [r.y_pcoords for r in self.positive_roots_sorted]
            )
        return self._cache["ystack"]

    @property
    def x_stack(self) -> np.ndarray:
        if "xstack" not in self._cache:
            self._cache["xstack"] = np.vstack(
                [r.x_kcoords for r in self.positive_roots_sorted]
            )
        return self._cache["xstack"]

    def gamma_at(self, h_coords: np.ndarray) -> np.ndarray:
        """Values gamma(H) for all positive roots, H in flat coordinates."""
        return np.array([
            r.gamma[0] * h_coords[0] + r.gamma[1] * h_coords[1]
            for r in self.positive_roots_sorted
        ])

    def gamma_rows_at(self, h_coords: np.ndarray) -> np.ndarray:
        """gamma(H) repeated per descent-basis row, aligned with y_stack."""
        return np.repeat(
            self.gamma_at(h_coords),
            [r.multiplicity for r in self.positive_roots_sorted],
        )


# ---------------------------------------------------------------------------
# construction pipeline
# ---------------------------------------------------------------------------

def _orthonormal_basis(u: la.MatrixLieAlgebra) -> np.ndarray:
    raw = u.basis
    flat = raw.reshape(len(raw), -1)
    dual = np.zeros_like(flat)
    d = u.ambient_dim
    for blk in u.killing_blocks:
        w = np.zeros((len(raw), d, d))
        sl = slice(blk.start, blk.stop)
        w[:, sl, sl] = -float(blk.scale) * np.transpose(raw[:, sl, sl], (0, 2, 1))
        dual += w.reshape(len(raw), -1)
    gram = dual @ flat.T
    chol = np.linalg.cholesky(gram)
    coeff = np.linalg.inv(chol)
    return np.einsum("ij,jab->iab", coeff, raw)


def canonical_decomposition(desc: PairDescriptor) -> SymmetricPair:
    """Ambient algebra with isotropy/horizontal split and oriented flat."""
    if not desc.matrix_realizable:
        raise UnsupportedCaseError(f"{desc.pair_id} has no matrix realization")
    u, invol, (h1_raw, h2_raw), z_raw = _raw_pair(desc)
    onb = _orthonormal_basis(u)
    flat = onb.reshape(len(onb), -1)
    conj = np.einsum("ab,ibc,dc->iad", invol, onb, invol)
    d = u.ambient_dim
    dual = np.zeros_like(flat)
    for blk in u.killing_blocks:
        w = np.zeros((len(onb), d, d))
        sl = slice(blk.start, blk.stop)
        w[:, sl, sl] = -float(blk.scale) * np.transpose(onb[:, sl, sl], (0, 2, 1))
        dual += w.reshape(len(onb), -1)
    theta = dual @ conj.reshape(len(onb), -1).T
    theta = 0.5 * (theta + theta.T)
    evals, evecs = np.linalg.eigh(theta)
    if np.any(np.abs(np.abs(evals) - 1.0) > 1e-10):
        raise StructuralError(f"{desc.pair_id}: involution spectrum not +-1")
    k_vecs = evecs[:, evals > 0].T
    p_vecs = evecs[:, evals < 0].T
    k_basis = np.einsum("ij,jab->iab", k_vecs, onb)
    p_mats = np.einsum("ij,jab->iab", p_vecs, onb)

    pair = SymmetricPair(desc, u, k_basis, p_mats)
    # normalize and orient the flat, then rebuild p_basis with H1, H2 first
    h1 = h1_raw / sqrt(pair.inner(h1_raw, h1_raw))
    h2 = h2_raw / sqrt(pair.inner(h2_raw, h2_raw))
    if abs(pair.inner(h1, h2)) > 1e-12:
        raise StructuralError(f"{desc.pair_id}: flat generators not orthogonal")
    p_flat = p_mats.reshape(len(p_mats), -1)
    dual_p = pair._metric_flat(p_mats)
    for h in (h1, h2):
        coords = dual_p @ h.ravel()
        if np.linalg.norm(coords @ p_flat - h.ravel()) > 1e-10:
            raise StructuralError(f"{desc.pair_id}: flat not inside horizontal space")
    c1 = dual_p @ h1.ravel()
    c2 = dual_p @ h2.ravel()
    comp = np.eye(len(p_mats)) - np.outer(c1, c1) - np.outer(c2, c2)
    w, v = np.linalg.eigh(comp)
    rest = v[:, w > 0.5].T @ p_mats.reshape(len(p_mats), -1)
    p_basis = np.vstack([h1.ravel()[None, :], h2.ravel()[None, :], rest])
    p_basis = p_basis.reshape(-1, d, d)
    pair = SymmetricPair(desc, u, k_basis, p_basis, hermitian_z=z_raw)
    _validate_split(pair)
    return pair


def _validate_split(pair: SymmetricPair, tol: float = 1e-10) -> None:
    """[k,k] in k, [k,p] in p, [p,p] in k, flat abelian, bases orthonormal."""
    kf = pair.k_basis.reshape(pair.dim_k, -1)
    pf = pair.p_basis.reshape(pair.dim_p, -1)
    gram_k = pair.k_dual @ kf.T
    gram_p = pair.p_dual @ pf.T
    if np.max(np.abs(gram_k - np.eye(pair.dim_k))) > 1e-9:
        raise StructuralError(f"{pair.descriptor.pair_id}: k basis not orthonormal")
    if np.max(np.abs(gram_p - np.eye(pair.dim_p))) > 1e-9:
        raise StructuralError(f"{pair.descriptor.pair_id}: p basis not orthonormal")

    def span_residual(mats, dual, flat):
        coords = dual @ mats.reshape(len(mats), -1).T
        recon = coords.T @ flat
        return float(np.max(np.abs(recon - mats.reshape(len(mats), -1))))

    kk = np.einsum("iab,jbc->ijac", pair.k_basis, pair.k_basis)
    kk = (kk - np.transpose(kk, (1, 0, 2, 3))).reshape(-1, pair.u.ambient_dim,
                                                       pair.u.ambient_dim)
    kp = np.einsum("iab,jbc->ijac", pair.k_basis, pair.p_basis) \
        - np.einsum("jab,ibc->ijac", pair.p_basis, pair.k_basis)
    kp = kp.reshape(-1, pair.u.ambient_dim, pair.u.ambient_dim)
    pp = np.einsum("iab,jbc->ijac", pair.p_basis, pair.p_basis)
    pp = (pp - np.transpose(pp, (1, 0, 2, 3))).reshape(-1, pair.u.ambient_dim,
                                                       pair.u.ambient_dim)
    for mats, dual, flat, what in (
        (kk, pair.k_dual, kf, "[k,k] in k"),
        (kp, pair.p_dual, pf, "[k,p] in p"),
        (pp, pair.k_dual, kf, "[p,p] in k"),
    ):
        if span_residual(mats, dual, flat) > tol:
            raise StructuralError(f"{pair.descriptor.pair_id}: {what} failed")
    h1m, h2m = pair.p_basis[0], pair.p_basis[1]
    if np.max(np.abs(h1m @ h2m - h2m @ h1m)) > tol:
        raise StructuralError(f"{pair.descriptor.pair_id}: flat not abelian")


def _cluster_refine(blocks, op, cluster_tol, gap_tol, pair_id):
    """Refine joint-eigenspace blocks by one more commuting operator."""
    out = []
    for key, q in blocks:
        m = q.T @ op @ q
        m = 0.5 * (m + m.T)
        w, v = np.linalg.eigh(m)
        idx = np.argsort(w)
        w, v = w[idx], v[:, idx]
        groups = []
        start = 0
        for i in range(1, len(w) + 1):
            if i == len(w) or w[i] - w[i - 1] > cluster_tol:
                groups.append(slice(start, i))
                start = i
        means = [float(np.mean(w[g])) for g in groups]
        for a in range(len(means)):
            for b in range(a + 1, len(means)):
                if abs(means[a] - means[b]) < gap_tol:
                    raise DegeneracyError(
                        f"{pair_id}: eigenvalue clusters {means[a]:.3e} and "
                        f"{means[b]:.3e} closer than the required gap"
                    )
        for g, mean in zip(groups, means):
            out.append((key + (mean,), q @ v[:, g]))
    return out


def restricted_root_decomposition(pair: SymmetricPair) -> SymmetricPair:
    """Fill in restricted roots, descent bases, k0, and the center data."""
    h1m, h2m = pair.p_basis[0], pair.p_basis[1]
    d = pair.u.ambient_dim

    def ad_p_to_k(h):
        br = np.einsum("ab,ibc->iac", h, pair.p_basis) \
            - np.einsum("iab,bc->iac", pair.p_basis, h)
        return pair.k_dual @ br.reshape(pair.dim_p, -1).T  # (dim_k, n+2)

    def ad_k_to_p(h):
        br = np.einsum("ab,ibc->iac", h, pair.k_basis) \
            - np.einsum("iab,bc->iac", pair.k_basis, h)
        return pair.p_dual @ br.reshape(pair.dim_k, -1).T  # (n+2, dim_k)

    t1, t2 = ad_p_to_k(h1m), ad_p_to_k(h2m)
    b1, b2 = ad_k_to_p(h1m), ad_k_to_p(h2m)
    s1 = -(b1 @ t1)
    s2 = -(b2 @ t2)
    s12 = -(b1 @ t2)

    blocks = [((), np.eye(pair.dim_p))]
    for op in (s1, s2, s12):
        blocks = _cluster_refine(blocks, op, CLUSTER_TOL, GAP_TOL,
                                 pair.descriptor.pair_id)

    hstar = cos(GENERIC_ANGLE) * h1m + sin(GENERIC_ANGLE) * h2m
    roots: list[RestrictedRoot] = []
    flat_block = None
    for (v1, v2, v12), q in blocks:
        if abs(v1) < CLUSTER_TOL and abs(v2) < CLUSTER_TOL:
            flat_block = q
            continue
        # sqrt of a zero cluster would turn eigh noise into 1e-8 components
        a1 = sqrt(v1) if v1 > CLUSTER_TOL else 0.0
        a2 = sqrt(v2) if v2 > CLUSTER_TOL else 0.0
        if a1 > 0.0 and a2 > 0.0:
            a2 = a2 if v12 > 0 else -a2
        gamma = np.array([a1, a2])
        if cos(GENERIC_ANGLE) * gamma[0] + sin(GENERIC_ANGLE) * gamma[1] < 0:
            gamma = -gamma
        g_star = cos(GENERIC_ANGLE) * gamma[0] + sin(GENERIC_ANGLE) * gamma[1]
        y_p = q.T  # rows: orthonormal horizontal coordinates
        x_rows = []
        for row in y_p:
            ym = pair.p_matrix(row)
            xm = -(hstar @ ym - ym @ hstar) / g_star
            x_rows.append(pair.to_k_coords(xm))
        roots.append(RestrictedRoot(gamma, len(y_p), y_p, np.array(x_rows)))
    if flat_block is None or flat_block.shape[1] != 2:
        got = 0 if flat_block is None else flat_block.shape[1]
        raise StructuralError(
            f"{pair.descriptor.pair_id}: flat has joint-kernel dimension {got}, "
            "expected 2 (flat not maximal abelian or construction bug)"
        )
    span = flat_block @ flat_block.T
    target = np.zeros_like(span)
    target[0, 0] = target[1, 1] = 1.0
    if np.max(np.abs(span - target)) > 1e-9:
        raise StructuralError(
            f"{pair.descriptor.pair_id}: joint kernel differs from the flat"
        )

    # k0 = centralizer of the flat inside k: joint kernel of [h_i, .] on k
    stacked = np.vstack([b1, b2])  # (2(n+2), dim_k)
    _, sv, vt = np.linalg.svd(stacked)
    tolr = 1e-8 * (sv[0] if len(sv) else 1.0)
    k0 = vt[len([s for s in sv if s > tolr]):]
    pair.k0_kcoords = k0

    # center of k: joint kernel of all ad(k_i) acting on k coordinates
    adkk = pair.ad_k_on_k  # adkk[i, j, l] = <k_l, [k_i, k_j]>
    flatmap = adkk.transpose(0, 2, 1).reshape(-1, pair.dim_k)  # (i l) x j
    _, sv, vt = np.linalg.svd(flatmap, full_matrices=True)
    ncut = len([s for s in sv if s > 1e-8 * (sv[0] if len(sv) else 1.0)])
    center = vt[ncut:]
    pair.center_kcoords = center
    if len(center) == 0:
        pair.center_in_m = False
    else:
        proj = center @ k0.T if len(k0) else np.zeros((len(center), 0))
        pair.center_in_m = bool(proj.size == 0 or np.max(np.abs(proj)) < 1e-8)

    pair.restricted_roots = roots
    _validate_roots(pair)
    return pair


def root_rays(pair: SymmetricPair) -> list[list[RestrictedRoot]]:
    """Positive roots grouped by ray (gamma and 2 gamma share one ray).

    Proportional roots occur for the BC-type rows; each ray carries one
    principal-curvature value, so the ray count is the g of the catalog.
    """
    rays: list[list[RestrictedRoot]] = []
    for r in pair.positive_roots_sorted:
        direction = r.gamma / np.hypot(r.gamma[0], r.gamma[1])
        for group in rays:
            ref = group[0].gamma / np.hypot(group[0].gamma[0], group[0].gamma[1])
            if np.allclose(direction, ref, atol=1e-8):
                group.append(r)
                break
        else:
            rays.append([r])
    return rays


def _validate_roots(pair: SymmetricPair) -> None:
    desc = pair.descriptor
    roots = pair.positive_roots_sorted
    total = sum(r.multiplicity for r in roots)
    if total != pair.n:
        raise StructuralError(f"{desc.pair_id}: root multiplicities sum to {total}, "
                              f"expected {pair.n}")
    if len(root_rays(pair)) != desc.g:
        raise StructuralError(f"{desc.pair_id}: {len(root_rays(pair))} root rays, "
                              f"expected g = {desc.g}")
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        c = rng.standard_normal(2)
        hm = c[0] * pair.p_basis[0] + c[1] * pair.p_basis[1]
        for r in roots:
            gval = r.gamma @ c
            for yrow, xrow in zip(r.y_pcoords, r.x_kcoords):
                xm = pair.k_matrix(xrow)
                ym = pair.p_matrix(yrow)
                res1 = (hm @ xm - xm @ hm) - gval * ym
                res2 = (hm @ ym - ym @ hm) + gval * xm
                worst = max(worst, float(np.max(np.abs(res1))),
                            float(np.max(np.abs(res2))))
    if worst > STDBASIS_TOL:
        raise StructuralError(
            f"{desc.pair_id}: descent-basis bracket residual {worst:.3e}"
        )


_PAIR_CACHE: dict[str, SymmetricPair] = {}


def build_pair(desc: PairDescriptor | str) -> SymmetricPair:
    """Fully constructed (and cached) symmetric pair for a descriptor or id."""
    if isinstance(desc, str):
        desc = parse_pair_id(desc)
    if desc.pair_id not in _PAIR_CACHE:
        pair = canonical_decomposition(desc)
        _PAIR_CACHE[desc.pair_id] = restricted_root_decomposition(pair)
    return _PAIR_CACHE[desc.pair_id]


def regular_element(pair: SymmetricPair, theta: float) -> np.ndarray:
    """Unit flat element cos(theta) H1 + sin(theta) H2 in horizontal coords.

    Raises SingularElementError when the angle is within 1e-6 of a root
    hyperplane.
    """
    h = np.zeros(pair.dim_p)
    h[0], h[1] = cos(theta), sin(theta)
    for r in pair.positive_roots_sorted:
        norm = float(np.hypot(r.gamma[0], r.gamma[1]))
        margin = abs(r.gamma[0] * h[0] + r.gamma[1] * h[1]) / norm
        if asin(min(1.0, margin)) < REGULAR_MARGIN:
            raise SingularElementError(
                f"{pair.descriptor.pair_id}: theta={theta} lies on a root hyperplane"
            )
    return h
