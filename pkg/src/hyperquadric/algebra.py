"""Matrix realizations of compact Lie algebras.

Complex and quaternionic matrices are realized once, at construction, as
real block matrices; everything downstream sees plain real arrays.  The
bilinear form is evaluated blockwise as ``scale * tr(X_b Y_b)`` where the
per-block scale is the closed-form Killing constant of that simple factor
(real-trace convention: ``n`` for su(n), ``n-2`` for so(n), ``n+1`` for
sp(n)).  A circle factor is not semisimple; its block carries the ambient
inner-product convention (scale +1/2 on the 2x2 rotation realization,
giving <it, is> = ts after the global sign flip) and is excluded from
ad-trace validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from .errors import StructuralError

RANK_TOL = 1e-8
CLOSURE_TOL = 1e-10
COORD_TOL = 1e-12


def complex_to_real(z: np.ndarray) -> np.ndarray:
    """Realify a complex matrix A + iB as the real block [[A, -B], [B, A]]."""
    a, b = np.real(z), np.imag(z)
    return np.block([[a, -b], [b, a]])


@dataclass(frozen=True, eq=False)
class KillingBlock:
    start: int
    stop: int
    scale: Fraction
    semisimple: bool = True


@dataclass(frozen=True, eq=False)
class MatrixLieAlgebra:
    """Compact Lie algebra given by an ordered real matrix basis.

    ``killing_blocks`` lists the diagonal blocks of the realization with the
    rational constant relating the real-trace form on that block to the
    Killing-Cartan form.  Instances are immutable and safe to share.
    """

    label: str
    ambient_dim: int
    basis: np.ndarray  # (dim, d, d)
    killing_blocks: tuple[KillingBlock, ...]

    def __post_init__(self):
        flat = self.basis.reshape(len(self.basis), -1)
        object.__setattr__(self, "_flat", flat)
        object.__setattr__(self, "_pinv", np.linalg.pinv(flat))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, coords) -> "AlgebraElement":
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise StructuralError(
                f"{self.label}: expected {self.dim} coordinates, got {coords.shape}"
            )
        matrix = np.tensordot(coords, self.basis, axes=1)
        return AlgebraElement(self, coords, matrix)

    def from_matrix(self, matrix: np.ndarray, tol: float = CLOSURE_TOL) -> "AlgebraElement":
        """Expand a matrix over the basis; reject residuals above ``tol``."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (self.ambient_dim, self.ambient_dim):
            raise StructuralError(
                f"{self.label}: ambient shape mismatch {matrix.shape}"
            )
        coords = self._pinv.T @ matrix.ravel()
        residual = np.linalg.norm(coords @ self._flat - matrix.ravel())
        scale = max(1.0, np.linalg.norm(matrix.ravel()))
        if residual > tol * scale:
            raise StructuralError(
                f"{self.label}: matrix outside span (residual {residual:.3e})"
            )
        return AlgebraElement(self, coords, matrix)

    def killing_pairing(self, a: np.ndarray, b: np.ndarray) -> float:
        """B(a, b) evaluated blockwise on raw matrices."""
        total = 0.0
        for blk in self.killing_blocks:
            sl = slice(blk.start, blk.stop)
            total += float(blk.scale) * np.einsum("ij,ji->", a[sl, sl], b[sl, sl])
        return total


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: MatrixLieAlgebra
    coords: np.ndarray
    matrix: np.ndarray


def _check_same_algebra(x: AlgebraElement, y: AlgebraElement) -> MatrixLieAlgebra:
    if x.algebra is not y.algebra or x.matrix.shape != y.matrix.shape:
        raise StructuralError("operands belong to different algebras")
    return x.algebra


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """[x, y] = xy - yx, expanded over the common basis."""
    alg = _check_same_algebra(x, y)
    return alg.from_matrix(x.matrix @ y.matrix - y.matrix @ x.matrix)


def killing_form(alg: MatrixLieAlgebra, x: AlgebraElement, y: AlgebraElement) -> float:
    """Killing-Cartan form (with the circle-block convention baked in)."""
    _check_same_algebra(x, y)
    return alg.killing_pairing(x.matrix, y.matrix)


def invariant_inner_product(alg: MatrixLieAlgebra, x: AlgebraElement, y: AlgebraElement) -> float:
    """Ad-invariant inner product <x, y> = -B(x, y)."""
    return -killing_form(alg, x, y)


def ad_matrix(alg: MatrixLieAlgebra, x: AlgebraElement) -> np.ndarray:
    """Matrix of ad(x) in basis coordinates."""
    cols = [bracket(x, alg.element(e)).coords for e in np.eye(alg.dim)]
    return np.array(cols).T


def ad_trace_killing(alg: MatrixLieAlgebra, x: AlgebraElement, y: AlgebraElement) -> float:
    """tr(ad x . ad y): the defining Killing form, used to validate scales."""
    return float(np.einsum("ij,ji->", ad_matrix(alg, x), ad_matrix(alg, y)))


def exp_element(x: AlgebraElement, t: float = 1.0) -> np.ndarray:
    """Group element exp(t x) by scaling-and-squaring (Pade 13)."""
    return expm(t * x.matrix)


def orbit_tangent_rank(k_basis, action, point) -> int:
    """Rank of the span of the action-generated tangent vectors at ``point``.

    ``action(xi, point)`` must return the tangent vector induced by the
    basis element ``xi``; singular values within RANK_TOL of the largest
    count as nonzero.
    """
    if len(k_basis) == 0:
        return 0
    cols = np.column_stack([np.ravel(action(xi, point)) for xi in k_basis])
    svals = np.linalg.svd(cols, compute_uv=False)
    if svals.size == 0 or svals[0] < RANK_TOL:
        # an all-noise column stack is a fixed point, not full rank
        return 0
    return int(np.sum(svals > RANK_TOL * svals[0]))


def matrix_action(xi: AlgebraElement, v: np.ndarray) -> np.ndarray:
    """Default linear action: xi . v."""
    return xi.matrix @ v


# ---------------------------------------------------------------------------
# shipped algebra constructors
# ---------------------------------------------------------------------------

def so_algebra(n: int) -> MatrixLieAlgebra:
    """so(n) with basis E_ij = e_i e_j^T - e_j e_i^T for i < j."""
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n))
            m[i, j], m[j, i] = 1.0, -1.0
            basis.append(m)
    blocks = (KillingBlock(0, n, Fraction(n - 2)),)
    return MatrixLieAlgebra(f"so({n})", n, np.array(basis), blocks)


def _su_complex_basis(n: int) -> list[np.ndarray]:
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j], m[j, i] = 1.0, -1.0
            basis.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1j
            basis.append(m)
    for i in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[i, i], m[i + 1, i + 1] = 1j, -1j
        basis.append(m)
    return basis


def su_algebra(n: int) -> MatrixLieAlgebra:
    """su(n), realified to 2n x 2n real matrices."""
    basis = np.array([complex_to_real(z) for z in _su_complex_basis(n)])
    blocks = (KillingBlock(0, 2 * n, Fraction(n)),)  # 2n tr_C = n tr_R
    return MatrixLieAlgebra(f"su({n})", 2 * n, basis, blocks)


def _sp_complex_basis(n: int) -> list[np.ndarray]:
    # sp(n) inside su(2n): X = [[A, B], [-conj(B), conj(A)]],
    # A skew-Hermitian, B complex symmetric.
    basis = []

    def emb(a, b):
        m = np.zeros((2 * n, 2 * n), dtype=complex)
        m[:n, :n] = a
        m[:n, n:] = b
        m[n:, :n] = -np.conj(b)
        m[n:, n:] = np.conj(a)
        return m

    zero = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            a = np.zeros((n, n), dtype=complex)
            a[i, j], a[j, i] = 1.0, -1.0
            basis.append(emb(a, zero))
            a = np.zeros((n, n), dtype=complex)
            a[i, j] = a[j, i] = 1j
            basis.append(emb(a, zero))
    for i in range(n):
        a = np.zeros((n, n), dtype=complex)
        a[i, i] = 1j
        basis.append(emb(a, zero))
    for i in range(n):
        for j in range(i, n):
            for val in (1.0, 1j):
                b = np.zeros((n, n), dtype=complex)
                b[i, j] = b[j, i] = val
                basis.append(emb(zero, b))
    return basis


def sp_algebra(n: int) -> MatrixLieAlgebra:
    """Compact sp(n), realified to 4n x 4n real matrices."""
    basis = np.array([complex_to_real(z) for z in _sp_complex_basis(n)])
    blocks = (KillingBlock(0, 4 * n, Fraction(n + 1)),)  # (2n+2) tr_C
    return MatrixLieAlgebra(f"sp({n})", 4 * n, basis, blocks)


def direct_sum(a: MatrixLieAlgebra, b: MatrixLieAlgebra, label: str | None = None) -> MatrixLieAlgebra:
    """Block-diagonal direct sum of two algebras."""
    da, db = a.ambient_dim, b.ambient_dim
    d = da + db
    basis = []
    for m in a.basis:
        big = np.zeros((d, d))
        big[:da, :da] = m
        basis.append(big)
    for m in b.basis:
        big = np.zeros((d, d))
        big[da:, da:] = m
        basis.append(big)
    blocks = tuple(a.killing_blocks) + tuple(
        KillingBlock(blk.start + da, blk.stop + da, blk.scale, blk.semisimple)
        for blk in b.killing_blocks
    )
    return MatrixLieAlgebra(label or f"{a.label}+{b.label}", d, np.array(basis), blocks)


def circle_algebra() -> MatrixLieAlgebra:
    """The circle factor sqrt(-1) R, realified as 2x2 rotation generators.

    Block scale +1/2 makes -B the (+1)-times standard inner product on
    sqrt(-1) R, matching the ambient convention for the S^1 x BDII row.
    """
    gen = np.array([[0.0, -1.0], [1.0, 0.0]])
    blocks = (KillingBlock(0, 2, Fraction(1, 2), semisimple=False),)
    return MatrixLieAlgebra("iR", 2, gen[None, :, :], blocks)


# ---------------------------------------------------------------------------
# validation helpers (used at pair-construction time and by the test suite)
# ---------------------------------------------------------------------------

def jacobi_residual(alg: MatrixLieAlgebra) -> float:
    """Max entrywise residual of the Jacobi identity over all basis triples."""
    b = alg.basis
    pair = np.einsum("iab,jbc->ijac", b, b)
    brk = pair - np.transpose(pair, (1, 0, 2, 3))  # brk[i, j] = [b_i, b_j]
    worst = 0.0
    for k in range(alg.dim):
        bk = b[k]
        # [[b_i, b_j], b_k]
        t1 = np.einsum("ijab,bc->ijac", brk, bk) - np.einsum("ab,ijbc->ijac", bk, brk)
        # [[b_j, b_k], b_i]
        t2 = np.einsum("jab,ibc->ijac", brk[:, k], b) - np.einsum("iab,jbc->ijac", b, brk[:, k])
        # [[b_k, b_i], b_j]
        t3 = np.einsum("iab,jbc->ijac", brk[k], b) - np.einsum("jab,ibc->ijac", b, brk[k])
        worst = max(worst, float(np.max(np.abs(t1 + t2 + t3))))
    return worst


def closure_residual(alg: MatrixLieAlgebra) -> float:
    """Max projection residual of [b_i, b_j] onto the basis span."""
    b = alg.basis
    flat = alg._flat
    pinv = alg._pinv
    pair = np.einsum("iab,jbc->ijac", b, b)
    brk = (pair - np.transpose(pair, (1, 0, 2, 3))).reshape(alg.dim * alg.dim, -1)
    coords = brk @ pinv
    return float(np.max(np.abs(coords @ flat - brk)))


def killing_scale_residual(alg: MatrixLieAlgebra, n_pairs: int = 100, seed: int = 0) -> float:
    """Relative disagreement of blockwise B against tr(ad ad) on random pairs.

    Circle blocks are excluded: their stored form deliberately replaces the
    (degenerate) Killing form.
    """
    if not all(blk.semisimple for blk in alg.killing_blocks):
        sub = [
            i
            for i, m in enumerate(alg.basis)
            if all(
                np.allclose(m[blk.start:blk.stop, blk.start:blk.stop], 0.0)
                for blk in alg.killing_blocks
                if not blk.semisimple
            )
        ]
    else:
        sub = list(range(alg.dim))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        cx = np.zeros(alg.dim)
        cy = np.zeros(alg.dim)
        cx[sub] = rng.standard_normal(len(sub))
        cy[sub] = rng.standard_normal(len(sub))
        x, y = alg.element(cx), alg.element(cy)
        ref = ad_trace_killing(alg, x, y)
        val = killing_form(alg, x, y)
        denom = max(1.0, abs(ref))
        worst = max(worst, abs(val - ref) / denom)
    return worst
