"""Exact-rational root systems, weights, and Casimir eigenvalues.

All arithmetic in this module is over ``fractions.Fraction``; no floating
point enters.  Vectors live in a Euclidean model with a rational form
scale chosen so long roots have squared length 2; the Killing-dual form
divides that basic form by twice the dual Coxeter number.  The stored
normalization is pinned by published rank-1 and rank-2 eigenvalues in the
test suite rather than rederived here.

Root functionals in the source material take values in sqrt(-1) R; we
store the real bookkeeping value (the functional multiplied by sqrt(-1))
so that all coordinates stay rational.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .errors import ConfigurationError, DomainError

Vector = tuple[Fraction, ...]

_DUAL_COXETER = {"A": lambda l: l + 1, "B": lambda l: 2 * l - 1,
                 "C": lambda l: l + 1, "D": lambda l: 2 * l - 2,
                 "F": lambda l: 9}


def _vec(*entries) -> Vector:
    return tuple(Fraction(e) for e in entries)


def _add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def _sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def _scale(c: Fraction, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def _dot(u: Vector, v: Vector) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _fraction_solve(mat: list[list[Fraction]], rhs: list[Vector | Fraction]) -> list:
    """Exact Gaussian elimination; raises DomainError if singular."""
    n = len(mat)
    a = [row[:] for row in mat]
    b = list(rhs)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise DomainError("singular exact system")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] = _scale(inv, b[col]) if isinstance(b[col], tuple) else b[col] * inv
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                if isinstance(b[r], tuple):
                    b[r] = _sub(b[r], _scale(f, b[col]))
                else:
                    b[r] = b[r] - f * b[col]
    return b


@dataclass(frozen=True)
class RootSystemData:
    family: str
    rank: int
    simple_roots: tuple[Vector, ...]
    cartan_matrix: tuple[tuple[int, ...], ...]
    fundamental_weights: tuple[Vector, ...]
    fundamental_weight_root_coords: tuple[Vector, ...]  # columns of C^-1
    positive_roots: tuple[Vector, ...]
    delta: Vector
    form_scale: Fraction
    killing_normalizer: Fraction

    def inner_basic(self, u: Vector, v: Vector) -> Fraction:
        """Basic form: long roots have squared length 2."""
        return self.form_scale * _dot(u, v)

    def inner_killing(self, u: Vector, v: Vector) -> Fraction:
        """Killing-dual form used by all eigenvalue statements."""
        return self.killing_normalizer * self.inner_basic(u, v)


@dataclass(frozen=True)
class DominantWeight:
    m_coords: tuple[int, ...]
    p_coords: tuple[Fraction, ...]
    vector: Vector

    def __str__(self):
        return "(" + " ".join(str(m) for m in self.m_coords) + ")"


def _simple_root_table(family: str, rank: int) -> tuple[list[Vector], Fraction]:
    if family == "A" and rank >= 1:
        dim = rank + 1
        roots = []
        for i in range(rank):
            v = [Fraction(0)] * dim
            v[i], v[i + 1] = Fraction(1), Fraction(-1)
            roots.append(tuple(v))
        return roots, Fraction(1)
    if family == "B" and rank >= 2:
        roots = []
        for i in range(rank - 1):
            v = [Fraction(0)] * rank
            v[i], v[i + 1] = Fraction(1), Fraction(-1)
            roots.append(tuple(v))
        v = [Fraction(0)] * rank
        v[rank - 1] = Fraction(1)
        roots.append(tuple(v))
        return roots, Fraction(1)
    if family == "C" and rank >= 2:
        roots = []
        for i in range(rank - 1):
            v = [Fraction(0)] * rank
            v[i], v[i + 1] = Fraction(1), Fraction(-1)
            roots.append(tuple(v))
        v = [Fraction(0)] * rank
        v[rank - 1] = Fraction(2)
        roots.append(tuple(v))
        return roots, Fraction(1, 2)
    if family == "D" and rank >= 3:
        roots = []
        for i in range(rank - 1):
            v = [Fraction(0)] * rank
            v[i], v[i + 1] = Fraction(1), Fraction(-1)
            roots.append(tuple(v))
        v = [Fraction(0)] * rank
        v[rank - 2], v[rank - 1] = Fraction(1), Fraction(1)
        roots.append(tuple(v))
        return roots, Fraction(1)
    if family == "F" and rank == 4:
        roots = [
            _vec(0, 1, -1, 0),
            _vec(0, 0, 1, -1),
            _vec(0, 0, 0, 1),
            (Fraction(1, 2), Fraction(-1, 2), Fraction(-1, 2), Fraction(-1, 2)),
        ]
        return roots, Fraction(1)
    raise ConfigurationError(f"unsupported root system {family}{rank}")


def _close_positive_roots(simple: list[Vector], form_scale: Fraction) -> list[Vector]:
    """Generate all positive roots by closing root strings upward."""

    def pairing(beta: Vector, alpha: Vector) -> Fraction:
        return 2 * form_scale * _dot(beta, alpha) / (form_scale * _dot(alpha, alpha))

    known = set(simple)
    layers = [list(simple)]
    while layers[-1]:
        nxt = []
        for beta in layers[-1]:
            for alpha in simple:
                # string through beta: q = p - <beta, alpha^v>
                p = 0
                probe = _sub(beta, alpha)
                while probe in known:
                    p += 1
                    probe = _sub(probe, alpha)
                q = p - pairing(beta, alpha)
                if q > 0:
                    cand = _add(beta, alpha)
                    if cand not in known:
                        known.add(cand)
                        nxt.append(cand)
        layers.append(nxt)
    return sorted(known)


def build_root_system(family: str, rank: int) -> RootSystemData:
    """Validated exact root/weight data for a supported type."""
    simple, form_scale = _simple_root_table(family, rank)
    h_dual = _DUAL_COXETER.get(family)
    if h_dual is None:
        raise ConfigurationError(f"unsupported family {family}")
    cartan = tuple(
        tuple(
            int(2 * _dot(ai, aj) / _dot(ai, ai))
            for aj in simple
        )
        for ai in simple
    )
    # fundamental weights as exact combinations of simple roots: C^-1 columns
    cmat = [[Fraction(c) for c in row] for row in cartan]
    inv_cols = []
    for j in range(rank):
        rhs = [Fraction(int(i == j)) for i in range(rank)]
        inv_cols.append(tuple(_fraction_solve(cmat, rhs)))
    weights = tuple(
        tuple(sum((inv_cols[j][k] * simple[k][c] for k in range(rank)), Fraction(0))
              for c in range(len(simple[0])))
        for j in range(rank)
    )
    positive = _close_positive_roots(simple, form_scale)
    delta = weights[0]
    for w in weights[1:]:
        delta = _add(delta, w)
    # delta must equal half the sum of positive roots
    twice_delta = positive[0]
    for r in positive[1:]:
        twice_delta = _add(twice_delta, r)
    if _scale(Fraction(2), delta) != twice_delta:
        raise ConfigurationError(f"{family}{rank}: delta identity failed")
    rs = RootSystemData(
        family=family,
        rank=rank,
        simple_roots=tuple(simple),
        cartan_matrix=cartan,
        fundamental_weights=weights,
        fundamental_weight_root_coords=tuple(inv_cols),
        positive_roots=tuple(positive),
        delta=delta,
        form_scale=form_scale,
        killing_normalizer=Fraction(1, 2 * h_dual(rank)),
    )
    return rs


def dominant_weight(rs: RootSystemData, m_coords) -> DominantWeight:
    """Dominant weight from nonnegative fundamental-weight coefficients."""
    m = tuple(int(c) for c in m_coords)
    if len(m) != rs.rank or any(c < 0 for c in m):
        raise DomainError(f"not a dominant weight: {m_coords}")
    p = tuple(
        sum((m[j] * rs.fundamental_weight_root_coords[j][i] for j in range(rs.rank)),
            Fraction(0))
        for i in range(rs.rank)
    )
    vec = tuple(
        sum((m[j] * rs.fundamental_weights[j][c] for j in range(rs.rank)), Fraction(0))
        for c in range(len(rs.delta))
    )
    return DominantWeight(m, p, vec)


def weight_root_coords(rs: RootSystemData, weight: DominantWeight) -> tuple[Fraction, ...]:
    """Coefficients (p_i) with the weight equal to sum p_i alpha_i, exact."""
    return weight.p_coords


def m_from_p(rs: RootSystemData, p_coords) -> tuple[int, ...]:
    """Cartan transform back to fundamental-weight coefficients."""
    p = [Fraction(x) for x in p_coords]
    out = []
    for i in range(rs.rank):
        val = sum((Fraction(rs.cartan_matrix[i][j]) * p[j] for j in range(rs.rank)),
                  Fraction(0))
        if val.denominator != 1:
            raise DomainError(f"non-integral m coordinate from p={p_coords}")
        out.append(int(val))
    return tuple(out)


def casimir_eigenvalue(rs: RootSystemData, weight: DominantWeight) -> Fraction:
    """-c(Lambda) = <Lambda, Lambda + 2 delta> in the Killing normalization."""
    if any(c < 0 for c in weight.m_coords):
        raise DomainError("weight is not dominant")
    shifted = _add(weight.vector, _scale(Fraction(2), rs.delta))
    return rs.inner_killing(weight.vector, shifted)


def weyl_dimension(rs: RootSystemData, weight: DominantWeight) -> int:
    """Dimension of the irreducible representation with this highest weight."""
    if any(c < 0 for c in weight.m_coords):
        raise DomainError("weight is not dominant")
    num = Fraction(1)
    shifted = _add(weight.vector, rs.delta)
    for alpha in rs.positive_roots:
        num *= _dot(shifted, alpha) / _dot(rs.delta, alpha)
    if num.denominator != 1:
        raise DomainError(f"Weyl dimension not integral: {num}")
    return int(num)


def spherical_candidate(weight: DominantWeight) -> bool:
    """Whether the weight can carry a zero-torus-weight fixed vector.

    Functions on the full flag of the isotropy group only see highest
    weights in the root lattice whose root coordinates are all >= 1 (or
    the zero weight); this is the unique-expression parameterization the
    candidate enumerations quote.
    """
    if all(m == 0 for m in weight.m_coords):
        return True
    return all(p.denominator == 1 and p >= 1 for p in weight.p_coords)


def dominant_weights_below(rs: RootSystemData, cap) -> list[DominantWeight]:
    """Candidate dominant weights with Casimir eigenvalue <= cap.

    Only weights passing ``spherical_candidate`` are returned (zero or all
    root coordinates integral and >= 1).  The box bound per coefficient
    comes from the diagonal growth of the quadratic form (safety factor
    4); correctness against a brute-force filter is a test-suite property,
    not re-proved here.
    """
    cap = Fraction(cap)
    if cap < 0:
        raise DomainError("cap must be nonnegative")
    bounds = []
    for j in range(rs.rank):
        unit = dominant_weight(rs, tuple(int(i == j) for i in range(rs.rank)))
        theta = casimir_eigenvalue(rs, unit)
        bounds.append(ceil(4 * cap / theta) if cap > 0 else 0)
    out = []
    for m in itertools.product(*(range(b + 1) for b in bounds)):
        w = dominant_weight(rs, m)
        if spherical_candidate(w) and casimir_eigenvalue(rs, w) <= cap:
            out.append(w)
    out.sort(key=lambda w: w.m_coords)
    return out


# ---------------------------------------------------------------------------
# Hermitian rank-2 case data for the center condition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermitianCaseData:
    """Euclidean-coordinate data of one Hermitian rank-2 case.

    ``xi`` generates the center of the isotropy algebra; ``h_gamma1`` and
    ``h_gamma2`` are the duals of the two strongly orthogonal roots.  All
    entries are exact rationals copied from the case analysis.
    """

    label: str
    i0: int
    xi: Vector
    h_gamma1: Vector
    h_gamma2: Vector


def hermitian_case(label: str, m: int | None = None) -> HermitianCaseData:
    if label == "AIII2":
        if m is None or m < 2:
            raise ConfigurationError("AIII2 requires m >= 2")
        dim = m + 2
        xi = tuple(
            (Fraction(1) if j < 2 else Fraction(0)) - Fraction(2, m + 2)
            for j in range(dim)
        )
        h1 = tuple(Fraction(int(j == 1) - int(j == 2)) for j in range(dim))
        h2 = tuple(Fraction(int(j == 0) - int(j == dim - 1)) for j in range(dim))
        return HermitianCaseData(f"AIII2(m={m})", 2, xi, h1, h2)
    if label in ("BII2", "DII2"):
        return HermitianCaseData(label, 1, _vec(1, 0), _vec(1, -1), _vec(1, 1))
    if label == "DIII2":
        return HermitianCaseData(
            "DIII2", 4,
            (Fraction(1, 2),) * 4 + (Fraction(-1, 2),),
            _vec(0, 0, 0, 1, -1),
            _vec(1, 1, 0, 0, 0),
        )
    if label == "EIII":
        half = Fraction(1, 2)
        xi = (Fraction(0),) * 5 + (Fraction(-2, 3), Fraction(-2, 3), Fraction(2, 3))
        h1 = (half, -half, -half, -half, -half, -half, -half, half)
        h2 = (half, half, half, half, half, -half, -half, half)
        return HermitianCaseData("EIII", 1, xi, h1, h2)
    raise ConfigurationError(f"unknown Hermitian case {label}")


def center_condition(case: HermitianCaseData) -> bool:
    """Whether the center generator lies in the span of the two dual roots."""
    dim = len(case.xi)
    cols = (case.h_gamma1, case.h_gamma2)
    # exact least-structure solve: pick two independent coordinate equations
    for i, j in itertools.combinations(range(dim), 2):
        det = cols[0][i] * cols[1][j] - cols[0][j] * cols[1][i]
        if det != 0:
            a = (case.xi[i] * cols[1][j] - case.xi[j] * cols[1][i]) / det
            b = (cols[0][i] * case.xi[j] - cols[0][j] * case.xi[i]) / det
            return all(
                a * cols[0][k] + b * cols[1][k] == case.xi[k] for k in range(dim)
            )
    raise DomainError("dual roots are collinear")


def dump_root_system(rs: RootSystemData) -> str:
    """Human-readable record with exact rationals rendered as p/q strings."""
    def fmt_vec(v):
        return "(" + ", ".join(str(x) for x in v) + ")"

    lines = [
        f"type: {rs.family}{rs.rank}",
        "simple_roots: " + "; ".join(fmt_vec(a) for a in rs.simple_roots),
        "cartan_matrix: " + "; ".join(" ".join(str(c) for c in row) for row in rs.cartan_matrix),
        "fundamental_weights: " + "; ".join(fmt_vec(w) for w in rs.fundamental_weights),
        f"positive_root_count: {len(rs.positive_roots)}",
        "delta: " + fmt_vec(rs.delta),
        f"form_scale: {rs.form_scale}",
        f"killing_normalizer: {rs.killing_normalizer}",
    ]
    return "\n".join(lines) + "\n"
