"""Hamiltonian-stability verdicts for Gauss images with g = 1, 2, 3.

The g = 3 pipeline enumerates candidate Laplacian eigenvalues through the
exact root-system engine, attaches fixed-vector dimensions (computed from
explicit finite subgroups for the rank-1 case, curated from published
branching tables otherwise), and compares the least positive eigenvalue
against the Einstein threshold.  Nullity bookkeeping distinguishes strict
stability: the null space must be exactly the ambient rotation algebra
modulo the isotropy group.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from . import rootsys
from .errors import (
    ConfigurationError,
    DomainError,
    IncompleteDataError,
    NumericalConsistencyError,
)

PROJECTOR_TOL = 1e-8

# (n, dim p, dim k, root system, isotropy orbit space) per g = 3 case
_G3_CASES = {
    "AI2": (3, 5, 3, ("A", 1), "SO(3)/(Z_2+Z_2)"),
    "a2": (6, 8, 8, ("A", 2), "SU(3)/T^2"),
    "AII2": (12, 14, 21, ("C", 3), "Sp(3)/Sp(1)^3"),
    "EIV": (24, 26, 52, ("F", 4), "F_4/Spin(8)"),
}


@dataclass(frozen=True)
class ConstantsRow:
    case_id: str
    n: int
    dim_p: int
    dim_k: int
    b_inv: Fraction
    gamma1_norm_sq: Fraction
    cn: Fraction


@dataclass(frozen=True)
class BranchingDatum:
    case_id: str
    m_coords: tuple[int, ...]
    fixed_dim: int
    source: str


@dataclass(frozen=True)
class StabilityReport:
    case_id: str
    g: int
    threshold: Fraction | None
    candidates: tuple[tuple[tuple[int, ...], Fraction, int], ...]
    min_positive_eigenvalue: Fraction | None
    verdict: str                       # "H-stable" or "not H-stable"
    nullity: int | None
    strict: bool | None

    @property
    def stable(self) -> bool:
        return self.verdict == "H-stable"


def casimir_constants(case_id: str) -> ConstantsRow:
    """Exact metric-normalization constants for a g = 3 case."""
    if case_id not in _G3_CASES:
        raise ConfigurationError(f"unknown g=3 case {case_id!r}")
    n, dim_p, dim_k, _, _ = _G3_CASES[case_id]
    b = 1 - Fraction(dim_p, 2 * dim_k)
    dim_m = dim_p - 2
    c = Fraction(2 * dim_k, dim_m * (2 * dim_k - dim_p))
    row = ConstantsRow(case_id, n, dim_p, dim_k, 1 / b, Fraction(1, dim_m), c * n)
    if c * b * dim_m != 1:
        raise ConfigurationError(f"{case_id}: constant identity C b dim m = 1 failed")
    if row.gamma1_norm_sq != c * b:
        raise ConfigurationError(f"{case_id}: |gamma_1|^2 = C b failed")
    return row


def case_eigenvalue_formula(case_id: str, m_coords, p_coords) -> Fraction:
    """Printed per-case eigenvalue formulas (instances of the general one)."""
    rs = case_root_system(case_id)
    m = tuple(int(x) for x in m_coords)
    p = tuple(Fraction(x) for x in p_coords)
    if rootsys.m_from_p(rs, p) != m:
        raise DomainError(f"{case_id}: m {m} and p {p} are not Cartan-related")
    if case_id == "a2":
        return Fraction(1, 6) * (m[0] * p[0] + m[1] * p[1] + 2 * p[0] + 2 * p[1])
    if case_id == "AII2":
        return Fraction(1, 16) * (m[0] * p[0] + m[1] * p[1] + 2 * m[2] * p[2]
                                  + 2 * p[0] + 2 * p[1] + 4 * p[2])
    if case_id == "EIV":
        return Fraction(1, 18) * (m[0] * p[0] + m[1] * p[1]
                                  + Fraction(m[2] * p[2], 2) + Fraction(m[3] * p[3], 2)
                                  + 2 * p[0] + 2 * p[1] + p[2] + p[3])
    if case_id == "AI2":
        return Fraction(m[0] * (m[0] + 2), 8)
    raise ConfigurationError(f"no printed eigenvalue formula for {case_id!r}")


@lru_cache(maxsize=None)
def case_root_system(case_id: str) -> rootsys.RootSystemData:
    if case_id not in _G3_CASES:
        raise ConfigurationError(f"unknown g=3 case {case_id!r}")
    fam, rank = _G3_CASES[case_id][3]
    return rootsys.build_root_system(fam, rank)


# ---------------------------------------------------------------------------
# rank-1 fixed spaces from explicit finite subgroups
# ---------------------------------------------------------------------------

def _quaternion_group() -> list[np.ndarray]:
    i2 = np.eye(2, dtype=complex)
    a = np.array([[0, -1], [1, 0]], dtype=complex)
    b = np.array([[1j, 0], [0, -1j]])
    c = np.array([[0, 1j], [1j, 0]])
    gens = [i2, a, b, c]
    return [s * g for g in gens for s in (1, -1)]


def _group_key(g: np.ndarray) -> bytes:
    # +0.0 normalizes IEEE signed zeros so byte keys are canonical
    return (np.round(g, 12) + 0.0).tobytes()


@lru_cache(maxsize=None)
def binary_lift_groups() -> tuple[tuple[bytes, ...], tuple[bytes, ...]]:
    """Element sets (order 8 and order 24) serialized for caching."""
    q8 = _quaternion_group()
    extra = np.array([[(1 + 1j) / 2, (1 + 1j) / 2],
                      [(-1 + 1j) / 2, (1 - 1j) / 2]])
    elems: dict[bytes, np.ndarray] = {}
    frontier = list(q8) + [extra]
    while frontier:
        g = frontier.pop()
        key = _group_key(g)
        if key in elems:
            continue
        for h in list(elems.values()):
            frontier.append(g @ h)
            frontier.append(h @ g)
        elems[key] = g
    if len(elems) != 24:
        raise NumericalConsistencyError(f"closure produced {len(elems)} elements")
    return (tuple(_group_key(m) for m in q8), tuple(elems))


def _group_elements(subgroup: str) -> list[np.ndarray]:
    small, big = binary_lift_groups()
    chosen = {"K0_tilde": small, "Ka_tilde": big}.get(subgroup)
    if chosen is None:
        raise ConfigurationError(f"unknown subgroup {subgroup!r}")
    return [np.frombuffer(b, dtype=complex).reshape(2, 2) for b in chosen]


def rep_matrix(m: int, g: np.ndarray) -> np.ndarray:
    """Degree-m representation on monomials in two variables (row action)."""
    out = np.zeros((m + 1, m + 1), dtype=complex)
    for k in range(m + 1):
        # image of z0^(m-k) z1^k: expand (z.g)_0^(m-k) (z.g)_1^k
        first = np.zeros(m - k + 1, dtype=complex)
        for t in range(m - k + 1):
            first[t] = _binom(m - k, t) * g[0, 0] ** (m - k - t) * g[1, 0] ** t
        second = np.zeros(k + 1, dtype=complex)
        for t in range(k + 1):
            second[t] = _binom(k, t) * g[0, 1] ** (k - t) * g[1, 1] ** t
        out[:, k] = np.convolve(first, second)
    return out


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def su2_fixed_dimension(m: int, subgroup: str) -> int:
    """Dimension of the subgroup-fixed subspace of the degree-m module."""
    if m < 0:
        raise DomainError("degree must be nonnegative")
    elems = _group_elements(subgroup)
    proj = sum(rep_matrix(m, g) for g in elems) / len(elems)
    trace = complex(np.trace(proj))
    if abs(trace.imag) > PROJECTOR_TOL or abs(trace.real - round(trace.real)) > PROJECTOR_TOL:
        raise NumericalConsistencyError(
            f"projector trace {trace} is not an integer within tolerance"
        )
    return int(round(trace.real))


def su2_character_average(m: int, subgroup: str) -> float:
    """Character-sum shortcut sum of sin((m+1)t)/sin(t) over the subgroup."""
    total = 0.0
    for g in _group_elements(subgroup):
        half_trace = np.real(np.trace(g)) / 2.0
        theta = float(np.arccos(np.clip(half_trace, -1.0, 1.0)))
        if abs(np.sin(theta)) < 1e-12:
            total += (m + 1) * (1.0 if abs(theta) < 1e-6 else (-1.0) ** m)
        else:
            total += float(np.sin((m + 1) * theta) / np.sin(theta))
    return total / len(_group_elements(subgroup))


# ---------------------------------------------------------------------------
# curated branching data
# ---------------------------------------------------------------------------

def data_path(name: str):
    override = os.environ.get("HYPERQUADRIC_DATA_DIR")
    if override:
        return os.path.join(override, name)
    return resources.files("hyperquadric.data").joinpath(name)


def _read_csv(name: str) -> list[dict]:
    path = data_path(name)
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(line for line in fh
                                          if not line.startswith("#"))]
    return rows


@lru_cache(maxsize=None)
def branching_table() -> tuple[BranchingDatum, ...]:
    out = []
    for row in _read_csv("branching.csv"):
        out.append(BranchingDatum(
            row["case"],
            tuple(int(t) for t in row["m_coords"].split()),
            int(row["fixed_dim"]),
            row["source"],
        ))
    return tuple(out)


def fixed_dimension(case_id: str, m_coords: tuple[int, ...]) -> int:
    """Fixed-vector dimension over the deck-extended isotropy subgroup."""
    if case_id == "AI2":
        return su2_fixed_dimension(m_coords[0], "Ka_tilde")
    for row in branching_table():
        if row.case_id == case_id and row.m_coords == tuple(m_coords):
            return row.fixed_dim
    raise IncompleteDataError(
        f"{case_id}: no curated fixed-space dimension for weight {m_coords}"
    )


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

def stability_verdict(case_id: str, m1: int | None = None,
                      m2: int | None = None) -> StabilityReport:
    """Stability report for g=1, g=2 (multiplicity pair), or a g=3 case."""
    if case_id == "g1":
        return StabilityReport("g1", 1, None, (), None, "H-stable", None, None)
    if case_id == "g2":
        if m1 is None or m2 is None or m1 < 1 or m2 < 1:
            raise ConfigurationError("g2 needs multiplicities m1, m2 >= 1")
        lo, hi = sorted((m1, m2))
        verdict = "H-stable" if hi - lo < 3 else "not H-stable"
        return StabilityReport(f"g2({m1},{m2})", 2, None, (), None, verdict,
                               None, None)
    if case_id not in _G3_CASES:
        raise ConfigurationError(f"unknown stability case {case_id!r}")

    consts = casimir_constants(case_id)
    rs = case_root_system(case_id)
    cap = consts.cn
    candidates = []
    for w in rootsys.dominant_weights_below(rs, cap):
        if all(c == 0 for c in w.m_coords):
            continue
        eig = rootsys.casimir_eigenvalue(rs, w)
        candidates.append((w, eig, fixed_dimension(case_id, w.m_coords)))
    occupied = [c for c in candidates if c[2] > 0]
    if not occupied:
        raise IncompleteDataError(f"{case_id}: no occupied candidate eigenvalue")
    min_eig = min(c[1] for c in occupied)
    verdict = "H-stable" if min_eig == cap else "not H-stable"
    nullity = sum(c[2] * rootsys.weyl_dimension(rs, c[0])
                  for c in occupied if c[1] == cap)
    ambient = (consts.n + 2) * (consts.n + 1) // 2
    strict = verdict == "H-stable" and nullity == ambient - consts.dim_k
    return StabilityReport(
        case_id, 3, cap,
        tuple((c[0].m_coords, c[1], c[2]) for c in candidates),
        min_eig, verdict, nullity, strict,
    )


def g3_cases() -> tuple[str, ...]:
    return tuple(_G3_CASES)
