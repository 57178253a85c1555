"""Moment map on oriented 2-planes, deformation families, orbit dimensions.

The moment value of a plane with oriented orthonormal frame (a, b) is the
isotropy element -[a, b]; its squared norm coincides with the ambient
sectional curvature of the plane, which this module recomputes through
the curvature tensor as an independent cross-check.  The one-parameter
plane families of the two special catalog rows are built from the stored
complex-structure generator of each row.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .errors import DomainError, UnsupportedCaseError
from .geometry import QuadricPoint, TangentHom, kahler_matrix
from .sympair import SymmetricPair

CENTER_TOL = 1e-9
ISOTROPY_TOL = 1e-9
RANK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MomentValue:
    """Moment-map value in isotropy coordinates, split against the center."""

    k_coords: np.ndarray
    center_part: np.ndarray

    @property
    def perp_part(self) -> np.ndarray:
        return self.k_coords - self.center_part

    @property
    def norm_sq(self) -> float:
        return float(self.k_coords @ self.k_coords)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.k_coords))

    @property
    def central_defect(self) -> float:
        """How far the value is from being central."""
        return float(np.linalg.norm(self.perp_part))


@dataclass(frozen=True, eq=False)
class WLambdaPlane:
    theta: float
    plane: QuadricPoint


def moment_map(pair: SymmetricPair, q: QuadricPoint) -> MomentValue:
    """-[a, b] over the isotropy basis; gauge-invariant by antisymmetry."""
    a, b = q.frame
    if a.shape != (pair.dim_p,):
        raise DomainError("plane frame does not live in the horizontal space")
    mu = -pair.bracket_pp(a, b)
    center = pair.center_kcoords
    if center is not None and len(center):
        center_part = center.T @ (center @ mu)
    else:
        center_part = np.zeros_like(mu)
    return MomentValue(mu, center_part)


def sectional_curvature(pair: SymmetricPair, q: QuadricPoint) -> float:
    """Ambient sectional curvature of the plane via the curvature tensor.

    Independent of the moment route: contracts the double bracket
    [[a, b], b] against a instead of squaring [a, b].
    """
    a, b = q.frame
    if a.shape != (pair.dim_p,):
        raise DomainError("plane frame does not live in the horizontal space")
    k_part = pair.bracket_pp(a, b)
    w = np.einsum("i,iab,b->a", k_part, pair.ad_k_on_p, b)
    return float(-(w @ a))


def complex_structure_matrix(pair: SymmetricPair) -> np.ndarray:
    """ad(Z) on horizontal coordinates for the stored generator Z."""
    if pair.hermitian_z is None:
        raise UnsupportedCaseError(
            f"{pair.descriptor.pair_id} carries no deformation generator"
        )
    key = "adz"
    if key not in pair._cache:
        z = pair.hermitian_z
        br = np.einsum("ab,ibc->iac", z, pair.p_basis) \
            - np.einsum("iab,bc->iac", pair.p_basis, z)
        pair._cache[key] = (
            pair.p_dual @ br.reshape(pair.dim_p, -1).T
        )
    return pair._cache[key]


def w_lambda_plane(pair: SymmetricPair, theta: float) -> WLambdaPlane:
    """Oriented plane span{cos(theta) H1 + sin(theta) J H2, H2}.

    Asserts that [J H2, H2] is a nonzero central element, which is what
    makes the whole circle of planes sit over central moment values.
    """
    adz = complex_structure_matrix(pair)
    h1 = np.zeros(pair.dim_p)
    h2 = np.zeros(pair.dim_p)
    h1[0] = 1.0
    h2[1] = 1.0
    jh2 = adz @ h2
    if abs(jh2 @ jh2 - 1.0) > 1e-10 or abs(jh2 @ h1) > 1e-10 or abs(jh2 @ h2) > 1e-10:
        raise DomainError(
            f"{pair.descriptor.pair_id}: J H2 is not a unit vector orthogonal to the flat"
        )
    comm = pair.bracket_pp(jh2, h2)
    center = pair.center_kcoords
    resid = np.linalg.norm(comm - center.T @ (center @ comm)) if len(center) else np.inf
    if np.linalg.norm(comm) < 1e-8 or resid > CENTER_TOL:
        raise DomainError(
            f"{pair.descriptor.pair_id}: [J H2, H2] is not a nonzero central element"
        )
    frame = np.vstack([cos(theta) * h1 + sin(theta) * jh2, h2])
    return WLambdaPlane(theta, QuadricPoint(frame))


def plane_tangent_homs(pair: SymmetricPair, q: QuadricPoint) -> list[TangentHom]:
    """Orbit tangent directions at the plane, one hom per isotropy generator."""
    a, b = q.frame
    comp = np.eye(pair.dim_p) - q.projector()
    adk = pair.ad_k_on_p
    homs = []
    for i in range(pair.dim_k):
        homs.append(TangentHom(np.vstack([
            comp @ (adk[i] @ a),
            comp @ (adk[i] @ b),
        ])))
    return homs


def orbit_dimension(pair: SymmetricPair, q: QuadricPoint) -> int:
    """Dimension of the isotropy orbit through the plane (as planes)."""
    homs = plane_tangent_homs(pair, q)
    stacked = np.vstack([t.images.ravel() for t in homs])
    sv = np.linalg.svd(stacked, compute_uv=False)
    if sv.size == 0 or sv[0] < RANK_TOL:
        return 0
    return int(np.sum(sv > RANK_TOL * sv[0]))


def isotropic_check(pair: SymmetricPair, q: QuadricPoint,
                    directions: list[TangentHom] | None = None) -> bool:
    """Whether the Kahler form vanishes on all orbit directions at q."""
    return isotropy_defect(pair, q, directions) < ISOTROPY_TOL


def isotropy_defect(pair: SymmetricPair, q: QuadricPoint,
                    directions: list[TangentHom] | None = None) -> float:
    if directions is None:
        directions = plane_tangent_homs(pair, q)
    return float(np.max(np.abs(kahler_matrix(directions))))


def rotate_plane(pair: SymmetricPair, group_elem: np.ndarray,
                 q: QuadricPoint) -> QuadricPoint:
    """Plane moved by Ad(g); frame transported without re-gauging."""
    rot = pair.ad_rotation(group_elem)
    return QuadricPoint(q.frame @ rot.T)


def moment_sweep(pair: SymmetricPair, points: int = 720):
    """(theta, |mu|^2, orbit dim, central defect) over the deformation circle."""
    out = []
    for k in range(points):
        theta = 2.0 * np.pi * k / points
        wl = w_lambda_plane(pair, theta)
        mv = moment_map(pair, wl.plane)
        out.append((theta, mv.norm_sq, orbit_dimension(pair, wl.plane),
                    mv.central_defect))
    return out
