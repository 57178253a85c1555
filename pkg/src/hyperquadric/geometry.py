"""Numeric geometry of isotropy orbits and their Gauss images.

Orbit points, normals, and tangent frames are coordinate vectors over the
orthonormal horizontal basis of a symmetric pair, so plain Euclidean
operations implement the ambient invariant metric.  The Gauss image of a
sample is the oriented plane spanned by position and normal; its
differential is computed by central differences of the plane projector
along one-parameter subgroups, with Richardson extrapolation (step 1e-5),
which keeps every assertion here comfortably below the 1e-8 band without
hand-derived pushforward formulas.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import atan2, cos, pi, sin, sqrt

import numpy as np
import scipy.linalg

from .errors import DomainError, RankDeficiencyError, SingularElementError
from .sympair import SymmetricPair, root_rays

FD_STEP = 1e-5
FRAME_TOL = 1e-10
GAUGE_TOL = 1e-8
CURVATURE_GROUP_TOL = 1e-9


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class HypersurfaceSample:
    """One orbit point with normal and tangent frame, in horizontal coords."""

    x: np.ndarray
    normal: np.ndarray
    tangent_frame: np.ndarray      # (n, n+2) orthonormal rows
    group_coords: np.ndarray       # xi over the isotropy basis
    group_matrix: np.ndarray       # exp(xi), ambient
    rotation: np.ndarray           # Ad(exp(xi)) on horizontal coords


@dataclass(frozen=True)
class PrincipalCurvatureProfile:
    curvatures: tuple[float, ...]      # ordered by arccot angle
    multiplicities: tuple[int, ...]
    angles: tuple[float, ...]          # arccot values in (0, pi), increasing

    @property
    def g(self) -> int:
        return len(self.curvatures)

    @property
    def total_multiplicity(self) -> int:
        return int(sum(self.multiplicities))


@dataclass(frozen=True, eq=False)
class QuadricPoint:
    """Oriented 2-plane, stored as an orthonormal oriented frame (a, b)."""

    frame: np.ndarray  # (2, n+2)

    def __post_init__(self):
        a, b = self.frame
        if abs(a @ a - 1) > FRAME_TOL or abs(b @ b - 1) > FRAME_TOL \
                or abs(a @ b) > FRAME_TOL:
            raise DomainError("plane frame is not orthonormal")

    @property
    def a(self) -> np.ndarray:
        return self.frame[0]

    @property
    def b(self) -> np.ndarray:
        return self.frame[1]

    def projector(self) -> np.ndarray:
        a, b = self.frame
        return np.outer(a, a) + np.outer(b, b)

    def complex_model(self) -> np.ndarray:
        """Unit vector (a + i b)/sqrt(2); isotropic when the frame is valid."""
        return (self.frame[0] + 1j * self.frame[1]) / sqrt(2.0)

    def quadric_residual(self) -> float:
        z = self.complex_model()
        return abs(np.sum(z * z))


@dataclass(frozen=True, eq=False)
class TangentHom:
    """Map V -> V-perp recorded by its images on the plane frame."""

    images: np.ndarray  # rows: (T(a), T(b)), each in R^{n+2}

    @property
    def on_a(self) -> np.ndarray:
        return self.images[0]

    @property
    def on_b(self) -> np.ndarray:
        return self.images[1]


def gauge_fix(frame: np.ndarray) -> np.ndarray:
    """Canonical SO(2) representative of an oriented frame.

    Rotates so the first leg is the normalized plane projection of the
    earliest coordinate axis with nonzero projection; ties on a numerically
    zero projection fall through to the next axis.
    """
    a, b = frame
    for k in range(frame.shape[1]):
        ak, bk = a[k], b[k]
        r = np.hypot(ak, bk)
        if r > GAUGE_TOL:
            ca, sa = ak / r, bk / r
            return np.vstack([ca * a + sa * b, -sa * a + ca * b])
    raise DomainError("degenerate plane frame")


# ---------------------------------------------------------------------------
# orbit sampling
# ---------------------------------------------------------------------------

def _require_regular(pair: SymmetricPair, h: np.ndarray) -> None:
    gam = pair.gamma_at(h)
    norms = np.array([np.hypot(*r.gamma) for r in pair.positive_roots_sorted])
    if np.min(np.abs(gam) / norms) < 1e-6:
        raise SingularElementError(
            f"{pair.descriptor.pair_id}: flat element lies on a root hyperplane"
        )


def flat_normal(h: np.ndarray) -> np.ndarray:
    """Oriented completion of a unit flat element inside the flat."""
    out = np.zeros_like(h)
    out[0], out[1] = -h[1], h[0]
    return out


def orbit_sample(pair: SymmetricPair, h: np.ndarray, xi: np.ndarray) -> HypersurfaceSample:
    """Sample at Ad(exp xi) H with equivariant normal and tangent frame."""
    _require_regular(pair, h)
    g = pair.k_exp(xi)
    rot = pair.ad_rotation(g)
    x = rot @ h
    normal = rot @ flat_normal(h)
    frame = pair.y_stack @ rot.T
    return HypersurfaceSample(x, normal, frame, np.array(xi), g, rot)


def orbit_samples(pair: SymmetricPair, h: np.ndarray, count: int,
                  seed: int = 42) -> list[HypersurfaceSample]:
    """Deterministic pseudorandom orbit samples (identity sample first)."""
    rng = np.random.default_rng(seed)
    out = [orbit_sample(pair, h, np.zeros(pair.dim_k))]
    for _ in range(count - 1):
        out.append(orbit_sample(pair, h, rng.standard_normal(pair.dim_k)))
    return out


# ---------------------------------------------------------------------------
# principal curvatures
# ---------------------------------------------------------------------------

def principal_curvatures(pair: SymmetricPair, h: np.ndarray) -> PrincipalCurvatureProfile:
    """Closed-form curvature profile of the orbit through a regular element.

    Each restricted-root space contributes -gamma(H')/gamma(H) with its
    multiplicity; proportional roots share one value and merge.
    """
    _require_regular(pair, h)
    hp = flat_normal(h)
    entries = []
    for ray in root_rays(pair):
        num = ray[0].gamma[0] * hp[0] + ray[0].gamma[1] * hp[1]
        den = ray[0].gamma[0] * h[0] + ray[0].gamma[1] * h[1]
        kappa = -num / den
        mult = sum(r.multiplicity for r in ray)
        entries.append((atan2(1.0, kappa), kappa, mult))
    entries.sort()
    merged = []
    for beta, kappa, mult in entries:
        if merged and abs(merged[-1][0] - beta) < CURVATURE_GROUP_TOL:
            merged[-1][2] += mult
        else:
            merged.append([beta, kappa, mult])
    return PrincipalCurvatureProfile(
        curvatures=tuple(m[1] for m in merged),
        multiplicities=tuple(m[2] for m in merged),
        angles=tuple(m[0] for m in merged),
    )


def _richardson(values: dict[int, np.ndarray], step: float) -> np.ndarray:
    """Fourth-order derivative from samples at +-step and +-2 step."""
    return (8.0 * (values[1] - values[-1]) - (values[2] - values[-2])) / (12.0 * step)


def _direction_generators(pair: SymmetricPair, h: np.ndarray) -> np.ndarray:
    """Isotropy elements eta_i with [eta_i, H] equal to the frame at H."""
    gam = pair.gamma_rows_at(h)
    return -pair.x_stack / gam[:, None]


def _taylor_exp(mat: np.ndarray) -> np.ndarray:
    """exp for a tiny antisymmetric argument (degree 4; error O(|m|^5))."""
    if np.max(np.abs(mat)) > 1e-3:
        return scipy.linalg.expm(mat)
    m2 = mat @ mat
    return np.eye(len(mat)) + mat + m2 / 2.0 + (m2 @ mat) / 6.0 + (m2 @ m2) / 24.0


class _OrbitProbe:
    """Per-(pair, flat element) finite-difference machinery.

    For each tangent direction the inner conjugates exp(t eta) M exp(-t eta)
    of the position and normal matrices are sample-independent, so they are
    built once; a sample probe then only conjugates them by the sample's
    group element.
    """

    def __init__(self, pair: SymmetricPair, h: np.ndarray, step: float):
        self.pair = pair
        self.step = step
        hp = flat_normal(h)
        mh = pair.p_matrix(h)
        mhp = pair.p_matrix(hp)
        self.inner: list[dict[int, tuple[np.ndarray, np.ndarray]]] = []
        for eta_coords in _direction_generators(pair, h):
            eta = pair.k_matrix(eta_coords)
            e1 = _taylor_exp(step * eta)
            e2 = e1 @ e1
            per_t = {}
            for t, grp in ((1, e1), (-1, e1.T), (2, e2), (-2, e2.T)):
                per_t[t] = (grp @ mh @ grp.T, grp @ mhp @ grp.T)
            self.inner.append(per_t)

    def curves(self, sample: HypersurfaceSample):
        """Per direction: dict t -> (x(t), normal(t)) in horizontal coords."""
        g = sample.group_matrix
        out = []
        for per_t in self.inner:
            vals = {}
            for t, (mx, mn) in per_t.items():
                vals[t] = (self.pair.to_p_coords(g @ mx @ g.T),
                           self.pair.to_p_coords(g @ mn @ g.T))
            out.append(vals)
        return out


def _probe(pair: SymmetricPair, h: np.ndarray, step: float) -> _OrbitProbe:
    key = ("probe", h.tobytes(), step)
    if key not in pair._cache:
        pair._cache[key] = _OrbitProbe(pair, h, step)
    return pair._cache[key]


def sample_measurements(pair: SymmetricPair, h: np.ndarray,
                        sample: HypersurfaceSample,
                        step: float = FD_STEP):
    """Shape operator and Gauss-differential homs from one probe pass."""
    probe = _probe(pair, h, step)
    n = pair.n
    xdots = np.empty((n, pair.dim_p))
    ndots = np.empty((n, pair.dim_p))
    p0 = np.outer(sample.x, sample.x) + np.outer(sample.normal, sample.normal)
    comp = np.eye(pair.dim_p) - p0
    homs = []
    for i, vals in enumerate(probe.curves(sample)):
        xdots[i] = _richardson({t: v[0] for t, v in vals.items()}, step)
        ndots[i] = _richardson({t: v[1] for t, v in vals.items()}, step)
        projs = {t: np.outer(v[0], v[0]) + np.outer(v[1], v[1])
                 for t, v in vals.items()}
        pdot = _richardson(projs, step)
        homs.append(TangentHom(np.vstack([
            comp @ (pdot @ sample.x),
            comp @ (pdot @ sample.normal),
        ])))
    weingarten = -(xdots @ ndots.T)
    weingarten = 0.5 * (weingarten + weingarten.T)
    return weingarten, homs


def weingarten_matrix(pair: SymmetricPair, h: np.ndarray,
                      sample: HypersurfaceSample,
                      step: float = FD_STEP) -> np.ndarray:
    """Finite-difference shape operator in the sample's tangent frame."""
    return sample_measurements(pair, h, sample, step)[0]


def sample_curvatures(pair: SymmetricPair, h: np.ndarray,
                      sample: HypersurfaceSample) -> np.ndarray:
    """Sorted principal curvatures measured at one sample (finite differences)."""
    return np.sort(np.linalg.eigvalsh(weingarten_matrix(pair, h, sample)))


def palmer_phase(profile: PrincipalCurvatureProfile) -> float:
    """Phase whose differential is the mean-curvature one-form.

    Constancy of this sum over the hypersurface is exactly minimality of
    the Gauss image.
    """
    return float(sum(m * np.arctan(k)
                     for k, m in zip(profile.curvatures, profile.multiplicities)))


def palmer_phase_of_values(kappas: np.ndarray) -> float:
    return float(np.sum(np.arctan(kappas)))


# ---------------------------------------------------------------------------
# Gauss map and its differential
# ---------------------------------------------------------------------------

def gauss_map(sample: HypersurfaceSample) -> QuadricPoint:
    """Oriented plane [x ^ normal], gauge-fixed."""
    return QuadricPoint(gauge_fix(np.vstack([sample.x, sample.normal])))


def gauss_differential(pair: SymmetricPair, h: np.ndarray,
                       sample: HypersurfaceSample,
                       step: float = FD_STEP) -> list[TangentHom]:
    """d(Gauss map) on the sample's tangent frame, one hom per direction.

    Images are taken on the un-gauged frame (x, normal) so that the
    curvature-angle formulas read off directly.
    """
    return sample_measurements(pair, h, sample, step)[1]


def hom_images(homs: list[TangentHom]) -> tuple[np.ndarray, np.ndarray]:
    a = np.vstack([t.on_a for t in homs])
    b = np.vstack([t.on_b for t in homs])
    return a, b


def kahler_matrix(homs_1: list[TangentHom], homs_2: list[TangentHom] | None = None) -> np.ndarray:
    """omega(T_i, S_j) = <T_i(b), S_j(a)> - <T_i(a), S_j(b)>."""
    a1, b1 = hom_images(homs_1)
    a2, b2 = hom_images(homs_2) if homs_2 is not None else (a1, b1)
    return b1 @ a2.T - a1 @ b2.T


def kahler_pullback_max(pair: SymmetricPair, h: np.ndarray,
                        samples: list[HypersurfaceSample]) -> float:
    """Largest Kahler-form value over all frame pairs of all samples."""
    worst = 0.0
    for sample in samples:
        homs = gauss_differential(pair, h, sample)
        a, b = hom_images(homs)
        sv = np.linalg.svd(np.hstack([a, b]), compute_uv=False)
        if sv[-1] < 1e-6 * sv[0]:
            raise RankDeficiencyError("Gauss differential is rank-deficient")
        worst = max(worst, float(np.max(np.abs(kahler_matrix(homs)))))
    return worst


# ---------------------------------------------------------------------------
# the operator B_v and its spectrum
# ---------------------------------------------------------------------------

def bv_matrices(homs: list[TangentHom], phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Row stacks of T_i(v) and T_i(jv) for v at angle phi in the plane."""
    a, b = hom_images(homs)
    mv = cos(phi) * a + sin(phi) * b
    mjv = -sin(phi) * a + cos(phi) * b
    return mv, mjv


def bv_identity_residuals(homs: list[TangentHom], phi: float) -> tuple[float, float]:
    """Residuals of the transpose-symmetry and isometry identities of B_v."""
    a, b = hom_images(homs)
    mv, mjv = bv_matrices(homs, phi)
    gram = a @ a.T + b @ b.T
    cross = mjv @ mv.T
    lagr = float(np.max(np.abs(cross - cross.T)))
    isom = float(np.max(np.abs(mv @ mv.T + mjv @ mjv.T - gram)))
    return lagr, isom


def b_operator_spectrum(pair: SymmetricPair, h: np.ndarray,
                        sample: HypersurfaceSample, phi: float,
                        homs: list[TangentHom] | None = None,
                        identity_tol: float = 1e-8) -> list[tuple[float, int]]:
    """Spectrum of tB_v B_v at v = cos(phi) x + sin(phi) normal.

    Asserts the transpose-symmetry and isometry identities before
    returning (eigenvalue, multiplicity) pairs in increasing order.
    """
    if homs is None:
        homs = gauss_differential(pair, h, sample)
    lagr, isom = bv_identity_residuals(homs, phi)
    if max(lagr, isom) > identity_tol:
        raise DomainError(
            f"B_v structure identities violated (residuals {lagr:.2e}, {isom:.2e})"
        )
    evals = bv_eigenvalues(homs, phi)
    groups: list[list[float]] = []
    for v in evals:
        if groups and abs(groups[-1][-1] - v) < 1e-8:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


def bv_eigenvalues(homs: list[TangentHom], phi: float) -> np.ndarray:
    """Sorted eigenvalues of tB_v B_v on the sampled tangent space."""
    a, b = hom_images(homs)
    mv, _ = bv_matrices(homs, phi)
    gram = a @ a.T + b @ b.T
    return np.sort(scipy.linalg.eigh(mv @ mv.T, gram, eigvals_only=True))


def bv_closed_form(profile: PrincipalCurvatureProfile, phi: float) -> np.ndarray:
    """Sorted closed-form eigenvalues (cos phi - k sin phi)^2/(1+k^2)."""
    vals = []
    for k, m in zip(profile.curvatures, profile.multiplicities):
        vals.extend([(cos(phi) - k * sin(phi)) ** 2 / (1.0 + k * k)] * m)
    return np.sort(np.array(vals))


def singular_angles(profile: PrincipalCurvatureProfile) -> np.ndarray:
    """Angles phi in [0, pi) where B_v drops rank (the arccot angles)."""
    return np.array(profile.angles) % pi


def bv_min_eigenvalue_on_grid(pair: SymmetricPair, h: np.ndarray,
                              sample: HypersurfaceSample,
                              points: int = 360) -> float:
    """Min eigenvalue of tB_v B_v over a singularity-aligned phi grid.

    The grid is offset to start at the first singular angle and the g
    singular grid points are excluded, so the minimum measures injectivity
    of B_v away from the finitely many degenerate directions.
    """
    profile = principal_curvatures(pair, h)
    homs = gauss_differential(pair, h, sample)
    base = singular_angles(profile)[0]
    skip = points // profile.g
    best = np.inf
    for k in range(points):
        if skip > 0 and k % skip == 0:
            continue
        evals = bv_eigenvalues(homs, base + k * pi / points)
        best = min(best, float(evals[0]))
    return best


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def samples_to_csv(path, pair: SymmetricPair, h: np.ndarray,
                   samples: list[HypersurfaceSample]) -> None:
    """One row per sample: coordinates, curvature range, quadric residual."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "x", "norm_defect", "orth_defect", "quadric_residual"])
        for idx, sample in enumerate(samples):
            point = gauss_map(sample)
            writer.writerow([
                idx,
                " ".join(format(v, ".12e") for v in sample.x),
                format(abs(sample.x @ sample.x - 1.0), ".3e"),
                format(abs(sample.x @ sample.normal), ".3e"),
                format(point.quadric_residual(), ".3e"),
            ])
