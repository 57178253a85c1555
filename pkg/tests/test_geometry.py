import numpy as np
import pytest

from math import atan, cos, pi, sin, sqrt, tan

from hyperquadric import geometry as geo
from hyperquadric import sympair as sp
from hyperquadric.errors import DomainError, SingularElementError


@pytest.fixture(scope="module")
def ai2():
    pair = sp.build_pair("AI2")
    h = sp.regular_element(pair, pi / 12)
    return pair, h


def test_identity_sample_is_flat_point(ai2):
    pair, h = ai2
    s = geo.orbit_sample(pair, h, np.zeros(pair.dim_k))
    np.testing.assert_allclose(s.x, h, atol=1e-14)
    np.testing.assert_allclose(s.normal, geo.flat_normal(h), atol=1e-14)


def test_sample_invariants(ai2):
    pair, h = ai2
    for s in geo.orbit_samples(pair, h, 100, seed=5):
        assert abs(s.x @ s.x - 1) < 1e-10
        assert abs(s.normal @ s.normal - 1) < 1e-10
        assert abs(s.x @ s.normal) < 1e-10
        assert np.max(np.abs(s.tangent_frame @ s.x)) < 1e-10
        assert np.max(np.abs(s.tangent_frame @ s.normal)) < 1e-10
        gram = s.tangent_frame @ s.tangent_frame.T
        assert np.max(np.abs(gram - np.eye(pair.n))) < 1e-10


def test_singular_element_rejected(ai2):
    pair, _ = ai2
    root = pair.positive_roots_sorted[0]
    bad = np.zeros(pair.dim_p)
    theta = np.arctan2(-root.gamma[0], root.gamma[1])
    bad[0], bad[1] = np.cos(theta), np.sin(theta)
    with pytest.raises(SingularElementError):
        geo.orbit_sample(pair, bad, np.zeros(pair.dim_k))


def test_geodesic_sphere_curvatures():
    """g=1 oracle: distance sphere at angle theta from the circle pole.

    With the oriented completion as normal, the finite-difference shape
    operator gives a single curvature -cot(theta) with full multiplicity.
    """
    pair = sp.build_pair("S1xBDII(3)")
    theta = 0.6
    h = sp.regular_element(pair, theta)
    prof = geo.principal_curvatures(pair, h)
    assert prof.g == 1
    assert prof.multiplicities == (3,)
    assert prof.curvatures[0] == pytest.approx(-1.0 / tan(theta), abs=1e-12)
    # independent finite-difference oracle at a random sample
    s = geo.orbit_samples(pair, h, 3, seed=9)[2]
    fd = geo.sample_curvatures(pair, h, s)
    np.testing.assert_allclose(fd, [-1.0 / tan(theta)] * 3, atol=1e-9)


def test_clifford_curvatures():
    """g=2 oracle: product of spheres S^p(cos t) x S^q(sin t).

    The factor tangent to the small factor carries -cot, the big factor
    tan, with multiplicities (p, q); the finite-difference operator is the
    independent measurement.
    """
    p, n = 1, 3
    pair = sp.build_pair(f"BDIIxBDII({p},{n})")
    theta = 0.5
    h = sp.regular_element(pair, theta)
    prof = geo.principal_curvatures(pair, h)
    assert prof.g == 2
    expected = sorted([(tan(theta), n - p), (-1.0 / tan(theta), p)])
    got = sorted(zip(prof.curvatures, prof.multiplicities))
    for (ek, em), (gk, gm) in zip(expected, got):
        assert gm == em
        assert gk == pytest.approx(ek, abs=1e-12)
    s = geo.orbit_samples(pair, h, 2, seed=1)[1]
    fd = geo.sample_curvatures(pair, h, s)
    closed = np.sort(np.repeat(prof.curvatures, prof.multiplicities))
    np.testing.assert_allclose(fd, closed, atol=1e-5)


def test_ai2_angle_gaps(ai2):
    pair, h = ai2
    prof = geo.principal_curvatures(pair, h)
    assert prof.g == 3
    assert prof.multiplicities == (1, 1, 1)
    np.testing.assert_allclose(np.diff(prof.angles), pi / 3, atol=1e-9)


def test_curvature_constancy_100_samples(ai2):
    pair, h = ai2
    prof = geo.principal_curvatures(pair, h)
    closed = np.sort(np.repeat(prof.curvatures, prof.multiplicities))
    samples = geo.orbit_samples(pair, h, 100, seed=2)
    kappas = np.array([geo.sample_curvatures(pair, h, s) for s in samples])
    assert np.max(np.abs(kappas - closed[None, :])) < 1e-7


def test_gauss_map_identity_sample(ai2):
    pair, h = ai2
    s = geo.orbit_sample(pair, h, np.zeros(pair.dim_k))
    q = geo.gauss_map(s)
    flat_proj = np.zeros((pair.dim_p, pair.dim_p))
    flat_proj[0, 0] = flat_proj[1, 1] = 1.0
    np.testing.assert_allclose(q.projector(), flat_proj, atol=1e-12)


def test_quadric_residual_on_samples(ai2):
    pair, h = ai2
    for s in geo.orbit_samples(pair, h, 100, seed=3):
        assert geo.gauss_map(s).quadric_residual() < 1e-10


def test_gauss_map_equivariance(ai2):
    pair, h = ai2
    rng = np.random.default_rng(4)
    s = geo.orbit_sample(pair, h, rng.standard_normal(pair.dim_k))
    g = pair.k_exp(rng.standard_normal(pair.dim_k))
    rot = pair.ad_rotation(g)
    moved = geo.HypersurfaceSample(rot @ s.x, rot @ s.normal,
                                   s.tangent_frame @ rot.T, s.group_coords,
                                   g @ s.group_matrix, rot @ s.rotation)
    q1 = geo.gauss_map(moved)
    q2_frame = geo.gauss_map(s).frame @ rot.T
    # same oriented plane: equal projectors, positively aligned orientation
    q2 = geo.QuadricPoint(geo.gauge_fix(q2_frame))
    np.testing.assert_allclose(q1.projector(), q2.projector(), atol=1e-10)
    orient = np.linalg.det(q1.frame @ q2.frame.T)
    assert orient > 0


def test_gauge_fix_deterministic():
    rng = np.random.default_rng(5)
    a = rng.standard_normal(6)
    a /= np.linalg.norm(a)
    b = rng.standard_normal(6)
    b -= (b @ a) * a
    b /= np.linalg.norm(b)
    frame = np.vstack([a, b])
    fixed = geo.gauge_fix(frame)
    for phi in (0.3, 1.2, -2.2):
        rot = np.array([[cos(phi), sin(phi)], [-sin(phi), cos(phi)]])
        again = geo.gauge_fix(rot @ frame)
        np.testing.assert_allclose(again, fixed, atol=1e-12)


def test_kahler_pullback_vanishes(ai2):
    pair, h = ai2
    samples = geo.orbit_samples(pair, h, 20, seed=6)
    assert geo.kahler_pullback_max(pair, h, samples) < 1e-9


def test_kahler_self_pairing_zero(ai2):
    pair, h = ai2
    s = geo.orbit_samples(pair, h, 2, seed=7)[1]
    homs = geo.gauss_differential(pair, h, s)
    omega = geo.kahler_matrix(homs)
    assert np.max(np.abs(np.diag(omega))) < 1e-12


def test_kahler_detects_non_lagrangian_family():
    """Counterexample: graph-type plane family rotating inside a fixed
    3-space; the direct finite-difference evaluation of the form is the
    oracle and must be order one."""
    dim = 5
    e = np.eye(dim)

    def frame(s, t):
        a = np.cos(s) * e[0] + np.sin(s) * e[2]
        b_raw = np.cos(t) * e[1] + np.sin(t) * e[2]
        b = b_raw - (b_raw @ a) * a
        return np.vstack([a, b / np.linalg.norm(b)])

    def projector(s, t):
        f = frame(s, t)
        return f.T @ f

    step = 1e-5
    base = frame(0.0, 0.0)
    dps = (8 * (projector(step, 0) - projector(-step, 0))
           - (projector(2 * step, 0) - projector(-2 * step, 0))) / (12 * step)
    dpt = (8 * (projector(0, step) - projector(0, -step))
           - (projector(0, 2 * step) - projector(0, -2 * step))) / (12 * step)
    comp = np.eye(dim) - projector(0.0, 0.0)
    t_s = geo.TangentHom(np.vstack([comp @ dps @ base[0], comp @ dps @ base[1]]))
    t_t = geo.TangentHom(np.vstack([comp @ dpt @ base[0], comp @ dpt @ base[1]]))
    omega = geo.kahler_matrix([t_s, t_t])
    assert np.max(np.abs(omega)) > 1e-3


def bv_operator(homs, phi):
    a, b = geo.hom_images(homs)
    mv, _ = geo.bv_matrices(homs, phi)
    gram = a @ a.T + b @ b.T
    return np.linalg.solve(gram, mv @ mv.T)


def test_bv_spectrum_special_angles(ai2):
    pair, h = ai2
    prof = geo.principal_curvatures(pair, h)
    s = geo.orbit_samples(pair, h, 2, seed=8)[1]
    homs = geo.gauss_differential(pair, h, s)
    kappas = np.sort(np.repeat(prof.curvatures, prof.multiplicities))
    got0 = geo.bv_eigenvalues(homs, 0.0)
    np.testing.assert_allclose(got0, np.sort(1.0 / (1.0 + kappas ** 2)),
                               atol=1e-9)
    got90 = geo.bv_eigenvalues(homs, pi / 2)
    np.testing.assert_allclose(
        got90, np.sort(kappas ** 2 / (1.0 + kappas ** 2)), atol=1e-9)


def test_bv_spectrum_full_grid(ai2):
    pair, h = ai2
    prof = geo.principal_curvatures(pair, h)
    s = geo.orbit_samples(pair, h, 2, seed=8)[1]
    homs = geo.gauss_differential(pair, h, s)
    for k in range(360):
        phi = k * pi / 360
        np.testing.assert_allclose(geo.bv_eigenvalues(homs, phi),
                                   geo.bv_closed_form(prof, phi), atol=1e-7)


def test_b_operator_spectrum_api(ai2):
    pair, h = ai2
    s = geo.orbit_samples(pair, h, 2, seed=8)[1]
    spec = geo.b_operator_spectrum(pair, h, s, 0.9)
    assert sum(m for _, m in spec) == pair.n
    prof = geo.principal_curvatures(pair, h)
    flat = np.sort(np.concatenate([[v] * m for v, m in spec]))
    np.testing.assert_allclose(flat, geo.bv_closed_form(prof, 0.9), atol=1e-7)


def test_bv_kernel_rescaling_lemma(ai2):
    """A kernel vector of the singular operator acquires eigenvalue
    sin^2(theta) at angle offset theta."""
    pair, h = ai2
    prof = geo.principal_curvatures(pair, h)
    s = geo.orbit_samples(pair, h, 2, seed=8)[1]
    homs = geo.gauss_differential(pair, h, s)
    beta1 = prof.angles[0]
    op1 = bv_operator(homs, beta1)
    evals, evecs = np.linalg.eig(op1)
    kernel = evecs[:, np.argmin(np.abs(evals))].real
    kernel /= np.linalg.norm(kernel)
    for theta in (0.4, 1.0, 2.3):
        op = bv_operator(homs, beta1 + theta)
        resid = op @ kernel - sin(theta) ** 2 * kernel
        assert np.max(np.abs(resid)) < 1e-7


def test_bv_kernel_orthogonality(ai2):
    pair, h = ai2
    prof = geo.principal_curvatures(pair, h)
    s = geo.orbit_samples(pair, h, 2, seed=8)[1]
    homs = geo.gauss_differential(pair, h, s)
    a, b = geo.hom_images(homs)
    gram = a @ a.T + b @ b.T
    kernels = []
    for beta in prof.angles[:2]:
        op = bv_operator(homs, beta)
        evals, evecs = np.linalg.eig(op)
        v = evecs[:, np.argmin(np.abs(evals))].real
        kernels.append(v / sqrt(v @ gram @ v))
    assert abs(kernels[0] @ gram @ kernels[1]) < 1e-8


@pytest.mark.parametrize("pid", ["AI2", "AII2", "DIII2"])
def test_bv_injective_off_singular_grid(pid):
    # determinant of the squared operator underflows for multiplicity >= 4
    # factors, so injectivity is asserted through the smallest eigenvalue
    pair = sp.build_pair(pid)
    h = sp.regular_element(pair, 0.37)
    s = geo.orbit_samples(pair, h, 2, seed=10)[1]
    assert geo.bv_min_eigenvalue_on_grid(pair, h, s, 360) > 1e-10


def test_palmer_phase_cancellation():
    prof = geo.PrincipalCurvatureProfile((1.0, -1.0), (1, 1),
                                         (pi / 4, 3 * pi / 4))
    assert geo.palmer_phase(prof) == pytest.approx(0.0, abs=1e-15)


def test_palmer_phase_constancy(ai2):
    pair, h = ai2
    samples = geo.orbit_samples(pair, h, 100, seed=12)
    phases = [geo.palmer_phase_of_values(geo.sample_curvatures(pair, h, s))
              for s in samples]
    assert np.ptp(phases) < 1e-9


def test_minimal_clifford_phase():
    """At the minimal angle (trace of the shape operator vanishes) the
    phase equals its direct evaluation; both are checked against the
    curvature profile itself."""
    p, n = 1, 3
    pair = sp.build_pair(f"BDIIxBDII({p},{n})")
    theta = atan(sqrt(p / (n - p)))
    h = sp.regular_element(pair, theta)
    prof = geo.principal_curvatures(pair, h)
    mean_curv = sum(m * k for k, m in zip(prof.curvatures, prof.multiplicities))
    assert abs(mean_curv) < 1e-12
    direct = (n - p) * atan(tan(theta)) - p * atan(1.0 / tan(theta))
    assert geo.palmer_phase(prof) == pytest.approx(direct, abs=1e-12)


def test_quadric_point_validation():
    with pytest.raises(DomainError):
        geo.QuadricPoint(np.array([[1.0, 0, 0], [0.5, 0.5, 0]]))


def test_samples_csv(tmp_path, ai2):
    pair, h = ai2
    samples = geo.orbit_samples(pair, h, 5, seed=13)
    out = tmp_path / "samples.csv"
    geo.samples_to_csv(out, pair, h, samples)
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 6
    assert lines[0].startswith("index,")
