import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from weakgeo.exceptions import AntipodalError, ChartError, DimensionError, UndefinedPhaseError
from weakgeo.linalg import ket, random_state
from weakgeo.rayspace import (
    BlochPoint,
    LiftedCoordinates,
    TangentDisplacement,
    bloch_from_state,
    connection_eval,
    fs_distance,
    fs_metric_form,
    lift_displacement,
    pancharatnam_phase,
    phase_near_branch_cut,
    projective_coords,
    projector_metric_form,
    solid_angle,
    sphere_metric_decomposition_check,
    state_from_bloch,
    wrap_angle,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
phases = st.floats(min_value=-np.pi, max_value=np.pi)


def oosterom(a, b, c):
    """Van Oosterom-Strackee signed solid angle, independent of the excess formula."""
    num = np.dot(a, np.cross(b, c))
    den = 1 + np.dot(a, b) + np.dot(b, c) + np.dot(c, a)
    return 2 * np.arctan2(num, den)


def random_bloch(rng):
    return BlochPoint(float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(-np.pi, np.pi)))


# -- coordinates and Bloch sphere --------------------------------------------

def test_projective_coords_chart_center():
    lc = projective_coords(ket([1, 0, 0]))
    assert lc.r == pytest.approx(1) and lc.varphi == 0 and np.all(lc.xi == 0)


@given(st.floats(min_value=0, max_value=3.0), phases)
def test_stereographic_coordinate(theta, phi):
    lc = projective_coords(state_from_bloch(theta, phi))
    assert abs(lc.xi[0] - np.tan(theta / 2) * np.exp(1j * phi)) < 1e-10 * max(1, np.tan(theta / 2))


def test_chart_failure():
    with pytest.raises(ChartError):
        projective_coords(ket([0, 1]))


@settings(max_examples=50)
@given(seeds)
def test_lifted_reconstruction(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    lc = projective_coords(v)
    assert np.max(np.abs(lc.to_vector() - v)) < 1e-10 * np.linalg.norm(v)


def test_bloch_from_state_examples():
    p = bloch_from_state(ket([1, 0]))
    assert p.theta == 0 and p.phi == 0
    p = bloch_from_state(ket([1, 1j]))
    assert p.theta == pytest.approx(np.pi / 2) and p.phi == pytest.approx(np.pi / 2)
    assert bloch_from_state(ket([0, 1])).theta == pytest.approx(np.pi)
    with pytest.raises(DimensionError):
        bloch_from_state(ket([1, 0, 0]))


@given(seeds, phases)
def test_bloch_roundtrip_up_to_phase(seed, g):
    psi = random_state(2, np.random.default_rng(seed)).with_phase(g)
    p = bloch_from_state(psi)
    assert fs_distance(psi, state_from_bloch(p.theta, p.phi)) < 1e-10


@given(st.floats(min_value=0, max_value=np.pi), phases)
def test_antipodes_orthogonal(theta, phi):
    p = BlochPoint(theta, phi)
    q = p.antipode()
    assert abs(np.vdot(state_from_bloch(p.theta, p.phi).amplitudes,
                       state_from_bloch(q.theta, q.phi).amplitudes)) < 1e-10


# -- Fubini-Study distance and metric ----------------------------------------

def test_fs_distance_examples(rng):
    a = random_state(3, rng)
    assert fs_distance(a, a.with_phase(1.3)) < 1e-15
    assert fs_distance(ket([1, 0]), ket([0, 1])) == pytest.approx(np.pi / 2)


@given(phases)
def test_fs_distance_half_bloch_angle(gamma):
    # two equatorial points separated by |gamma| on the sphere
    d = fs_distance(state_from_bloch(np.pi / 2, 0), state_from_bloch(np.pi / 2, gamma))
    assert d == pytest.approx(abs(gamma) / 2, abs=1e-12)


def test_metric_euclidean_at_center(rng):
    point = projective_coords(ket([1, 0, 0]))
    d = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert fs_metric_form(point, TangentDisplacement(d)) == pytest.approx(np.sum(np.abs(d) ** 2), rel=1e-14)


def test_metric_quadratic(rng):
    point = projective_coords(random_state(3, rng))
    d = rng.normal(size=2) + 1j * rng.normal(size=2)
    g1 = fs_metric_form(point, TangentDisplacement(d))
    assert fs_metric_form(point, TangentDisplacement(2 * d)) == pytest.approx(4 * g1, rel=1e-14)
    assert g1 >= -1e-14


def _fd_lift(point, d, h):
    """Central-difference lift of dxi onto normalized vectors, Richardson-extrapolated."""
    def psi(t):
        return LiftedCoordinates(1.0, point.varphi, point.xi + t * d).to_vector()
    def cd(step):
        return (psi(step) - psi(-step)) / (2 * step)
    return (4 * cd(h / 2) - cd(h)) / 3


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_metric_coordinate_vs_projector_fd_lift(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 5))
    psi = random_state(dim, rng)
    point = projective_coords(psi)
    d = rng.normal(size=dim - 1) + 1j * rng.normal(size=dim - 1)
    unit = LiftedCoordinates(1.0, point.varphi, point.xi)
    coord = fs_metric_form(point, TangentDisplacement(d))
    fd = projector_metric_form(unit.to_vector(), _fd_lift(unit, d, 1e-3))
    analytic = projector_metric_form(unit.to_vector(), lift_displacement(unit, TangentDisplacement(d)))
    assert abs(coord - fd) < 1e-8 * max(1, coord)
    assert abs(coord - analytic) < 1e-12 * max(1, coord)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_finite_vs_infinitesimal_distance(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(3, rng)
    point = projective_coords(psi)
    d = TangentDisplacement(rng.normal(size=2) + 1j * rng.normal(size=2))
    dpsi = lift_displacement(LiftedCoordinates(1.0, point.varphi, point.xi), d)
    ds = np.sqrt(fs_metric_form(point, d))
    ratios = []
    for t in (1e-2, 1e-3):
        moved = psi.amplitudes + t * dpsi
        ratios.append(fs_distance(psi, moved / np.linalg.norm(moved)) / (t * ds))
    assert abs(ratios[0] - 1) < 1e-2 * max(1, ds**2) * 10
    assert abs(ratios[1] - 1) < 1e-4 * max(1, ds**2) * 10
    assert abs(ratios[1] - 1) <= abs(ratios[0] - 1) + 1e-12


# -- connection ---------------------------------------------------------------

def test_connection_examples():
    assert connection_eval(LiftedCoordinates(1, 0, [0.7]), TangentDisplacement([0.3])) == 0
    assert connection_eval(LiftedCoordinates(1, 0, [0.0]), TangentDisplacement([0.3 + 0.2j])) == 0


def test_connection_matches_inner_product_phase(rng):
    # i(dphi + A) = <psi|dpsi> for the lift with phase varphi
    psi = random_state(3, rng)
    point = projective_coords(psi)
    d = TangentDisplacement(rng.normal(size=2) + 1j * rng.normal(size=2))
    dphi = 0.37
    dpsi = lift_displacement(point, d, dvarphi=dphi)
    ov = np.vdot(psi.amplitudes, dpsi)
    assert abs(ov.real) < 1e-14
    assert ov.imag == pytest.approx(dphi + connection_eval(point, d), abs=1e-14)


def _loop_integral(pts):
    nodes, weights = np.polynomial.legendre.leggauss(20)
    total = 0.0
    for a, b in zip(pts, pts[1:] + pts[:1]):
        for t, wt in zip(nodes, weights):
            xi = a + (b - a) * (t + 1) / 2
            total += wt / 2 * connection_eval(LiftedCoordinates(1, 0, [xi]), TangentDisplacement([b - a]))
    return total


def test_connection_loop_integral_is_minus_pancharatnam():
    xi0 = 0.4 + 0.3j
    errors = []
    for h in (0.1, 0.05, 0.025):
        pts = [xi0, xi0 + h, xi0 + h * (0.3 + 1j)]
        theta = pancharatnam_phase(*[ket([1, p]) for p in pts])
        errors.append(abs(_loop_integral(pts) + theta))
        assert errors[-1] < 0.05 * h**3
    # third order: each halving cuts the error by about 8
    assert errors[0] / errors[1] > 6 and errors[1] / errors[2] > 6


# -- Pancharatnam phase and solid angle ---------------------------------------

def test_pancharatnam_examples():
    a = ket([0.6, 0.8j])
    assert pancharatnam_phase(a, a, a) == 0
    gamma = 1.1
    th = pancharatnam_phase(state_from_bloch(0, 0), state_from_bloch(np.pi / 2, 0),
                            state_from_bloch(np.pi / 2, gamma))
    assert th == pytest.approx(-gamma / 2, abs=1e-14)
    with pytest.raises(UndefinedPhaseError):
        pancharatnam_phase(ket([1, 0]), ket([0, 1]), ket([1, 1]))


def test_pancharatnam_brute_force(rng):
    a, b, c = (random_state(4, rng) for _ in range(3))
    x, y, z = a.amplitudes, b.amplitudes, c.amplitudes
    prod = sum(np.conj(x[i]) * z[i] for i in range(4)) * sum(np.conj(z[i]) * y[i] for i in range(4)) \
        * sum(np.conj(y[i]) * x[i] for i in range(4))
    assert pancharatnam_phase(a, b, c) == pytest.approx(np.arctan2(prod.imag, prod.real), abs=1e-14)


@settings(max_examples=50)
@given(seeds, phases, phases, phases)
def test_ray_invariance(seed, g1, g2, g3):
    rng = np.random.default_rng(seed)
    a, b, c = (random_state(3, rng) for _ in range(3))
    base = pancharatnam_phase(a, b, c)
    moved = pancharatnam_phase(a.with_phase(g1), b.with_phase(g2), c.with_phase(g3))
    assert abs(wrap_angle(base - moved)) < 1e-12
    assert fs_distance(a, b) == pytest.approx(fs_distance(a.with_phase(g1), b.with_phase(g2)), abs=1e-12)
    p = projective_coords(a)
    q = projective_coords(a.with_phase(g1))
    d = TangentDisplacement(rng.normal(size=2) + 1j * rng.normal(size=2))
    assert fs_metric_form(p, d) == pytest.approx(fs_metric_form(q, d), abs=1e-12)
    assert connection_eval(p, d) == pytest.approx(connection_eval(q, d), abs=1e-12)


def test_solid_angle_examples():
    n, e0, e90 = BlochPoint(0, 0), BlochPoint(np.pi / 2, 0), BlochPoint(np.pi / 2, np.pi / 2)
    assert solid_angle(n, n, n) == 0
    assert solid_angle(n, e0, e90) == pytest.approx(np.pi / 2, abs=1e-14)
    assert solid_angle(n, e90, e0) == pytest.approx(-np.pi / 2, abs=1e-14)


def test_solid_angle_antipodal():
    with pytest.raises(AntipodalError):
        solid_angle(BlochPoint(0, 0), BlochPoint(np.pi, 0), BlochPoint(1, 1))


def test_solid_angle_degenerate():
    pts = [BlochPoint(np.pi / 2, a) for a in (0.0, 0.4, 1.0)]
    assert solid_angle(*pts) == 0
    wrap = [BlochPoint(np.pi / 2, a) for a in (0.0, 2 * np.pi / 3, -2 * np.pi / 3)]
    assert solid_angle(*wrap) == pytest.approx(2 * np.pi)
    states = [state_from_bloch(p.theta, p.phi) for p in wrap]
    assert abs(wrap_angle(pancharatnam_phase(*states) + solid_angle(*wrap) / 2)) < 1e-12


@settings(max_examples=200)
@given(seeds)
def test_solid_angle_vs_oosterom_and_antisymmetry(seed):
    rng = np.random.default_rng(seed)
    p = [random_bloch(rng) for _ in range(3)]
    u = [q.unit_vector() for q in p]
    assume(min(np.linalg.norm(u[i] + u[j]) for i, j in ((0, 1), (1, 2), (2, 0))) > 1e-6)
    omega = solid_angle(*p)
    assert abs(wrap_angle(omega - oosterom(*u))) < 1e-9
    assert solid_angle(p[1], p[0], p[2]) == pytest.approx(-omega, abs=1e-12)


@settings(max_examples=200)
@given(seeds)
def test_theta_minus_half_omega(seed):
    rng = np.random.default_rng(seed)
    p = [random_bloch(rng) for _ in range(3)]
    states = [state_from_bloch(q.theta, q.phi) for q in p]
    assert abs(wrap_angle(pancharatnam_phase(*states) + solid_angle(*p) / 2)) < 1e-9


def test_branch_cut_flag():
    assert phase_near_branch_cut(np.pi - 1e-9)
    assert not phase_near_branch_cut(1.0)


# -- sphere metric decomposition ----------------------------------------------

def test_decomposition_examples(rng):
    psi = random_state(3, rng)
    eps = 1e-3
    phase, fs, total = sphere_metric_decomposition_check(psi, 1j * eps * psi.amplitudes)
    assert fs == pytest.approx(0, abs=1e-20) and phase == pytest.approx(eps**2, rel=1e-12)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    v -= np.vdot(psi.amplitudes, v) * psi.amplitudes
    phase, fs, total = sphere_metric_decomposition_check(psi, v)
    assert phase == pytest.approx(0, abs=1e-24)


@settings(max_examples=50)
@given(seeds)
def test_decomposition_sums(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(4, rng)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    phase, fs, total = sphere_metric_decomposition_check(psi, v)
    assert abs(phase + fs - total) < 1e-12 * max(1, total)
    assert fs >= -1e-12
