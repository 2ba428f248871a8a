"""Randomized verification batteries.

Each suite draws ``count`` independent instances from child seeds of
``np.random.SeedSequence(seed)``, so results do not depend on how the
instances are scheduled across worker threads.  A suite returns a
:class:`~weakgeo.report.RunReport` whose CSV rows hold one line per
instance and whose checks hold the worst error per invariant.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import expectation, inner_product, random_observable, random_state, variance
from .pointer import GaussianSpec, Grid, covariance_term, gaussian_wave
from .rayspace import (
    BlochPoint,
    LiftedCoordinates,
    TangentDisplacement,
    fs_metric_form,
    lift_displacement,
    pancharatnam_phase,
    projective_coords,
    projector_metric_form,
    solid_angle,
    state_from_bloch,
    wrap_angle,
)
from .report import RunReport
from .vonneumann import (
    StrongCoupling,
    fs_speed,
    fs_speed_finite_difference,
    indexed_state,
    meter_density,
    phase_shift_rate,
    pointer_mean_shift,
    pointer_variance_after,
    qubit_meter,
    readout_probability,
    readout_scan,
)
from .weakmeas import (
    exact_shift_slope,
    weak_triangle_rate,
    weak_triangle_rate_first_order,
    weak_value,
)


@dataclass(frozen=True)
class Metric:
    """An aggregated battery check: worst value of ``column`` must stay below ``tolerance``."""

    name: str
    column: str
    formula: str
    tolerance: float


@dataclass(frozen=True)
class Suite:
    name: str
    description: str
    columns: tuple
    instance: Callable[[int, np.random.Generator], list]
    metrics: tuple
    default_count: int


def _uniform_bloch(rng) -> BlochPoint:
    z = rng.uniform(-1.0, 1.0)
    return BlochPoint(float(np.arccos(z)), float(rng.uniform(-np.pi, np.pi)))


def _postselection(alpha, rng, min_overlap=0.1):
    while True:
        beta = random_state(alpha.dim, rng)
        if abs(inner_product(beta, alpha)) > min_overlap:
            return beta


_WAVE_PLAIN = None
_WAVE_CHIRP = None


def _default_waves():
    global _WAVE_PLAIN, _WAVE_CHIRP
    if _WAVE_PLAIN is None:
        _WAVE_PLAIN = gaussian_wave(GaussianSpec(), Grid())
        _WAVE_CHIRP = gaussian_wave(GaussianSpec(chirp=1.0), Grid())
    return _WAVE_PLAIN, _WAVE_CHIRP


def _strong_draw(rng):
    dim = int(rng.integers(2, 5))
    alpha = random_state(dim, rng)
    op = random_observable(dim, rng)
    lam = float(rng.uniform(0.0, 1.0))
    return dim, alpha, op, lam


def _shift_instance(i, rng):
    dim, alpha, op, lam = _strong_draw(rng)
    w, _ = _default_waves()
    ev = expectation(op, alpha)
    shift = pointer_mean_shift(alpha, w, StrongCoupling(lam, op))
    return [i, dim, lam, ev, shift, lam * ev, abs(shift - lam * ev)]


def _rate_instance(i, rng):
    dim, alpha, op, lam = _strong_draw(rng)
    c = StrongCoupling(lam, op)
    ev = expectation(op, alpha)
    rate = phase_shift_rate(alpha, c)
    speed = fs_speed(alpha, c)
    fd = fs_speed_finite_difference(alpha, c)
    rel = abs(speed - fd) / speed if speed > 0 else abs(fd)
    return [i, dim, lam, ev, rate, -lam * ev, abs(rate + lam * ev), speed, fd, rel]


def _theta_omega_instance(i, rng):
    pts = [_uniform_bloch(rng) for _ in range(3)]
    states = [state_from_bloch(p.theta, p.phi) for p in pts]
    theta = pancharatnam_phase(*states)
    omega = solid_angle(*pts)
    err = abs(wrap_angle(theta + omega / 2))
    return [i, *[v for p in pts for v in (p.theta, p.phi)], theta, omega, err]


def _readout_instance(i, rng, points=2048):
    dim = int(rng.integers(2, 5))
    alpha = random_state(dim, rng)
    op = random_observable(dim, rng)
    c = StrongCoupling(float(rng.uniform(0.0, 2.0)), op)
    momenta = tuple(float(v) for v in rng.uniform(-1.0, 1.0, size=2))
    theta = float(rng.uniform(0.2, np.pi - 0.2))
    phi = float(rng.uniform(-np.pi, np.pi))
    a0, a1 = indexed_state(alpha, c, momenta[0]), indexed_state(alpha, c, momenta[1])
    ov = inner_product(a0, a1)
    beta = float(np.angle(np.conj(ov)))
    traced = readout_probability(meter_density(alpha, qubit_meter(theta, phi, momenta), c))
    closed = 0.5 + 0.5 * abs(ov) * np.sin(theta) * np.cos(phi - beta)
    phis, probs = readout_scan(alpha, c, theta, momenta, points=points)
    peak = float(phis[int(np.argmax(probs))])
    steps = abs(wrap_angle(peak - beta)) / (2 * np.pi / points)
    return [i, theta, phi, beta, traced, closed, abs(traced - closed), peak, steps]


def _weak_draw(rng):
    dim = int(rng.integers(2, 5))
    alpha = random_state(dim, rng)
    op = random_observable(dim, rng)
    beta = _postselection(alpha, rng)
    return dim, alpha, beta, op


def _weak_real_instance(i, rng):
    dim, alpha, beta, op = _weak_draw(rng)
    w, _ = _default_waves()
    wv = weak_value(alpha, beta, op)
    slope = exact_shift_slope(alpha, w, beta, op)
    amplified = abs(wv.value) > np.max(np.abs(op.eigenvalues))
    return [i, dim, abs(wv.overlap), wv.real, wv.imag, slope, abs(slope - wv.real) / abs(wv.real), amplified]


def _weak_imag_instance(i, rng):
    dim, alpha, beta, op = _weak_draw(rng)
    plain, chirped = _default_waves()
    wv = weak_value(alpha, beta, op)
    cov = covariance_term(chirped)
    predicted = wv.imag * cov + wv.real
    slope = exact_shift_slope(alpha, chirped, beta, op)
    im_plain = abs(wv.imag * covariance_term(plain))
    return [i, dim, wv.real, wv.imag, cov, slope, predicted, abs(slope - predicted) / abs(predicted), im_plain]


def _weak_triangle_instance(i, rng, eps=1e-3):
    dim, alpha, beta, op = _weak_draw(rng)
    rate = weak_triangle_rate(alpha, beta, op, eps)
    predicted = weak_triangle_rate_first_order(alpha, beta, op, eps)
    return [i, dim, eps, rate, predicted, abs(rate - predicted)]


def _metric_instance(i, rng):
    dim = int(rng.integers(2, 5))
    psi = random_state(dim, rng)
    point = projective_coords(psi)
    d = TangentDisplacement(rng.normal(size=dim - 1) + 1j * rng.normal(size=dim - 1))
    coord = fs_metric_form(point, d)
    unit = LiftedCoordinates(1.0, point.varphi, point.xi)
    proj = projector_metric_form(unit.to_vector(), lift_displacement(unit, d))
    op = random_observable(dim, rng)
    c = StrongCoupling(float(rng.uniform(0.1, 1.0)), op)
    speed = fs_speed(psi, c)
    fd = fs_speed_finite_difference(psi, c)
    return [i, dim, coord, proj, abs(coord - proj), speed, fd, abs(speed - fd) / speed]


def _variance_instance(i, rng):
    dim, alpha, op, lam = _strong_draw(rng)
    w, _ = _default_waves()
    after = pointer_variance_after(alpha, w, StrongCoupling(lam, op))
    predicted = 1.0 + lam**2 * variance(op, alpha)
    return [i, dim, lam, after, predicted, abs(after - predicted)]


SUITES: dict[str, Suite] = {}


def _register(suite: Suite):
    SUITES[suite.name] = suite


_register(Suite(
    "shift-theorem", "strong pointer shift equals lambda <O>_alpha",
    ("index", "dim", "lambda", "expectation", "simulated_shift", "predicted_shift", "abs_error"),
    _shift_instance, (Metric("max_abs_error", "abs_error", "pointer_mean_shift", 1e-7),), 200))
_register(Suite(
    "rate-theorem", "phase-shift rate -lambda <O> and Fubini-Study speed lambda dO",
    ("index", "dim", "lambda", "expectation", "rate", "predicted_rate", "rate_abs_error",
     "fs_speed", "fs_speed_fd", "speed_rel_error"),
    _rate_instance, (Metric("max_rate_abs_error", "rate_abs_error", "phase_shift_rate", 1e-9),
                     Metric("max_speed_rel_error", "speed_rel_error", "fs_speed", 1e-8)), 200))
_register(Suite(
    "theta-omega", "Pancharatnam phase equals minus half the oriented solid angle",
    ("index", "theta1", "phi1", "theta2", "phi2", "theta3", "phi3", "pancharatnam_phase",
     "solid_angle", "wrapped_error"),
    _theta_omega_instance, (Metric("max_wrapped_error", "wrapped_error", "pancharatnam_phase", 1e-9),), 1000))
_register(Suite(
    "readout-max", "qubit-meter readout probability and its maximum",
    ("index", "theta", "phi", "beta", "traced_probability", "closed_form", "abs_error",
     "scan_argmax", "argmax_offset_steps"),
    _readout_instance, (Metric("max_abs_error", "abs_error", "readout_probability", 1e-10),
                        Metric("max_argmax_offset_steps", "argmax_offset_steps", "readout_probability", 1.0)), 50))
_register(Suite(
    "weak-real", "exact weak-shift slope equals Re(O_w) for an unchirped pointer",
    ("index", "dim", "overlap", "re_weak_value", "im_weak_value", "exact_slope", "rel_error", "anomalous"),
    _weak_real_instance, (Metric("max_rel_error", "rel_error", "weak_shift_exact", 1e-4),), 50))
_register(Suite(
    "weak-imag", "chirped pointer picks up Im(O_w) C(Q,P)",
    ("index", "dim", "re_weak_value", "im_weak_value", "covariance", "exact_slope", "predicted_slope",
     "rel_error", "im_term_unchirped"),
    _weak_imag_instance, (Metric("max_rel_error", "rel_error", "weak_shift_first_order", 1e-4),
                          Metric("max_im_term_unchirped", "im_term_unchirped", "covariance_term", 1e-8)), 50))
_register(Suite(
    "weak-triangle", "weak triangle phase rate -eps (Re(O_w) - <O>)",
    ("index", "dim", "epsilon", "rate", "predicted_rate", "abs_error"),
    _weak_triangle_instance, (Metric("max_abs_error", "abs_error", "weak_triangle_phase", 1e-8),), 50))
_register(Suite(
    "metric-consistency", "coordinate vs projector Fubini-Study metric and ray speed",
    ("index", "dim", "coordinate_form", "projector_form", "abs_error", "fs_speed", "fs_speed_fd",
     "speed_rel_error"),
    _metric_instance, (Metric("max_metric_abs_error", "abs_error", "fs_metric_form", 1e-8),
                       Metric("max_speed_rel_error", "speed_rel_error", "fs_speed", 1e-8)), 500))
_register(Suite(
    "variance-growth", "pointer variance grows by lambda^2 Var(O)",
    ("index", "dim", "lambda", "variance_after", "predicted", "abs_error"),
    _variance_instance, (Metric("max_abs_error", "abs_error", "pointer_mean_shift", 1e-7),), 200))


def qubit_weak_value_report(count: int = 400, tolerance_scale: float = 1.0) -> RunReport:
    """|O_w| = tan(theta/2) and arg O_w = s * phi with one sign s over a (theta, phi) grid.

    Pre-selection |0>, post-selection |theta, phi>, observable sigma_x.
    ``count`` is rounded down to a square grid; no randomness is involved.
    """
    from .linalg import basis_state, pauli

    n = int(np.sqrt(count))
    report = RunReport({"suite": "qubit-weak-value", "count": n * n}, tolerance_scale=tolerance_scale)
    report.columns = ["theta", "phi", "re_weak_value", "im_weak_value", "magnitude_error", "phase_plus",
                      "phase_minus"]
    if n == 0:
        return report
    alpha, op = basis_state(2, 0), pauli("x")
    thetas = np.linspace(0.05, np.pi - 0.05, n)
    phis = np.linspace(-np.pi + 0.05, np.pi - 0.05, n)
    mag_err = plus_err = minus_err = 0.0
    for th in thetas:
        for ph in phis:
            wv = weak_value(alpha, state_from_bloch(th, ph), op).value
            me = abs(abs(wv) - np.tan(th / 2))
            pe = abs(wrap_angle(np.angle(wv) - ph))
            ne = abs(wrap_angle(np.angle(wv) + ph))
            mag_err, plus_err, minus_err = max(mag_err, me), max(plus_err, pe), max(minus_err, ne)
            report.rows.append([float(th), float(ph), wv.real, wv.imag, me, pe, ne])
    sign = -1 if minus_err < plus_err else 1
    report.values["phase_sign"] = sign
    report.add("max_magnitude_error", "weak_value", mag_err, 0.0, 1e-12)
    report.add("max_phase_error", "weak_value", min(plus_err, minus_err), 0.0, 1e-12)
    return report


def suite_names() -> list[str]:
    return sorted([*SUITES, "qubit-weak-value"])


def run_battery(name: str, seed: int = 0, count: int | None = None, tolerance_scale: float = 1.0,
                workers: int | None = None) -> RunReport:
    """Run a named suite; raises ``KeyError`` for unknown suites."""
    start = time.perf_counter()
    if name == "qubit-weak-value":
        report = qubit_weak_value_report(400 if count is None else count, tolerance_scale)
        report.wall_time = time.perf_counter() - start
        return report
    suite = SUITES[name]
    n = suite.default_count if count is None else int(count)
    children = np.random.SeedSequence(seed).spawn(n)
    workers = workers or min(4, os.cpu_count() or 1)

    def one(k):
        return suite.instance(k, np.random.default_rng(children[k]))

    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(n)))
    else:
        rows = [one(k) for k in range(n)]

    report = RunReport({"suite": name, "seed": seed, "count": n, "description": suite.description},
                       columns=list(suite.columns), rows=rows, tolerance_scale=tolerance_scale)
    if rows:
        for metric in suite.metrics:
            col = suite.columns.index(metric.column)
            worst = max(float(r[col]) for r in rows)
            report.add(metric.name, metric.formula, worst, 0.0, metric.tolerance)
        if name == "weak-real":
            report.values["anomalous_instances"] = sum(bool(r[-1]) for r in rows)
    report.wall_time = time.perf_counter() - start
    return report
