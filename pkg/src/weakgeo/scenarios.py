"""Declarative scenarios: load, validate and execute JSON scenario files.

A scenario names a ``kind`` plus the system, meter, coupling and optional
post-selection it needs.  Running it produces a :class:`RunReport` whose
checks compare simulated values with the closed-form predictions.  The
schema lives next to this module in ``scenario_schema.json``.
"""

from __future__ import annotations

import copy
import json
import time
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .exceptions import WeakGeoError
from .linalg import HermitianOperator, StateVector, basis_state, expectation, ket, pauli
from .pointer import GaussianSpec, Grid, covariance_term, gaussian_wave
from .rayspace import (
    TangentDisplacement,
    bloch_from_state,
    fs_metric_form,
    lift_displacement,
    pancharatnam_phase,
    phase_near_branch_cut,
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
    postselect_phase,
    qubit_meter,
    readout_probability,
    readout_scan,
)
from .weakmeas import WEAK_LIMIT, WeakCoupling, exact_shift_slope, weak_shift_exact, weak_shift_first_order, weak_value

CHECK_COLUMNS = ["quantity", "formula", "value", "oracle", "abs_error", "tolerance", "passed"]


class ConfigParseError(WeakGeoError):
    """Scenario text is not valid JSON."""


class ConfigValidationError(WeakGeoError):
    """Scenario does not satisfy the schema or kind-specific requirements."""


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("scenario_schema.json").read_text())


def parse_config(text: str, source: str = "<config>") -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def validate_config(cfg: dict) -> dict:
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}" for e in errors]
        raise ConfigValidationError("; ".join(lines))
    return cfg


def load_config(path) -> dict:
    path = Path(path)
    return validate_config(parse_config(path.read_text(), str(path)))


def _complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def build_state(spec: dict, dim: int | None = None) -> StateVector:
    if "bloch" in spec:
        psi = state_from_bloch(spec["bloch"]["theta"], spec["bloch"]["phi"])
    elif "basis" in spec:
        if dim is None:
            raise ConfigValidationError("a basis state needs system.dim")
        if spec["basis"] >= dim:
            raise ConfigValidationError(f"basis index {spec['basis']} out of range for dim {dim}")
        psi = basis_state(dim, spec["basis"])
    else:
        amps = [_complex(v) for v in spec["amplitudes"]]
        if not np.any(amps):
            raise ConfigValidationError("amplitudes must not all vanish")
        psi = ket(amps)
    if dim is not None and psi.dim != dim:
        raise ConfigValidationError(f"state has dim {psi.dim}, system.dim is {dim}")
    return psi


def build_observable(spec: dict) -> HermitianOperator:
    if "pauli" in spec:
        return pauli(spec["pauli"])
    if "diagonal" in spec:
        return HermitianOperator(np.diag(np.asarray(spec["diagonal"], dtype=float)))
    try:
        return HermitianOperator([[_complex(v) for v in row] for row in spec["matrix"]])
    except ValueError as exc:
        raise ConfigValidationError(f"observable: {exc}") from exc


def _require(cfg: dict, *paths: str):
    for path in paths:
        node = cfg
        for key in path.split("."):
            if not isinstance(node, dict) or key not in node:
                raise ConfigValidationError(f"kind {cfg['kind']!r} requires {path}")
            node = node[key]


def _system(cfg):
    sysc = cfg["system"]
    dim = sysc.get("dim")
    alpha = build_state(sysc["alpha"], dim)
    op = build_observable(sysc["observable"])
    if op.dim != alpha.dim:
        raise ConfigValidationError(f"observable dim {op.dim} does not match state dim {alpha.dim}")
    return alpha, op


def _pointer(cfg):
    cont = cfg.get("meter", {}).get("continuous", {})
    spec = GaussianSpec(**cont.get("gaussian", {}))
    grid = Grid(**cont.get("grid", {}))
    return gaussian_wave(spec, grid)


def _add_check_rows(report: RunReport, prefix: list | None = None):
    for chk in report.checks:
        row = [chk.name, chk.formula, chk.value, chk.oracle, chk.abs_error, chk.tolerance, chk.passed]
        report.rows.append((prefix or []) + row)


def _run_strong_shift(cfg, report):
    _require(cfg, "system.alpha", "system.observable", "coupling.lambda")
    alpha, op = _system(cfg)
    c = StrongCoupling(cfg["coupling"]["lambda"], op)
    w = _pointer(cfg)
    ev = expectation(op, alpha)
    shift = pointer_mean_shift(alpha, w, c)
    report.values.update(expectation=ev, shift=shift)
    report.add("pointer_shift", "pointer_mean_shift", shift, c.strength * ev, 1e-7)
    report.add("pointer_shift_momentum_path", "evolve_strong_continuous",
               pointer_mean_shift(alpha, w, c, method="momentum"), shift, 1e-10)
    report.add("phase_shift_rate", "phase_shift_rate", phase_shift_rate(alpha, c), -c.strength * ev, 1e-9)
    speed = fs_speed(alpha, c)
    if speed > 0:
        report.add("fs_speed", "fs_speed", fs_speed_finite_difference(alpha, c), speed, 1e-8, relative=True)
    report.columns = CHECK_COLUMNS
    _add_check_rows(report)


def _run_weak_shift(cfg, report):
    _require(cfg, "system.alpha", "system.observable", "postselect.beta")
    alpha, op = _system(cfg)
    beta = build_state(cfg["postselect"]["beta"], alpha.dim)
    coupling = cfg.get("coupling", {})
    limit = coupling.get("weak_limit", WEAK_LIMIT)
    if "epsilons" in coupling:
        ladder = tuple(coupling["epsilons"])
    else:
        top = coupling.get("epsilon", 4e-3)
        ladder = (top / 4, top / 2, top)
    for e in ladder:
        WeakCoupling(e, limit)
    w = _pointer(cfg)
    wv = weak_value(alpha, beta, op)
    cov = covariance_term(w)
    report.values.update(weak_value=[wv.real, wv.imag], overlap=[wv.overlap.real, wv.overlap.imag],
                         covariance_term=cov)
    report.columns = ["epsilon", "shift_exact", "shift_first_order", "difference"]
    for e in ladder:
        exact = weak_shift_exact(alpha, w, beta, op, e)
        first = weak_shift_first_order(wv, w, e)
        report.rows.append([e, exact, first, exact - first])
    if all(e != 0 for e in ladder) and len(set(ladder)) == len(ladder):
        slope = exact_shift_slope(alpha, w, beta, op, ladder)
        report.values["exact_slope"] = slope
        report.add("shift_slope", "weak_shift_first_order", slope, wv.imag * cov + wv.real, 1e-4, relative=True)


def _run_readout_scan(cfg, report):
    _require(cfg, "system.alpha", "system.observable", "coupling.lambda", "meter.finite")
    alpha, op = _system(cfg)
    c = StrongCoupling(cfg["coupling"]["lambda"], op)
    fin = cfg["meter"]["finite"]
    momenta = tuple(fin["momenta"])
    if len(momenta) != 2:
        raise ConfigValidationError("readout-scan needs a qubit meter (two momenta)")
    init = build_state(fin["initial"], 2)
    theta = bloch_from_state(init).theta
    points = cfg.get("scan", {}).get("points", 2048)
    step = 2 * np.pi / points
    a0, a1 = indexed_state(alpha, c, momenta[0]), indexed_state(alpha, c, momenta[1])
    ov = complex(np.vdot(a0.amplitudes, a1.amplitudes))
    beta_angle = float(np.angle(np.conj(ov)))
    phis, probs = readout_scan(alpha, c, theta, momenta, points=points)
    closed = 0.5 + 0.5 * abs(ov) * np.sin(theta) * np.cos(phis - beta_angle)
    traced = [readout_probability(meter_density(alpha, qubit_meter(theta, phis[k], momenta), c))
              for k in range(0, points, max(1, points // 64))]
    closed_sub = closed[:: max(1, points // 64)]
    peak = int(np.argmax(probs))
    report.values.update(beta=beta_angle, argmax_phi=float(phis[peak]), overlap_modulus=abs(ov))
    report.add("closed_form_vs_trace", "readout_probability",
               float(np.max(np.abs(np.asarray(traced) - closed_sub))), 0.0, 1e-10)
    report.add("argmax_offset", "readout_probability", abs(wrap_angle(phis[peak] - beta_angle)), 0.0, step)
    report.columns = ["phi", "probability", "closed_form", "is_argmax"]
    report.rows = [[float(phis[k]), float(probs[k]), float(closed[k]), k == peak] for k in range(points)]
    if "postselect" in cfg:
        beta = build_state(cfg["postselect"]["beta"], alpha.dim)
        meter = qubit_meter(theta, 0.0, momenta)
        theta_ps = postselect_phase(alpha, meter, c, beta)
        _, post = readout_scan(alpha, c, theta, momenta, beta=beta, points=points)
        shift = wrap_angle(phis[int(np.argmax(post))] - phis[peak])
        report.values.update(postselect_phase=theta_ps, argmax_shift=float(shift))
        report.add("postselect_argmax_shift", "postselect_phase", abs(wrap_angle(shift - theta_ps)), 0.0, 2 * step)
        report.columns.append("probability_postselected")
        for row, p in zip(report.rows, post):
            row.append(float(p))


def _run_triangle(cfg, report):
    _require(cfg, "system.triangle")
    dim = cfg["system"].get("dim")
    states = [build_state(s, dim) for s in cfg["system"]["triangle"]]
    if len({s.dim for s in states}) != 1:
        raise ConfigValidationError("triangle states must share one dimension")
    theta = pancharatnam_phase(*states)
    report.values.update(pancharatnam_phase=theta, near_branch_cut=phase_near_branch_cut(theta))
    report.columns = ["pancharatnam_phase", "solid_angle", "minus_half_solid_angle", "wrapped_error"]
    if states[0].dim == 2:
        omega = solid_angle(*[bloch_from_state(s) for s in states])
        err = abs(wrap_angle(theta + omega / 2))
        report.values["solid_angle"] = omega
        report.add("theta_vs_solid_angle", "solid_angle", err, 0.0, 1e-9)
        report.rows.append([theta, omega, -omega / 2, err])
    else:
        report.rows.append([theta, "", "", ""])


def _run_metric(cfg, report):
    _require(cfg, "system.alpha")
    dim = cfg["system"].get("dim")
    psi = build_state(cfg["system"]["alpha"], dim)
    point = projective_coords(psi)
    rng = np.random.default_rng(cfg.get("seed", 0))
    n = cfg.get("count", 100)
    report.columns = ["index", "coordinate_form", "projector_form", "abs_error"]
    worst = 0.0
    for k in range(n):
        d = TangentDisplacement(rng.normal(size=psi.dim - 1) + 1j * rng.normal(size=psi.dim - 1))
        coord = fs_metric_form(point, d)
        proj = projector_metric_form(psi.amplitudes, lift_displacement(point, d))
        worst = max(worst, abs(coord - proj))
        report.rows.append([k, coord, proj, abs(coord - proj)])
    if n:
        report.add("max_metric_error", "fs_metric_form", worst, 0.0, 1e-8)
    if "observable" in cfg["system"] and "lambda" in cfg.get("coupling", {}):
        c = StrongCoupling(cfg["coupling"]["lambda"], build_observable(cfg["system"]["observable"]))
        speed = fs_speed(psi, c)
        report.values["fs_speed"] = speed
        if speed > 0:
            report.add("fs_speed", "fs_speed", fs_speed_finite_difference(psi, c), speed, 1e-8, relative=True)


RUNNERS = {
    "strong-shift": _run_strong_shift,
    "weak-shift": _run_weak_shift,
    "readout-scan": _run_readout_scan,
    "triangle-phase": _run_triangle,
    "metric-check": _run_metric,
}


def _set_path(cfg: dict, dotted: str, value):
    keys = dotted.split(".")
    node = cfg
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigValidationError(f"sweep parameter {dotted!r} does not name a config field")
    node[keys[-1]] = value


def _run_sweep(cfg, report):
    _require(cfg, "sweep")
    sw = cfg["sweep"]
    report.columns = ["sweep_value"] + CHECK_COLUMNS
    all_checks = []
    for value in sw["values"]:
        sub_cfg = copy.deepcopy({k: v for k, v in cfg.items() if k != "sweep"})
        sub_cfg["kind"] = sw["base"]
        _set_path(sub_cfg, sw["parameter"], value)
        validate_config(sub_cfg)
        sub = RunReport(sub_cfg, tolerance_scale=report.tolerance_scale)
        RUNNERS[sw["base"]](sub_cfg, sub)
        _add_check_rows(sub, [value])
        report.rows.extend(sub.rows[-len(sub.checks):] if sub.checks else [])
        for chk in sub.checks:
            chk.name = f"{chk.name}[{sw['parameter']}={value!r}]"
        all_checks.extend(sub.checks)
    report.checks = all_checks


RUNNERS["sweep"] = _run_sweep


def run_scenario(cfg: dict, tolerance_scale: float = 1.0) -> RunReport:
    """Execute a validated scenario dict."""
    start = time.perf_counter()
    report = RunReport(copy.deepcopy(cfg), tolerance_scale=tolerance_scale)
    RUNNERS[cfg["kind"]](cfg, report)
    report.wall_time = time.perf_counter() - start
    return report
