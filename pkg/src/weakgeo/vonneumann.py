"""Ideal von Neumann pre-measurement, exp(-i lambda O (x) P).

Finite meters (momentum basis {|v_sigma>} with eigenvalues p_sigma) and a
continuous pointer on a position grid are both supported.  The continuous
final state is built branch by branch in the eigenbasis of O, each branch
being the pointer translated by lambda * o_j.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import linalg
from .exceptions import NotNormalizedError
from .linalg import (
    BipartiteState,
    DensityMatrix,
    HermitianOperator,
    StateVector,
    as_amplitudes,
    expectation,
    hermitian_exp,
    inner_product,
    variance,
)
from .pointer import (
    PointerWave,
    _fft_to_momentum,
    _fft_to_position,
    check_shift,
    check_support,
    position_moments,
    to_position,
    translate_samples,
)
from .rayspace import BlochPoint, fs_distance_increment, pancharatnam_phase, state_from_bloch

RATE_LADDER = (1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class StrongCoupling:
    strength: float
    observable: HermitianOperator

    def __post_init__(self):
        if not np.isfinite(self.strength):
            raise ValueError("coupling strength must be finite")

    @property
    def lam(self) -> float:
        return self.strength


@dataclass(frozen=True)
class FiniteMeter:
    """Meter with momentum eigenvalues ``momenta`` and initial state given
    by its amplitudes in the momentum basis."""

    momenta: tuple
    initial: StateVector

    def __post_init__(self):
        p = np.asarray(self.momenta, dtype=float)
        if p.ndim != 1 or p.size != self.initial.dim:
            raise ValueError("need one momentum per meter basis state")
        if not np.all(np.isfinite(p)):
            raise ValueError("momenta must be finite")
        if not self.initial.is_normalized(1e-10):
            raise NotNormalizedError("meter initial state is not normalized")
        object.__setattr__(self, "momenta", tuple(float(v) for v in p))

    @property
    def dim(self) -> int:
        return len(self.momenta)


def qubit_meter(theta: float, phi: float, momenta=(0.0, 1.0)) -> FiniteMeter:
    """cos(theta/2)|v0> + e^{i phi} sin(theta/2)|v1>."""
    return FiniteMeter(tuple(momenta), state_from_bloch(theta, phi))


def _check_input(alpha: StateVector, c: StrongCoupling):
    if not alpha.is_normalized(1e-10):
        raise NotNormalizedError("pre-selected state is not normalized")
    if alpha.dim != c.observable.dim:
        raise linalg.DimensionError("state and observable dims differ")


def indexed_state(alpha: StateVector, c: StrongCoupling, y: float) -> StateVector:
    """|A(y)> = exp(-i lambda y O)|alpha>."""
    return StateVector(hermitian_exp(c.observable, c.strength * y) @ as_amplitudes(alpha))


def evolve_strong_continuous(alpha: StateVector, w: PointerWave, c: StrongCoupling,
                             method: Literal["translate", "momentum"] = "translate") -> BipartiteState:
    """Joint state after the pulse, on the pointer's position grid.

    ``method="translate"`` (default) returns components
    ``alpha^j * phi(x - lambda o_j)`` in the eigenbasis of O.
    ``method="momentum"`` is an independent cross-check: it multiplies each
    momentum component phi_p(y) by |A(y)> and transforms back, returning
    components in the computational basis.
    """
    _check_input(alpha, c)
    pos = to_position(w)
    if abs(pos.norm_squared() - 1.0) > 1e-10:
        raise NotNormalizedError("pointer wave is not normalized")
    grid = pos.grid
    op = c.observable
    check_shift(pos, c.strength * op.eigenvalues)
    if method == "translate":
        coeffs = op.eigenvectors.conj().T @ as_amplitudes(alpha)
        branches = translate_samples(pos.samples, grid, c.strength * op.eigenvalues)
        for j, row in enumerate(branches):
            if abs(coeffs[j]) > 0:
                check_support(PointerWave(grid, row))
        return BipartiteState(coeffs[:, None] * branches, "position-grid", grid.dx, op.eigenvectors)
    if method == "momentum":
        mom = _fft_to_momentum(pos.samples, grid)
        v = op.eigenvectors
        coeffs = v.conj().T @ as_amplitudes(alpha)
        # A(y) for every y at once: V diag(exp(-i lam y o)) V^dagger alpha
        phases = np.exp(-1j * c.strength * np.outer(op.eigenvalues, grid.y))
        a_of_y = v @ (coeffs[:, None] * phases)
        comps = _fft_to_position(a_of_y * mom[None, :], grid)
        for row in comps:
            if np.max(np.abs(row)) > 0:
                check_support(PointerWave(grid, row))
        return BipartiteState(comps, "position-grid", grid.dx)
    raise ValueError(f"unknown method {method!r}")


def meter_position_density(state: BipartiteState) -> np.ndarray:
    """Position probability per grid cell of the reduced meter state."""
    return linalg.reduced_diagonal(state, "meter")


def pointer_mean_shift(alpha: StateVector, w: PointerWave, c: StrongCoupling,
                       method: Literal["translate", "momentum"] = "translate") -> float:
    """tr(rho_M Q) after the pulse minus <Q> before it, by full simulation."""
    state = evolve_strong_continuous(alpha, w, c, method)
    pos = to_position(w)
    after = float(np.dot(pos.grid.x, meter_position_density(state)))
    before, _ = position_moments(pos)
    return after - before


def pointer_variance_after(alpha: StateVector, w: PointerWave, c: StrongCoupling) -> float:
    """Position variance of the reduced meter state after the pulse."""
    state = evolve_strong_continuous(alpha, w, c)
    x = to_position(w).grid.x
    p = meter_position_density(state)
    mean = np.dot(x, p)
    return float(np.dot((x - mean) ** 2, p))


def richardson(step_values, steps, order: int = 2) -> float:
    """Neville extrapolation to step -> 0.

    Assumes the error expands in powers of ``h^order``:
    ``c1 h^order + c2 h^(2 order) + ...``.
    """
    vals = [float(v) for v in step_values]
    t = [float(h) ** order for h in steps]
    k = 0
    while len(vals) > 1:
        vals = [
            vals[i + 1] + (vals[i + 1] - vals[i]) / (t[i] / t[i + k + 1] - 1.0)
            for i in range(len(vals) - 1)
        ]
        k += 1
    return vals[0]


def _phase_increment(alpha: StateVector, c: StrongCoupling, y: float, dy: float) -> float:
    return float(np.angle(inner_product(indexed_state(alpha, c, y), indexed_state(alpha, c, y + dy))))


def phase_shift_rate(alpha: StateVector, c: StrongCoupling, y: float = 0.0,
                     ladder=RATE_LADDER) -> float:
    """d/d(dy) arg<A(y)|A(y+dy)> at dy = 0, central differences + Richardson."""
    _check_input(alpha, c)
    diffs = [(_phase_increment(alpha, c, y, h) - _phase_increment(alpha, c, y, -h)) / (2 * h) for h in ladder]
    return richardson(diffs, ladder)


def fs_speed(alpha: StateVector, c: StrongCoupling) -> float:
    """Fubini-Study speed of y -> |A(y)>: lambda * sqrt(Var(O)_alpha)."""
    _check_input(alpha, c)
    return abs(c.strength) * np.sqrt(variance(c.observable, alpha))


def indexed_increment(alpha: StateVector, c: StrongCoupling, y: float, dy: float) -> np.ndarray:
    """|A(y+dy)> - |A(y)>, computed with expm1 so it stays accurate for tiny dy."""
    op = c.observable
    v = op.eigenvectors
    coeffs = v.conj().T @ as_amplitudes(alpha)
    lam_o = c.strength * op.eigenvalues
    return v @ (coeffs * np.exp(-1j * lam_o * y) * np.expm1(-1j * lam_o * dy))


def fs_speed_finite_difference(alpha: StateVector, c: StrongCoupling, y: float = 0.0,
                               ladder=RATE_LADDER) -> float:
    """Ray speed from fs_distance(A(y), A(y+dy))/dy, Richardson-extrapolated."""
    a0 = indexed_state(alpha, c, y)
    vals = [fs_distance_increment(a0, indexed_increment(alpha, c, y, h)) / h for h in ladder]
    return richardson(vals, ladder)


def evolve_strong_finite(alpha: StateVector, meter: FiniteMeter, c: StrongCoupling) -> BipartiteState:
    """|A_sigma> (x) |v_sigma> phi^sigma with |A_sigma> = exp(-i lambda p_sigma O)|alpha>."""
    _check_input(alpha, c)
    phi = as_amplitudes(meter.initial)
    cols = [as_amplitudes(indexed_state(alpha, c, p)) * phi[s] for s, p in enumerate(meter.momenta)]
    return BipartiteState(np.stack(cols, axis=1), "finite-basis")


def meter_density(alpha: StateVector, meter: FiniteMeter, c: StrongCoupling) -> DensityMatrix:
    return linalg.partial_trace(evolve_strong_finite(alpha, meter, c), "meter")


def readout_probability(meter_rho: DensityMatrix, reference: BlochPoint | None = None) -> float:
    """tr(rho |ref><ref|) for a qubit meter; default reference is |theta=pi/2, phi=0>."""
    if meter_rho.dim != 2:
        raise linalg.DimensionError("readout probability is defined for qubit meters only")
    ref = reference or BlochPoint(np.pi / 2, 0.0)
    r = as_amplitudes(state_from_bloch(ref.theta, ref.phi))
    return float(np.real(np.vdot(r, meter_rho.matrix @ r)))


def indexed_overlap_phase(alpha: StateVector, meter: FiniteMeter, c: StrongCoupling) -> float:
    """arg<A_1|A_0>, the azimuth at which the readout probability peaks."""
    a0 = indexed_state(alpha, c, meter.momenta[0])
    a1 = indexed_state(alpha, c, meter.momenta[1])
    return float(np.angle(inner_product(a1, a0)))


def scan_grid(points: int = 2048) -> np.ndarray:
    """Azimuths ``-pi + 2 pi k / points``, ``k = 0..points-1``."""
    return -np.pi + 2.0 * np.pi * np.arange(points) / points


def readout_scan(alpha: StateVector, c: StrongCoupling, theta: float, momenta=(0.0, 1.0),
                 beta: StateVector | None = None, points: int = 2048) -> tuple[np.ndarray, np.ndarray]:
    """Readout probability as the meter azimuth phi is scanned.

    With ``beta`` given, the system is post-selected on it first and the
    probability refers to the normalized conditional meter state.
    """
    phis = scan_grid(points)
    a = [as_amplitudes(indexed_state(alpha, c, p)) for p in momenta]
    if beta is None:
        g = np.array([[np.vdot(a[t], a[s]) for t in range(2)] for s in range(2)])
    else:
        b = as_amplitudes(beta)
        amp = np.array([np.vdot(b, a[0]), np.vdot(b, a[1])])
        g = np.outer(amp, amp.conj())
    cs, sn = np.cos(theta / 2), np.sin(theta / 2)
    phi0 = cs
    phi1 = sn * np.exp(1j * phis)
    # rho[s, t] = phi^s g[s, t] conj(phi^t); reference (|v0> + |v1>)/sqrt(2)
    p = 0.5 * np.real(phi0 * phi0 * g[0, 0] + np.abs(phi1) ** 2 * g[1, 1]
                      + 2.0 * np.real(phi1 * phi0 * g[1, 0]))
    if beta is not None:
        norm = np.real(phi0 * phi0 * g[0, 0] + np.abs(phi1) ** 2 * g[1, 1])
        p = p / norm
    return phis, p


def postselect_phase(alpha: StateVector, meter: FiniteMeter, c: StrongCoupling, beta: StateVector,
                     verify: bool = False, points: int = 2048) -> float:
    """Shift of the readout maximum caused by post-selecting ``beta``.

    Equals arg(<A_1|beta><beta|A_0><A_0|A_1>), i.e.
    ``pancharatnam_phase(A_1, A_0, beta)``.  With ``verify=True`` the value
    is checked against the argmax of the scanned probabilities (with and
    without post-selection) to within two scan steps.
    """
    if meter.dim != 2:
        raise linalg.DimensionError("post-selection phase is defined for qubit meters")
    a0 = indexed_state(alpha, c, meter.momenta[0])
    a1 = indexed_state(alpha, c, meter.momenta[1])
    theta_ps = pancharatnam_phase(a1, a0, beta)
    if verify:
        theta = float(2 * np.arctan2(abs(meter.initial.amplitudes[1]), abs(meter.initial.amplitudes[0])))
        phis, p_plain = readout_scan(alpha, c, theta, meter.momenta, points=points)
        _, p_post = readout_scan(alpha, c, theta, meter.momenta, beta=beta, points=points)
        shift = np.angle(np.exp(1j * (phis[np.argmax(p_post)] - phis[np.argmax(p_plain)])))
        step = 2 * np.pi / points
        if abs(np.angle(np.exp(1j * (shift - theta_ps)))) > 2 * step:
            raise ArithmeticError(f"argmax shift {shift} disagrees with triple-product phase {theta_ps}")
    return theta_ps
