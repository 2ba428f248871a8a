"""Weak values and weak pre-measurement with post-selection.

The pointer is evolved with the exact coupling exp(-i eps O (x) P), the
system is projected onto |beta>, and the conditional pointer state is
renormalized exactly.  The first-order shift formula

    dQ = eps * (Im(O_w) * C(Q, P) + Re(O_w))

is provided separately so the two can be compared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AmplificationDivergenceError, PostSelectionError, WeakRegimeError
from .linalg import HermitianOperator, StateVector, as_amplitudes, expectation, inner_product
from .pointer import PointerWave, check_shift, check_support, covariance_term, position_moments, to_position, translate_samples
from .rayspace import pancharatnam_phase
from .vonneumann import RATE_LADDER, StrongCoupling, indexed_state, richardson

OVERLAP_GUARD = 1e-6
WEAK_LIMIT = 0.1
SLOPE_LADDER = (1e-3, 2e-3, 4e-3)


@dataclass(frozen=True)
class WeakValue:
    value: complex
    overlap: complex

    @property
    def real(self) -> float:
        return float(self.value.real)

    @property
    def imag(self) -> float:
        return float(self.value.imag)


@dataclass(frozen=True)
class WeakCoupling:
    """Weak coupling strength; ``limit`` bounds |epsilon| (``None`` disables the guard)."""

    epsilon: float
    limit: float | None = WEAK_LIMIT

    def __post_init__(self):
        if not np.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")
        if self.limit is not None and abs(self.epsilon) > self.limit:
            raise WeakRegimeError(f"|epsilon| = {abs(self.epsilon)} exceeds weak-regime limit {self.limit}")

    @property
    def strength(self) -> float:
        return self.epsilon


def _strength(c) -> float:
    if isinstance(c, (int, float, np.floating)):
        return float(c)
    return float(c.strength)


def weak_value(alpha: StateVector, beta: StateVector, op: HermitianOperator,
               guard: float = OVERLAP_GUARD) -> WeakValue:
    """<beta|O|alpha> / <beta|alpha>."""
    a, b = as_amplitudes(alpha), as_amplitudes(beta)
    ov = complex(np.vdot(b, a))
    if abs(ov) <= guard:
        raise AmplificationDivergenceError(
            f"|<beta|alpha>| = {abs(ov):.3e} is below the guard {guard:.1e}; weak value diverges")
    return WeakValue(complex(np.vdot(b, op.matrix @ a)) / ov, ov)


def weak_evolve_and_postselect(alpha: StateVector, w: PointerWave, beta: StateVector,
                               op: HermitianOperator, eps: WeakCoupling | float,
                               guard: float = OVERLAP_GUARD) -> PointerWave:
    """Conditional pointer state after the exact weak pulse and post-selection on beta."""
    e = _strength(eps)
    a, b = as_amplitudes(alpha), as_amplitudes(beta)
    if abs(np.vdot(b, a)) <= guard:
        raise AmplificationDivergenceError(f"|<beta|alpha>| = {abs(np.vdot(b, a)):.3e} is below the guard")
    pos = to_position(w)
    if e == 0.0:
        return pos
    check_shift(pos, e * op.eigenvalues)
    v = op.eigenvectors
    # <beta|o_j><o_j|alpha> for each eigenbranch
    amp = (v.conj().T @ b).conj() * (v.conj().T @ a)
    branches = translate_samples(pos.samples, pos.grid, e * op.eigenvalues)
    out = PointerWave(pos.grid, amp @ branches)
    prob = out.norm_squared()
    if prob < 1e-12:
        raise PostSelectionError(f"post-selection probability {prob:.3e} is numerically zero")
    out = out.normalize()
    check_support(out)
    return out


def weak_shift_exact(alpha: StateVector, w: PointerWave, beta: StateVector, op: HermitianOperator,
                     eps: WeakCoupling | float) -> float:
    """Change of <Q> caused by the weak pulse plus post-selection, no approximation."""
    after = weak_evolve_and_postselect(alpha, w, beta, op, eps)
    return position_moments(after)[0] - position_moments(w)[0]


def weak_shift_first_order(wv: WeakValue, w: PointerWave, eps: WeakCoupling | float) -> float:
    return _strength(eps) * (wv.imag * covariance_term(w) + wv.real)


def exact_shift_slope(alpha: StateVector, w: PointerWave, beta: StateVector, op: HermitianOperator,
                      ladder=SLOPE_LADDER) -> float:
    """d(dQ)/d(eps) at eps = 0 from exact shifts on an epsilon ladder.

    Fits dQ(eps) = a1 eps + a2 eps^2 + ... exactly through the ladder points
    (dQ(0) = 0 holds by construction) and returns a1, so the
    second-order response does not bias the slope.
    """
    eps = np.asarray(ladder, dtype=float)
    shifts = np.array([weak_shift_exact(alpha, w, beta, op, e) for e in eps])
    design = np.vander(eps, eps.size + 1, increasing=True)[:, 1:]
    coef = np.linalg.solve(design, shifts)
    return float(coef[0])


def weak_triangle_phase(alpha: StateVector, beta: StateVector, op: HermitianOperator, c,
                        y: float, dy: float) -> float:
    """arg(<A(y)|beta><beta|A(y+dy)><A(y+dy)|A(y)>), A(y) = exp(-i c y O)|alpha>."""
    coupling = StrongCoupling(_strength(c), op)
    return pancharatnam_phase(indexed_state(alpha, coupling, y), indexed_state(alpha, coupling, y + dy), beta)


def weak_triangle_rate(alpha: StateVector, beta: StateVector, op: HermitianOperator, c,
                       y: float = 0.0, ladder=RATE_LADDER) -> float:
    """Theta/dy as dy -> 0, by central differences and Richardson extrapolation."""
    diffs = [(weak_triangle_phase(alpha, beta, op, c, y, h) - weak_triangle_phase(alpha, beta, op, c, y, -h))
             / (2 * h) for h in ladder]
    return richardson(diffs, ladder)


def weak_triangle_rate_first_order(alpha: StateVector, beta: StateVector, op: HermitianOperator, c) -> float:
    """-eps (Re(O_w) - <O>_alpha)."""
    return -_strength(c) * (weak_value(alpha, beta, op).real - expectation(op, alpha))
