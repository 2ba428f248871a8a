"""Geometry of the space of rays CP(n).

Projective coordinates, the Fubini-Study metric in coordinate and projector
form, the U(1) connection one-form, Pancharatnam phases of state triples,
and the Bloch sphere picture of CP(1).

Orientation conventions used throughout:

* ``pancharatnam_phase(a, b, c) = arg(<a|c><c|b><b|a>)``, the holonomy of
  parallel transport around the geodesic triangle a -> b -> c -> a.
* ``solid_angle(p1, p2, p3)`` is positive when ``p1 . (p2 x p3) > 0``.

With these, for a qubit ``pancharatnam_phase(a, b, c) == -solid_angle/2``
(mod 2 pi) and the loop integral of the connection along a -> b -> c -> a
equals ``-pancharatnam_phase(a, b, c)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AntipodalError, ChartError, DimensionError, UndefinedPhaseError
from .linalg import StateVector, as_amplitudes, inner_product

CHART_TOL = 1e-12
OVERLAP_TOL = 1e-12
DEGENERATE_TOL = 1e-10
NEAR_PI = 1e-6


@dataclass(frozen=True)
class LiftedCoordinates:
    """A vector of C^(n+1) written as (norm, global phase, projective coordinates)."""

    r: float
    varphi: float
    xi: np.ndarray

    def __post_init__(self):
        xi = np.atleast_1d(np.asarray(self.xi, dtype=complex))
        xi.flags.writeable = False
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.xi.size

    def to_vector(self) -> np.ndarray:
        psi0 = self.r * np.exp(1j * self.varphi) / np.sqrt(1.0 + np.vdot(self.xi, self.xi).real)
        return np.concatenate([[psi0], self.xi * psi0])

    def to_state(self) -> StateVector:
        return StateVector(self.to_vector())


@dataclass(frozen=True)
class BlochPoint:
    theta: float
    phi: float

    def unit_vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    def antipode(self) -> "BlochPoint":
        return BlochPoint(np.pi - self.theta, _wrap(self.phi + np.pi))


@dataclass(frozen=True)
class TangentDisplacement:
    dxi: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.dxi, dtype=complex))
        if not np.all(np.isfinite(d)):
            raise ValueError("displacement must be finite")
        d.flags.writeable = False
        object.__setattr__(self, "dxi", d)


def _wrap(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = float(np.angle(np.exp(1j * angle)))
    return np.pi if a == -np.pi else a


def wrap_angle(angle):
    """Map angles to (-pi, pi]; works elementwise on arrays."""
    a = np.angle(np.exp(1j * np.asarray(angle, dtype=float)))
    return np.where(a == -np.pi, np.pi, a) if np.ndim(a) else _wrap(float(angle))


def state_from_bloch(theta: float, phi: float) -> StateVector:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return StateVector([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def bloch_from_state(psi) -> BlochPoint:
    """Bloch angles of a qubit ray; ``phi`` is set to 0 at the poles."""
    a = as_amplitudes(psi)
    if a.size != 2:
        raise DimensionError(f"Bloch sphere needs a qubit, got dim {a.size}")
    a = a / np.linalg.norm(a)
    theta = 2.0 * np.arctan2(abs(a[1]), abs(a[0]))
    if abs(a[0]) < CHART_TOL or abs(a[1]) < CHART_TOL:
        return BlochPoint(float(theta), 0.0)
    return BlochPoint(float(theta), _wrap(np.angle(a[1]) - np.angle(a[0])))


def projective_coords(psi) -> LiftedCoordinates:
    """Coordinates xi^i = psi^i / psi^0 plus norm and phase of the lift."""
    a = as_amplitudes(psi)
    if abs(a[0]) <= CHART_TOL:
        raise ChartError("psi^0 vanishes; rotate the basis to use the psi^0 != 0 chart")
    return LiftedCoordinates(r=float(np.linalg.norm(a)), varphi=float(np.angle(a[0])), xi=a[1:] / a[0])


def fs_distance(a, b) -> float:
    """Geodesic Fubini-Study distance arccos|<a|b>| between two rays.

    Evaluated as atan2(|b - a<a|b>|, |<a|b>|), which is the same angle but
    keeps full relative precision for nearby rays.
    """
    x, y = as_amplitudes(a), as_amplitudes(b)
    ov = inner_product(x, y)
    perp = np.linalg.norm(y - x * ov)
    return float(np.arctan2(perp, abs(ov)))


def fs_distance_increment(a, delta) -> float:
    """fs_distance(a, a + delta) for a normalized ``a`` without forming a + delta.

    Avoids the cancellation in (a + delta) - a<a|a + delta> when delta is tiny.
    """
    x, d = as_amplitudes(a), as_amplitudes(delta)
    ov = np.vdot(x, d)
    perp = np.linalg.norm(d - x * ov)
    return float(np.arctan2(perp, abs(1.0 + ov)))


def _fs_tensor(xi: np.ndarray) -> np.ndarray:
    s = 1.0 + np.vdot(xi, xi).real
    # g[k, j] multiplies dxi^k conj(dxi^j)
    return (s * np.eye(xi.size) - np.outer(xi.conj(), xi)) / s**2


def fs_metric_form(point: LiftedCoordinates, d: TangentDisplacement) -> float:
    """Squared Fubini-Study length of a coordinate displacement dxi."""
    dxi = np.asarray(d.dxi)
    g = _fs_tensor(point.xi)
    val = np.einsum("k,kj,j->", dxi, g, dxi.conj())
    return float(val.real)


def connection_eval(point: LiftedCoordinates, d: TangentDisplacement) -> float:
    """A = (i/2)(xi . conj(dxi) - conj(xi) . dxi) / (1 + |xi|^2)."""
    xi, dxi = point.xi, np.asarray(d.dxi)
    num = 0.5j * (np.dot(xi, dxi.conj()) - np.dot(xi.conj(), dxi))
    val = num / (1.0 + np.vdot(xi, xi).real)
    return float(val.real)


def lift_displacement(point: LiftedCoordinates, d: TangentDisplacement, dvarphi: float = 0.0,
                      dr: float = 0.0) -> np.ndarray:
    """Differential d(psi) of the lifted vector along (dr, dvarphi, dxi)."""
    xi, dxi = point.xi, np.asarray(d.dxi)
    s = 1.0 + np.vdot(xi, xi).real
    ds = 2.0 * np.real(np.vdot(xi, dxi))
    psi = point.to_vector()
    u = np.concatenate([[0.0], dxi]) * point.r * np.exp(1j * point.varphi) / np.sqrt(s)
    return u + psi * (1j * dvarphi - 0.5 * ds / s + (dr / point.r if point.r else 0.0))


def projector_metric_form(psi, dpsi) -> float:
    """<dpsi|dpsi> - |<psi|dpsi>|^2 for a normalized psi."""
    x, dx = as_amplitudes(psi), as_amplitudes(dpsi)
    ov = np.vdot(x, dx)
    return float(np.vdot(dx, dx).real - abs(ov) ** 2)


def pancharatnam_phase(a, b, c) -> float:
    """arg(<a|c><c|b><b|a>) in (-pi, pi].

    Raises :class:`UndefinedPhaseError` if any pairwise overlap vanishes.
    """
    ab, bc, ca = inner_product(b, a), inner_product(c, b), inner_product(a, c)
    for name, ov in (("<b|a>", ab), ("<c|b>", bc), ("<a|c>", ca)):
        if abs(ov) <= OVERLAP_TOL:
            raise UndefinedPhaseError(f"overlap {name} vanishes (|.| = {abs(ov):.3e})")
    return _wrap(np.angle(ca * bc * ab))


def phase_near_branch_cut(angle: float, tol: float = NEAR_PI) -> bool:
    """True when a phase sits within ``tol`` of the +-pi branch cut."""
    return abs(abs(angle) - np.pi) < tol


def _as_unit(p) -> np.ndarray:
    if isinstance(p, BlochPoint):
        return p.unit_vector()
    v = np.asarray(p, dtype=float)
    return v / np.linalg.norm(v)


def _interior_angle(at: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    tu = u - np.dot(at, u) * at
    tv = v - np.dot(at, v) * at
    return float(np.arctan2(np.linalg.norm(np.cross(tu, tv)), np.dot(tu, tv)))


def solid_angle(p1, p2, p3) -> float:
    """Oriented solid angle of the geodesic triangle p1 p2 p3 on the unit sphere.

    Magnitude is the spherical excess; sign is that of p1 . (p2 x p3).
    A degenerate triangle (all three on one great circle) returns 0, or
    2 pi if its geodesic edges wrap the whole circle.
    """
    a, b, c = _as_unit(p1), _as_unit(p2), _as_unit(p3)
    for (u, v) in ((a, b), (b, c), (c, a)):
        if np.linalg.norm(u + v) < DEGENERATE_TOL:
            raise AntipodalError("antipodal vertices: geodesic edge is not unique")
    triple = float(np.dot(a, np.cross(b, c)))
    if abs(triple) < DEGENERATE_TOL:
        # zero area, unless the three arcs go all the way round the circle
        return 0.0 if 1.0 + np.dot(a, b) + np.dot(b, c) + np.dot(c, a) > 0 else 2.0 * np.pi
    excess = _interior_angle(a, b, c) + _interior_angle(b, c, a) + _interior_angle(c, a, b) - np.pi
    return float(np.copysign(excess, triple))


def sphere_metric_decomposition_check(psi, dpsi) -> tuple[float, float, float]:
    """Split |dpsi|^2 into its phase (fibre) part and its Fubini-Study part.

    ``dpsi`` is first made tangent to the unit sphere by removing the
    component along Re<psi|dpsi>.  Returns ``(phase_part, fs_part, total)``
    with ``phase_part = |<psi|dpsi>|^2`` and
    ``fs_part = <dpsi|dpsi> - |<psi|dpsi>|^2``.
    """
    x, dx = as_amplitudes(psi), np.array(as_amplitudes(dpsi))
    if x.shape != dx.shape:
        raise DimensionError("psi and dpsi must have equal dims")
    dx = dx - np.real(np.vdot(x, dx)) * x
    ov = np.vdot(x, dx)
    total = float(np.vdot(dx, dx).real)
    phase_part = float(abs(ov) ** 2)
    return phase_part, total - phase_part, total
