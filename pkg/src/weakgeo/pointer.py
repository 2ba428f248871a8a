"""One-dimensional measuring pointer on a uniform periodic grid.

Fourier convention: <q(x)|p(y)> = exp(i x y) / sqrt(2 pi), so the momentum
wavefunction is

    phi_p(y) = (2 pi)^(-1/2) * sum_j exp(-i y x_j) phi(x_j) dx,

evaluated with an FFT plus an explicit phase for the grid offset x_min.
The momentum operator acts as -i d/dx and ``exp(-i a P)`` translates a
wavefunction by ``+a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .exceptions import GridOverflowError, NotNormalizedError

NORM_TOL = 1e-10
EDGE_TOL = 1e-8
EDGE_POINTS = 4


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid ``x_k = x_min + k*dx``, ``k = 0..m-1``."""

    x_min: float = -20.0
    x_max: float = 20.0
    m: int = 4096

    def __post_init__(self):
        if self.m < 16 or self.m & (self.m - 1):
            raise ValueError(f"grid size must be a power of two >= 16, got {self.m}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.m

    @property
    def dy(self) -> float:
        return 2.0 * np.pi / (self.m * self.dx)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.m)

    @property
    def y(self) -> np.ndarray:
        """Momentum grid in ascending order, ``y_k = dy * (k - m/2)``."""
        return self.dy * (np.arange(self.m) - self.m // 2)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.x_min, self.x_max, self.m * factor)


@dataclass(frozen=True)
class PointerWave:
    """Pointer wavefunction samples in position or momentum representation."""

    grid: Grid
    samples: np.ndarray
    representation: Literal["position", "momentum"] = "position"

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.shape != (self.grid.m,):
            raise ValueError(f"expected {self.grid.m} samples, got shape {s.shape}")
        if self.representation not in ("position", "momentum"):
            raise ValueError(f"unknown representation {self.representation!r}")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def spacing(self) -> float:
        return self.grid.dx if self.representation == "position" else self.grid.dy

    @property
    def points(self) -> np.ndarray:
        return self.grid.x if self.representation == "position" else self.grid.y

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.spacing)

    def normalize(self) -> "PointerWave":
        n2 = self.norm_squared()
        if n2 == 0.0:
            raise NotNormalizedError("cannot normalize a zero wave")
        return PointerWave(self.grid, self.samples / np.sqrt(n2), self.representation)

    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2


@dataclass(frozen=True)
class GaussianSpec:
    """exp(-(1 + i c)(x - q0)^2 / (4 sigma^2) + i p0 x)."""

    center: float = 0.0
    mean_momentum: float = 0.0
    width: float = 1.0
    chirp: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("Gaussian width must be positive")


def _require_normalized(w: PointerWave):
    n2 = w.norm_squared()
    if abs(n2 - 1.0) > NORM_TOL:
        raise NotNormalizedError(f"pointer wave has squared norm {n2:.15g}")


def edge_fraction(w: PointerWave, points: int = EDGE_POINTS) -> float:
    """Largest edge amplitude relative to the peak amplitude."""
    a = np.abs(w.samples)
    peak = a.max()
    if peak == 0.0:
        return 0.0
    return float(max(a[:points].max(), a[-points:].max()) / peak)


def check_support(w: PointerWave, tol: float = EDGE_TOL):
    """Raise :class:`GridOverflowError` if amplitude reaches the grid edges."""
    frac = edge_fraction(w)
    if frac >= tol:
        raise GridOverflowError(
            f"{w.representation} amplitude at grid edge is {frac:.2e} of peak; enlarge the grid")


def check_shift(w: PointerWave, shifts, tol: float = EDGE_TOL):
    """Raise :class:`GridOverflowError` if translating by any of ``shifts``
    would push the wave's support off the grid.

    Spectral translation is periodic, so an oversized shift wraps around
    instead of reaching the edge; this catches that case.
    """
    pos = to_position(w)
    a = np.abs(pos.samples)
    if a.max() == 0.0:
        return
    idx = np.flatnonzero(a >= tol * a.max())
    lo, hi = pos.grid.x[idx[0]], pos.grid.x[idx[-1]]
    for s in np.atleast_1d(shifts):
        if lo + s < pos.grid.x_min or hi + s > pos.grid.x_max - pos.grid.dx:
            raise GridOverflowError(
                f"shift {s:g} moves the pointer support [{lo:.3g}, {hi:.3g}] off the grid; enlarge the grid")


def gaussian_wave(spec: GaussianSpec, grid: Grid | None = None) -> PointerWave:
    grid = grid or Grid()
    q0, p0, s, c = spec.center, spec.mean_momentum, spec.width, spec.chirp
    if grid.x_min > q0 - 8 * s or grid.x_max < q0 + 8 * s:
        raise GridOverflowError(f"grid [{grid.x_min}, {grid.x_max}] must span q0 +- 8 sigma")
    sigma_p = np.sqrt(1.0 + c * c) / (2.0 * s)
    if abs(p0) + 8 * sigma_p > np.pi / grid.dx:
        raise GridOverflowError("grid spacing too coarse for the Gaussian's momentum spread")
    x = grid.x
    psi = np.exp(-(1.0 + 1j * c) * (x - q0) ** 2 / (4.0 * s * s) + 1j * p0 * x)
    return PointerWave(grid, psi).normalize()


def _fft_to_momentum(samples: np.ndarray, grid: Grid) -> np.ndarray:
    y = grid.y
    spec = np.fft.fftshift(np.fft.fft(samples, axis=-1), axes=-1)
    return spec * np.exp(-1j * y * grid.x_min) * grid.dx / np.sqrt(2.0 * np.pi)


def _fft_to_position(samples: np.ndarray, grid: Grid) -> np.ndarray:
    y = grid.y
    spec = samples * np.exp(1j * y * grid.x_min) * np.sqrt(2.0 * np.pi) / grid.dx
    return np.fft.ifft(np.fft.ifftshift(spec, axes=-1), axis=-1)


def to_momentum(w: PointerWave) -> PointerWave:
    if w.representation == "momentum":
        return w
    return PointerWave(w.grid, _fft_to_momentum(w.samples, w.grid), "momentum")


def to_position(w: PointerWave) -> PointerWave:
    if w.representation == "position":
        return w
    return PointerWave(w.grid, _fft_to_position(w.samples, w.grid), "position")


def translate_samples(samples: np.ndarray, grid: Grid, shifts) -> np.ndarray:
    """Spectrally translate position samples; one output row per shift."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    mom = _fft_to_momentum(samples, grid)
    phases = np.exp(-1j * np.outer(shifts, grid.y))
    return _fft_to_position(mom[None, :] * phases, grid)


def translate(w: PointerWave, xi: float, check: bool = True) -> PointerWave:
    """psi(x) -> psi(x - xi), exact to spectral accuracy for any real xi."""
    pos = to_position(w)
    if check:
        check_shift(pos, xi)
    if xi == 0.0:
        out = pos
    else:
        out = PointerWave(pos.grid, translate_samples(pos.samples, pos.grid, xi)[0])
    if check:
        check_support(out)
    return out


def modulate(w: PointerWave, p0: float) -> PointerWave:
    """psi(x) -> exp(i p0 x) psi(x)."""
    pos = to_position(w)
    return PointerWave(pos.grid, pos.samples * np.exp(1j * p0 * pos.grid.x))


def apply_momentum(w: PointerWave) -> PointerWave:
    """P psi in position representation, evaluated spectrally."""
    pos = to_position(w)
    mom = _fft_to_momentum(pos.samples, pos.grid)
    return PointerWave(pos.grid, _fft_to_position(pos.grid.y * mom, pos.grid))


@dataclass(frozen=True)
class Moments:
    mean_q: float
    mean_p: float
    var_q: float
    var_p: float

    def __iter__(self):
        return iter((self.mean_q, self.mean_p, self.var_q, self.var_p))


def _moments_1d(points: np.ndarray, density: np.ndarray, weight: float) -> tuple[float, float]:
    p = density * weight
    mean = float(np.dot(points, p))
    var = float(np.dot((points - mean) ** 2, p))
    return mean, var


def position_moments(w: PointerWave) -> tuple[float, float]:
    pos = to_position(w)
    return _moments_1d(pos.grid.x, pos.density(), pos.grid.dx)


def moments(w: PointerWave) -> Moments:
    """Position moments by grid quadrature, momentum moments in the momentum representation."""
    _require_normalized(w)
    mq, vq = position_moments(w)
    mom = to_momentum(w)
    mp, vp = _moments_1d(mom.grid.y, mom.density(), mom.grid.dy)
    return Moments(mq, mp, vq, vp)


def covariance_term(w: PointerWave) -> float:
    """<{Q, P}> - 2 <P><Q> with P applied spectrally."""
    _require_normalized(w)
    pos = to_position(w)
    x, dx = pos.grid.x, pos.grid.dx
    p_psi = apply_momentum(pos).samples
    anti = 2.0 * np.real(np.vdot(x * pos.samples, p_psi)) * dx
    mean_q = float(np.dot(x, pos.density()) * dx)
    mean_p = float(np.real(np.vdot(pos.samples, p_psi)) * dx)
    return float(anti - 2.0 * mean_p * mean_q)
