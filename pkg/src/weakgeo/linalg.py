"""Dense complex linear algebra for small quantum systems.

States, Hermitian observables, density matrices and bipartite
system-meter states.  All values are immutable; every function is pure.

Convention: ``inner_product(a, b)`` is <a|b>, antilinear in the first slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .exceptions import DimensionError, NotNormalizedError

CONSTRUCT_TOL = 1e-12
DERIVED_TOL = 1e-10

MeterKind = Literal["finite-basis", "position-grid"]


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class StateVector:
    """Ket of a finite-dimensional system, stored as complex amplitudes.

    The constructor does not normalize; use :meth:`normalize` or
    :func:`ket` for that.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise DimensionError(f"amplitudes must be a non-empty 1-D array, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise NotNormalizedError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n)

    def is_normalized(self, tol: float = CONSTRUCT_TOL) -> bool:
        return abs(np.vdot(self.amplitudes, self.amplitudes).real - 1.0) <= tol

    def with_phase(self, angle: float) -> "StateVector":
        """Same ray, amplitudes multiplied by exp(i*angle)."""
        return StateVector(self.amplitudes * np.exp(1j * angle))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


def ket(amplitudes) -> StateVector:
    """Normalized :class:`StateVector` from any amplitude sequence."""
    return StateVector(amplitudes).normalize()


def basis_state(dim: int, index: int) -> StateVector:
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def as_amplitudes(psi) -> np.ndarray:
    if isinstance(psi, StateVector):
        return psi.amplitudes
    return np.asarray(psi, dtype=complex)


def _require_normalized(psi: StateVector, what: str = "state", tol: float = DERIVED_TOL):
    if not psi.is_normalized(tol):
        raise NotNormalizedError(f"{what} is not normalized (norm = {psi.norm():.3e})")


def _orthonormalize_degenerate(values: np.ndarray, vectors: np.ndarray, tol: float = 1e-10):
    vectors = vectors.copy()
    start = 0
    n = values.size
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[start] <= tol:
            stop += 1
        if stop - start > 1:
            q, _ = np.linalg.qr(vectors[:, start:stop])
            vectors[:, start:stop] = q
        start = stop
    return vectors


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian observable together with its spectral decomposition.

    ``eigenvectors[:, j]`` is the eigenket for ``eigenvalues[j]``; eigenvalues
    are sorted ascending.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"observable must be square, got shape {m.shape}")
        dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if dev > CONSTRUCT_TOL * max(1.0, np.max(np.abs(m))):
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        m = 0.5 * (m + m.conj().T)
        values, vectors = np.linalg.eigh(m)
        vectors = _orthonormalize_degenerate(values, vectors)
        object.__setattr__(self, "matrix", _frozen(m))
        v = np.asarray(values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "eigenvalues", v)
        object.__setattr__(self, "eigenvectors", _frozen(vectors))

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors) -> "HermitianOperator":
        """Build V diag(o) V^dagger from eigenvalues and a unitary V."""
        vecs = np.asarray(eigenvectors, dtype=complex)
        vals = np.asarray(eigenvalues, dtype=float)
        return cls((vecs * vals) @ vecs.conj().T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenstate(self, j: int) -> StateVector:
        return StateVector(self.eigenvectors[:, j])

    def spectral_reconstruction(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name: str) -> HermitianOperator:
    """Pauli observable by name: ``"x"``, ``"y"``, ``"z"`` or ``"i"``.

    ``"sigma1"``/``"sigma2"``/``"sigma3"`` are accepted as aliases.
    """
    key = name.lower()
    key = {"sigma1": "x", "sigma2": "y", "sigma3": "z", "identity": "i"}.get(key, key)
    if key not in PAULI:
        raise KeyError(f"unknown Pauli operator {name!r}")
    return HermitianOperator(PAULI[key])


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    matrix: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        if self.validate:
            dev = np.max(np.abs(m - m.conj().T))
            if dev > CONSTRUCT_TOL:
                raise ValueError(f"density matrix not Hermitian (deviation {dev:.3e})")
            tr = np.trace(m)
            if abs(tr - 1.0) > DERIVED_TOL:
                raise ValueError(f"density matrix trace is {tr}")
            lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
            if lo < -DERIVED_TOL:
                raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.conj().T)))

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        a = as_amplitudes(psi)
        return cls(np.outer(a, a.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class BipartiteState:
    """Joint system (x) meter amplitudes, ``components[j, k]``.

    ``j`` runs over the system basis given by the columns of
    ``system_basis`` (identity when ``None``); ``k`` runs over the meter
    basis or the position grid.  For a grid meter, ``weight`` is the grid
    spacing and the squared norm is ``weight * sum |c|^2``.
    """

    components: np.ndarray
    meter_kind: MeterKind = "finite-basis"
    weight: float = 1.0
    system_basis: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.components, dtype=complex)
        if c.ndim != 2:
            raise DimensionError(f"components must be 2-D, got shape {c.shape}")
        if self.meter_kind not in ("finite-basis", "position-grid"):
            raise ValueError(f"unknown meter kind {self.meter_kind!r}")
        object.__setattr__(self, "components", _frozen(c))
        if self.system_basis is not None:
            b = np.asarray(self.system_basis, dtype=complex)
            if b.shape != (c.shape[0], c.shape[0]):
                raise DimensionError("system_basis must be N x N")
            object.__setattr__(self, "system_basis", _frozen(b))
        n2 = self.norm_squared()
        if abs(n2 - 1.0) > DERIVED_TOL:
            raise NotNormalizedError(f"bipartite state has squared norm {n2:.15g}")

    @property
    def system_dim(self) -> int:
        return self.components.shape[0]

    @property
    def meter_dim(self) -> int:
        return self.components.shape[1]

    def norm_squared(self) -> float:
        return float(self.weight * np.sum(np.abs(self.components) ** 2))

    def in_computational_basis(self) -> np.ndarray:
        """Components with the system index in the computational basis."""
        if self.system_basis is None:
            return np.array(self.components)
        return self.system_basis @ self.components


def product_state(psi: StateVector, meter, meter_kind: MeterKind = "finite-basis",
                  weight: float = 1.0) -> BipartiteState:
    return BipartiteState(np.outer(as_amplitudes(psi), as_amplitudes(meter)), meter_kind, weight)


def inner_product(a, b) -> complex:
    """<a|b>, conjugating the first argument."""
    x, y = as_amplitudes(a), as_amplitudes(b)
    if x.shape != y.shape:
        raise DimensionError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return complex(np.vdot(x, y))


def _check_dims(op: HermitianOperator, psi):
    if op.dim != as_amplitudes(psi).size:
        raise DimensionError(f"operator dim {op.dim} does not match state dim {as_amplitudes(psi).size}")


def expectation(op: HermitianOperator, psi: StateVector) -> float:
    """<psi|O|psi> for a normalized state."""
    _check_dims(op, psi)
    a = as_amplitudes(psi)
    val = np.vdot(a, op.matrix @ a)
    scale = max(1.0, float(np.max(np.abs(op.eigenvalues), initial=0.0)))
    assert abs(val.imag) < CONSTRUCT_TOL * scale, f"expectation has imaginary part {val.imag:.3e}"
    return float(val.real)


def variance(op: HermitianOperator, psi: StateVector) -> float:
    """<O^2> - <O>^2, clamped at zero."""
    _check_dims(op, psi)
    a = as_amplitudes(psi)
    oa = op.matrix @ a
    second = np.vdot(oa, oa).real
    first = np.vdot(a, oa).real
    var = second - first * first
    if var < -CONSTRUCT_TOL * max(1.0, second):
        raise ArithmeticError(f"negative variance {var:.3e}")
    return max(float(var), 0.0)


def hermitian_exp(op: HermitianOperator, s: float) -> np.ndarray:
    """exp(-i s O) from the eigendecomposition of O."""
    v = op.eigenvectors
    return (v * np.exp(-1j * s * op.eigenvalues)) @ v.conj().T


def partial_trace(state: BipartiteState, keep: Literal["system", "meter"]) -> DensityMatrix:
    """Reduced density matrix of the kept factor.

    The system factor is returned in the computational basis.  For a grid
    meter the kept-meter matrix has entries ``dx * rho(x_k, x_l)``, i.e. it is
    the discretized kernel, with unit trace.
    """
    c = state.in_computational_basis()
    w = state.weight
    if keep == "system":
        rho = w * (c @ c.conj().T)
    elif keep == "meter":
        rho = w * (c.T @ c.conj())
    else:
        raise ValueError(f"keep must be 'system' or 'meter', not {keep!r}")
    return DensityMatrix(rho)


def reduced_diagonal(state: BipartiteState, keep: Literal["system", "meter"]) -> np.ndarray:
    """Diagonal of :func:`partial_trace` without building the full matrix.

    For a grid meter and ``keep="meter"`` this is the position probability
    per grid cell; the system diagonal refers to ``state.system_basis``.
    """
    p = np.abs(state.components) ** 2 * state.weight
    if keep == "system":
        return p.sum(axis=1)
    if keep == "meter":
        return p.sum(axis=0)
    raise ValueError(f"keep must be 'system' or 'meter', not {keep!r}")


def ensemble_expectation(rho: DensityMatrix, op: HermitianOperator) -> float:
    """tr(rho O)."""
    if rho.dim != op.dim:
        raise DimensionError(f"density dim {rho.dim} does not match operator dim {op.dim}")
    val = np.trace(rho.matrix @ op.matrix)
    assert abs(val.imag) < DERIVED_TOL * max(1.0, np.max(np.abs(op.eigenvalues))), val
    return float(val.real)


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    return ket(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with the phase correction of Mezzadri."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_observable(dim: int, rng: np.random.Generator, low: float = -1.0,
                      high: float = 1.0) -> HermitianOperator:
    """Random Hermitian operator with spectrum drawn uniformly from [low, high]."""
    return HermitianOperator.from_spectrum(rng.uniform(low, high, size=dim), random_unitary(dim, rng))
