"""Simulation of von Neumann pre-measurement and weak measurement, with
the Fubini-Study / Pancharatnam geometry of the measured system."""

from .exceptions import *  # noqa: F401,F403
from .linalg import (
    BipartiteState,
    DensityMatrix,
    HermitianOperator,
    StateVector,
    basis_state,
    ensemble_expectation,
    expectation,
    hermitian_exp,
    inner_product,
    ket,
    partial_trace,
    pauli,
    variance,
)
from .pointer import GaussianSpec, Grid, PointerWave, covariance_term, gaussian_wave, moments, to_momentum, translate
from .rayspace import (
    BlochPoint,
    LiftedCoordinates,
    TangentDisplacement,
    bloch_from_state,
    connection_eval,
    fs_distance,
    fs_metric_form,
    pancharatnam_phase,
    projective_coords,
    solid_angle,
    sphere_metric_decomposition_check,
    state_from_bloch,
)
from .vonneumann import (
    FiniteMeter,
    StrongCoupling,
    evolve_strong_continuous,
    evolve_strong_finite,
    fs_speed,
    indexed_state,
    phase_shift_rate,
    pointer_mean_shift,
    postselect_phase,
    readout_probability,
)
from .weakmeas import (
    WeakCoupling,
    WeakValue,
    weak_evolve_and_postselect,
    weak_shift_exact,
    weak_shift_first_order,
    weak_triangle_phase,
    weak_value,
)

__version__ = "0.1.0"
