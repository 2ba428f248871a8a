"""Strong pre-measurement with a continuous Gaussian pointer.

The pulse exp(-i lambda O (x) P) entangles system and pointer. The pointer
mean moves by lambda <O>, its variance grows by lambda^2 Var(O), and the
system state indexed by the pointer momentum picks up a phase at rate
-lambda <O>.

Run: python3 demos/strong_premeasurement.py
"""

import numpy as np

from weakgeo import (
    GaussianSpec,
    HermitianOperator,
    StrongCoupling,
    expectation,
    fs_speed,
    gaussian_wave,
    pauli,
    phase_shift_rate,
    pointer_mean_shift,
    state_from_bloch,
    variance,
)
from weakgeo.vonneumann import evolve_strong_continuous, meter_position_density, pointer_variance_after

alpha = state_from_bloch(1.0, 0.3)
op = HermitianOperator(pauli("z"))
coupling = StrongCoupling(0.2, op)
pointer = gaussian_wave(GaussianSpec(width=1.0))

print("<O> =", expectation(op, alpha))
print("pointer shift:", pointer_mean_shift(alpha, pointer, coupling), "expected", 0.2 * expectation(op, alpha))
print("variance after:", pointer_variance_after(alpha, pointer, coupling),
      "expected", 1.0 + 0.04 * variance(op, alpha))

# A narrow pointer and a strong pulse separate the two eigenbranches.
narrow = gaussian_wave(GaussianSpec(width=0.1))
joint = evolve_strong_continuous(alpha, narrow, StrongCoupling(2.0, op))
density = meter_position_density(joint)
x = narrow.grid.x
for label, mask in (("left branch", x < 0), ("right branch", x > 0)):
    print(f"{label}: weight {density[mask].sum():.6f}")
print("cos^2(1/2), sin^2(1/2) =", np.cos(0.5) ** 2, np.sin(0.5) ** 2)

# Phase accumulated along the family A(y) = exp(-i lambda y O)|alpha>.
print("phase rate:", phase_shift_rate(alpha, coupling), "expected", -0.2 * expectation(op, alpha))
print("ray speed:", fs_speed(alpha, coupling))
