"""Reading the intrinsic phase with a qubit meter, then post-selecting.

With meter state cos(theta/2)|v0> + e^{i phi} sin(theta/2)|v1>, the
probability of finding the meter in (|v0> + |v1>)/sqrt(2) peaks at
phi = arg<A1|A0>. Post-selecting the system on |beta> moves the peak by the
triangle phase of (A1, A0, beta).

Run: python3 demos/readout_and_postselection.py
"""

import numpy as np

from weakgeo import HermitianOperator, StrongCoupling, ket, pauli, state_from_bloch
from weakgeo.rayspace import wrap_angle
from weakgeo.vonneumann import indexed_overlap_phase, postselect_phase, qubit_meter, readout_scan

alpha = ket([0.8, 0.36 + 0.48j])
coupling = StrongCoupling(1.3, HermitianOperator(pauli("y")))
theta = np.pi / 2
meter = qubit_meter(theta, 0.0)

phis, p = readout_scan(alpha, coupling, theta)
peak = phis[np.argmax(p)]
print(f"readout peak at phi = {peak:.5f}; arg<A1|A0> = {indexed_overlap_phase(alpha, meter, coupling):.5f}")

beta = state_from_bloch(0.7, 2.0)
_, post = readout_scan(alpha, coupling, theta, beta=beta)
shift = wrap_angle(phis[np.argmax(post)] - peak)
print(f"post-selected peak moves by {shift:.5f}")
print(f"triangle phase            = {postselect_phase(alpha, meter, coupling, beta, verify=True):.5f}")
print("scan step:", 2 * np.pi / len(phis))
