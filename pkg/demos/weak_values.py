"""Weak values and the pointer shift they produce.

The exact simulation applies exp(-i eps O (x) P), projects onto |beta> and
renormalizes the pointer. For small eps the mean moves by
eps * (Re O_w + Im O_w * C), where C is the position-momentum covariance of
the pointer (zero for an unchirped Gaussian, -c for chirp c).

Run: python3 demos/weak_values.py
"""

import numpy as np

from weakgeo import GaussianSpec, HermitianOperator, covariance_term, gaussian_wave, pauli, state_from_bloch
from weakgeo.weakmeas import exact_shift_slope, weak_shift_exact, weak_shift_first_order, weak_value

# Nearly orthogonal pre- and post-selection give an anomalously large weak value.
alpha = state_from_bloch(0.5, 0.0)
beta = state_from_bloch(0.5 + np.pi - 0.3, 0.4)
op = HermitianOperator(pauli("x"))
wv = weak_value(alpha, beta, op)
print(f"O_w = {wv.value:.4f}  (eigenvalues of sigma_x are +-1)")

for chirp in (0.0, 1.0):
    pointer = gaussian_wave(GaussianSpec(chirp=chirp))
    cov = covariance_term(pointer)
    print(f"\nchirp {chirp}: covariance C = {cov:+.6f}")
    for eps in (1e-3, 2e-3, 4e-3):
        exact = weak_shift_exact(alpha, pointer, beta, op, eps)
        approx = weak_shift_first_order(wv, pointer, eps)
        print(f"  eps={eps:.0e}  exact {exact:+.8f}  first order {approx:+.8f}")
    print(f"  slope {exact_shift_slope(alpha, pointer, beta, op):+.8f}"
          f"  vs Re O_w + Im O_w C = {wv.real + wv.imag * cov:+.8f}")

# On a qubit, with alpha = |0> and O = sigma_x, O_w = conj of the stereographic coordinate.
theta, phi = 1.1, 0.6
print("\nqubit:", weak_value(state_from_bloch(0, 0), state_from_bloch(theta, phi), op).value,
      "tan(theta/2) e^{-i phi} =", np.tan(theta / 2) * np.exp(-1j * phi))
