"""Triangle phase for weak coupling.

The phase of the geodesic triangle A(y), A(y + dy), beta vanishes with dy.
At y = 0 its rate in dy is -eps (Re O_w - <O>), for any eps.

Run: python3 demos/weak_triangle.py
"""

from weakgeo import HermitianOperator, pauli, state_from_bloch
from weakgeo.weakmeas import weak_triangle_phase, weak_triangle_rate, weak_triangle_rate_first_order

alpha = state_from_bloch(0.9, 0.2)
beta = state_from_bloch(2.0, -1.0)
op = HermitianOperator(pauli("x"))

for eps in (1e-1, 1e-2, 1e-3):
    rate = weak_triangle_rate(alpha, beta, op, eps)
    first = weak_triangle_rate_first_order(alpha, beta, op, eps)
    print(f"eps={eps:.0e}  rate {rate:+.10e}  first order {first:+.10e}")

print("single triangle at dy = 0.01:", weak_triangle_phase(alpha, beta, op, 1e-3, 0.0, 0.01))
