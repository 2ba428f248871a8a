"""Geometry of qubit rays: distance, connection and the triangle phase.

Run: python3 demos/ray_space_geometry.py
"""

import numpy as np

from weakgeo import (
    BlochPoint,
    fs_distance,
    pancharatnam_phase,
    solid_angle,
    state_from_bloch,
)

# Three points on the Bloch sphere: the north pole and two equator points.
gamma = 1.2
corners = [BlochPoint(0.0, 0.0), BlochPoint(np.pi / 2, 0.0), BlochPoint(np.pi / 2, gamma)]
states = [state_from_bloch(p.theta, p.phi) for p in corners]

# The Fubini-Study distance is half the angle between Bloch vectors.
print("distance north -> equator:", fs_distance(states[0], states[1]), "(pi/4 =", np.pi / 4, ")")

# Global phases do not matter: the triangle phase is a property of rays.
theta = pancharatnam_phase(*states)
shuffled = pancharatnam_phase(states[0].with_phase(0.4), states[1].with_phase(-2.0), states[2])
print("triangle phase:", theta, " with arbitrary phases:", shuffled)

# It equals minus half the oriented solid angle of the geodesic triangle.
omega = solid_angle(*corners)
print(f"solid angle {omega:.6f}, -omega/2 = {-omega / 2:.6f}")

# Reversing the orientation flips the sign.
print("reversed:", pancharatnam_phase(states[0], states[2], states[1]))
