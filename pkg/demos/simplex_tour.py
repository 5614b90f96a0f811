"""A walk through the Fisher geometry of the 2-simplex.

Run:  PYTHONPATH=src python3 demos/simplex_tour.py
"""
import numpy as np

from infogeo import infogeo as IG
from infogeo.geometry import Connection, geodesic_shoot, levi_civita, sectional_curvature

fam = IG.categorical_family(2)
theta = np.array([0.2, 0.5])

print("Fisher metric at p = (0.2, 0.5, 0.3):")
print(np.asarray(IG.fisher_metric(fam, theta)))
print("three Fisher forms agree to", IG.fisher_agreement(fam, theta))

# the simplex is a piece of the radius-2 sphere, so its curvature is 1/4 everywhere
lc = levi_civita(IG.simplex_metric, 2)
print("sectional curvature:", sectional_curvature(lc, IG.simplex_metric, theta, [1, 0], [0, 1]))

p, q = np.array([0.2, 0.5, 0.3]), np.array([0.6, 0.1, 0.3])
print(f"hellinger {IG.hellinger(p, q):.6f} <= fisher-rao {IG.fisher_rao_distance(p, q):.6f}")
print(f"kl(p||q) {IG.kl_divergence(p, q):.6f}, kl(q||p) {IG.kl_divergence(q, p):.6f}")

# shoot the geodesic with the closed-form Christoffels and compare its length
conn = Connection(IG.simplex_christoffel, 2, "simplex-lc")
_, length = geodesic_shoot(conn, IG.simplex_metric, p[:2], q[:2], steps=100)
print(f"integrated geodesic length {length:.10f}")

# the alpha family interpolates between mixture (a = -1) and exponential (a = 1) connections
for a in (-1.0, 0.0, 1.0):
    gam = IG.alpha_connection(fam, a).at(theta)
    print(f"alpha = {a:+.0f}: max |Gamma| = {np.max(np.abs(gam)):.4f}")
