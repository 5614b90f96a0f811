"""Qubit geometry: SLD, BKM and the Fubini-Study limit on the Bloch sphere.

Run:  PYTHONPATH=src python3 demos/bloch_ball.py
"""
import numpy as np

from infogeo import quantum as Q

r = np.array([0.3, -0.2, 0.5])
print("SLD metric at r =", r)
print(np.asarray(Q.bloch_sld_metric(r)))
print("closed form agrees to", np.max(np.abs(np.asarray(Q.bloch_sld_metric(r)) - Q.bloch_sld_closed_form(r))))

rho = Q.bloch_state(r)
T = list(Q.BLOCH_TANGENTS)
print("BKM metric (direct):")
print(Q.bkm_metric(rho, T))
print("BKM from second mixed derivatives of the relative entropy agrees to",
      np.max(np.abs(Q.bkm_metric_eguchi(rho, T) - Q.bkm_metric(rho, T))))

# the exponential connection is the SLD dual of the flat mixture connection and carries torsion
print("torsion T(d_x, d_y) of the exponential connection:")
print(np.round(Q.bloch_torsion_matrix(r, 0, 1), 6))

# near the pure states the tangential SLD metric is a constant multiple of Fubini-Study
for radius in (0.98, 0.99, 0.995):
    fit = Q.fubini_study_compare(radius, np.random.default_rng(0))
    print(f"radius {radius}: c = {fit.constant:.12f}, spread {fit.spread:.1e}")
