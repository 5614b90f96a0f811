"""Kaehler or not?  Dual connections as a numerical test.

The dual of a symplectic connection always preserves omega.  On a Kaehler
manifold the dual of Levi-Civita is Levi-Civita again (no torsion); on the
almost-Kaehler control every symplectic connection tested has a twisted dual.

Run:  PYTHONPATH=src python3 demos/kahler_test.py
"""
import numpy as np

from infogeo import structures as ST
from infogeo import zoo
from infogeo.geometry import (covariant_derivative, dual_connection, levi_civita,
                              symplectic_connection_from, torsion, zero_connection)


def describe(name, conn_name, conn, s, x):
    dual = dual_connection(s.metric, conn)
    t = np.max(np.abs(torsion(dual, x)))
    w = np.max(np.abs(covariant_derivative(dual, s.omega, "ll", x)))
    print(f"{name:11s} {conn_name:18s} |T*| = {t:.3e}   |nabla* omega| = {w:.1e}")


for name in ("cp1", "nonkahler4"):
    e = zoo.get(name)
    s = e.structure
    x = e.control_point
    lc = levi_civita(s.metric, s.dim)
    first = lc if s.kahler else symplectic_connection_from(lc, s.omega)
    describe(name, "lc" if s.kahler else "symplectic(lc)", first, s, x)
    describe(name, "symplectic(flat)", symplectic_connection_from(zero_connection(s.dim), s.omega), s, x)
    print(f"{'':11s} goldberg commutator {ST.goldberg_commutator(s, x):.3e}")

# on a contact manifold the dual of an shs connection must carry torsion: d alpha = alpha(T*)
e = zoo.get("contact3")
rep = ST.contact_obstruction_check(e.structure, dual_connection(e.structure.metric, e.connections["shs"]),
                                   e.points(np.random.default_rng(0), 10))
c = rep.checks[0]
print(f"contact3: identity residual {c.residual:.1e}, witness alpha(T*(d1, d2)) = {c.witness}")
