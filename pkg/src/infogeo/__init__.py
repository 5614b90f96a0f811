"""Numerical information geometry on single coordinate charts.

Submodules:

* :mod:`infogeo.calculus` - jets (derivatives to order 3), RK4, quadrature
* :mod:`infogeo.geometry` - connections, curvature, transport
* :mod:`infogeo.structures` - almost-Hermitian and almost-contact checks
* :mod:`infogeo.infogeo` - parametric families, divergences, simplex
* :mod:`infogeo.quantum` - density matrices, SLD and BKM metrics
* :mod:`infogeo.zoo` - example geometries
* :mod:`infogeo.cli` - the ``infogeo`` command
"""

__version__ = "0.1.0"
