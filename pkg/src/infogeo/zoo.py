"""Concrete example geometries, each gated by construction-time self-checks.

Entries are addressed by name through :func:`get`; :func:`names` lists them all:

=============  ==========================================================
flat2, flat4   C^d as R^{2d}; Kaehler with potential |z|^2
cp1            affine chart of CP^1, potential log(1 + |z|^2), |z| <= 2
sphere2        round sphere of radius 2 in (polar, azimuth) coordinates
cokahler       R x CP^1 with alpha = dt (Reeb coordinate first)
cokahler_flat  R x C
contact3       R^3, alpha = dx0 + x1 dx2, Omega = dx1 ^ dx2
shs3           R^3, alpha = dx0 + (x1)^2/2 dx2, Omega = dx1 ^ dx2,
               transverse metric depending on x0
nonkahler4     almost-Kaehler R^4 that is not Kaehler (negative control)
=============  ==========================================================

plus the statistical families returned by :func:`make_families`.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import calculus as C
from .errors import ConfigError
from .geometry import (ChartedGeometry, Connection, box_sampler, constant_connection,
                       covariant_derivative, levi_civita, zero_connection)
from .structures import (AlmostContactMetricStructure, AlmostHermitianStructure, StructureFlags,
                         compatibility_check, derive_flags, nijenhuis_tensor)

SELF_CHECK_SEED = 0
NONKAHLER_POINT = (0.3, 0.1, 0.2, 0.4)


@dataclass(frozen=True)
class ZooEntry:
    """A named example with its expected classification.

    ``kind`` is one of ``kahler``, ``riemannian``, ``cokahler``, ``contact``,
    ``shs``, ``nonkahler`` or ``family``.
    """

    name: str
    kind: str
    structure: object
    flags: StructureFlags = field(default_factory=StructureFlags)
    designated: tuple = ()
    connections: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def geometry(self) -> ChartedGeometry | None:
        return getattr(self.structure, "geometry", None)

    @property
    def control_point(self) -> np.ndarray:
        return np.asarray(self.designated[-1], dtype=float)

    def points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Designated points followed by ``count`` random ones."""
        source = self.geometry if self.geometry is not None else self.structure
        return source.points(rng, count)


# ---------------------------------------------------------------------------
# even-dimensional entries
# ---------------------------------------------------------------------------

def _standard_omega(d: int) -> np.ndarray:
    w = np.zeros((2 * d, 2 * d))
    for j in range(d):
        w[2 * j, 2 * j + 1] = 1.0
        w[2 * j + 1, 2 * j] = -1.0
    return w


def _self_check_hermitian(s: AlmostHermitianStructure):
    rng = np.random.default_rng(SELF_CHECK_SEED)
    rep = s.validate(s.geometry.points(rng, 20))
    if not rep.passed:
        bad = ", ".join(f"{c.name}={c.residual:.3g}" for c in rep.failures())
        raise ConfigError(f"{s.name}: construction check failed ({bad})")
    return s


def make_flat_kahler(d: int = 1) -> ZooEntry:
    """C^d with the standard flat Kaehler structure."""
    n = 2 * d
    w = _standard_omega(d)
    theta = -w                              # omega = Theta^T g with g = I
    geo = ChartedGeometry(
        name=f"flat{n}", dim=n,
        metric=lambda x: np.eye(n),
        two_form=lambda x: w,
        endo=lambda x: theta,
        sampler=box_sampler([-1.0] * n, [1.0] * n),
        designated=(tuple([0.0] * n), tuple(0.1 * (k + 1) * (-1) ** k for k in range(n))),
    )
    s = AlmostHermitianStructure(
        geo, almost_kahler=True, kahler=True,
        potential=lambda x: C.total(x * x),
        potential_ext=lambda z, wb: C.total(z * wb),
    )
    return ZooEntry(geo.name, "kahler", _self_check_hermitian(s), designated=geo.designated,
                    connections={"flat": zero_connection(n)})


def _cp1_conformal(x):
    return C.reciprocal(C.square(1.0 + x[0] * x[0] + x[1] * x[1]))


def make_fubini_study() -> ZooEntry:
    """CP^1 affine chart with potential log(1 + |z|^2)."""
    def metric(x):
        h = _cp1_conformal(x)
        return C.array([[h, 0.0 * h], [0.0 * h, h]])

    def omega(x):
        h = _cp1_conformal(x)
        return C.array([[0.0 * h, h], [-h, 0.0 * h]])

    theta = np.array([[0.0, -1.0], [1.0, 0.0]])
    geo = ChartedGeometry(
        name="cp1", dim=2, metric=metric, two_form=omega, endo=lambda x: theta,
        sampler=box_sampler([-1.4, -1.4], [1.4, 1.4]),
        designated=((0.0, 0.0), (0.3, -0.2)),
        notes={"potential": "log(1+|z|^2)"},
    )
    s = AlmostHermitianStructure(
        geo, almost_kahler=True, kahler=True,
        potential=lambda x: C.log(1.0 + x[0] * x[0] + x[1] * x[1]),
        potential_ext=lambda z, wb: C.log(1.0 + C.total(z * wb)),
    )
    return ZooEntry("cp1", "kahler", _self_check_hermitian(s), designated=geo.designated)


def make_round_sphere(radius: float = 2.0) -> ZooEntry:
    """Round sphere in (polar, azimuth) coordinates with its area form."""
    r2 = float(radius) ** 2

    def metric(x):
        s = C.sin(x[0])
        return C.array([[r2 + 0.0 * s, 0.0 * s], [0.0 * s, r2 * s * s]])

    def omega(x):
        s = C.sin(x[0])
        return C.array([[0.0 * s, r2 * s], [-r2 * s, 0.0 * s]])

    def theta(x):
        s = C.sin(x[0])
        return C.array([[0.0 * s, -s], [C.reciprocal(s), 0.0 * s]])

    geo = ChartedGeometry(
        name="sphere2", dim=2, metric=metric, two_form=omega, endo=theta,
        sampler=box_sampler([0.4, -np.pi], [np.pi - 0.4, np.pi]),
        designated=((np.pi / 2, 0.0), (1.0, 0.5)),
        notes={"radius": radius},
    )
    s = AlmostHermitianStructure(geo, almost_kahler=True, kahler=True)
    return ZooEntry("sphere2", "riemannian", _self_check_hermitian(s), designated=geo.designated)


def make_nonkahler_almost_kahler(f: Callable | None = None) -> ZooEntry:
    """R^4 with omega standard and g = diag(e^{2f}, e^{-2f}, 1, 1), f = sin(x2)."""
    f = f if f is not None else (lambda x: C.sin(x[2]))
    w = _standard_omega(2)

    def metric(x):
        e = C.exp(2.0 * f(x))
        z = 0.0 * e
        return C.array([[e, z, z, z], [z, C.reciprocal(e), z, z], [z, z, 1.0 + z, z], [z, z, z, 1.0 + z]])

    def theta(x):
        e = C.exp(2.0 * f(x))
        z = 0.0 * e
        # Theta = -g^{-1} omega so that omega = Theta^T g
        return C.array([[z, -C.reciprocal(e), z, z], [e, z, z, z], [z, z, z, -1.0 + z], [z, z, 1.0 + z, z]])

    geo = ChartedGeometry(
        name="nonkahler4", dim=4, metric=metric, two_form=lambda x: w, endo=theta,
        sampler=box_sampler([-1.0] * 4, [1.0] * 4),
        designated=((0.0, 0.0, 0.0, 0.0), NONKAHLER_POINT),
    )
    s = _self_check_hermitian(AlmostHermitianStructure(geo, almost_kahler=True, kahler=False))
    x0 = np.array(NONKAHLER_POINT)
    nij = float(np.max(np.abs(nijenhuis_tensor(theta, x0))))
    lc_w = float(np.max(np.abs(covariant_derivative(levi_civita(metric, 4), lambda x: w, "ll", x0))))
    if nij <= 1e-3 or lc_w <= 1e-3:
        raise ConfigError(f"nonkahler4 gate failed: |N| = {nij:.3g}, |nabla omega| = {lc_w:.3g}")
    return ZooEntry("nonkahler4", "nonkahler", s, designated=geo.designated,
                    notes=f"gate |N|={nij:.6g} |lc omega|={lc_w:.6g}")


# ---------------------------------------------------------------------------
# odd-dimensional entries (Reeb coordinate first)
# ---------------------------------------------------------------------------

def _contact_entry(geo: ChartedGeometry, kind: str, expected: StructureFlags,
                   connections: dict, darboux: bool = True) -> ZooEntry:
    rng = np.random.default_rng(SELF_CHECK_SEED)
    flags = derive_flags(geo, rng)
    if flags != expected:
        raise ConfigError(f"{geo.name}: derived flags {flags} differ from expected {expected}")
    s = AlmostContactMetricStructure(geo, darboux=darboux, flags=flags)
    rep = compatibility_check(s, geo.points(rng, 20))
    if not rep.passed:
        bad = ", ".join(f"{c.name}={c.residual:.3g}" for c in rep.failures())
        raise ConfigError(f"{geo.name}: compatibility failed ({bad})")
    return ZooEntry(geo.name, kind, s, flags, geo.designated, connections)


def make_cokahler_product(base: ZooEntry, name: str | None = None) -> ZooEntry:
    """base x R with alpha = dt, E = d_t, g + dt^2 and the extended Omega, Theta."""
    if base.kind != "kahler":
        raise ConfigError(f"{base.name} is not flagged Kaehler")
    b = base.structure
    n = b.dim + 1

    inject = np.eye(n)[:, 1:]
    corner00 = np.outer(np.eye(n)[0], np.eye(n)[0])

    def embed(block, corner=0.0):
        def fn(x):
            return C.einsum("ia,ab,jb->ij", inject, block(x[1:]), inject) + corner * corner00
        return fn

    e0 = np.eye(n)[0]
    base_des = b.geometry.designated
    geo = ChartedGeometry(
        name=name or f"cokahler_{base.name}", dim=n,
        metric=embed(b.metric, 1.0),
        two_form=embed(b.omega),
        one_form=lambda x: e0,
        endo=embed(b.theta),
        reeb=lambda x: e0,
        sampler=_product_sampler(b.geometry.sampler),
        designated=tuple((0.0,) + tuple(p) for p in base_des[:1]) + tuple((0.25,) + tuple(p) for p in base_des[1:]),
    )
    expected = StructureFlags(is_contact=False, is_cosymplectic=True, is_shs=True)
    return _contact_entry(geo, "cokahler", expected, {"lc": levi_civita(geo.metric, n)})


def _product_sampler(base_sampler):
    def sample(rng, count):
        t = rng.uniform(-1.0, 1.0, size=(count, 1))
        return np.hstack([t, base_sampler(rng, count)])
    return sample


def make_standard_contact() -> ZooEntry:
    """alpha = dx0 + x1 dx2 with Omega = d alpha and Theta rotating ker alpha."""
    omega = np.zeros((3, 3))
    omega[1, 2], omega[2, 1] = 1.0, -1.0

    def alpha(x):
        return C.array([1.0 + 0.0 * x[1], 0.0 * x[1], x[1]])

    def theta(x):
        z = 0.0 * x[1]
        return C.array([[z, -x[1], z], [z, z, -1.0 + z], [z, 1.0 + z, z]])

    def metric(x):
        a = alpha(x)
        return C.einsum("ik,kj->ij", omega, theta(x)) + C.einsum("i,j->ij", a, a)

    geo = ChartedGeometry(
        name="contact3", dim=3, metric=metric, two_form=lambda x: omega, one_form=alpha,
        endo=theta, reeb=lambda x: np.eye(3)[0],
        sampler=box_sampler([-1.0] * 3, [1.0] * 3),
        designated=((0.0, 0.0, 0.0), (0.2, -0.3, 0.5)),
    )
    expected = StructureFlags(is_contact=True, is_cosymplectic=False, is_shs=True)
    return _contact_entry(geo, "contact", expected, {"shs": zero_connection(3)})


def admissible_perturbation(rng: np.random.Generator, scale: float = 0.3) -> np.ndarray:
    """Constant B with Omega(B(X,Y),Z) totally symmetric and E-transverse (Omega = dx1 ^ dx2)."""
    S = np.zeros((3, 3, 3))
    vals = rng.normal(scale=scale, size=4)        # S_111, S_112, S_122, S_222
    for (i, j, k), v in zip([(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)], vals):
        for p in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            S[p] = v
    B = np.zeros((3, 3, 3))
    B[1] = S[:, :, 2]
    B[2] = -S[:, :, 1]
    return B


def make_shs_nonproduct() -> ZooEntry:
    """Strict shs chart: d alpha = x1 dx1 ^ dx2, neither contact nor cosymplectic."""
    omega = np.zeros((3, 3))
    omega[1, 2], omega[2, 1] = 1.0, -1.0

    def alpha(x):
        return C.array([1.0 + 0.0 * x[1], 0.0 * x[1], 0.5 * x[1] * x[1]])

    def theta(x):
        lam = C.exp(0.5 * C.sin(x[0]))
        a2 = 0.5 * x[1] * x[1]
        z = 0.0 * lam
        return C.array([[z, -lam * a2, z], [z, z, -C.reciprocal(lam)], [z, lam, z]])

    def metric(x):
        a = alpha(x)
        return C.einsum("ik,kj->ij", omega, theta(x)) + C.einsum("i,j->ij", a, a)

    geo = ChartedGeometry(
        name="shs3", dim=3, metric=metric, two_form=lambda x: omega, one_form=alpha,
        endo=theta, reeb=lambda x: np.eye(3)[0],
        sampler=box_sampler([-1.0] * 3, [1.0] * 3),
        designated=((0.0, 0.0, 0.0), (0.4, 0.3, -0.2)),
    )
    B = admissible_perturbation(np.random.default_rng(7))
    expected = StructureFlags(is_contact=False, is_cosymplectic=False, is_shs=True)
    return _contact_entry(geo, "shs", expected, {
        "shs": zero_connection(3),
        "shs_perturbed": constant_connection(B, "shs+B"),
    })


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_BUILDERS = {
    "flat2": lambda: make_flat_kahler(1),
    "flat4": lambda: make_flat_kahler(2),
    "cp1": make_fubini_study,
    "sphere2": make_round_sphere,
    "nonkahler4": make_nonkahler_almost_kahler,
    "cokahler": lambda: make_cokahler_product(get("cp1"), "cokahler"),
    "cokahler_flat": lambda: make_cokahler_product(get("flat2"), "cokahler_flat"),
    "contact3": make_standard_contact,
    "shs3": make_shs_nonproduct,
}

GEOMETRY_NAMES = tuple(_BUILDERS)


@functools.lru_cache(maxsize=1)
def _families() -> dict:
    from .infogeo import standard_families
    return standard_families()


def make_families() -> dict:
    """Bernoulli, Gaussian, simplex2, simplex3 and two exponential families as entries."""
    return {name: get(name) for name in _families()}


@functools.lru_cache(maxsize=None)
def get(name: str) -> ZooEntry:
    if name in _BUILDERS:
        return _BUILDERS[name]()
    fams = _families()
    if name in fams:
        return ZooEntry(name, "family", fams[name], designated=tuple(fams[name].designated))
    raise KeyError(f"unknown zoo entry {name!r}")


def names() -> tuple:
    return GEOMETRY_NAMES + tuple(_families())


def by_kind(*kinds: str) -> list:
    return [get(n) for n in GEOMETRY_NAMES if get(n).kind in kinds]


def fubini_study_distance(x, y) -> float:
    """Riemannian distance of the cp1 metric (1 + |z|^2)^-2 |dz|^2 (a sphere of radius 1/2)."""
    z, w = complex(x[0], x[1]), complex(y[0], y[1])
    # cos d and sin d share the denominator sqrt((1 + |z|^2)(1 + |w|^2))
    return float(np.arctan2(abs(z - w), abs(1.0 + z * w.conjugate())))
