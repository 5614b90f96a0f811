"""Named check suites over the zoo, as run by ``infogeo check``.

Every suite is a function ``(ctx) -> list[Check]``.  Random draws come from
generators keyed by (seed, suite, geometry), so filtering by geometry does
not change the numbers reported for the geometries that remain.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import calculus as C
from . import infogeo as IG
from . import quantum as Q
from . import zoo
from .errors import ConfigError, PreconditionError
from .geometry import (Connection, Curve, alpha_family, covariant_derivative, curvature, dual_connection,
                       duality_residual, gauge_transform, geodesic_shoot, levi_civita, parallel_transport,
                       sectional_curvature, smat_consistency, symplectic_connection_from,
                       symplectic_curvature, torsion, zero_connection)
from .report import ASSERT, CONTROL, REPORT, Check, check
from .structures import (compatibility_check, contact_obstruction_check, cokahler_statistical_family,
                         curvature_identity_check, diastasis, diastasis_hessian,
                         dual_torsion_formula_check, epsilon_connection, goldberg_commutator,
                         hamiltonian_form_from_section, holomorphic_christoffel_check, kahler_defect,
                         leaf_parallelism_check, nijenhuis_tensor, orthonormal_frame,
                         parallel_section_defect, reeb_derivative, shs_connection_check,
                         shs_difference_symmetry, statistical_symplectic_check, wirtinger_frames)

CURVATURE_POINTS = 10      # cap for checks that need second derivatives of connections
FAMILY_GRID = (0.0, 0.5, -0.5, 1.0, -1.0)
TRANSPORT_STEPS = 1000
GEODESIC_STEPS = 100


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass
class SuiteContext:
    seed: int = 0
    points: int = 100
    geometry: str | None = None
    families: dict = field(default_factory=dict)       # extra families from a config file

    def rng(self, *tags) -> np.random.Generator:
        key = zlib.crc32("/".join(map(str, tags)).encode())
        return np.random.default_rng([self.seed, key])

    def wants(self, name: str) -> bool:
        return self.geometry is None or self.geometry == name

    def select(self, names) -> list:
        return [n for n in names if self.wants(n)]

    def all_families(self) -> dict:
        fams = {n: zoo.get(n).structure for n in zoo.names() if n not in zoo.GEOMETRY_NAMES}
        fams.update({n: f.family if isinstance(f, IG.ExponentialFamily) else f
                     for n, f in self.families.items()})
        return fams

    def exponential_families(self) -> dict:
        out = {}
        for n in zoo.names():
            fam = zoo.get(n).structure if n not in zoo.GEOMETRY_NAMES else None
            if fam is not None and "potential" in fam.notes:
                out[n] = (fam, fam.notes["potential"])
        for n, f in self.families.items():
            if isinstance(f, IG.ExponentialFamily):
                out[n] = (f.family, f.potential)
        return out


def _points(ctx: SuiteContext, entry, suite: str, cap: int | None = None) -> np.ndarray:
    count = ctx.points if cap is None else min(ctx.points, cap)
    return entry.points(ctx.rng(suite, entry.name), count)


def _unit_rows(rng, count, dim):
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# connections carried by the zoo entries
# ---------------------------------------------------------------------------

HERMITIAN = ("flat2", "flat4", "cp1", "sphere2", "nonkahler4")
CONTACT = ("cokahler", "cokahler_flat", "contact3", "shs3")
KAHLER_POTENTIAL = ("flat2", "flat4", "cp1")


def symplectic_connections(entry) -> dict:
    """Symplectic connections on an almost-Hermitian entry.

    On Kaehler entries Levi-Civita is one of them; everywhere the construction
    from the flat chart connection gives another, and on the non-Kaehler
    control the construction from Levi-Civita gives a third.
    """
    s = entry.structure
    lc = levi_civita(s.metric, s.dim)
    out = {}
    if s.kahler:
        out["lc"] = lc
    else:
        out["symplectic(lc)"] = symplectic_connection_from(lc, s.omega)
    out["symplectic(flat)"] = symplectic_connection_from(zero_connection(s.dim), s.omega)
    return out


def dual_pairs(entry) -> list:
    """(label, metric, connection, dual) for every dual pair carried by an entry."""
    s = entry.structure
    if entry.kind == "family":
        g = IG.fisher_field(s)
        return [(f"alpha[{a:g}]", g, *IG.alpha_connection_pair(s, a)) for a in (0.5, 1.0)]
    g = s.metric
    pairs = []
    if entry.name in HERMITIAN:
        for label, conn in symplectic_connections(entry).items():
            pairs.append((label, g, conn, dual_connection(g, conn)))
    else:
        for label, conn in entry.connections.items():
            pairs.append((label, g, conn, dual_connection(g, conn)))
    if entry.kind == "cokahler":
        pairs.append(("eps[0.5]", g, epsilon_connection(s, 0.5), epsilon_connection(s, -0.5)))
    return pairs


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

def suite_duality(ctx: SuiteContext) -> list:
    out = []
    for name in ctx.select(zoo.GEOMETRY_NAMES + tuple(ctx.all_families())):
        entry = zoo.get(name) if name in zoo.names() else _config_entry(ctx, name)
        pts = _points(ctx, entry, "duality")
        rng = ctx.rng("duality-vectors", name)
        dim = pts.shape[1]
        for label, g, conn, dual in dual_pairs(entry):
            X, Y, Z = (_unit_rows(rng, len(pts), dim) for _ in range(3))
            worst = max(_maxabs(duality_residual(g, conn, dual, x, X[i], Y[i], Z[i]))
                        for i, x in enumerate(pts))
            out.append(check(f"duality[{label}]", name, worst, 1e-9, len(pts)))
            # midpoint of a statistical pair is Levi-Civita
            few = pts[:CURVATURE_POINTS]
            tor = max(max(_maxabs(torsion(conn, x)), _maxabs(torsion(dual, x))) for x in few)
            if tor < 1e-9:
                lc = levi_civita(g, dim)
                mid = alpha_family(conn, dual, 0.0)
                gap = max(_maxabs(mid.at(x) - lc.at(x)) for x in few)
                out.append(check(f"midpoint_is_lc[{label}]", name, gap, 1e-9, len(few)))
    return out


def _config_entry(ctx, name):
    fam = ctx.all_families()[name]
    return zoo.ZooEntry(name, "family", fam, designated=tuple(fam.designated))


# ---------------------------------------------------------------------------
# statistical manifolds admitting torsion
# ---------------------------------------------------------------------------

def suite_smat(ctx: SuiteContext) -> list:
    out = []
    for name in ctx.select(CONTACT):
        entry = zoo.get(name)
        pts = _points(ctx, entry, "smat")
        rng = ctx.rng("smat-vectors", name)
        for label, g, conn, dual in dual_pairs(entry):
            if label.startswith("eps"):
                continue
            worst = np.zeros(3)
            for x in pts:
                X, Y, Z = _unit_rows(rng, 3, entry.structure.dim)
                worst = np.maximum(worst, smat_consistency(g, conn, dual, x, X, Y, Z))
            for key, val in zip(("torsion_free", "codazzi", "dual_codazzi"), worst):
                out.append(check(f"smat_{key}[{label}]", name, val, 1e-9, len(pts)))
    return out


# ---------------------------------------------------------------------------
# Kaehler characterisation
# ---------------------------------------------------------------------------

def _as(kind: str, c: Check, tolerance=None) -> Check:
    return replace(c, kind=kind, tolerance=tolerance)


def _suffix(c: Check, tag: str) -> Check:
    return replace(c, name=f"{c.name}[{tag}]")


def suite_kahler(ctx: SuiteContext) -> list:
    out = []
    for name in ctx.select(HERMITIAN):
        entry = zoo.get(name)
        s = entry.structure
        pts = _points(ctx, entry, "kahler")
        few = pts[:CURVATURE_POINTS]
        control = entry.control_point
        out += kahler_defect(s, pts).checks

        for label, conn in symplectic_connections(entry).items():
            rep = statistical_symplectic_check(s, conn, pts, designated=control)
            for c in rep.checks:
                c = _suffix(c, label)
                # only the Levi-Civita dual is torsion-free on a Kaehler entry
                if c.name.startswith("dual_torsion") and s.kahler and label != "lc":
                    c = _as(REPORT, c)
                out.append(c)
            dual = dual_connection(s.metric, conn)
            gauge = gauge_transform(conn, s.theta)
            out.append(check(f"gauge_equals_dual[{label}]", name,
                             max(_maxabs(gauge.at(x) - dual.at(x)) for x in pts), 1e-9, len(pts)))
            rng = ctx.rng("kahler-section", name, label)
            defect = 0.0
            for x in pts:
                X, Y = _unit_rows(rng, 2, s.dim)
                defect = max(defect, _maxabs(parallel_section_defect(conn, dual, s.theta, x, X, Y)))
            out.append(check(f"parallel_section[{label}]", name, defect, 1e-9, len(pts)))
            curv = [curvature_identity_check(s.metric, conn, dual, x, s.theta,
                                             ctx.rng("kahler-curvature", name, label, i), geometry=name)
                    for i, x in enumerate(few)]
            for k, c in enumerate(curv[0].checks):
                worst = max(r.checks[k].residual for r in curv)
                c = replace(c, residual=worst, samples=c.samples * len(curv))
                # asserted only if it was asserted at every point
                if any(r.checks[k].kind == REPORT for r in curv):
                    c = _as(REPORT, c)
                out.append(_suffix(c, label))
            sym = 0.0
            for x in few:
                S = symplectic_curvature(conn, s.omega, x)
                sym = max(sym, _maxabs(S - np.transpose(S, (1, 0, 2, 3))),
                          _maxabs(S + np.transpose(S, (0, 1, 3, 2))))
            out.append(check(f"symplectic_curvature_symmetry[{label}]", name, sym, 1e-9, len(few)))

        gold = max(goldberg_commutator(s, x) for x in few)
        out.append(check("goldberg_commutator", name, gold, 1e-8 if s.kahler else None, len(few),
                         ASSERT if s.kahler else REPORT))
        _, ham = hamiltonian_form_from_section(s.metric, s.theta, few, name)
        out.append(ham)
        if name in KAHLER_POTENTIAL:
            for a in FAMILY_GRID:
                for x in few[:3]:
                    rep = holomorphic_christoffel_check(s, a, x)
                    out += [replace(c, samples=1) for c in rep.checks]
    return _merge_same_name(out)


def _merge_same_name(checks: list) -> list:
    """Collapse repeated (name, geometry) checks into their worst residual, keeping first order."""
    merged, order = {}, []
    for c in checks:
        key = (c.name, c.geometry)
        if key not in merged:
            merged[key] = c
            order.append(key)
            continue
        prev = merged[key]
        worse = c.residual < prev.residual if c.kind == CONTROL else c.residual > prev.residual
        best = c if worse or not np.isfinite(c.residual) else prev
        merged[key] = replace(best, samples=prev.samples + c.samples)
    return [merged[k] for k in order]


# ---------------------------------------------------------------------------
# co-Kaehler
# ---------------------------------------------------------------------------

def suite_cokahler(ctx: SuiteContext) -> list:
    out = []
    for name in ctx.select(("cokahler", "cokahler_flat")):
        entry = zoo.get(name)
        s = entry.structure
        pts = _points(ctx, entry, "cokahler")
        few = pts[:CURVATURE_POINTS]
        lc = entry.connections["lc"]
        out.append(check("lc_reeb", name, max(_maxabs(covariant_derivative(lc, s.reeb, "u", x))
                                               for x in pts), 1e-10, len(pts)))
        out.append(check("lc_omega", name, max(_maxabs(covariant_derivative(lc, s.omega, "ll", x))
                                                for x in pts), 1e-10, len(pts)))
        out.append(check("lc_alpha", name, max(_maxabs(covariant_derivative(lc, s.alpha, "l", x))
                                                for x in pts), 1e-10, len(pts)))
        out.append(check("nijenhuis", name, max(_maxabs(nijenhuis_tensor(s.theta, x)) for x in pts),
                         1e-9, len(pts)))
        out += compatibility_check(s, pts).checks
        for eps in FAMILY_GRID:
            for a in FAMILY_GRID:
                (conn, _), rep = cokahler_statistical_family(s, eps, a, few)
                out += rep.checks
                leaves = leaf_parallelism_check(s, conn, few[:3])
                out += [_suffix(c, f"eps={eps:g},a={a:g}") for c in leaves.checks]
    return out


# ---------------------------------------------------------------------------
# stable Hamiltonian structures
# ---------------------------------------------------------------------------

def suite_shs(ctx: SuiteContext) -> list:
    out = []
    for name in ctx.select(CONTACT):
        entry = zoo.get(name)
        s = entry.structure
        pts = _points(ctx, entry, "shs")
        for label, conn in entry.connections.items():
            rep = shs_connection_check(conn, s, pts)
            out += [_suffix(c, label) for c in rep.checks]
            out += [_suffix(c, label) for c in dual_torsion_formula_check(s, conn, pts).checks]
            drift = max(_maxabs(reeb_derivative(conn, x)) for x in pts[:CURVATURE_POINTS])
            out.append(check(f"reeb_derivative[{label}]", name, drift, None,
                             min(len(pts), CURVATURE_POINTS), REPORT))
        if name == "shs3":
            rep = shs_difference_symmetry(entry.connections["shs"], entry.connections["shs_perturbed"], s, pts)
            out += rep.checks
        flags = entry.flags
        out.append(check("flags_consistent", name,
                         float((flags.is_contact or flags.is_cosymplectic) and not flags.is_shs),
                         0.5, 1))
    return out


# ---------------------------------------------------------------------------
# contact obstruction
# ---------------------------------------------------------------------------

def suite_contact(ctx: SuiteContext) -> list:
    out = []
    for name in ctx.select(CONTACT):
        entry = zoo.get(name)
        s = entry.structure
        pts = _points(ctx, entry, "contact")
        for label, conn in entry.connections.items():
            dual = dual_connection(s.metric, conn)
            try:
                rep = contact_obstruction_check(s, dual, pts, ctx.rng("contact-pairs", name, label),
                                                origin=entry.designated[0])
            except PreconditionError as exc:
                pre = float(str(exc).split("residual ")[-1].rstrip(")"))
                out.append(check(f"dual_preserves_alpha[{label}]", name, pre, None, len(pts), REPORT))
                continue
            c = _suffix(rep.checks[0], label)
            out.append(c)
            if s.flags.is_contact:
                out.append(check(f"witness_alpha_torsion_12[{label}]", name, abs(c.witness - 1.0),
                                 1e-9, 1, witness=c.witness))
    return out


# ---------------------------------------------------------------------------
# parallel transport
# ---------------------------------------------------------------------------

def circle_loop(centre, plane=(0, 1), radius: float = 0.5) -> Curve:
    centre = np.asarray(centre, dtype=float)
    i, j = plane

    def fn(t):
        c, s = C.cos(2.0 * np.pi * t), C.sin(2.0 * np.pi * t)
        comps = [centre[k] + 0.0 * c for k in range(centre.size)]
        comps[i] = centre[i] + radius * c
        comps[j] = centre[j] + radius * s
        return C.stack(comps)
    return Curve(fn, "circle")


def latitude_loop(polar: float = 1.0) -> Curve:
    def fn(t):
        phi = 2.0 * np.pi * t
        return C.stack([polar + 0.0 * phi, phi])
    return Curve(fn, "latitude")


def loops_for(entry) -> dict:
    """Named closed curves available on an entry."""
    dim = entry.structure.dim if entry.kind != "family" else entry.structure.param_dim
    centre = np.asarray(entry.designated[0], dtype=float)
    plane = (1, 2) if dim % 2 == 1 else (0, 1)
    radius = 0.05 if entry.kind == "family" else 0.5
    out = {"circle": circle_loop(centre, plane, radius)}
    if entry.name == "sphere2":
        out["circle"] = circle_loop((1.2, 0.3), (0, 1), 0.3)
        out["latitude"] = latitude_loop(1.0)
    return out


@dataclass(frozen=True)
class TransportResult:
    start: np.ndarray
    end_conn: np.ndarray
    end_dual: np.ndarray
    metric_drift: float
    omega_drift: float | None
    dual_omega_drift: float | None
    holonomy_angle: float | None


class _MemoCurve:
    """Shares curve evaluations between the two transports of a pair."""

    def __init__(self, curve: Curve):
        self.curve = curve
        self.name = curve.name
        self._cache = {}

    def position_velocity(self, t: float):
        if t not in self._cache:
            self._cache[t] = self.curve.position_velocity(t)
        return self._cache[t]


def transport_pair(g: Callable, conn: Connection, dual: Connection, curve: Curve,
                   steps: int = TRANSPORT_STEPS, omega: Callable | None = None) -> TransportResult:
    """Carry the coordinate basis around ``curve`` with both connections.

    The metric drift compares g(PX, P*Y) with g(X, Y) at the start; the
    omega drifts (when ``omega`` is given) compare omega(PX, PY) and
    omega(P*X, P*Y) with omega(X, Y).
    """
    curve = _MemoCurve(curve)
    p0, _ = curve.position_velocity(0.0)
    p1, _ = curve.position_velocity(1.0)
    n = p0.size
    basis = np.eye(n)
    A = parallel_transport(conn, curve, basis, steps)
    B = parallel_transport(dual, curve, basis, steps)
    G0 = np.asarray(C.value_of(g(p0)))
    G1 = np.asarray(C.value_of(g(p1)))
    metric_drift = _maxabs(A.T @ G1 @ B - G0)
    omega_drift = dual_omega_drift = None
    if omega is not None:
        W0 = np.asarray(C.value_of(omega(p0)))
        W1 = np.asarray(C.value_of(omega(p1)))
        omega_drift = _maxabs(A.T @ W1 @ A - W0)
        dual_omega_drift = _maxabs(B.T @ W1 @ B - W0)
    angle = None
    if n == 2:
        F = orthonormal_frame(G0)
        M = np.linalg.solve(F, A @ F)
        angle = float(np.arctan2(M[1, 0], M[0, 0]))
    return TransportResult(basis, A, B, metric_drift, omega_drift, dual_omega_drift, angle)


def _wrap(angle: float) -> float:
    return float((angle + np.pi) % (2.0 * np.pi) - np.pi)


TRANSPORT_PLAN = (
    ("flat2", "lc", "circle"),
    ("sphere2", "lc", "latitude"),
    ("sphere2", "symplectic(flat)", "circle"),
    ("cp1", "symplectic(flat)", "circle"),
    ("nonkahler4", "symplectic(lc)", "circle"),
    ("cokahler_flat", "eps[0.5]", "circle"),
    ("contact3", "shs", "circle"),
    ("shs3", "shs_perturbed", "circle"),
    ("simplex2", "alpha[0.5]", "circle"),
)


def suite_transport(ctx: SuiteContext) -> list:
    out = []
    for name, label, loop in TRANSPORT_PLAN:
        if not ctx.wants(name):
            continue
        entry = zoo.get(name)
        pairs = {p[0]: p for p in dual_pairs(entry)}
        _, g, conn, dual = pairs[label]
        omega = entry.structure.omega if name in HERMITIAN or name in CONTACT else None
        res = transport_pair(g, conn, dual, loops_for(entry)[loop], TRANSPORT_STEPS, omega)
        tag = f"{label},{loop}"
        out.append(check(f"transport_metric_drift[{tag}]", name, res.metric_drift, 1e-6, TRANSPORT_STEPS))
        if res.omega_drift is not None:
            out.append(check(f"transport_omega_drift[{tag}]", name, res.omega_drift, 1e-6, TRANSPORT_STEPS))
            # the dual preserves omega on almost-Hermitian entries only
            hermitian = name in HERMITIAN
            out.append(check(f"transport_dual_omega_drift[{tag}]", name, res.dual_omega_drift,
                             1e-6 if hermitian else None, TRANSPORT_STEPS, ASSERT if hermitian else REPORT))
        if name == "sphere2" and loop == "latitude":
            # enclosed polar cap has curvature integral 2 pi (1 - cos polar)
            expected = _wrap(2.0 * np.pi * (1.0 - np.cos(1.0)))
            err = abs(_wrap(res.holonomy_angle - expected))
            err = min(err, abs(_wrap(res.holonomy_angle + expected)))
            out.append(check(f"holonomy_angle[{tag}]", name, err, 1e-6, TRANSPORT_STEPS,
                             witness=res.holonomy_angle))
        elif res.holonomy_angle is not None:
            out.append(check(f"holonomy_angle[{tag}]", name, abs(res.holonomy_angle), None,
                             TRANSPORT_STEPS, REPORT, witness=res.holonomy_angle))
    return out


# ---------------------------------------------------------------------------
# statistical families
# ---------------------------------------------------------------------------

def simplex_levi_civita(n: int) -> Connection:
    """Levi-Civita connection of the closed-form simplex metric."""
    return levi_civita(IG.simplex_metric, n)


def suite_infogeo(ctx: SuiteContext) -> list:
    out = []
    fams = ctx.all_families()
    for name in ctx.select(fams):
        fam = fams[name]
        pts = fam.points(ctx.rng("infogeo", name), ctx.points)
        norm = max(abs(fam.check_normalized(p) - 1.0) for p in pts)
        out.append(check("normalization", name, norm, 1e-10, len(pts)))
        agree = max(IG.fisher_agreement(fam, p) for p in pts)
        out.append(check("fisher_three_way", name, agree, 1e-8, len(pts)))
        few = pts[:CURVATURE_POINTS]
        lc = levi_civita(IG.fisher_field(fam), fam.param_dim)
        zero = max(_maxabs(IG.alpha_connection(fam, 0.0).at(p) - lc.at(p)) for p in few)
        out.append(check("alpha0_is_lc", name, zero, 1e-9, len(few)))
        kl = IG.eguchi_structure(IG.family_kl(fam))
        e_metric = max(_maxabs(np.asarray(kl.metric(p)) - np.asarray(IG.fisher_metric(fam, p)))
                       for p in few)
        e_conn = max(max(_maxabs(kl.conn.at(p) - IG.alpha_connection(fam, -1.0).at(p)),
                         _maxabs(kl.dual.at(p) - IG.alpha_connection(fam, 1.0).at(p))) for p in few)
        out.append(check("eguchi_kl_metric", name, e_metric, 1e-8, len(few)))
        out.append(check("eguchi_kl_connections", name, e_conn, 1e-8, len(few)))

    if ctx.wants("bernoulli"):
        g = float(np.asarray(IG.fisher_metric(fams["bernoulli"], np.array([0.5])))[0, 0])
        out.append(check("fisher_value[theta=0.5]", "bernoulli", abs(g - 4.0), 1e-10, 1, witness=g))
    if ctx.wants("gaussian"):
        fam = fams["gaussian"]
        worst = 0.0
        for p in fam.designated:
            sigma = p[1]
            g = np.asarray(IG.fisher_metric(fam, np.asarray(p)))
            worst = max(worst, _maxabs(g - np.diag([1.0 / sigma ** 2, 2.0 / sigma ** 2])))
        out.append(check("fisher_closed_form", "gaussian", worst, 1e-6, len(fam.designated)))

    for name, (fam, potential) in ctx.exponential_families().items():
        if not ctx.wants(name):
            continue
        pts = fam.points(ctx.rng("expfam", name), ctx.points)
        gap = max(_maxabs(np.asarray(C.derivatives(potential, p, 2)[2])
                          - np.asarray(IG.fisher_metric(fam, p))) for p in pts)
        out.append(check("potential_hessian_is_fisher", name, gap, 1e-9, len(pts)))
        breg = IG.bregman_divergence(potential, fam.param_dim)
        kl = IG.family_kl(fam)
        rng = ctx.rng("bregman", name)
        worst = 0.0
        for p in pts[:CURVATURE_POINTS]:
            q = fam.sampler(rng, 1)[0]
            worst = max(worst, abs(float(breg(p, q)) - float(kl(q, p))))
        out.append(check("bregman_is_kl", name, worst, 1e-10, min(len(pts), CURVATURE_POINTS)))

    if ctx.wants("simplex2"):
        out += _simplex_checks(ctx)
    return out


def _simplex_checks(ctx: SuiteContext) -> list:
    out = []
    fam = zoo.get("simplex2").structure
    rng = ctx.rng("simplex")
    lc = simplex_levi_civita(2)
    interior = IG.simplex_sample(rng, 2, 20, margin=0.05)[:, :2]
    closed = max(_maxabs(np.asarray(IG.simplex_metric(p)) - np.asarray(IG.fisher_metric(fam, p)))
                 for p in interior)
    out.append(check("closed_form_metric", "simplex2", closed, 1e-10, len(interior)))
    K = [sectional_curvature(lc, IG.simplex_metric, p, [1.0, 0.0], [0.0, 1.0]) for p in interior]
    out.append(check("sectional_curvature", "simplex2", max(abs(k - 0.25) for k in K), 1e-6,
                     len(interior), witness=float(np.mean(K))))

    P = IG.simplex_sample(rng, 2, 1000)
    Qs = IG.simplex_sample(rng, 2, 1000)
    violations = sum(IG.hellinger(p, q) > IG.fisher_rao_distance(p, q) for p, q in zip(P, Qs))
    out.append(check("hellinger_below_fisher_rao", "simplex2", float(violations), 0.5, len(P)))

    christoffel = max(_maxabs(IG.simplex_christoffel(p) - lc.at(p)) for p in interior)
    out.append(check("closed_form_christoffel", "simplex2", christoffel, 1e-10, len(interior)))

    fast = Connection(IG.simplex_christoffel, 2, "simplex-lc")
    worst = 0.0
    A = IG.simplex_sample(rng, 2, 20, margin=0.1)
    B = IG.simplex_sample(rng, 2, 20, margin=0.1)
    for p, q in zip(A, B):
        _, length = geodesic_shoot(fast, IG.simplex_metric, p[:2], q[:2], steps=GEODESIC_STEPS)
        worst = max(worst, abs(length - IG.fisher_rao_distance(p, q)))
    out.append(check("fisher_rao_is_geodesic_length", "simplex2", worst, 1e-6, len(A)))
    return out


# ---------------------------------------------------------------------------
# quantum states
# ---------------------------------------------------------------------------

QUANTUM_GEOMETRIES = ("qubit", "qutrit", "ququart")


def suite_quantum(ctx: SuiteContext) -> list:
    out = []
    for d, name in zip((2, 3, 4), QUANTUM_GEOMETRIES):
        if not ctx.wants(name):
            continue
        rng = ctx.rng("quantum", name)
        mixed = np.eye(d) / d
        worst = 0.0
        for _ in range(10):
            X = Q.random_tangent(rng, d)
            worst = max(worst, _maxabs(Q.sld_solve(mixed, X) - d * X))
        out.append(check("sld_maximally_mixed", name, worst, 1e-12, 10))
        states = [Q.random_state(rng, d) for _ in range(min(ctx.points, 20))]
        res = tors = bkm = 0.0
        for rho in states:
            X, Y = Q.random_tangent(rng, d), Q.random_tangent(rng, d)
            res = max(res, Q.sld_residual(rho, X, Q.sld_solve(rho, X)))
            tors = max(tors, _maxabs(Q.exponential_connection_torsion(rho, X, Y)))
        for rho in states[:5]:
            tangents = [Q.random_tangent(rng, d) for _ in range(2)]
            bkm = max(bkm, _maxabs(Q.bkm_metric(rho, tangents) - Q.bkm_metric_eguchi(rho, tangents)))
        out.append(check("sld_residual", name, res, 1e-10, len(states)))
        out.append(check("exponential_torsion_norm", name, tors, None, len(states), REPORT))
        out.append(check("bkm_eguchi", name, bkm, 1e-6, min(len(states), 5)))

    if ctx.wants("qubit"):
        out += _bloch_checks(ctx)
    return out


def _bloch_checks(ctx: SuiteContext) -> list:
    out = []
    rng = ctx.rng("bloch")
    pts = np.vstack([np.zeros(3), [0.3, -0.2, 0.4], Q.bloch_ball_sampler(0.9)(rng, ctx.points)])
    few = pts[:CURVATURE_POINTS]
    closed = max(_maxabs(np.asarray(Q.bloch_sld_metric(r)) - Q.bloch_sld_closed_form(r)) for r in pts)
    out.append(check("sld_closed_form", "qubit", closed, 1e-10, len(pts)))
    m, e = Q.mixture_connection(), Q.exponential_connection()
    dual = max(_maxabs(duality_residual(Q.bloch_sld_metric, m, e, r, *_unit_rows(rng, 3, 3)))
               for r in pts)
    out.append(check("duality[mixture,exponential]", "qubit", dual, 1e-9, len(pts)))
    tors = 0.0
    for r in pts:
        T = torsion(e, r)
        for a, b in ((0, 1), (0, 2), (1, 2)):
            formula = Q.exponential_connection_torsion(Q.bloch_state(r), Q.BLOCH_TANGENTS[a],
                                                       Q.BLOCH_TANGENTS[b])
            chart = np.einsum("k,kij->ij", T[:, a, b], Q.BLOCH_TANGENTS)
            tors = max(tors, _maxabs(chart - formula))
    out.append(check("exponential_torsion_formula", "qubit", tors, 1e-10, len(pts)))
    curv = max(_maxabs(curvature(e, r)) for r in few)
    out.append(check("exponential_curvature", "qubit", curv, 1e-6, len(few)))
    eg = IG.eguchi_structure(Q.bloch_relative_entropy())
    bkm = max(_maxabs(np.asarray(eg.metric(r)) - Q.bkm_metric(Q.bloch_state(r), Q.BLOCH_TANGENTS))
              for r in few)
    out.append(check("bkm_eguchi_bloch", "qubit", bkm, 1e-6, len(few)))

    fits = {r: Q.fubini_study_compare(r, ctx.rng("fubini-study", r)) for r in (0.98, 0.99, 0.995)}
    for fit in fits.values():
        out += fit.report.checks
    c = fits[0.99].constant
    stab = abs(fits[0.98].constant - fits[0.995].constant) / c
    out.append(check("fubini_study_constant_stability", "qubit", stab, 1e-2, 3, witness=c))
    return out


# ---------------------------------------------------------------------------
# diastasis
# ---------------------------------------------------------------------------

def remainder_slope(potential_ext: Callable, distance: Callable, base, direction,
                    scales=np.geomspace(2e-2, 2e-1, 9)) -> float:
    """log-log slope of |D - d^2| against d along a ray from ``base``."""
    d, r = [], []
    for t in scales:
        q = base + t * direction
        dist = distance(base, q)
        d.append(dist)
        r.append(abs(float(diastasis(potential_ext, base, q)) - dist ** 2))
    return float(np.polyfit(np.log(d), np.log(r), 1)[0])


def suite_diastasis(ctx: SuiteContext) -> list:
    out = []
    for name in ctx.select(KAHLER_POTENTIAL):
        entry = zoo.get(name)
        s = entry.structure
        pts = _points(ctx, entry, "diastasis")
        rng = ctx.rng("diastasis-pairs", name)
        diag = max(abs(float(diastasis(s.potential_ext, x, x))) for x in pts)
        out.append(check("diagonal_zero", name, diag, 1e-12, len(pts)))
        V, W = wirtinger_frames(s.dim // 2)
        hess = max(_maxabs(0.5 * diastasis_hessian(s.potential_ext, x) - V.T @ np.asarray(C.value_of(s.metric(x))) @ W)
                   for x in pts[:CURVATURE_POINTS])
        out.append(check("wirtinger_hessian_is_metric", name, hess, 1e-8, min(len(pts), CURVATURE_POINTS)))
        if name.startswith("flat"):
            others = entry.points(rng, len(pts))[-len(pts):]
            gap = max(abs(float(diastasis(s.potential_ext, x, y)) - float(np.sum((x - y) ** 2)))
                      for x, y in zip(pts, others))
            out.append(check("flat_is_squared_distance", name, gap, 1e-12, len(pts)))
        if name == "cp1":
            slopes = []
            for x in pts[:CURVATURE_POINTS]:
                u = _unit_rows(rng, 1, 2)[0]
                slopes.append(remainder_slope(s.potential_ext, zoo.fubini_study_distance, x, u))
            out.append(check("remainder_slope", name, min(slopes), 3.9, len(slopes), CONTROL,
                             witness=float(np.median(slopes))))
    return out


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

SUITES: dict[str, Callable] = {
    "duality": suite_duality,
    "smat": suite_smat,
    "kahler": suite_kahler,
    "cokahler": suite_cokahler,
    "shs": suite_shs,
    "contact": suite_contact,
    "transport": suite_transport,
    "infogeo": suite_infogeo,
    "quantum": suite_quantum,
    "diastasis": suite_diastasis,
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def known_geometries(ctx: SuiteContext) -> tuple:
    return zoo.names() + tuple(n for n in ctx.families if n not in zoo.names()) + QUANTUM_GEOMETRIES


def run_suite(name: str, ctx: SuiteContext) -> list:
    if name == "all":
        out = []
        for key, fn in SUITES.items():
            out += [replace(c, name=f"{key}/{c.name}") for c in fn(ctx)]
        return out
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}")
    return SUITES[name](ctx)
