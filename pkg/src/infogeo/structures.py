"""Almost-Hermitian and almost-contact metric structures and their checks.

Complex charts interleave real coordinates as ``(x1, y1, x2, y2, ...)`` with
``z_j = x_j + i y_j``.  The real metric satisfies ``g(d_xj, d_xj) = h_jj``
where ``h_{j k} = d_j d_kbar Phi``; equivalently the complex-bilinear
extension gives ``g(d_zj, d_zkbar) = h_{j k} / 2``.

Odd-dimensional Darboux charts put the Reeb coordinate first, ``E = d_0``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import calculus as C
from .calculus import with_gradient
from .errors import ConfigError, InvalidSectionError, PreconditionError, UnsupportedError
from .geometry import (ChartedGeometry, Connection, alpha_family, covariant_derivative,
                       curvature, curvature_operator, dual_connection, exterior_derivative,
                       levi_civita, torsion)
from .report import ASSERT, CONTROL, REPORT, Check, CheckReport, check

FLAG_SAMPLES = 50
FLAG_TOL = 1e-9


def _val(field_fn, x) -> np.ndarray:
    return np.asarray(C.value_of(field_fn(np.asarray(x, dtype=float))))


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


# ---------------------------------------------------------------------------
# structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureFlags:
    is_contact: bool = False
    is_cosymplectic: bool = False
    is_shs: bool = False


@dataclass(frozen=True)
class AlmostHermitianStructure:
    """(g, omega, Theta) on an even-dimensional chart.

    ``potential`` is a real jet-aware Kaehler potential of the real
    coordinates; ``potential_ext(z, wbar)`` its sesquiholomorphic extension
    on complex coordinate vectors.
    """

    geometry: ChartedGeometry
    almost_kahler: bool = True
    kahler: bool = False
    potential: Callable | None = None
    potential_ext: Callable | None = None

    def __post_init__(self):
        geo = self.geometry
        if geo.metric is None or geo.two_form is None or geo.endo is None:
            raise ConfigError(f"{geo.name}: metric, two_form and endo are required")
        if geo.dim % 2:
            raise ConfigError(f"{geo.name}: almost-Hermitian chart must be even-dimensional")

    @property
    def name(self) -> str:
        return self.geometry.name

    @property
    def dim(self) -> int:
        return self.geometry.dim

    def metric(self, x):
        return self.geometry.metric(x)

    def omega(self, x):
        return self.geometry.two_form(x)

    def theta(self, x):
        return self.geometry.endo(x)

    def validate(self, points: np.ndarray, tol: float = 1e-10) -> CheckReport:
        """Theta^2 = -I, omega = g(Theta., .), and closedness when almost-Kaehler."""
        n = self.dim
        sq, compat, closed = 0.0, 0.0, 0.0
        for x in points:
            T, g, w = _val(self.theta, x), _val(self.metric, x), _val(self.omega, x)
            sq = max(sq, _maxabs(T @ T + np.eye(n)))
            compat = max(compat, _maxabs(w - T.T @ g))
            if self.almost_kahler:
                closed = max(closed, _maxabs(exterior_derivative(self.omega, 2, x)))
        rep = CheckReport("almost-hermitian")
        rep.extend([
            check("theta_squared", self.name, sq, tol, len(points)),
            check("omega_compat", self.name, compat, tol, len(points)),
        ])
        if self.almost_kahler:
            rep.checks.append(check("omega_closed", self.name, closed, tol, len(points)))
        return rep


@dataclass(frozen=True)
class AlmostContactMetricStructure:
    """(Theta, E, alpha, g, Omega) on an odd-dimensional chart.

    ``darboux`` marks charts in which ``E = d_0`` and Omega has constant
    transverse components; operations that rely on the reduced component
    formulas refuse other charts.
    """

    geometry: ChartedGeometry
    darboux: bool = False
    flags: StructureFlags = field(default_factory=StructureFlags)

    def __post_init__(self):
        geo = self.geometry
        missing = [n for n in ("metric", "two_form", "one_form", "endo", "reeb")
                   if getattr(geo, n) is None]
        if missing:
            raise ConfigError(f"{geo.name}: missing fields {', '.join(missing)}")
        if geo.dim % 2 == 0:
            raise ConfigError(f"{geo.name}: almost-contact chart must be odd-dimensional")

    @property
    def name(self) -> str:
        return self.geometry.name

    @property
    def dim(self) -> int:
        return self.geometry.dim

    def metric(self, x):
        return self.geometry.metric(x)

    def omega(self, x):
        return self.geometry.two_form(x)

    def alpha(self, x):
        return self.geometry.one_form(x)

    def theta(self, x):
        return self.geometry.endo(x)

    def reeb(self, x):
        return self.geometry.reeb(x)


def derive_flags(geometry: ChartedGeometry, rng: np.random.Generator,
                 samples: int = FLAG_SAMPLES, tol: float = FLAG_TOL) -> StructureFlags:
    """Classify (Omega, alpha) numerically at sampled points."""
    pts = geometry.points(rng, samples)
    d_alpha = max(_maxabs(exterior_derivative(geometry.one_form, 1, x)) for x in pts)
    d_omega = max(_maxabs(exterior_derivative(geometry.two_form, 2, x)) for x in pts)
    contact = max(_maxabs(_val(geometry.two_form, x) - exterior_derivative(geometry.one_form, 1, x))
                  for x in pts)
    stab, nondeg = 0.0, np.inf
    for x in pts:
        E = _val(geometry.reeb, x)
        stab = max(stab, _maxabs(E @ exterior_derivative(geometry.one_form, 1, x)))
        W, a = _val(geometry.two_form, x), _val(geometry.one_form, x)
        n = W.shape[0]
        border = np.zeros((n + 1, n + 1))
        border[:n, :n] = W
        border[:n, n] = a
        border[n, :n] = -a
        nondeg = min(nondeg, abs(np.linalg.det(border)))
    is_shs = d_omega < tol and stab < tol and nondeg > tol
    return StructureFlags(
        is_contact=bool(is_shs and contact < tol),
        is_cosymplectic=bool(is_shs and d_alpha < tol),
        is_shs=bool(is_shs),
    )


# ---------------------------------------------------------------------------
# almost-contact identities
# ---------------------------------------------------------------------------

def compatibility_check(s: AlmostContactMetricStructure, points: np.ndarray,
                        tol: float = 1e-9) -> CheckReport:
    """Residuals of the almost-contact metric identities, one check per identity."""
    n = s.dim
    names = ("theta_squared", "theta_reeb", "alpha_theta", "alpha_metric_dual",
             "metric_decomposition", "reeb_in_kernel", "alpha_reeb")
    worst = dict.fromkeys(names, 0.0)
    for x in points:
        T, E, a = _val(s.theta, x), _val(s.reeb, x), _val(s.alpha, x)
        g, W = _val(s.metric, x), _val(s.omega, x)
        res = (
            T @ T + np.eye(n) - np.outer(E, a),
            T @ E,
            a @ T,
            a - g @ E,
            g - (W @ T + np.outer(a, a)),
            E @ W,
            a @ E - 1.0,
        )
        for k, r in zip(names, res):
            worst[k] = max(worst[k], _maxabs(r))
    return CheckReport("compatibility", [check(k, s.name, v, tol, len(points))
                                         for k, v in worst.items()])


def nijenhuis_tensor(theta: Callable, x) -> np.ndarray:
    """N[k, i, j] = N^Theta(d_i, d_j)^k with coordinate brackets."""
    T, dT = with_gradient(theta, np.asarray(x, dtype=float))
    T, dT = np.asarray(T), np.asarray(dT)           # dT[m, j, a] = d_a Theta^m_j
    bracket = np.einsum("ai,kja->kij", T, dT)
    inner = np.einsum("km,mij->kij", T, dT)         # Theta^k_m d_j Theta^m_i
    return (bracket - np.swapaxes(bracket, 1, 2)) + inner - np.swapaxes(inner, 1, 2)


def nijenhuis(theta: Callable, x, X, Y) -> np.ndarray:
    """N(X, Y) for constant-coefficient vectors X, Y."""
    return np.einsum("kij,i,j->k", nijenhuis_tensor(theta, x), X, Y)


def parallel_section_defect(conn: Connection, dual: Connection, theta: Callable, x, X, Y) -> np.ndarray:
    """nabla*_X (Theta Y) - Theta (nabla_X Y) for constant-coefficient X, Y."""
    x = np.asarray(x, dtype=float)
    T, dT = with_gradient(theta, x)
    T, dT = np.asarray(T), np.asarray(dT)           # dT[k, j, i] = d_i Theta^k_j
    P = (np.transpose(dT, (0, 2, 1)) + np.einsum("kis,sj->kij", dual.at(x), T)
         - np.einsum("km,mij->kij", T, conn.at(x)))
    return np.einsum("kij,i,j->k", P, X, Y)


def hamiltonian_form_from_section(g: Callable, theta: Callable, points: np.ndarray,
                                  geometry: str = "", skew_tol: float = 1e-10):
    """The 2-form g(Theta ., .) and a report of its closedness.

    Closedness is reported, not asserted: it holds when Theta is parallel
    but generically fails otherwise.
    """
    for x in points:
        T, G = _val(theta, x), _val(g, x)
        skew = T.T @ G + G @ T
        if _maxabs(skew) > skew_tol * max(1.0, _maxabs(G)):
            raise InvalidSectionError(f"endomorphism is not skew for the metric at {x}")

    def form(x):
        return C.einsum("ki,kj->ij", theta(x), g(x))

    closed = max(_maxabs(exterior_derivative(form, 2, x)) for x in points)
    return form, check("hamiltonian_form_closed", geometry, closed, None, len(points), REPORT)


def shs_connection_check(conn: Connection, s: AlmostContactMetricStructure, points: np.ndarray,
                         tol: float = 1e-9) -> CheckReport:
    """nabla E = 0 and nabla Omega = 0 asserted; nabla alpha and torsions reported."""
    if not s.flags.is_shs:
        raise PreconditionError(f"{s.name} is not flagged as a stable Hamiltonian structure")
    dual = dual_connection(s.metric, conn)
    dE = dO = dA = tor = dtor = 0.0
    for x in points:
        dE = max(dE, _maxabs(covariant_derivative(conn, s.reeb, "u", x)))
        dO = max(dO, _maxabs(covariant_derivative(conn, s.omega, "ll", x)))
        dA = max(dA, _maxabs(covariant_derivative(conn, s.alpha, "l", x)))
        tor = max(tor, _maxabs(torsion(conn, x)))
        dtor = max(dtor, _maxabs(torsion(dual, x)))
    n = len(points)
    return CheckReport("shs-connection", [
        check("nabla_reeb", s.name, dE, tol, n),
        check("nabla_omega", s.name, dO, tol, n),
        check("nabla_alpha", s.name, dA, None, n, REPORT),
        check("torsion", s.name, tor, None, n, REPORT),
        check("dual_torsion", s.name, dtor, None, n, REPORT),
    ], meta={"statistical": bool(tor < tol and dtor < tol)})


def dual_torsion_formula_check(s: AlmostContactMetricStructure, conn: Connection,
                               points: np.ndarray, tol: float = 1e-8) -> CheckReport:
    """Dual torsion in a Darboux chart against component formulas.

    Asserted (exact for any connection with nabla E = 0 and E = d_0)::

        T*(d_0, d_0) = 0
        T*^p(d_0, d_j) = g^{pi} (d_0 g_ij - d_j g_i0 + G^l_ji g_l0 - G^l_0i g_lj)
        T*(d_i, d_k) = Theta nabla_k(Theta d_i) - Theta nabla_i(Theta d_k)
                       + alpha_k (nabla_i alpha)^# - alpha_i (nabla_k alpha)^#
                       + (d alpha)_ik E

    The shorter forms that drop every term involving alpha are reported as
    ``*_short`` checks; they agree whenever alpha is parallel and closed.
    """
    if not s.darboux:
        raise UnsupportedError(f"{s.name}: component formulas need a Darboux chart (E = d_0)")
    n = s.dim
    dual = dual_connection(s.metric, conn)
    worst = {"T00": 0.0, "T0j": 0.0, "T0j_short": 0.0, "Tik": 0.0, "Tik_short": 0.0}
    for x in points:
        x = np.asarray(x, dtype=float)
        Ts = torsion(dual, x)
        G, dG = with_gradient(s.metric, x)
        G, dG = np.asarray(G), np.asarray(dG)       # dG[i, j, l] = d_l g_ij
        Gi = np.linalg.inv(G)
        Gam = conn.at(x)
        worst["T00"] = max(worst["T00"], _maxabs(Ts[:, 0, 0]))

        d0g = dG[:, :, 0]
        exact = (d0g - dG[:, 0, :] + np.einsum("lji,l->ij", Gam, G[:, 0])
                 - np.einsum("li,lj->ij", Gam[:, 0, :], G))
        T0j = Ts[:, 0, :]
        worst["T0j"] = max(worst["T0j"], _maxabs(T0j - Gi @ exact))
        worst["T0j_short"] = max(worst["T0j_short"], _maxabs(T0j - Gi @ d0g))

        T, dT = with_gradient(s.theta, x)
        T, dT = np.asarray(T), np.asarray(dT)       # dT[m, j, a] = d_a Theta^m_j
        # nabla_k (Theta d_i) as M[m, k, i]
        nab_theta = np.transpose(dT, (0, 2, 1)) + np.einsum("mks,si->mki", Gam, T)
        A = np.einsum("pm,mki->pik", T, nab_theta)   # Theta nabla_k(Theta d_i)
        short = A - np.swapaxes(A, 1, 2)
        a = _val(s.alpha, x)
        E = _val(s.reeb, x)
        nab_a = covariant_derivative(conn, s.alpha, "l", x)   # [i, j] = (nabla_i alpha)_j
        sharp = nab_a @ Gi                                    # [i, p] = (nabla_i alpha)^p
        da = exterior_derivative(s.alpha, 1, x)
        full = (short + np.einsum("k,ip->pik", a, sharp) - np.einsum("i,kp->pik", a, sharp)
                + np.einsum("ik,p->pik", da, E))
        worst["Tik"] = max(worst["Tik"], _maxabs((Ts - full)[:, 1:, 1:]))
        worst["Tik_short"] = max(worst["Tik_short"], _maxabs((Ts - short)[:, 1:, 1:]))
    m = len(points)
    return CheckReport("dual-torsion-formula", [
        check("T00", s.name, worst["T00"], tol, m),
        check("T0j", s.name, worst["T0j"], tol, m),
        check("T0j_short", s.name, worst["T0j_short"], None, m, REPORT),
        check("Tik", s.name, worst["Tik"], tol, m),
        check("Tik_short", s.name, worst["Tik_short"], None, m, REPORT),
    ])


def contact_obstruction_check(s: AlmostContactMetricStructure, dual: Connection, points: np.ndarray,
                              rng: np.random.Generator | None = None, pairs: int = 100,
                              tol: float = 1e-9, origin=None) -> CheckReport:
    """d alpha(X, Y) = alpha(T*(X, Y)) for the dual of an shs connection.

    The witness is alpha(T*(d_1, d_2)) at ``origin`` (default: first point).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    pre = max(_maxabs(covariant_derivative(dual, s.alpha, "l", x)) for x in points)
    if pre > 1e-9:
        raise PreconditionError(f"dual connection does not preserve alpha (residual {pre:.3g})")
    worst = 0.0
    for x in points:
        da = exterior_derivative(s.alpha, 1, x)
        aT = np.einsum("k,kij->ij", _val(s.alpha, x), torsion(dual, x))
        X = rng.standard_normal((pairs, s.dim))
        Y = rng.standard_normal((pairs, s.dim))
        diff = np.einsum("ij,ni,nj->n", da - aT, X, Y) / (
            np.linalg.norm(X, axis=1) * np.linalg.norm(Y, axis=1))
        worst = max(worst, _maxabs(diff), _maxabs(da - aT))
    x0 = np.asarray(points[0] if origin is None else origin, dtype=float)
    witness = float(np.einsum("k,k->", _val(s.alpha, x0), torsion(dual, x0)[:, 1, 2]))
    return CheckReport("contact-obstruction", [
        check("dalpha_equals_alpha_torsion", s.name, worst, tol, len(points) * pairs, ASSERT, witness),
    ])


def reeb_derivative(conn: Connection, x) -> np.ndarray:
    """d_0 G^s_ij, the chart form of the Lie derivative of nabla along E = d_0."""
    _, dG = with_gradient(conn.fn, np.asarray(x, dtype=float))
    return np.asarray(dG)[..., 0]


# ---------------------------------------------------------------------------
# Kaehler-type checks
# ---------------------------------------------------------------------------

def kahler_defect(s: AlmostHermitianStructure, points: np.ndarray, tol: float = 1e-8) -> CheckReport:
    """max |nabla^lc omega| over points; the structure is Kaehler iff it is below ``tol``."""
    lc = levi_civita(s.metric, s.dim)
    defect = max(_maxabs(covariant_derivative(lc, s.omega, "ll", x)) for x in points)
    kind = ASSERT if s.kahler else CONTROL
    floor = tol if s.kahler else 1e-3
    return CheckReport("kahler-defect", [check("lc_omega", s.name, defect, floor, len(points), kind)],
                       meta={"kahler": bool(defect < tol)})


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns form a g-orthonormal basis."""
    L = np.linalg.cholesky(g)
    return np.linalg.inv(L).T


def goldberg_commutator(s: AlmostHermitianStructure, x) -> float:
    """max over frame pairs of the operator norm of [R^lc(e_a, e_b), Theta]."""
    x = np.asarray(x, dtype=float)
    R = curvature(levi_civita(s.metric, s.dim), x)
    R = np.asarray(R)
    F = orthonormal_frame(_val(s.metric, x))
    Fi = np.linalg.inv(F)
    T = _val(s.theta, x)
    worst = 0.0
    for a, b in itertools.combinations(range(s.dim), 2):
        Rop = curvature_operator(R, F[:, a], F[:, b])
        comm = Fi @ (Rop @ T - T @ Rop) @ F
        worst = max(worst, float(np.linalg.norm(comm, 2)))
    return worst


def statistical_symplectic_check(s: AlmostHermitianStructure, conn: Connection, points: np.ndarray,
                                 designated=None, tol: float = 1e-9) -> CheckReport:
    """The dual of a symplectic connection preserves omega; it is torsion-free iff Kaehler.

    Kaehler structures assert |T*| < tol everywhere; the others must show
    |T*| > 1e-3 at ``designated`` (default: first point).
    """
    pre_t = max(_maxabs(torsion(conn, x)) for x in points)
    pre_w = max(_maxabs(covariant_derivative(conn, s.omega, "ll", x)) for x in points)
    if pre_t > 1e-9 or pre_w > 1e-9:
        raise PreconditionError(
            f"connection is not symplectic (torsion {pre_t:.3g}, nabla omega {pre_w:.3g})")
    dual = dual_connection(s.metric, conn)
    dual_w = max(_maxabs(covariant_derivative(dual, s.omega, "ll", x)) for x in points)
    n = len(points)
    checks = [check("dual_omega", s.name, dual_w, tol, n)]
    if s.kahler:
        t = max(_maxabs(torsion(dual, x)) for x in points)
        checks.append(check("dual_torsion", s.name, t, tol, n))
    else:
        x0 = points[0] if designated is None else designated
        checks.append(check("dual_torsion", s.name, _maxabs(torsion(dual, x0)), 1e-3, 1, CONTROL))
    return CheckReport("statistical-symplectic", checks)


def _random_triples(rng, dim, count):
    return (rng.standard_normal((count, dim)) for _ in range(3))


def curvature_identity_check(g: Callable, conn: Connection, dual: Connection, x,
                             theta: Callable | None = None, rng=None, triples: int = 20,
                             geometry: str = "", tol: float = 1e-8) -> CheckReport:
    """Curvature identities of a statistical pair.

    Asserted: R + R* = 2 R^lc + 2 [K_X, K_Y] with K = (nabla* - nabla) / 2,
    and, when ``theta`` is given, R(X,Y)Z = Theta^{-1} R*(X,Y) Theta Z.
    Reported: the same identities written with U = nabla* - nabla in place of
    K, and with R(Y, X) on the left of the Theta identity.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    x = np.asarray(x, dtype=float)
    dim = conn.dim
    R = np.asarray(curvature(conn, x))
    Rs = np.asarray(curvature(dual, x))
    Rlc = np.asarray(curvature(levi_civita(g, dim), x))
    U = dual.at(x) - conn.at(x)                 # U[m, i, j]: U_{d_i} d_j
    K = 0.5 * U
    X, Y, Z = _random_triples(rng, dim, triples)

    def op(Rt, A, B):
        return np.einsum("mijk,nj,nk->nmi", Rt, A, B)

    def comm(V):
        VX = np.einsum("mij,ni->nmj", V, X)
        VY = np.einsum("mij,ni->nmj", V, Y)
        return VX @ VY - VY @ VX

    lhs = op(R, X, Y) + op(Rs, X, Y) - 2.0 * op(Rlc, X, Y)
    res_k = _maxabs(np.einsum("nmi,ni->nm", lhs - 2.0 * comm(K), Z))
    res_u = _maxabs(np.einsum("nmi,ni->nm", lhs - 2.0 * comm(U), Z))
    # the first identity needs both connections torsion-free
    statistical = max(_maxabs(torsion(conn, x)), _maxabs(torsion(dual, x))) < 1e-9
    checks = [
        check("statistical_curvature", geometry, res_k, tol if statistical else None, triples,
              ASSERT if statistical else REPORT),
        check("statistical_curvature_u", geometry, res_u, None, triples, REPORT),
    ]
    if theta is not None:
        T = _val(theta, x)
        Ti = np.linalg.inv(T)
        rhs = np.einsum("km,nmi,ij->nkj", Ti, op(Rs, X, Y), T)
        res_t = _maxabs(np.einsum("nmi,ni->nm", op(R, X, Y) - rhs, Z))
        res_swap = _maxabs(np.einsum("nmi,ni->nm", op(R, Y, X) - rhs, Z))
        checks += [
            check("theta_intertwining", geometry, res_t, tol, triples),
            check("theta_intertwining_swapped", geometry, res_swap, None, triples, REPORT),
        ]
    return CheckReport("curvature-identity", checks)


# ---------------------------------------------------------------------------
# co-Kaehler and shs families
# ---------------------------------------------------------------------------

def epsilon_connection(s: AlmostContactMetricStructure, eps: float) -> Connection:
    """nabla^lc + eps alpha(.) alpha(.) E."""
    lc = levi_civita(s.metric, s.dim)
    eps = float(eps)

    def fn(x):
        a, E = s.alpha(x), s.reeb(x)
        return lc(x) + eps * C.einsum("k,i,j->kij", E, a, a)
    return Connection(fn, s.dim, f"eps[{eps:g}]")


def cokahler_statistical_family(s: AlmostContactMetricStructure, eps: float, a: float,
                                points: np.ndarray, tol: float = 1e-9):
    """The pair (nabla^{eps,a}, nabla^{eps,-a}) and the report of its four properties."""
    pre = 0.0
    for x in points:
        pre = max(pre, _maxabs(exterior_derivative(s.alpha, 1, x)),
                  _maxabs(exterior_derivative(s.omega, 2, x)),
                  _maxabs(nijenhuis_tensor(s.theta, x)))
    if not s.flags.is_cosymplectic or pre > 1e-9:
        raise PreconditionError(f"{s.name} is not co-Kaehler (residual {pre:.3g})")
    plus, minus = epsilon_connection(s, eps), epsilon_connection(s, -eps)
    conn = alpha_family(minus, plus, a)
    partner = alpha_family(minus, plus, -a)
    dual_pair = dual_connection(s.metric, conn)
    dual_eps = dual_connection(s.metric, plus)
    worst = dict.fromkeys(("pair_duality", "eps_dual", "omega_parallel", "reeb_derivative"), 0.0)
    for x in points:
        worst["pair_duality"] = max(worst["pair_duality"], _maxabs(dual_pair.at(x) - partner.at(x)))
        worst["eps_dual"] = max(worst["eps_dual"], _maxabs(dual_eps.at(x) - minus.at(x)))
        worst["omega_parallel"] = max(worst["omega_parallel"],
                                      _maxabs(covariant_derivative(conn, s.omega, "ll", x)))
        DE = covariant_derivative(conn, s.reeb, "u", x)
        target = a * eps * np.outer(_val(s.alpha, x), _val(s.reeb, x))
        worst["reeb_derivative"] = max(worst["reeb_derivative"], _maxabs(DE - target))
    tag = f"[eps={eps:g},a={a:g}]"
    rep = CheckReport("cokahler-family", [check(k + tag, s.name, v, tol, len(points))
                                          for k, v in worst.items()])
    return (conn, partner), rep


def leaf_parallelism_check(s: AlmostContactMetricStructure, conn: Connection, points: np.ndarray,
                           expect: Sequence[str] = ("reeb", "kernel"), tol: float = 1e-9) -> CheckReport:
    """How far nabla moves sections of span(E) ("reeb") and ker alpha ("kernel") off themselves.

    Distributions in ``expect`` are asserted parallel; the rest are reported.
    """
    n = s.dim
    reeb_w = kern_w = 0.0
    for x in points:
        x = np.asarray(x, dtype=float)
        a = _val(s.alpha, x)
        g = _val(s.metric, x)
        E = _val(s.reeb, x)
        # span(E): nabla_k E projected g-orthogonally to E
        DE = covariant_derivative(conn, s.reeb, "u", x)
        proj = DE - np.outer(DE @ g @ E / (E @ g @ E), E)
        reeb_w = max(reeb_w, float(np.max(np.sqrt(np.einsum("ki,ij,kj->k", proj, g, proj)))))
        # ker alpha: S_Z = Z - alpha(Z) E, measured by alpha(nabla_k S_Z)
        for z in np.eye(n):
            def section(y, z=z):
                return z - C.einsum("i,i->", s.alpha(y), z) * s.reeb(y)
            DS = covariant_derivative(conn, section, "u", x)
            kern_w = max(kern_w, _maxabs(DS @ a))
    m = len(points)
    return CheckReport("leaf-parallelism", [
        check("reeb_leaf", s.name, reeb_w, tol if "reeb" in expect else None, m,
              ASSERT if "reeb" in expect else REPORT),
        check("kernel_leaf", s.name, kern_w, tol if "kernel" in expect else None, m,
              ASSERT if "kernel" in expect else REPORT),
    ])


def shs_difference_symmetry(conn1: Connection, conn2: Connection, s: AlmostContactMetricStructure,
                            points: np.ndarray, tol: float = 1e-9) -> CheckReport:
    """B = nabla2 - nabla1: Omega(B(X,Y),Z) totally symmetric and B(E, .) = B(., E) = 0."""
    sym = reeb = 0.0
    for x in points:
        B = conn2.at(x) - conn1.at(x)
        A = np.einsum("mij,mk->ijk", B, _val(s.omega, x))
        for p in itertools.permutations(range(3)):
            sym = max(sym, _maxabs(A - np.transpose(A, p)))
        E = _val(s.reeb, x)
        reeb = max(reeb, _maxabs(np.einsum("mij,i->mj", B, E)), _maxabs(np.einsum("mij,j->mi", B, E)))
    m = len(points)
    return CheckReport("shs-difference", [
        check("omega_b_symmetric", s.name, sym, tol, m),
        check("reeb_contraction", s.name, reeb, tol, m),
    ])


# ---------------------------------------------------------------------------
# holomorphic coordinates and the diastasis
# ---------------------------------------------------------------------------

def wirtinger_frames(d: int):
    """v_j = d_zj and w_j = d_zjbar as complex vectors in real coordinates (columns)."""
    V = np.zeros((2 * d, d), dtype=complex)
    for j in range(d):
        V[2 * j, j] = 0.5
        V[2 * j + 1, j] = -0.5j
    return V, V.conj()


def complex_coords(x):
    """z_j = x[2j] + i x[2j+1]; jet aware."""
    return x[0::2] + 1j * x[1::2]


def holomorphic_christoffel_check(s: AlmostHermitianStructure, a: float, x,
                                  conn: Connection | None = None, tol: float = 1e-8) -> CheckReport:
    """Levi-Civita and a-connection components against the Kaehler potential.

    (i)  Gamma^k_ij = h^{k lbar} d_i d_j d_lbar Phi and the mixed components vanish;
    (ii) d_k g(d_i, d_jbar) = g(nabla^a_k d_i, d_jbar) + g(d_i, nabla^{-a}_k d_jbar).

    ``conn`` defaults to the symplectic connection built from the chart's flat
    coordinates; the a-pair is the alpha family of it and its dual.
    """
    if s.potential is None:
        raise UnsupportedError(f"{s.name}: no Kaehler potential")
    from .geometry import symplectic_connection_from, zero_connection

    x = np.asarray(x, dtype=float)
    dim = s.dim
    d = dim // 2
    V, W = wirtinger_frames(d)
    D = C.derivatives(s.potential, x, 3)
    D2, D3 = np.asarray(D[2]), np.asarray(D[3])
    h = np.einsum("ab,ai,bl->il", D2, V, W)                 # h[i, l] = d_i d_lbar Phi
    phi3 = np.einsum("abc,ai,bj,cl->ijl", D3, V, V, W)      # d_i d_j d_lbar Phi
    gamma_pot = np.einsum("kl,ijl->kij", np.linalg.inv(h.T), phi3)

    G = _val(s.metric, x)
    metric_res = _maxabs(V.T @ G @ W - 0.5 * h)

    lc = levi_civita(s.metric, dim).at(x)
    nab = np.einsum("cab,ai,bj->cij", lc, V, V)             # real components of nabla_vi vj
    holo = nab[0::2] + 1j * nab[1::2]
    anti = nab[0::2] - 1j * nab[1::2]
    res_i = max(_maxabs(holo - gamma_pot), _maxabs(anti))

    base = conn if conn is not None else symplectic_connection_from(zero_connection(dim), s.omega)
    dual = dual_connection(s.metric, base)
    ga, gma = alpha_family(base, dual, a).at(x), alpha_family(base, dual, -a).at(x)
    lhs = 0.5 * phi3                                        # d_k g(d_i, d_jbar)
    t1 = np.einsum("cab,ak,bi,cd,dj->kij", ga, V, V, G, W)
    t2 = np.einsum("cab,ak,bj,cd,di->kij", gma, V, W, G, V)
    res_ii = _maxabs(lhs - t1 - t2)
    return CheckReport("holomorphic-christoffel", [
        check("wirtinger_metric", s.name, metric_res, tol, 1),
        check("lc_from_potential", s.name, res_i, tol, 1),
        check(f"mixed_relation[a={a:g}]", s.name, res_ii, tol, 1),
    ])


def diastasis(potential_ext: Callable, z, w):
    """Calabi's diastasis from the sesquiholomorphic extension Phi(z, wbar).

    ``z`` and ``w`` are real interleaved coordinates; ``z`` may be a jet.
    """
    zc, wc = complex_coords(z), complex_coords(w)
    zb, wb = C.conj(zc), C.conj(wc)
    total = (potential_ext(zc, zb) + potential_ext(wc, wb)
             - potential_ext(zc, wb) - potential_ext(wc, zb))
    return C.real(total)


def diastasis_hessian(potential_ext: Callable, z) -> np.ndarray:
    """Mixed Wirtinger Hessian d_zi d_zjbar D(., z) at the diagonal."""
    z = np.asarray(z, dtype=float)
    D2 = np.asarray(C.derivatives(lambda y: diastasis(potential_ext, y, z), z, 2)[2])
    V, W = wirtinger_frames(z.size // 2)
    return np.einsum("ab,ai,bj->ij", D2, V, W)
