"""Charts, connections and the tensors derived from them.

Index layout used throughout:

* metric and 2-forms ``g[i, j]``;
* endomorphisms ``Theta[j, i]`` with ``Theta(d_i) = Theta[j, i] d_j`` (so the
  matrix acts on component vectors by ordinary multiplication);
* connection coefficients ``G[k, i, j]`` with ``nabla_{d_i} d_j = G[k, i, j] d_k``
  (first lower index is the direction);
* curvature ``R[m, i, j, k]`` with ``R(d_j, d_k) d_i = R[m, i, j, k] d_m``;
* covariant derivatives put the new (derivative) slot first.

Fields are plain callables of a coordinate array that also accept jets
from :mod:`infogeo.calculus`, so every object built here can be
differentiated again.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import root

from . import calculus as C
from .calculus import Jet, with_gradient
from .errors import ConditionError, DomainError, UnsupportedError


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

def box_sampler(low: Sequence[float], high: Sequence[float]):
    low = np.asarray(low, dtype=float)
    high = np.asarray(high, dtype=float)

    def sample(rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(low, high, size=(count, low.size))
    return sample


@dataclass(frozen=True)
class ChartedGeometry:
    """A single coordinate chart with optional component fields."""

    name: str
    dim: int
    metric: Callable | None = None
    two_form: Callable | None = None
    one_form: Callable | None = None
    endo: Callable | None = None
    reeb: Callable | None = None
    sampler: Callable | None = None
    designated: tuple = ()
    notes: dict = field(default_factory=dict)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.sampler is None:
            raise UnsupportedError(f"{self.name}: no sampling domain")
        return self.sampler(rng, count)

    def points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Designated points followed by ``count`` random ones."""
        des = np.array(self.designated, dtype=float).reshape(-1, self.dim)
        return np.vstack([des, self.sample(rng, count)])


def metric_value(g: Callable, x) -> np.ndarray:
    """Evaluate a metric field and validate symmetry, definiteness and conditioning."""
    m = np.asarray(C.value_of(g(np.asarray(x, dtype=float))), dtype=float)
    if not np.all(np.isfinite(m)):
        raise DomainError("metric is not finite")
    if np.max(np.abs(m - m.T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
        raise DomainError("metric is not symmetric")
    eig = np.linalg.eigvalsh(m)
    if eig[0] <= 1e-10:
        raise DomainError(f"metric not positive-definite (min eigenvalue {eig[0]:.3g})")
    if eig[-1] / eig[0] > C.COND_LIMIT:
        raise ConditionError("metric condition number exceeds limit")
    return m


# ---------------------------------------------------------------------------
# connections
# ---------------------------------------------------------------------------

class Connection:
    """Point-evaluable connection coefficients ``G[k, i, j]`` (jet aware)."""

    def __init__(self, fn: Callable, dim: int, name: str = "connection"):
        self.fn = fn
        self.dim = int(dim)
        self.name = name

    def __call__(self, x):
        return self.fn(x)

    def at(self, x) -> np.ndarray:
        return np.asarray(C.value_of(self.fn(np.asarray(x, dtype=float))))

    def __repr__(self):
        return f"Connection({self.name!r}, dim={self.dim})"


def zero_connection(dim: int) -> Connection:
    return Connection(lambda x: np.zeros((dim, dim, dim)), dim, "zero")


def constant_connection(coeffs: np.ndarray, name: str = "constant") -> Connection:
    coeffs = np.asarray(coeffs, dtype=float)
    return Connection(lambda x: coeffs, coeffs.shape[0], name)


def levi_civita(g: Callable, dim: int) -> Connection:
    """Christoffel symbols of the second kind."""
    def fn(x):
        G, dG = with_gradient(g, x)             # dG[i, j, l] = d_l g_ij
        low = 0.5 * (C.transpose(dG, (2, 0, 1)) + C.transpose(dG, (0, 2, 1)) - dG)
        return C.einsum("kl,ijl->kij", C.inv(G), low)
    return Connection(fn, dim, "levi-civita")


def dual_connection(g: Callable, conn: Connection) -> Connection:
    """Coefficients of the g-dual: d_k g_ij = G^m_ki g_mj + G*^m_kj g_im."""
    def fn(x):
        G, dG = with_gradient(g, x)
        rest = C.transpose(dG, (2, 0, 1)) - C.einsum("lki,lj->kij", conn(x), G)
        return C.einsum("mi,kij->mkj", C.inv(G), rest)
    return Connection(fn, conn.dim, f"dual({conn.name})")


def alpha_family(conn: Connection, dual: Connection, a: float) -> Connection:
    """((1+a)/2) dual + ((1-a)/2) conn."""
    a = float(a)
    wp, wm = 0.5 * (1.0 + a), 0.5 * (1.0 - a)

    def fn(x):
        return wp * dual(x) + wm * conn(x)
    return Connection(fn, conn.dim, f"alpha[{a:g}]")


def gauge_transform(conn: Connection, theta: Callable) -> Connection:
    """Connection X, Y -> Theta^{-1} nabla_X (Theta Y)."""
    def fn(x):
        T, dT = with_gradient(theta, x)         # dT[m, j, i] = d_i Theta^m_j
        inner = C.transpose(dT, (0, 2, 1)) + C.einsum("mis,sj->mij", conn(x), T)
        return C.einsum("km,mij->kij", C.inv(T), inner)
    return Connection(fn, conn.dim, f"gauge({conn.name})")


def symplectic_connection_from(conn0: Connection, omega: Callable) -> Connection:
    """Symmetric symplectic connection built from a symmetric one and a closed 2-form."""
    def fn(x):
        W, dW = with_gradient(omega, x)         # dW[j, k, i] = d_i w_jk
        G0 = conn0(x)
        nabla_w = (C.transpose(dW, (2, 0, 1))
                   - C.einsum("mij,mk->ijk", G0, W)
                   - C.einsum("mik,jm->ijk", G0, W))
        B = C.einsum("ijk,km->mij", nabla_w, C.inv(W))
        return G0 + (B + C.transpose(B, (0, 2, 1))) * (1.0 / 3.0)
    return Connection(fn, conn0.dim, f"symplectic({conn0.name})")


# ---------------------------------------------------------------------------
# tensors at a point
# ---------------------------------------------------------------------------

def _point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite coordinates")
    return x


def torsion(conn: Connection, x) -> np.ndarray:
    G = C.value_of(conn(x)) if isinstance(x, Jet) else conn.at(x)
    return G - np.swapaxes(G, 1, 2)


def curvature(conn: Connection, x):
    """R[m, i, j, k]; jet aware when ``x`` is a jet."""
    G, dG = with_gradient(conn.fn, x if isinstance(x, Jet) else _point(x))
    # dG[m, a, b, c] = d_c G^m_ab
    return (C.einsum("mkij->mijk", dG) - C.einsum("mjik->mijk", dG)
            + C.einsum("mjs,ski->mijk", G, G) - C.einsum("mks,sji->mijk", G, G))


def ricci(conn: Connection, x) -> np.ndarray:
    """Ric_ij = R^m_imj."""
    return np.einsum("mimj->ij", curvature(conn, x))


def curvature_operator(R: np.ndarray, X, Y) -> np.ndarray:
    """Matrix of Z -> R(X, Y) Z."""
    return np.einsum("mijk,j,k->mi", R, X, Y)


def sectional_curvature(conn: Connection, g: Callable, x, X, Y) -> float:
    R = curvature(conn, x)
    gm = np.asarray(C.value_of(g(_point(x))))
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    RXYY = curvature_operator(R, X, Y) @ Y
    num = RXYY @ gm @ X
    den = (X @ gm @ X) * (Y @ gm @ Y) - (X @ gm @ Y) ** 2
    return float(num / den)


def covariant_derivative(conn: Connection, tensor: Callable, signature: str, x) -> np.ndarray:
    """Covariant derivative of a tensor field; the derivative slot comes first.

    ``signature`` lists slot variance, e.g. ``"ll"`` for a 2-form, ``"u"``
    for a vector field, ``"ul"`` for an endomorphism ``Theta[j, i]``.
    """
    if len(signature) > 3 or signature.count("u") > 1 or set(signature) - {"u", "l"}:
        raise UnsupportedError(f"unsupported tensor signature {signature!r}")
    x = _point(x)
    T, dT = with_gradient(tensor, x)
    T = np.asarray(T)
    if T.ndim != len(signature):
        raise UnsupportedError("tensor rank does not match signature")
    G = conn.at(x)
    out = np.moveaxis(np.asarray(dT), -1, 0).copy()
    for pos, kind in enumerate(signature):
        if kind == "u":
            term = np.tensordot(G, T, axes=([2], [pos]))     # (a, k, rest)
            out += np.moveaxis(term, 0, pos + 1)
        else:
            term = np.tensordot(G, T, axes=([0], [pos]))     # (k, a, rest)
            out -= np.moveaxis(term, 1, pos + 1)
    return out


def exterior_derivative(form: Callable, p: int, x) -> np.ndarray:
    """Components of d(form) for a 0-, 1- or 2-form."""
    x = _point(x)
    _, dF = with_gradient(form, x)
    dF = np.asarray(dF)
    if p == 0:
        return dF
    if p == 1:                                  # dF[j, i] = d_i a_j
        return dF.T - dF
    if p == 2:                                  # dF[a, b, c] = d_c W_ab
        return (np.transpose(dF, (2, 0, 1)) + np.transpose(dF, (1, 2, 0)) + dF)
    raise UnsupportedError("exterior derivative implemented for p <= 2")


def symplectic_curvature(conn: Connection, omega: Callable, x) -> np.ndarray:
    """S_ijkl = W_im R^m_jkl."""
    R = curvature(conn, x)
    W = np.asarray(C.value_of(omega(_point(x))))
    return np.einsum("im,mjkl->ijkl", W, R)


def duality_residual(g: Callable, conn: Connection, dual: Connection, x, X, Y, Z) -> np.ndarray:
    """X g(Y,Z) - g(nabla_X Y, Z) - g(Y, nabla*_X Z) for constant-coefficient fields.

    ``X, Y, Z`` may be single vectors or stacks of shape ``(m, dim)``.
    """
    x = _point(x)
    G, dG = with_gradient(g, x)
    G, dG = np.asarray(G), np.asarray(dG)
    D = np.transpose(dG, (2, 0, 1))             # D[k, i, j] = d_k g_ij
    A = conn.at(x)
    B = dual.at(x)
    t = D - np.einsum("mki,mj->kij", A, G) - np.einsum("mkj,im->kij", B, G)
    X, Y, Z = (np.atleast_2d(np.asarray(v, float)) for v in (X, Y, Z))
    return np.einsum("kij,nk,ni,nj->n", t, X, Y, Z)


def smat_consistency(g: Callable, conn: Connection, dual: Connection, x, X, Y, Z):
    """Residuals of the three conditions for a statistical manifold admitting torsion."""
    x = _point(x)
    T = torsion(conn, x)
    Tstar = torsion(dual, x)
    gm = np.asarray(C.value_of(g(x)))
    Dg = covariant_derivative(conn, g, "ll", x)
    Dsg = covariant_derivative(dual, g, "ll", x)
    X, Y, Z = (np.asarray(v, float) for v in (X, Y, Z))
    gT = np.einsum("kl,kij,i,j,l->", gm, Tstar, X, Y, Z)
    lhs = np.einsum("kij,k,i,j->", Dg, X, Y, Z) - np.einsum("kij,k,i,j->", Dg, Y, X, Z)
    lhs_s = np.einsum("kij,k,i,j->", Dsg, X, Y, Z) - np.einsum("kij,k,i,j->", Dsg, Y, X, Z)
    return float(np.max(np.abs(T))), float(abs(lhs - gT)), float(abs(lhs_s + gT))


# ---------------------------------------------------------------------------
# curves and transport
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    """Jet-aware map t -> coordinates on [0, 1]."""

    fn: Callable
    name: str = "curve"

    def position_velocity(self, t: float):
        pos, vel = with_gradient(lambda s: self.fn(s[0]), np.array([t]))
        return np.asarray(pos), np.asarray(vel)[..., 0]


def parallel_transport(conn: Connection, curve: Curve, v0, steps: int = 1000,
                       return_path: bool = False):
    """Solve v' = -G(c)(c', v) along ``curve``; ``v0`` may hold several columns."""
    v0 = np.asarray(v0, dtype=float)
    cache = {}      # RK4 only visits half-step nodes; both midpoint stages share one

    def rhs(t, v):
        node = int(round(2 * steps * t))
        if node not in cache:
            pos, vel = curve.position_velocity(node / (2.0 * steps))
            cache[node] = np.einsum("kij,i->kj", conn.at(pos), vel)
        return -np.tensordot(cache[node], v, axes=1)

    path = C.integrate_ode(rhs, v0, (0.0, 1.0), steps)
    return path if return_path else path[-1]


def geodesic_rhs(conn: Connection):
    def rhs(t, state):
        n = state.size // 2
        x, v = state[:n], state[n:]
        acc = -np.einsum("kij,i,j->k", conn.at(x), v, v)
        return np.concatenate([v, acc])
    return rhs


def geodesic_shoot(conn: Connection, g: Callable, p, q, steps: int = 200, v_guess=None):
    """Initial velocity of the geodesic from p to q on [0, 1] and its length.

    The length integrates the metric speed along the integrated path.
    """
    p, q = _point(p), _point(q)
    rhs = geodesic_rhs(conn)

    def miss(v):
        path = C.integrate_ode(rhs, np.concatenate([p, v]), (0.0, 1.0), steps)
        return path[-1, : p.size] - q

    guess = q - p if v_guess is None else np.asarray(v_guess, float)
    sol = root(miss, guess, method="hybr", options={"xtol": 1e-14})
    if not sol.success and np.max(np.abs(miss(sol.x))) > 1e-10:
        raise DomainError(f"geodesic shooting failed: {sol.message}")
    path = C.integrate_ode(rhs, np.concatenate([p, sol.x]), (0.0, 1.0), steps)
    n = p.size
    speeds = np.array([np.sqrt(s[n:] @ np.asarray(C.value_of(g(s[:n]))) @ s[n:]) for s in path])
    length = simpson(speeds, x=np.linspace(0.0, 1.0, steps + 1))
    return sol.x, float(length)
