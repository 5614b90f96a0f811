"""Parametric families, Fisher geometry, divergences and the probability simplex.

A family is described by a discrete measure (atoms ``x_k`` with base
weights ``mu_k``) and a log-density ``l(theta, x)`` relative to it, so that
``E_theta[f] = sum_k mu_k exp(l(theta, x_k)) f(x_k)``.  Finite families use
fixed atoms; the Gaussian family uses Gauss-Hermite nodes centred at the
evaluation point, with base weights chosen so the centre density integrates
exactly.  Moving ``theta`` away from the centre reweights the same nodes,
which keeps every expectation differentiable in ``theta``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import calculus as C
from .calculus import Jet, with_derivatives, with_gradient
from .errors import DomainError, InvalidFamilyError, InvalidMeasureError
from .geometry import Connection, box_sampler
from .report import REPORT, CheckReport, check

NORMALIZATION_TOL = 1e-10
SIMPLEX_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParametricFamily:
    """``log_density(theta, atoms)`` returns one value per atom (jet aware in theta).

    ``measure(theta_value)`` returns ``(atoms, base_weights)``.
    """

    name: str
    param_dim: int
    log_density: Callable
    measure: Callable
    sampler: Callable | None = None
    designated: tuple = ()
    notes: dict = field(default_factory=dict)

    def points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        des = np.array(self.designated, dtype=float).reshape(-1, self.param_dim)
        return np.vstack([des, self.sampler(rng, count)])

    def expectation(self, theta, f: Callable):
        """E_theta[f(atoms)] where ``f`` returns one row per atom."""
        atoms, base = self.measure(np.asarray(C.value_of(theta), dtype=float))
        dens = base * C.exp(self.log_density(theta, atoms))
        return C.einsum("k,k...->...", dens, f(atoms))

    def check_normalized(self, theta, tol: float = NORMALIZATION_TOL) -> float:
        theta = np.asarray(theta, dtype=float)
        atoms, base = self.measure(theta)
        total = float(np.sum(base * np.exp(self.log_density(theta, atoms))))
        if not np.isfinite(total) or abs(total - 1.0) > tol:
            raise InvalidFamilyError(f"{self.name}: densities sum to {total!r} at {theta}")
        return total


def finite_measure(atoms, weights=None):
    atoms = np.asarray(atoms, dtype=float)
    base = np.ones(len(atoms)) if weights is None else np.asarray(weights, dtype=float)
    if base.shape != (len(atoms),) or np.any(base <= 0):
        raise InvalidMeasureError("base weights must be positive, one per atom")
    return lambda theta: (atoms, base)


def bernoulli_family() -> ParametricFamily:
    def logp(theta, atoms):
        t = theta[0]
        return C.stack([C.log(1.0 - t), C.log(t)])
    return ParametricFamily("bernoulli", 1, logp, finite_measure([0.0, 1.0]),
                            box_sampler([0.05], [0.95]), ((0.5,), (0.3,)))


def categorical_family(n: int) -> ParametricFamily:
    """Probability simplex with the first ``n`` probabilities as coordinates."""
    def logp(theta, atoms):
        probs = [theta[i] for i in range(n)]
        probs.append(1.0 - C.total(theta))
        return C.log(C.stack(probs))

    def sample(rng, count):
        return simplex_sample(rng, n, count, margin=0.02)[:, :n]

    centre = tuple([1.0 / (n + 1)] * n)
    generic = tuple(0.1 * (i + 1) for i in range(n))
    return ParametricFamily(f"simplex{n}", n, logp, finite_measure(np.arange(n + 1)),
                            sample, (centre, generic))


def _gaussian_logp(theta, x):
    mu, sigma = theta[0], theta[1]
    return -0.5 * C.square((x - mu) / sigma) - C.log(sigma) - 0.5 * np.log(2.0 * np.pi)


def gaussian_family() -> ParametricFamily:
    """Normal(mu, sigma) with theta = (mu, sigma)."""
    nodes, weights = C.hermite_rule()

    def measure(theta):
        mu, sigma = float(theta[0]), float(theta[1])
        if sigma <= 0:
            raise DomainError("sigma must be positive")
        atoms = mu + sigma * nodes
        base = weights / np.exp(_gaussian_logp(theta, atoms))
        return atoms, base

    return ParametricFamily("gaussian", 2, _gaussian_logp, measure,
                            box_sampler([-1.0, 0.5], [1.0, 2.0]), ((0.0, 1.0), (0.3, 1.5)))


def simplex_sample(rng: np.random.Generator, n: int, count: int, margin: float = SIMPLEX_MARGIN):
    """Uniform points of the open n-simplex (n + 1 probabilities) with every entry >= margin."""
    out = []
    while len(out) < count:
        p = rng.dirichlet(np.ones(n + 1))
        if p.min() >= margin:
            out.append(p)
    return np.array(out).reshape(count, n + 1)


# ---------------------------------------------------------------------------
# Fisher metric and its relatives
# ---------------------------------------------------------------------------

def _log_terms(fam: ParametricFamily, theta, count: int):
    """Log-density and its first ``count`` theta-derivatives at the measure's atoms."""
    atoms, base = fam.measure(np.asarray(C.value_of(theta), dtype=float))
    terms = with_derivatives(lambda t: fam.log_density(t, atoms), theta, count)
    return base, terms


def fisher_metric(fam: ParametricFamily, theta):
    """g_ij = E[d_i l d_j l]; jet aware in ``theta``."""
    base, (l, s) = _log_terms(fam, theta, 1)
    dens = base * C.exp(l)
    return C.einsum("k,ki,kj->ij", dens, s, s)


def fisher_metric_hessian_form(fam: ParametricFamily, theta) -> np.ndarray:
    """g_ij = -E[d_i d_j l]."""
    base, (l, _, H) = _log_terms(fam, np.asarray(theta, float), 2)
    return -np.einsum("k,kij->ij", base * np.exp(l), H)


def fisher_metric_sqrt_form(fam: ParametricFamily, theta) -> np.ndarray:
    """g_ij = 4 sum mu_k d_i sqrt(p_k) d_j sqrt(p_k)."""
    theta = np.asarray(theta, dtype=float)
    atoms, base = fam.measure(theta)
    _, root = with_gradient(lambda t: C.exp(0.5 * fam.log_density(t, atoms)), theta)
    return 4.0 * np.einsum("k,ki,kj->ij", base, root, root)


def fisher_field(fam: ParametricFamily) -> Callable:
    return lambda theta: fisher_metric(fam, theta)


def fisher_agreement(fam: ParametricFamily, theta) -> float:
    """Largest pairwise gap between the three Fisher forms."""
    theta = np.asarray(theta, dtype=float)
    fam.check_normalized(theta)
    a = np.asarray(fisher_metric(fam, theta))
    b = fisher_metric_hessian_form(fam, theta)
    c = fisher_metric_sqrt_form(fam, theta)
    return float(max(np.max(np.abs(a - b)), np.max(np.abs(a - c)), np.max(np.abs(b - c))))


def amari_chentsov(fam: ParametricFamily, theta) -> np.ndarray:
    """T_ijk = E[d_i l d_j l d_k l]."""
    base, (l, s) = _log_terms(fam, np.asarray(theta, float), 1)
    return np.einsum("k,ki,kj,kl->ijl", base * np.exp(l), s, s, s)


def alpha_connection_lower(fam: ParametricFamily, theta, a: float):
    """Gamma^a_{ij:k} = E[d_i d_j l d_k l] + (1 - a)/2 E[d_i l d_j l d_k l]; jet aware."""
    base, (l, s, H) = _log_terms(fam, theta, 2)
    dens = base * C.exp(l)
    return (C.einsum("k,kij,kl->ijl", dens, H, s)
            + (0.5 * (1.0 - a)) * C.einsum("k,ki,kj,kl->ijl", dens, s, s, s))


def alpha_connection_coeffs(fam: ParametricFamily, theta, a: float):
    """Gamma[m, i, j] = g^{mk} Gamma^a_{ij:k}."""
    lower = alpha_connection_lower(fam, theta, a)
    return C.einsum("mk,ijk->mij", C.inv(fisher_metric(fam, theta)), lower)


def alpha_connection(fam: ParametricFamily, a: float) -> Connection:
    return Connection(lambda t: alpha_connection_coeffs(fam, t, a), fam.param_dim,
                      f"{fam.name}-alpha[{a:g}]")


def alpha_connection_pair(fam: ParametricFamily, a: float) -> tuple:
    """(nabla^a, nabla^-a) sharing one evaluation per point; jets take the general path."""
    memo = {}

    def both(theta):
        key = theta.tobytes()
        if key not in memo:
            memo.clear()
            base, (l, s, H) = _log_terms(fam, theta, 2)
            dens = base * np.exp(l)
            ginv = C.inv(np.einsum("k,ki,kj->ij", dens, s, s))
            first = np.einsum("k,kij,kl->ijl", dens, H, s)
            cubic = np.einsum("k,ki,kj,kl->ijl", dens, s, s, s)
            memo[key] = tuple(np.einsum("mk,ijk->mij", ginv, first + 0.5 * (1.0 - b) * cubic)
                              for b in (a, -a))
        return memo[key]

    def side(index, b):
        def fn(theta):
            if isinstance(theta, Jet):
                return alpha_connection_coeffs(fam, theta, b)
            return both(np.asarray(theta, dtype=float))[index]
        return Connection(fn, fam.param_dim, f"{fam.name}-alpha[{b:g}]")

    return side(0, a), side(1, -a)


# ---------------------------------------------------------------------------
# divergences and the Eguchi construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Divergence:
    """Two-point function D(theta1, theta2), jet aware in both arguments."""

    fn: Callable
    dim: int
    name: str = "divergence"
    report: CheckReport | None = None

    def __call__(self, t1, t2):
        return self.fn(t1, t2)

    def joint(self, u):
        return self.fn(u[: self.dim], u[self.dim:])


def _diagonal(theta):
    return C.concatenate([theta, theta]) if isinstance(theta, Jet) else np.concatenate([theta, theta])


@dataclass(frozen=True)
class EguchiStructure:
    metric: Callable
    conn: Connection
    dual: Connection


def eguchi_structure(D: Divergence) -> EguchiStructure:
    """(g, nabla, nabla*) from mixed derivatives of D on the diagonal.

    g_ij = -d1_i d2_j D, Gamma_{ij,k} = -d1_i d1_j d2_k D,
    Gamma*_{ij,k} = -d2_i d2_j d1_k D.
    """
    n = D.dim

    def metric(theta):
        H = with_derivatives(D.joint, _diagonal(theta), 2)[2]
        return -1.0 * H[:n, n:]

    def lowered(theta, first, second):
        T = with_derivatives(D.joint, _diagonal(theta), 3)[3]
        return -1.0 * T[first, first, second]

    def conn_fn(first, second):
        def fn(theta):
            g = metric(theta)
            if not isinstance(g, Jet):
                C.check_condition(g, "diagonal Hessian of the divergence")
            return C.einsum("mk,ijk->mij", C.inv(g), lowered(theta, first, second))
        return fn

    one, two = slice(0, n), slice(n, 2 * n)
    return EguchiStructure(metric,
                           Connection(conn_fn(one, two), n, f"eguchi({D.name})"),
                           Connection(conn_fn(two, one), n, f"eguchi*({D.name})"))


def family_kl(fam: ParametricFamily) -> Divergence:
    """KL(p_theta1 || p_theta2) on a finite family in chart coordinates."""
    def fn(t1, t2):
        atoms, base = fam.measure(np.asarray(C.value_of(t1), dtype=float))
        l1, l2 = fam.log_density(t1, atoms), fam.log_density(t2, atoms)
        return C.total(base * C.exp(l1) * (l1 - l2))
    return Divergence(fn, fam.param_dim, f"kl[{fam.name}]")


def bregman_divergence(potential: Callable, dim: int, check_points=None) -> Divergence:
    """D(t1, t2) = Phi(t1) - Phi(t2) - <grad Phi(t2), t1 - t2>.

    With ``check_points`` the Hessian of Phi is inspected there; a negative
    eigenvalue raises a warning and is recorded in ``report``.
    """
    def fn(t1, t2):
        p2, grad2 = with_gradient(potential, t2)
        return potential(t1) - p2 - C.einsum("i,i->", grad2, t1 - t2)

    report = None
    if check_points is not None:
        lowest = min(float(np.linalg.eigvalsh(np.asarray(C.derivatives(potential, p, 2)[2]))[0])
                     for p in np.atleast_2d(check_points))
        report = CheckReport("bregman-convexity", [
            check("min_hessian_eigenvalue", "", lowest, None, len(np.atleast_2d(check_points)), REPORT)])
        if lowest < 0:
            warnings.warn(f"potential is not convex at the sampled points (min eigenvalue {lowest:.3g})")
    return Divergence(fn, dim, "bregman", report)


# ---------------------------------------------------------------------------
# exponential families
# ---------------------------------------------------------------------------

def logsumexp_potential(atoms, weights) -> Callable:
    """Phi(z) = log sum_k mu_k exp(<z, x_k>), jet aware and overflow safe."""
    atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
    logw = np.log(np.asarray(weights, dtype=float))

    def phi(z):
        s = C.einsum("ki,i->k", atoms, z) + logw
        shift = float(np.max(C.value_of(s)))
        return shift + C.log(C.total(C.exp(s - shift)))
    return phi


@dataclass(frozen=True)
class ExponentialFamily:
    atoms: np.ndarray
    weights: np.ndarray
    potential: Callable
    family: ParametricFamily

    def hessian(self, z) -> np.ndarray:
        return np.asarray(C.derivatives(self.potential, np.asarray(z, float), 2)[2])


def exponential_family_from_measure(atoms, weights, name: str = "expfam",
                                    domain=None, designated=()) -> ExponentialFamily:
    """p(x_k | z) = mu_k exp(<z, x_k> - Phi(z)) over the given atoms."""
    atoms = np.asarray(atoms, dtype=float)
    if atoms.size == 0:
        raise InvalidFamilyError("empty support")
    atoms = atoms.reshape(len(atoms), -1)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(atoms),) or np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise InvalidMeasureError("weights must be positive and finite, one per atom")
    dim = atoms.shape[1]
    phi = logsumexp_potential(atoms, weights)

    def logp(z, xs):
        return C.einsum("ki,i->k", xs, z) - phi(z)

    low, high = ([-1.0] * dim, [1.0] * dim) if domain is None else domain
    fam = ParametricFamily(name, dim, logp, finite_measure(atoms, weights), box_sampler(low, high),
                           tuple(designated) or (tuple([0.0] * dim),))
    return ExponentialFamily(atoms, weights, phi, fam)


def mixture_family(table, name: str = "mixture", domain=None, designated=()) -> ParametricFamily:
    """Finite family whose probabilities are affine in theta: p_k = table[k, 0] + table[k, 1:] . theta.

    Columns must sum to (1, 0, ..., 0); positivity is checked at the designated
    points and the domain corners.
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[1] < 2 or table.shape[0] < 2:
        raise InvalidFamilyError("mixture table needs shape (atoms, 1 + dim) with at least 2 atoms")
    dim = table.shape[1] - 1
    sums = table.sum(axis=0)
    if abs(sums[0] - 1.0) > 1e-12 or np.any(np.abs(sums[1:]) > 1e-12):
        raise InvalidFamilyError(f"{name}: probabilities do not sum to one (column sums {sums})")
    low, high = ([-0.1] * dim, [0.1] * dim) if domain is None else domain
    designated = tuple(tuple(map(float, p)) for p in designated) or (tuple([0.0] * dim),)
    corners = np.array(np.meshgrid(*zip(low, high))).reshape(dim, -1).T
    for p in list(designated) + list(corners):
        probs = table[:, 0] + table[:, 1:] @ np.asarray(p)
        if probs.min() <= 0:
            raise InvalidFamilyError(f"{name}: non-positive probability at {p}")
    const, lin = table[:, 0], table[:, 1:]

    def logp(theta, atoms):
        return C.log(const + C.einsum("ki,i->k", lin, theta))

    return ParametricFamily(name, dim, logp, finite_measure(np.arange(len(table))),
                            box_sampler(low, high), designated)


def standard_families() -> dict:
    rng = np.random.default_rng(11)
    ef2 = exponential_family_from_measure([[0.0], [1.0]], [1.0, 1.0], "expfam2",
                                          ([-2.0], [2.0]), ((0.0,), (0.7,)))
    ef3 = exponential_family_from_measure(rng.normal(size=(3, 2)), rng.uniform(0.5, 2.0, 3),
                                          "expfam3", ([-1.0, -1.0], [1.0, 1.0]),
                                          ((0.0, 0.0), (0.3, -0.4)))
    fams = [bernoulli_family(), gaussian_family(), categorical_family(2), categorical_family(3),
            ef2.family, ef3.family]
    out = {f.name: f for f in fams}
    out["expfam2"].notes["potential"] = ef2.potential
    out["expfam3"].notes["potential"] = ef3.potential
    return out


# ---------------------------------------------------------------------------
# the probability simplex
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplexPoint:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise DomainError("a simplex point needs at least two probabilities")
        if not np.all(np.isfinite(p)) or abs(p.sum() - 1.0) > 1e-12:
            raise DomainError(f"probabilities must sum to 1 (got {p.sum()!r})")
        if p.min() < SIMPLEX_MARGIN:
            raise DomainError(f"point is within {SIMPLEX_MARGIN:g} of the simplex boundary")
        object.__setattr__(self, "probs", p)

    @property
    def coords(self) -> np.ndarray:
        return self.probs[:-1]

    @classmethod
    def from_coords(cls, coords) -> "SimplexPoint":
        c = np.asarray(coords, dtype=float)
        return cls(np.append(c, 1.0 - c.sum()))


def _probs(p) -> np.ndarray:
    return p.probs if isinstance(p, SimplexPoint) else SimplexPoint(p).probs


def _pair(p, q):
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise DomainError("points live on different simplices")
    return p, q


def kl_divergence(p, q) -> float:
    p, q = _pair(p, q)
    return float(np.sum(p * np.log(p / q)))


def hellinger(p, q) -> float:
    p, q = _pair(p, q)
    return float(np.sqrt(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)))


def fisher_rao_distance(p, q) -> float:
    """Arc length between 2 sqrt(p) and 2 sqrt(q) on the radius-2 sphere."""
    p, q = _pair(p, q)
    bc = min(1.0, float(np.sum(np.sqrt(p * q))))
    return 2.0 * float(np.arccos(bc))


def simplex_metric(theta):
    """Closed-form Fisher metric of the simplex chart, jet aware."""
    n = np.asarray(C.value_of(theta)).size
    last = C.reciprocal(1.0 - C.total(theta))
    return C.einsum("i,ij->ij", C.reciprocal(theta), np.eye(n)) + last * np.ones((n, n))


def simplex_christoffel(theta) -> np.ndarray:
    """Closed-form Levi-Civita coefficients of the simplex Fisher metric, Gamma[m, i, j].

    Lowered: Gamma_{ij,k} = (1/theta_n^2 - delta_ijk / theta_i^2) / 2 with
    theta_n = 1 - sum(theta); raised with g^{-1} = diag(theta) - theta theta^T.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    last = 1.0 - theta.sum()
    lower = np.full((n, n, n), 0.5 / last ** 2)
    idx = np.arange(n)
    lower[idx, idx, idx] -= 0.5 / theta ** 2
    inv = np.diag(theta) - np.outer(theta, theta)
    return np.einsum("mk,ijk->mij", inv, lower)
