"""Geometry of faithful density matrices (dimension at most 4).

Qubit states use the Bloch chart ``rho(r) = (I + r . sigma) / 2`` whose
coordinate tangents are ``sigma_a / 2``.  Matrix functions of jets go
through :func:`infogeo.calculus.matrix_function`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import calculus as C
from .calculus import Jet
from .errors import ConditionError, DomainError, UnsupportedError
from .geometry import Connection, dual_connection, zero_connection
from .infogeo import Divergence, eguchi_structure
from .report import REPORT, CheckReport, check

MAX_DIM = 4
HERMITIAN_TOL = 1e-12
FAITHFUL_MARGIN = 1e-6

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


# ---------------------------------------------------------------------------
# states and tangents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("density matrix must be square")
        if m.shape[0] > MAX_DIM:
            raise UnsupportedError(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > HERMITIAN_TOL:
            raise DomainError("density matrix does not have unit trace")
        m = 0.5 * (m + m.conj().T)
        lam = np.linalg.eigvalsh(m)
        if lam[0] <= 0:
            raise DomainError("density matrix is not faithful")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def _rho(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else DensityMatrix(rho).entries


def tangent(X) -> np.ndarray:
    """Validate a traceless Hermitian tangent vector."""
    X = np.asarray(X, dtype=complex)
    if np.max(np.abs(X - X.conj().T)) > HERMITIAN_TOL:
        raise DomainError("tangent is not Hermitian")
    if abs(np.trace(X)) > HERMITIAN_TOL:
        raise DomainError("tangent is not traceless")
    return X


def random_state(rng: np.random.Generator, d: int, min_eig: float = 0.05) -> DensityMatrix:
    """Random faithful state with spectrum bounded below by ``min_eig``."""
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, _ = np.linalg.qr(A)
    lam = rng.dirichlet(np.ones(d)) * (1.0 - d * min_eig) + min_eig
    return DensityMatrix((Q * lam) @ Q.conj().T)


def random_tangent(rng: np.random.Generator, d: int) -> np.ndarray:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = 0.5 * (A + A.conj().T)
    return H - np.trace(H) / d * np.eye(d)


# ---------------------------------------------------------------------------
# SLD
# ---------------------------------------------------------------------------

def sld_solve(rho, X) -> np.ndarray:
    """L with rho L + L rho = 2 X, solved in the eigenbasis of rho."""
    rho, X = _rho(rho), tangent(X)
    lam, U = np.linalg.eigh(rho)
    if lam[0] < FAITHFUL_MARGIN:
        raise ConditionError(f"smallest eigenvalue {lam[0]:.3g} below {FAITHFUL_MARGIN:g}")
    Xe = U.conj().T @ X @ U
    L = U @ (2.0 * Xe / (lam[:, None] + lam[None, :])) @ U.conj().T
    return 0.5 * (L + L.conj().T)


def sld_residual(rho, X, L) -> float:
    rho = _rho(rho)
    return float(np.max(np.abs(rho @ L + L @ rho - 2.0 * np.asarray(X))))


def sld_metric(rho, X, Y) -> float:
    """(1/2) Tr rho (L_X L_Y + L_Y L_X)."""
    rho = _rho(rho)
    LX, LY = sld_solve(rho, X), sld_solve(rho, Y)
    return float(0.5 * np.real(np.trace(rho @ (LX @ LY + LY @ LX))))


def sld_metric_matrix(rho, tangents) -> np.ndarray:
    return np.array([[sld_metric(rho, X, Y) for Y in tangents] for X in tangents])


def exponential_connection_torsion(rho, X, Y) -> np.ndarray:
    """(1/4) [[L_X, L_Y], rho]."""
    rho = _rho(rho)
    LX, LY = sld_solve(rho, X), sld_solve(rho, Y)
    inner = LX @ LY - LY @ LX
    return 0.25 * (inner @ rho - rho @ inner)


# ---------------------------------------------------------------------------
# relative entropy and BKM
# ---------------------------------------------------------------------------

def von_neumann_relative_entropy(rho, sigma) -> float:
    """Tr rho (log rho - log sigma) through eigendecompositions."""
    rho, sigma = _rho(rho), _rho(sigma)
    if np.linalg.eigvalsh(sigma)[0] < FAITHFUL_MARGIN:
        raise DomainError("second state is (nearly) singular")
    val = np.trace(rho @ (C.matrix_function(rho, "log") - C.matrix_function(sigma, "log")))
    return float(np.real(val))


def _relative_entropy_jet(a, b):
    """Tr a (log a - log b) for jets or arrays."""
    diff = C.matrix_function(a, "log") - C.matrix_function(b, "log")
    return C.real(C.trace(C.matmul(a, diff)))


def _affine_state(rho, tangents, theta):
    return rho + C.einsum("i,iab->ab", theta, tangents)


def bkm_metric(rho, tangents) -> np.ndarray:
    """g_ij = Tr(X_j dlog_rho[X_i]) from a first-order jet of log(rho + theta . X)."""
    rho = _rho(rho)
    T = np.array([tangent(X) for X in tangents])
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < FAITHFUL_MARGIN:
        raise DomainError("state too close to the boundary of the faithful cone")
    seed = Jet.variables(np.zeros(len(T)), 1)
    dlog = C.matrix_function(_affine_state(rho, T, seed), "log").derivative(1)   # [i, a, b]
    g = np.real(np.einsum("jab,iba->ij", T, dlog))
    return 0.5 * (g + g.T)


def relative_entropy_divergence(rho, tangents) -> Divergence:
    """D(theta1, theta2) = S(rho_theta1 || rho_theta2) on the affine chart rho + theta . X."""
    rho = _rho(rho)
    T = np.array([tangent(X) for X in tangents])

    def fn(t1, t2):
        return _relative_entropy_jet(_affine_state(rho, T, t1), _affine_state(rho, T, t2))
    return Divergence(fn, len(T), "von-neumann")


def bkm_metric_eguchi(rho, tangents) -> np.ndarray:
    """BKM metric as -d1 d2 of the relative entropy at the diagonal."""
    eg = eguchi_structure(relative_entropy_divergence(rho, tangents))
    return np.asarray(eg.metric(np.zeros(len(tangents))))


# ---------------------------------------------------------------------------
# Bloch chart
# ---------------------------------------------------------------------------

BLOCH_TANGENTS = 0.5 * PAULI


def bloch_state(r):
    """(I + r . sigma) / 2; jet aware."""
    return 0.5 * np.eye(2) + C.einsum("a,aij->ij", r, BLOCH_TANGENTS)


def _check_ball(r):
    rr = np.asarray(C.value_of(r), dtype=float)
    if np.dot(rr, rr) >= 1.0:
        raise DomainError("Bloch vector outside the open unit ball")


def bloch_sld_metric(r):
    """SLD metric in Bloch coordinates via a vectorised Lyapunov solve (jet aware)."""
    _check_ball(r)
    rho = bloch_state(r)
    eye = np.eye(2)
    K = C.einsum("ac,db->abcd", rho, eye) + C.einsum("ac,db->abcd", eye, rho)
    K = K.reshape(4, 4) if isinstance(K, Jet) else np.reshape(K, (4, 4))
    rhs = np.stack([2.0 * X.reshape(4) for X in BLOCH_TANGENTS], axis=1)       # (4, 3)
    L = C.matmul(C.inv(K), rhs)                                                  # (4, 3)
    L = C.transpose(L).reshape(3, 2, 2) if isinstance(L, Jet) else L.T.reshape(3, 2, 2)
    prod = C.einsum("ij,ajk,bki->ab", rho, L, L)
    return C.real(0.5 * (prod + C.transpose(prod)))


def bloch_sld_closed_form(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return np.eye(3) + np.outer(r, r) / (1.0 - r @ r)


def bloch_ball_sampler(radius: float = 0.9):
    def sample(rng, count):
        v = rng.normal(size=(count, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return v * radius * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / 3.0)
    return sample


def mixture_connection() -> Connection:
    """The mixture connection is flat in the (affine) Bloch chart."""
    return zero_connection(3)


def exponential_connection() -> Connection:
    """SLD-dual of the mixture connection."""
    return dual_connection(bloch_sld_metric, mixture_connection())


def bloch_torsion_matrix(r, a: int, b: int) -> np.ndarray:
    """Torsion of the exponential connection at r, as a matrix T(d_a, d_b)."""
    T = exponential_connection().at(np.asarray(r, float))
    comp = T[:, a, b] - T[:, b, a]
    return np.einsum("k,kij->ij", comp, BLOCH_TANGENTS)


def bloch_relative_entropy() -> Divergence:
    return Divergence(lambda r1, r2: _relative_entropy_jet(bloch_state(r1), bloch_state(r2)), 3,
                      "von-neumann-bloch")


# ---------------------------------------------------------------------------
# comparison with the Fubini-Study metric
# ---------------------------------------------------------------------------

def _stereographic(n):
    """z = (n_x + i n_y) / (1 + n_z) as the real pair (Re z, Im z); jet aware."""
    s = C.reciprocal(1.0 + n[2])
    return C.stack([n[0] * s, n[1] * s])


def fubini_study_pullback(n, t) -> float:
    """FS metric (1 + |z|^2)^-2 |dz|^2 pulled back to the unit sphere, evaluated on t."""
    n = np.asarray(n, dtype=float)
    z, J = C.with_gradient(_stereographic, n)
    dz = np.asarray(J) @ np.asarray(t, dtype=float)
    h = 1.0 / (1.0 + z @ z) ** 2
    return float(h * dz @ dz)


@dataclass(frozen=True)
class FubiniStudyFit:
    radius: float
    constant: float
    spread: float
    isotropy: float
    report: CheckReport


def fubini_study_compare(radius: float, rng: np.random.Generator, samples: int = 24,
                         spread_tol: float = 1e-3) -> FubiniStudyFit:
    """Ratio of the tangential SLD metric at Bloch radius ``radius`` to the FS pullback.

    Tangent directions t are taken orthogonal to the unit direction n; the
    SLD side is evaluated at ``radius * n`` and the FS side at ``n``.  The
    fitted constant is the least-squares ratio, and the spread is
    ``(max - min) / c``.
    """
    if not 0.9 <= radius <= 0.999:
        raise DomainError("radius must lie in [0.9, 0.999]")
    sld_vals, fs_vals = [], []
    while len(sld_vals) < samples:
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        if n[2] < -0.8:                       # keep away from the stereographic pole
            continue
        t = rng.normal(size=3)
        t -= (t @ n) * n
        t /= np.linalg.norm(t)
        g = np.asarray(bloch_sld_metric(radius * n))
        sld_vals.append(float(t @ g @ t))
        fs_vals.append(fubini_study_pullback(n, t))
    sld_vals, fs_vals = np.array(sld_vals), np.array(fs_vals)
    c = float(sld_vals @ fs_vals / (fs_vals @ fs_vals))
    ratios = sld_vals / fs_vals
    spread = float((ratios.max() - ratios.min()) / c)
    isotropy = float(sld_vals.max() - sld_vals.min())
    rep = CheckReport("fubini-study", [
        check(f"ratio_spread[r={radius:g}]", "qubit", spread, spread_tol, samples, witness=c),
        check(f"tangential_isotropy[r={radius:g}]", "qubit", isotropy, 1e-9, samples),
    ])
    return FubiniStudyFit(radius, c, spread, isotropy, rep)
