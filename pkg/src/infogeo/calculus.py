"""Truncated Taylor jets, a finite-difference oracle, RK4 and quadrature.

A :class:`Jet` carries the value of an array-valued function together with
all its partial derivatives up to a fixed order with respect to ``nvars``
seed variables.  Coefficient ``k`` has shape ``(nvars,)*k + value_shape``:
derivative axes come first, value axes trail, so ordinary numpy
broadcasting over trailing axes works unchanged on every coefficient.

Functions written with the helpers of this module (``sin``, ``exp``,
``log``, ``einsum``, ``inv`` ...) accept plain arrays or jets, which is how
metrics, forms and log-densities become differentiable.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .errors import (
    ConditionError,
    DomainError,
    IntegrationBlowupError,
    InvalidMeasureError,
    UnsupportedOrderError,
)

MAX_ORDER = 4           # internal cap; public ``partials`` stops at 3
PUBLIC_MAX_ORDER = 3
HERMITE_NODES = 64
COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# jet type
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _shuffles(k: int, m: int):
    """Axis permutations placing ``m`` leading axes at every subset of ``k`` slots."""
    perms = []
    for chosen in combinations(range(k), m):
        rest = [j for j in range(k) if j not in chosen]
        src = [0] * k
        for r, j in enumerate(chosen):
            src[j] = r
        for s, j in enumerate(rest):
            src[j] = m + s
        perms.append(tuple(src))
    return tuple(perms)


def _pad(c: np.ndarray, k: int, nd: int) -> np.ndarray:
    extra = nd - (c.ndim - k)
    if extra > 0:
        c = c.reshape(c.shape[:k] + (1,) * extra + c.shape[k:])
    return c


class Jet:
    """Value plus partial derivatives up to ``order`` in ``nvars`` variables."""

    __array_ufunc__ = None  # make numpy defer to the reflected operators
    __slots__ = ("coeffs", "nvars", "is_seed")

    def __init__(self, coeffs: Sequence[np.ndarray], nvars: int, is_seed: bool = False):
        self.coeffs = tuple(np.asarray(c) for c in coeffs)
        self.nvars = int(nvars)
        self.is_seed = is_seed
        if len(self.coeffs) - 1 > MAX_ORDER:
            raise UnsupportedOrderError(f"jet order {len(self.coeffs) - 1} exceeds {MAX_ORDER}")

    # construction -----------------------------------------------------
    @classmethod
    def variables(cls, x, order: int) -> "Jet":
        """Seed jet for the identity map at ``x`` (a 1-d point)."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError("seed point must be one-dimensional")
        n = x.size
        coeffs = [x.copy()]
        if order >= 1:
            coeffs.append(np.eye(n))
        for k in range(2, order + 1):
            coeffs.append(np.zeros((n,) * (k + 1)))
        return cls(coeffs, n, is_seed=True)

    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value)
        coeffs = [value] + [np.zeros((nvars,) * k + value.shape, dtype=value.dtype)
                            for k in range(1, order + 1)]
        return cls(coeffs, nvars)

    # basic attributes -------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    @property
    def shape(self):
        return self.coeffs[0].shape

    @property
    def ndim(self) -> int:
        return self.coeffs[0].ndim

    @property
    def dtype(self):
        return self.coeffs[0].dtype

    def __len__(self):
        return self.shape[0]

    def __iter__(self):
        for i in range(self.shape[0]):
            yield self[i]

    def __repr__(self):
        return f"Jet(order={self.order}, nvars={self.nvars}, shape={self.shape})"

    def derivative(self, k: int) -> np.ndarray:
        return self.coeffs[k]

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise UnsupportedOrderError("cannot raise the order of a jet")
        return Jet(self.coeffs[: order + 1], self.nvars, self.is_seed)

    def grad(self) -> "Jet":
        """Jet of the gradient; the derivative index becomes the last value axis."""
        if self.order < 1:
            raise UnsupportedOrderError("gradient of an order-0 jet")
        coeffs = [np.moveaxis(self.coeffs[k + 1], 0, -1) for k in range(self.order)]
        return Jet(coeffs, self.nvars)

    # structural ops on value axes -------------------------------------
    def _map(self, fn) -> "Jet":
        return Jet([fn(c, k) for k, c in enumerate(self.coeffs)], self.nvars)

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self._map(lambda c, k: c[(slice(None),) * k + idx])

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return self._map(lambda c, k: c.reshape(c.shape[:k] + tuple(shape)))

    def transpose(self, *axes) -> "Jet":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        return self._map(lambda c, k: c.transpose(tuple(range(k)) + tuple(k + a for a in axes)))

    @property
    def T(self) -> "Jet":
        return self._map(lambda c, k: np.swapaxes(c, -1, -2))

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            return self._map(lambda c, k: c.reshape(c.shape[:k] + (-1,)).sum(axis=-1))
        axes = axis if isinstance(axis, tuple) else (axis,)

        def fn(c, k):
            nd = c.ndim - k
            return c.sum(axis=tuple(k + (a % nd) for a in axes))
        return self._map(fn)

    def trace(self) -> "Jet":
        return self._map(lambda c, k: np.trace(c, axis1=-2, axis2=-1))

    def conj(self) -> "Jet":
        return self._map(lambda c, k: np.conj(c))

    @property
    def real(self) -> "Jet":
        return self._map(lambda c, k: np.real(c))

    @property
    def imag(self) -> "Jet":
        return self._map(lambda c, k: np.imag(c))

    # arithmetic -------------------------------------------------------
    def __neg__(self):
        return self._map(lambda c, k: -c)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            _check_compatible(self, other)
            order = min(self.order, other.order)
            nd = max(self.ndim, other.ndim)
            return Jet([_pad(a, k, nd) + _pad(b, k, nd) for k, (a, b) in
                        enumerate(zip(self.coeffs[: order + 1], other.coeffs[: order + 1]))],
                       self.nvars)
        other = np.asarray(other)
        nd = max(self.ndim, other.ndim)
        coeffs = [_pad(c, k, nd) for k, c in enumerate(self.coeffs)]
        coeffs[0] = coeffs[0] + other
        coeffs[1:] = [np.broadcast_to(c, c.shape[:k + 1] + np.broadcast_shapes(c.shape[k + 1:], other.shape))
                      for k, c in enumerate(coeffs[1:])]
        return Jet(coeffs, self.nvars)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return _bilinear(self, other, np.multiply)

    def __rmul__(self, other):
        return _bilinear(other, self, np.multiply)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return np.asarray(other) * reciprocal(self)

    def __pow__(self, p):
        return power(self, p)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)


def _check_compatible(a: Jet, b: Jet):
    if a.nvars != b.nvars:
        raise ValueError(f"jets over different variable sets ({a.nvars} vs {b.nvars})")


def is_jet(x) -> bool:
    return isinstance(x, Jet)


def value_of(x):
    """Plain value of a jet or array."""
    return x.value if isinstance(x, Jet) else np.asarray(x)


def _bilinear(a, b, op, pad: bool = True) -> Jet:
    """Leibniz rule for a bilinear ``op`` acting on trailing (value) axes."""
    a_jet, b_jet = isinstance(a, Jet), isinstance(b, Jet)
    if not a_jet and not b_jet:
        return op(a, b)
    if not b_jet:
        b = np.asarray(b)
        nd = max(a.ndim, b.ndim) if pad else a.ndim
        return Jet([op(_pad(c, k, nd) if pad else c, b) for k, c in enumerate(a.coeffs)], a.nvars)
    if not a_jet:
        a = np.asarray(a)
        nd = max(a.ndim, b.ndim) if pad else b.ndim
        return Jet([op(a, _pad(c, k, nd) if pad else c) for k, c in enumerate(b.coeffs)], b.nvars)
    _check_compatible(a, b)
    order = min(a.order, b.order)
    if pad:
        nd = max(a.ndim, b.ndim)
        A = [_pad(a.coeffs[m], m, nd) for m in range(order + 1)]
        B = [_pad(b.coeffs[m], m, nd) for m in range(order + 1)]
    else:
        A, B = a.coeffs, b.coeffs
    out = []
    for k in range(order + 1):
        total = None
        for m in range(k + 1):
            x = A[m]
            y = B[k - m]
            x = x.reshape(x.shape[:m] + (1,) * (k - m) + x.shape[m:])
            y = y.reshape((1,) * m + y.shape)
            t = op(x, y)
            if 0 < m < k:
                tail = tuple(range(k, t.ndim))
                parts = [np.transpose(t, perm + tail) for perm in _shuffles(k, m)]
                t = parts[0]
                for p in parts[1:]:
                    t = t + p
            else:
                t = np.broadcast_to(t, (a.nvars,) * k + t.shape[k:]) if k else t
            total = t if total is None else total + t
        out.append(total)
    return Jet(out, a.nvars)


def matmul(a, b):
    """``a @ b`` where either side may be a jet; 1-d operands act as vectors."""
    a_vec = np.ndim(value_of(a)) == 1
    b_vec = np.ndim(value_of(b)) == 1
    if a_vec:
        a = a.reshape(1, -1) if isinstance(a, Jet) else np.reshape(a, (1, -1))
    if b_vec:
        b = b.reshape(-1, 1) if isinstance(b, Jet) else np.reshape(b, (-1, 1))
    out = _bilinear(a, b, np.matmul, pad=True)
    if a_vec and b_vec:
        return out[0, 0]
    if a_vec:
        return out[..., 0, :]
    if b_vec:
        return out[..., 0]
    return out


def _compose_scalar(a: Jet, derivs: Sequence[np.ndarray]) -> Jet:
    """phi(a) from the Taylor coefficients phi^(m)(a.value), m = 0..order."""
    K = a.order
    dtype = np.result_type(*[np.asarray(d) for d in derivs], *a.coeffs)
    out = [np.asarray(derivs[0], dtype=dtype)]
    out += [np.zeros(c.shape, dtype=dtype) for c in a.coeffs[1:]]
    if K == 0:
        return Jet(out, a.nvars)
    delta = Jet([np.zeros_like(a.value)] + list(a.coeffs[1:]), a.nvars)
    power_ = delta
    for m in range(1, K + 1):
        if m > 1:
            power_ = power_ * delta
        f = np.asarray(derivs[m]) / factorial(m)
        for k in range(m, K + 1):
            out[k] = out[k] + power_.coeffs[k] * f
    return Jet(out, a.nvars)


def _unary(x, derivs_fn):
    if isinstance(x, Jet):
        return _compose_scalar(x, derivs_fn(x.value, x.order))
    return derivs_fn(np.asarray(x), 0)[0]


# ---------------------------------------------------------------------------
# elementary functions (jet aware)
# ---------------------------------------------------------------------------

def exp(x):
    def d(v, K):
        e = np.exp(v)
        return [e] * (K + 1)
    return _unary(x, d)


def log(x):
    def d(v, K):
        out = [np.log(v)]
        for m in range(1, K + 1):
            out.append((-1) ** (m - 1) * factorial(m - 1) / v ** m)
        return out
    return _unary(x, d)


def sin(x):
    def d(v, K):
        s, c = np.sin(v), np.cos(v)
        cyc = [s, c, -s, -c]
        return [cyc[m % 4] for m in range(K + 1)]
    return _unary(x, d)


def cos(x):
    def d(v, K):
        s, c = np.sin(v), np.cos(v)
        cyc = [c, -s, -c, s]
        return [cyc[m % 4] for m in range(K + 1)]
    return _unary(x, d)


def power(x, p: float):
    def d(v, K):
        out = []
        coef = 1.0
        for m in range(K + 1):
            out.append(coef * v ** (p - m) if coef != 0 else np.zeros_like(v * 1.0))
            coef *= (p - m)
        return out
    return _unary(x, d)


def sqrt(x):
    return power(x, 0.5)


def reciprocal(x):
    return power(x, -1.0)


def square(x):
    return x * x


# ---------------------------------------------------------------------------
# array helpers (jet aware)
# ---------------------------------------------------------------------------

def _as_jets(items):
    jets = [it for it in items if isinstance(it, Jet)]
    if not jets:
        return None
    n = jets[0].nvars
    order = min(j.order for j in jets)
    out = []
    for it in items:
        if isinstance(it, Jet):
            _check_compatible(it, jets[0])
            out.append(it.truncate(order) if it.order > order else it)
        else:
            out.append(Jet.constant(np.asarray(it), n, order))
    return out


def stack(items, axis: int = 0):
    """``np.stack`` for a mixture of jets and arrays."""
    jets = _as_jets(items)
    if jets is None:
        return np.stack([np.asarray(i) for i in items], axis=axis)
    shapes = {j.shape for j in jets}
    if len(shapes) > 1:
        full = np.broadcast_shapes(*shapes)
        jets = [j if j.shape == full else j + np.zeros(full) for j in jets]
    nd = jets[0].ndim + 1
    ax = axis % nd
    coeffs = [np.stack([j.coeffs[k] for j in jets], axis=k + ax) for k in range(jets[0].order + 1)]
    return Jet(coeffs, jets[0].nvars)


def concatenate(items, axis: int = 0):
    jets = _as_jets(items)
    if jets is None:
        return np.concatenate([np.asarray(i) for i in items], axis=axis)
    ax = axis % jets[0].ndim
    coeffs = [np.concatenate([j.coeffs[k] for j in jets], axis=k + ax) for k in range(jets[0].order + 1)]
    return Jet(coeffs, jets[0].nvars)


def array(nested):
    """Build an array (or jet) from nested lists of scalars, arrays and jets."""
    if isinstance(nested, (list, tuple)):
        return stack([array(e) for e in nested])
    return nested


def _split_subscripts(subscripts: str):
    lhs, out = subscripts.replace(" ", "").split("->")
    return lhs.split(","), out


def einsum(subscripts: str, *operands):
    """Explicit-output ``np.einsum`` over value axes; jets use the Leibniz rule."""
    if not any(isinstance(o, Jet) for o in operands):
        return np.einsum(subscripts, *operands)
    ins, out = _split_subscripts(subscripts)
    if len(ins) != len(operands):
        raise ValueError("operand count does not match subscripts")
    if len(operands) == 1:
        (a,) = operands
        return a._map(lambda c, k: np.einsum(f"...{ins[0]}->...{out}", c))
    cur, cur_sub = operands[0], ins[0]
    for idx in range(1, len(operands)):
        nxt, nxt_sub = operands[idx], ins[idx]
        later = "".join(ins[idx + 1:]) + out
        keep = "".join(ch for ch in dict.fromkeys(cur_sub + nxt_sub) if ch in later)
        cur = _einsum2(cur_sub, nxt_sub, keep, cur, nxt)
        cur_sub = keep
    if cur_sub != out:
        cur = einsum(f"{cur_sub}->{out}", cur)
    return cur


def _einsum2(sa: str, sb: str, so: str, a, b):
    a_jet, b_jet = isinstance(a, Jet), isinstance(b, Jet)
    if not a_jet and not b_jet:
        return np.einsum(f"{sa},{sb}->{so}", a, b)
    pa = f"...{sa}" if a_jet else sa
    pb = f"...{sb}" if b_jet else sb
    subscripts = f"{pa},{pb}->...{so}"
    return _bilinear(a, b, lambda x, y: np.einsum(subscripts, x, y), pad=False)


def eye_like(n: int):
    return np.eye(n)


def check_condition(m: np.ndarray, what: str = "matrix"):
    m = np.asarray(m)
    if not np.all(np.isfinite(m)):
        raise DomainError(f"non-finite {what}")
    c = np.linalg.cond(m)
    if not np.isfinite(c) or c > COND_LIMIT:
        raise ConditionError(f"{what} condition number {c:.3g} exceeds {COND_LIMIT:.0e}")


def inv(a, check: bool = True):
    """Matrix inverse; jets use the terminating Neumann series."""
    v = value_of(a)
    if check:
        check_condition(v)
    v_inv = np.linalg.inv(v)
    if not isinstance(a, Jet):
        return v_inv
    # (A0 + d)^-1 = sum_m (-A0^-1 d)^m A0^-1 ; d is nilpotent of degree order+1
    d = a - v
    step = -(v_inv @ d)
    term = Jet.constant(v_inv, a.nvars, a.order)
    total = term
    for _ in range(a.order):
        term = step @ term
        total = total + term
    return total


def solve(a, b, check: bool = True):
    return inv(a, check=check) @ b


def trace(a):
    if isinstance(a, Jet):
        return a.trace()
    return np.trace(a, axis1=-2, axis2=-1)


def conj(a):
    return a.conj() if isinstance(a, Jet) else np.conj(a)


def real(a):
    return a.real if isinstance(a, Jet) else np.real(a)


def transpose(a, axes=None):
    if isinstance(a, Jet):
        return a.transpose(axes) if axes is not None else a.transpose()
    return np.transpose(a, axes)


def swap_last(a):
    return a.T if isinstance(a, Jet) else np.swapaxes(a, -1, -2)


def total(a):
    """Sum of all value entries."""
    return a.sum() if isinstance(a, Jet) else np.sum(a)


# ---------------------------------------------------------------------------
# divided differences and Hermitian matrix functions
# ---------------------------------------------------------------------------

_SERIES_TERMS = 40


def _taylor_coeffs(name: str, c: float, terms: int) -> np.ndarray:
    j = np.arange(terms, dtype=float)
    if name == "log":
        out = np.empty(terms)
        out[0] = np.log(c)
        out[1:] = (-1.0) ** (j[1:] - 1) / (j[1:] * c ** j[1:])
        return out
    if name == "exp":
        from scipy.special import factorial as sfact
        return np.exp(c) / sfact(j)
    if name == "sqrt":
        from scipy.special import binom
        return binom(0.5, j) * c ** (0.5 - j)
    raise ValueError(f"unknown matrix function {name!r}")


def _scalar_fn(name: str):
    return {"log": np.log, "exp": np.exp, "sqrt": np.sqrt}[name]


def divided_difference(name: str, xs: Sequence[float]) -> float:
    """Divided difference f[x0, ..., xm] robust to coincident nodes."""
    xs = sorted(float(v) for v in xs)
    m = len(xs) - 1
    if m == 0:
        return float(_scalar_fn(name)(xs[0]))
    span = xs[-1] - xs[0]
    scale = min(abs(v) for v in xs) if name in ("log", "sqrt") else 1.0
    if span <= 0.1 * scale:
        # series about the midpoint: f[x..] = sum_j t_j h_{j-m}(x - c)
        c = 0.5 * (xs[0] + xs[-1])
        t = _taylor_coeffs(name, c, _SERIES_TERMS)
        h = np.zeros(_SERIES_TERMS)
        h[0] = 1.0
        for y in xs:
            y -= c
            for k in range(1, _SERIES_TERMS):
                h[k] += y * h[k - 1]
        return float(np.dot(t[m:], h[: _SERIES_TERMS - m]))
    return (divided_difference(name, xs[1:]) - divided_difference(name, xs[:-1])) / span


def matrix_function(a, name: str = "log"):
    """f(A) for Hermitian A; jets use divided-difference (Daleckii-Krein) expansions."""
    v = value_of(a)
    lam, U = np.linalg.eigh(v)
    if name in ("log", "sqrt") and np.min(lam) <= 0:
        raise DomainError("matrix function requires a positive-definite argument")
    Uh = U.conj().T
    f = _scalar_fn(name)
    base = (U * f(lam)) @ Uh
    if not isinstance(a, Jet):
        return base
    if a.order > 3:
        raise UnsupportedOrderError("matrix functions support jets up to order 3")
    d = lam.size
    dt = Uh @ (a - v) @ U          # perturbation in the eigenbasis, zero value
    res = Jet.constant(np.diag(f(lam)).astype(complex), a.nvars, a.order)
    if a.order >= 1:
        F1 = np.array([[divided_difference(name, (lam[p], lam[q])) for q in range(d)] for p in range(d)])
        res = res + F1 * dt
    if a.order >= 2:
        F2 = np.array([[[divided_difference(name, (lam[p], lam[k], lam[q]))
                         for q in range(d)] for k in range(d)] for p in range(d)])
        prod = dt.reshape(d, d, 1) * dt.reshape(1, d, d)
        res = res + (prod * F2).sum(axis=1)
    if a.order >= 3:
        F3 = np.array([[[[divided_difference(name, (lam[p], lam[k], lam[l], lam[q]))
                          for q in range(d)] for l in range(d)] for k in range(d)] for p in range(d)])
        prod = dt.reshape(d, d, 1, 1) * dt.reshape(1, d, d, 1) * dt.reshape(1, 1, d, d)
        res = res + (prod * F3).sum(axis=(1, 2))
    return U @ res @ Uh


# ---------------------------------------------------------------------------
# composition helpers
# ---------------------------------------------------------------------------

def _contract_first(cur, delta):
    letters = "abcdefgh"[: np.ndim(value_of(cur))]
    return einsum(f"{letters},{letters[0]}->{letters[1:]}", cur, delta)


def taylor_compose(coeffs: Sequence[np.ndarray], inner: Jet) -> Jet:
    """Evaluate the Taylor polynomial with derivative tensors ``coeffs`` at ``inner``.

    ``coeffs[m]`` has shape ``(N,)*m + S`` (derivatives of some F at
    ``inner.value``); ``inner`` is a jet with value shape ``(N,)``.
    """
    delta = inner - inner.value
    result = Jet.constant(np.asarray(coeffs[0]), inner.nvars, inner.order)
    for m in range(1, min(len(coeffs) - 1, inner.order) + 1):
        cur = np.asarray(coeffs[m]) / factorial(m)
        for _ in range(m):
            cur = _contract_first(cur, delta)
        result = result + cur
    return result


def with_gradient(f: Callable, x):
    """Return ``(f(x), grad f(x))`` with the gradient index as the last axis.

    Works for plain points and for jets (the result is then a jet of the
    same order, obtained by evaluating ``f`` one order higher and composing).
    """
    if not isinstance(x, Jet):
        j = f(Jet.variables(np.asarray(x, dtype=float), 1))
        if not isinstance(j, Jet):
            v = np.asarray(j, dtype=float)
            return v, np.zeros(v.shape + (np.asarray(x).size,))
        return j.coeffs[0], np.moveaxis(j.coeffs[1], 0, -1)
    n_local = x.shape[0]
    if x.order + 1 > MAX_ORDER:
        raise UnsupportedOrderError("nested differentiation exceeds the jet order cap")
    local = f(Jet.variables(x.value, x.order + 1))
    if not isinstance(local, Jet):
        v = np.asarray(local)
        zero = np.zeros(v.shape + (n_local,))
        return Jet.constant(v, x.nvars, x.order), Jet.constant(zero, x.nvars, x.order)
    val = local.truncate(x.order)
    grad = local.grad()
    if x.is_seed:
        return val, grad
    return (taylor_compose(val.coeffs, x), taylor_compose(grad.coeffs, x))


def with_derivatives(f: Callable, x, count: int):
    """``[f, Df, ..., D^count f]`` at ``x``; derivative indices trail the value axes.

    Like :func:`with_gradient` this accepts jets, returning jets of the
    same order.
    """
    if count == 1:
        return list(with_gradient(f, x))
    if not isinstance(x, Jet):
        x = np.asarray(x, dtype=float)
        out = f(Jet.variables(x, count))
        if not isinstance(out, Jet):
            v = np.asarray(out, dtype=float)
            return [v] + [np.zeros(v.shape + (x.size,) * k) for k in range(1, count + 1)]
        res, cur = [out.value], out
        for _ in range(count):
            cur = cur.grad()
            res.append(cur.value)
        return res
    if x.order + count > MAX_ORDER:
        raise UnsupportedOrderError("nested differentiation exceeds the jet order cap")
    local = f(Jet.variables(x.value, x.order + count))
    if not isinstance(local, Jet):
        v = np.asarray(local)
        return [Jet.constant(v, x.nvars, x.order)] + [
            Jet.constant(np.zeros(v.shape + (x.shape[0],) * k), x.nvars, x.order)
            for k in range(1, count + 1)]
    res, cur = [], local
    for k in range(count + 1):
        res.append(cur.truncate(x.order))
        if k < count:
            cur = cur.grad()
    if x.is_seed:
        return res
    return [taylor_compose(r.coeffs, x) for r in res]


def lift(f: Callable, x):
    """Evaluate ``f`` at ``x`` (point or jet) through its own local jet."""
    if not isinstance(x, Jet) or x.is_seed:
        return f(x)
    local = f(Jet.variables(x.value, x.order))
    if not isinstance(local, Jet):
        return local
    return taylor_compose(local.coeffs, x)


# ---------------------------------------------------------------------------
# public differentiation API
# ---------------------------------------------------------------------------

def _finite_or_raise(arrs, what="field"):
    for a in arrs:
        if not np.all(np.isfinite(a)):
            raise DomainError(f"non-finite {what} evaluation")


def derivatives(f: Callable, x, order: int):
    """All partial derivatives of ``f`` at ``x`` up to ``order``.

    Returns a list ``[f, Df, D2f, ...]``; entry ``k`` has shape
    ``(dim,)*k + value_shape``.
    """
    if order > MAX_ORDER:
        raise UnsupportedOrderError(f"order {order} > {MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    out = f(Jet.variables(x, order))
    if not isinstance(out, Jet):
        v = np.asarray(out, dtype=float)
        res = [v] + [np.zeros((x.size,) * k + v.shape) for k in range(1, order + 1)]
    else:
        res = list(out.coeffs)
    _finite_or_raise(res)
    return res


def partials(f: Callable, x, idx: Sequence[int] = ()) -> float:
    """Partial derivative of a scalar field at ``x`` for the multi-index ``idx``."""
    idx = tuple(int(i) for i in idx)
    k = len(idx)
    if k > PUBLIC_MAX_ORDER:
        raise UnsupportedOrderError(f"derivative order {k} > {PUBLIC_MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite coordinates")
    coeff = derivatives(f, x, k)[k]
    if coeff.shape[k:] != ():
        raise ValueError("partials expects a scalar field")
    return float(coeff[idx])


def fd_partials(f: Callable, x, idx: Sequence[int] = (), rel_step: float | None = None) -> float:
    """Central-difference oracle with one Richardson level.

    The step along axis ``i`` is ``rel_step * max(1, |x_i|)``; the default
    ``rel_step`` is 1e-4 for orders up to two and 5e-3 for order three,
    where rounding would otherwise dominate.
    """
    idx = tuple(int(i) for i in idx)
    k = len(idx)
    x = np.asarray(x, dtype=float)
    if k == 0:
        return float(f(x))
    if k > PUBLIC_MAX_ORDER:
        raise UnsupportedOrderError(f"derivative order {k} > {PUBLIC_MAX_ORDER}")
    if rel_step is None:
        rel_step = 1e-4 if k <= 2 else 5e-3
    base = rel_step * np.maximum(1.0, np.abs(x))

    def central(scale):
        h = base * scale
        acc = 0.0
        for signs in np.ndindex(*(2,) * k):
            s = np.array([1.0 if b == 0 else -1.0 for b in signs])
            pt = x.copy()
            for sj, i in zip(s, idx):
                pt[i] += sj * h[i]
            acc += np.prod(s) * float(f(pt))
        denom = np.prod([2.0 * h[i] for i in idx])
        return acc / denom

    coarse, fine = central(1.0), central(0.5)
    return (4.0 * fine - coarse) / 3.0


# ---------------------------------------------------------------------------
# ODE integration and quadrature
# ---------------------------------------------------------------------------

def integrate_ode(rhs: Callable, y0, t_span, steps: int) -> np.ndarray:
    """Classical fixed-step RK4; returns the path, shape ``(steps + 1,) + y0.shape``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.array(y0, dtype=float)
    h = (t1 - t0) / steps
    path = np.empty((steps + 1,) + y.shape)
    path[0] = y
    t = t0
    for i in range(steps):
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationBlowupError(f"non-finite state at step {i + 1}")
        t = t0 + (i + 1) * h
        path[i + 1] = y
    return path


@lru_cache(maxsize=None)
def hermite_rule(nodes: int = HERMITE_NODES):
    """Probabilists' Gauss-Hermite nodes and weights normalized to a probability measure."""
    z, w = hermegauss(nodes)
    return z, w / np.sqrt(2.0 * np.pi)


def _apply(f, xs):
    try:
        out = np.asarray(f(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except Exception:
        pass
    return np.array([float(f(v)) for v in xs])


def gauss_expectation(f: Callable, kind: str = "hermite", *, atoms=None,
                      mean: float = 0.0, std: float = 1.0) -> float:
    """Expectation of ``f`` under N(mean, std^2) or a finite atomic measure.

    ``atoms`` is a sequence of ``(x, weight)`` pairs for ``kind="finite"``.
    """
    if kind == "hermite":
        z, w = hermite_rule()
        xs = mean + std * z
        return float(np.dot(w, _apply(f, xs)))
    if kind == "finite":
        if atoms is None or len(atoms) == 0:
            raise InvalidMeasureError("finite expectation needs atoms")
        xs = np.array([a[0] for a in atoms], dtype=float)
        ws = np.array([a[1] for a in atoms], dtype=float)
        if np.any(ws <= 0) or abs(ws.sum() - 1.0) > 1e-12:
            raise InvalidMeasureError("atom weights must be positive and sum to 1")
        return float(np.dot(ws, _apply(f, xs)))
    raise ValueError(f"unknown quadrature kind {kind!r}")
