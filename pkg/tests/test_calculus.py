"""Jet engine against closed forms and the finite-difference oracle."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infogeo import calculus as C
from infogeo.errors import (ConditionError, DomainError, IntegrationBlowupError, InvalidMeasureError,
                            UnsupportedOrderError)

coord = st.floats(min_value=-1.3, max_value=1.3, allow_nan=False)  # keeps 2 + ab > 0


def bump(x):
    return C.sin(x[0]) * C.exp(0.5 * x[1]) + C.log(2.0 + x[0] * x[1])


@given(coord, coord)
@settings(max_examples=40, deadline=None)
def test_jets_match_finite_differences(a, b):
    x = np.array([a, b])
    for idx in [(0,), (1,), (0, 1), (1, 1), (0, 0, 1)]:
        exact = C.partials(bump, x, idx)
        approx = C.fd_partials(bump, x, idx)
        assert exact == pytest.approx(approx, rel=1e-5, abs=1e-5)


def test_closed_form_derivatives():
    x = np.array([0.3, -0.2])
    assert C.partials(bump, x, (0,)) == pytest.approx(np.cos(0.3) * np.exp(-0.1) + (-0.2) / (2 - 0.06))
    # d^3/dx0^3 of sin(x0) e^{x1/2} + log(2 + x0 x1)
    expected = -np.cos(0.3) * np.exp(-0.1) + 2 * (-0.2) ** 3 / (2 - 0.06) ** 3
    assert C.partials(bump, x, (0, 0, 0)) == pytest.approx(expected, rel=1e-12)


@given(coord, coord)
@settings(max_examples=30, deadline=None)
def test_mixed_partials_commute(a, b):
    D = C.derivatives(bump, np.array([a, b]), 3)
    assert np.allclose(D[2], D[2].T, atol=1e-12)
    assert np.allclose(D[3], np.transpose(D[3], (1, 0, 2)), atol=1e-12)
    assert np.allclose(D[3], np.transpose(D[3], (2, 1, 0)), atol=1e-12)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_order_cap_and_domain_errors():
    with pytest.raises(UnsupportedOrderError):
        C.partials(bump, [0.1, 0.2], (0, 0, 0, 0))
    with pytest.raises(DomainError):
        C.partials(bump, [np.nan, 0.2], (0,))
    with pytest.raises(DomainError):
        C.derivatives(lambda x: C.log(x[0]), np.array([-1.0]), 1)


def test_nested_gradients_compose():
    # with_gradient on a jet must agree with differentiating the gradient directly
    f = lambda x: C.total(C.exp(x) * x[::-1])
    x = np.array([0.2, 0.7])
    _, hess = C.with_gradient(lambda y: C.with_gradient(f, y)[1], x)
    assert np.allclose(hess, C.derivatives(f, x, 2)[2], atol=1e-13)


def test_inverse_of_jet_and_condition_guard():
    a = lambda x: C.array([[2.0 + x[0], x[1]], [x[1], 1.0 + x[0] * x[0]]])
    x = np.array([0.3, 0.4])
    _, d_inv = C.with_gradient(lambda y: C.inv(a(y)), x)
    A = np.asarray(a(x))
    _, dA = C.with_gradient(a, x)
    Ai = np.linalg.inv(A)
    expected = -np.einsum("ij,jkl,km->iml", Ai, dA, Ai)
    assert np.allclose(d_inv, expected, atol=1e-13)
    with pytest.raises(ConditionError):
        C.inv(np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]]))


@pytest.mark.parametrize("name", ["log", "exp", "sqrt"])
def test_matrix_function_derivative_against_finite_differences(name, rng):
    A = rng.normal(size=(3, 3))
    rho = A @ A.T + np.eye(3)
    X = rng.normal(size=(3, 3))
    X = X + X.T
    _, d = C.with_gradient(lambda t: C.matrix_function(rho + t[0] * X, name), np.zeros(1))
    h = 1e-5
    fd = (C.matrix_function(rho + h * X, name) - C.matrix_function(rho - h * X, name)) / (2 * h)
    assert np.allclose(np.asarray(d)[..., 0], fd, atol=1e-8)


def test_matrix_function_handles_degenerate_spectrum():
    # at a multiple of the identity the derivative of log is X / lambda
    X = np.array([[0.3, 0.1], [0.1, -0.3]])
    _, d = C.with_gradient(lambda t: C.matrix_function(0.5 * np.eye(2) + t[0] * X, "log"), np.zeros(1))
    assert np.allclose(np.asarray(d)[..., 0], X / 0.5, atol=1e-13)
    second = C.derivatives(lambda t: C.real(C.trace(C.matrix_function(0.5 * np.eye(2) + t[0] * X, "log"))),
                           np.zeros(1), 2)[2]
    assert second[0, 0] == pytest.approx(-np.trace(X @ X) / 0.25, rel=1e-12)


def test_divided_difference_coincident_nodes():
    assert C.divided_difference("exp", (0.3, 0.3)) == pytest.approx(np.exp(0.3), rel=1e-14)
    assert C.divided_difference("log", (2.0, 2.0, 2.0)) == pytest.approx(-1.0 / 8.0, rel=1e-13)
    assert C.divided_difference("log", (1.0, 3.0)) == pytest.approx(np.log(3.0) / 2.0, rel=1e-14)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_rk4_order_and_blowup():
    exact = np.exp(-1.0)
    errs = [abs(C.integrate_ode(lambda t, y: -y, [1.0], (0.0, 1.0), n)[-1, 0] - exact) for n in (10, 20)]
    assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.05)
    with pytest.raises(IntegrationBlowupError):
        C.integrate_ode(lambda t, y: y * y, [1.0], (0.0, 2.0), 50)


def test_gauss_expectations():
    assert C.gauss_expectation(lambda x: x ** 4) == pytest.approx(3.0, rel=1e-12)
    assert C.gauss_expectation(lambda x: x ** 2, mean=1.0, std=2.0) == pytest.approx(5.0, rel=1e-12)
    atoms = [(0.0, 0.25), (1.0, 0.75)]
    assert C.gauss_expectation(lambda x: x, "finite", atoms=atoms) == pytest.approx(0.75)
    with pytest.raises(InvalidMeasureError):
        C.gauss_expectation(lambda x: x, "finite", atoms=[(0.0, 0.5), (1.0, 0.6)])
