"""Parametric families, Fisher geometry, divergences and the simplex."""
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from infogeo import infogeo as IG
from infogeo.errors import DomainError, InvalidFamilyError, InvalidMeasureError
from infogeo.geometry import levi_civita, sectional_curvature

prob = st.floats(min_value=0.02, max_value=0.98)


def test_bernoulli_fisher_value():
    fam = IG.bernoulli_family()
    assert float(np.asarray(IG.fisher_metric(fam, [0.5]))[0, 0]) == pytest.approx(4.0, abs=1e-12)
    assert float(np.asarray(IG.fisher_metric(fam, [0.2]))[0, 0]) == pytest.approx(1 / 0.16, rel=1e-12)


@pytest.mark.parametrize("mu,sigma", [(0.0, 1.0), (0.3, 1.5), (-1.0, 0.7)])
def test_gaussian_fisher_closed_form(mu, sigma):
    g = np.asarray(IG.fisher_metric(IG.gaussian_family(), [mu, sigma]))
    assert np.allclose(g, np.diag([1 / sigma ** 2, 2 / sigma ** 2]), atol=1e-10)


@pytest.mark.parametrize("name", ["bernoulli", "gaussian", "simplex2", "simplex3", "expfam2", "expfam3"])
def test_three_fisher_forms_agree(name):
    fam = IG.standard_families()[name]
    for theta in fam.points(np.random.default_rng(5), 4):
        assert IG.fisher_agreement(fam, theta) < 1e-8


def test_simplex_closed_form_metric_and_christoffels():
    fam = IG.categorical_family(2)
    theta = np.array([0.2, 0.5])
    assert np.allclose(np.asarray(IG.fisher_metric(fam, theta)), IG.simplex_metric(theta), atol=1e-12)
    lc = levi_civita(IG.simplex_metric, 2).at(theta)
    assert np.allclose(lc, IG.simplex_christoffel(theta), atol=1e-13)


@given(prob, prob)
@settings(max_examples=30, deadline=None)
def test_simplex_sectional_curvature_is_quarter(a, b):
    assume(a + b < 0.98)
    theta = np.array([a, b])
    k = sectional_curvature(levi_civita(IG.simplex_metric, 2), IG.simplex_metric, theta, [1, 0], [0, 1])
    assert k == pytest.approx(0.25, abs=1e-8)


def test_alpha_zero_is_levi_civita_and_pairs_are_dual():
    fam = IG.categorical_family(2)
    theta = np.array([0.3, 0.3])
    lc = levi_civita(IG.fisher_field(fam), 2).at(theta)
    assert np.allclose(IG.alpha_connection(fam, 0.0).at(theta), lc, atol=1e-12)
    plus, minus = IG.alpha_connection_pair(fam, 0.5)
    assert np.allclose(plus.at(theta), IG.alpha_connection(fam, 0.5).at(theta), atol=1e-13)
    assert np.allclose(minus.at(theta), IG.alpha_connection(fam, -0.5).at(theta), atol=1e-13)
    # the mixture (a = -1) connection is flat in the probability coordinates
    assert np.max(np.abs(IG.alpha_connection(fam, -1.0).at(theta))) < 1e-12


def test_amari_chentsov_is_symmetric():
    T = IG.amari_chentsov(IG.categorical_family(3), [0.1, 0.2, 0.3])
    for p in [(1, 0, 2), (2, 1, 0), (0, 2, 1)]:
        assert np.allclose(T, np.transpose(T, p))


def test_eguchi_of_kl_gives_fisher_and_exponential_pair():
    fam = IG.categorical_family(2)
    eg = IG.eguchi_structure(IG.family_kl(fam))
    theta = np.array([0.25, 0.4])
    assert np.allclose(np.asarray(eg.metric(theta)), IG.simplex_metric(theta), atol=1e-12)
    assert np.allclose(eg.conn.at(theta), IG.alpha_connection(fam, -1.0).at(theta), atol=1e-10)
    assert np.allclose(eg.dual.at(theta), IG.alpha_connection(fam, 1.0).at(theta), atol=1e-10)


def test_bregman_of_log_partition_is_kl():
    ef = IG.exponential_family_from_measure([[0.0], [1.0], [2.0]], [1.0, 2.0, 0.5])
    D = IG.bregman_divergence(ef.potential, 1)
    z1, z2 = np.array([0.3]), np.array([-0.4])
    atoms, base = ef.family.measure(z1)
    p1 = base * np.exp(ef.family.log_density(z1, atoms))
    p2 = base * np.exp(ef.family.log_density(z2, atoms))
    # argument order: D(z1, z2) = KL(p_z2 || p_z1)
    assert float(D(z1, z2)) == pytest.approx(float(np.sum(p2 * np.log(p2 / p1))), rel=1e-12)
    assert np.allclose(ef.hessian(z1), np.asarray(IG.fisher_metric(ef.family, z1)), atol=1e-12)


def test_bregman_warns_on_nonconvex_potential():
    with pytest.warns(UserWarning):
        D = IG.bregman_divergence(lambda z: -(z[0] * z[0]), 1, check_points=[[0.0]])
    assert D.report.checks[0].residual < 0


def test_mixture_family_validation():
    fam = IG.mixture_family([[0.2, 1.0], [0.8, -1.0]], "mix")
    assert fam.check_normalized([0.05]) == pytest.approx(1.0)
    with pytest.raises(InvalidFamilyError):
        IG.mixture_family([[0.2, 1.0], [0.7, -1.0]])
    with pytest.raises(InvalidFamilyError):
        IG.mixture_family([[0.05, 1.0], [0.95, -1.0]], domain=([-0.1], [0.1]))


def test_exponential_family_validation():
    with pytest.raises(InvalidMeasureError):
        IG.exponential_family_from_measure([[0.0], [1.0]], [1.0, -1.0])
    with pytest.raises(InvalidFamilyError):
        IG.exponential_family_from_measure([], [])


def test_distance_examples():
    p, q = [0.7, 0.3], [0.3, 0.7]
    assert IG.hellinger(p, q) == pytest.approx(0.408619287378, abs=1e-12)
    assert IG.fisher_rao_distance(p, q) == pytest.approx(0.823033692135, abs=1e-12)
    assert IG.kl_divergence(p, q) == pytest.approx(0.4 * np.log(0.7 / 0.3), rel=1e-14)
    assert IG.fisher_rao_distance(p, p) == 0.0


@given(st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3), st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_hellinger_below_fisher_rao(a, b):
    p, q = np.array(a) / sum(a), np.array(b) / sum(b)
    assert IG.hellinger(p, q) <= IG.fisher_rao_distance(p, q) + 1e-15
    assert IG.kl_divergence(p, q) >= -1e-15


def test_simplex_point_validation():
    with pytest.raises(DomainError):
        IG.SimplexPoint([0.5, 0.6])
    with pytest.raises(DomainError):
        IG.SimplexPoint([1.0, 0.0])
    with pytest.raises(DomainError):
        IG.hellinger([0.5, 0.5], [0.2, 0.3, 0.5])
    assert np.allclose(IG.SimplexPoint.from_coords([0.2, 0.3]).probs, [0.2, 0.3, 0.5])


def test_normalization_guard():
    bad = IG.ParametricFamily("bad", 1, lambda t, x: np.log(np.array([0.5, 0.6])) + 0.0 * t[0],
                              IG.finite_measure([0.0, 1.0]))
    with pytest.raises(InvalidFamilyError):
        bad.check_normalized([0.0])
