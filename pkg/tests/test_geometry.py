"""Connections, curvature, forms and transport on small explicit charts."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infogeo import calculus as C
from infogeo import geometry as G
from infogeo.errors import DomainError, UnsupportedError


def sphere_metric(radius=2.0):
    def g(x):
        s = C.sin(x[0])
        z = 0.0 * s
        return C.array([[radius ** 2 + z, z], [z, radius ** 2 * s * s]])
    return g


def warped_metric(x):
    e = C.exp(x[0] * x[1])
    return C.array([[1.0 + x[0] * x[0], 0.3 * e], [0.3 * e, 2.0 + C.sin(x[1])]])


point = st.tuples(st.floats(0.5, 2.5), st.floats(-3.0, 3.0)).map(np.array)


@given(point)
@settings(max_examples=25, deadline=None)
def test_round_sphere_has_constant_curvature(x):
    g = sphere_metric(2.0)
    lc = G.levi_civita(g, 2)
    assert G.sectional_curvature(lc, g, x, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.25, rel=1e-10)


def test_sphere_christoffels_closed_form():
    x = np.array([0.7, 0.2])
    Gam = G.levi_civita(sphere_metric(), 2).at(x)
    assert Gam[0, 1, 1] == pytest.approx(-np.sin(0.7) * np.cos(0.7))
    assert Gam[1, 0, 1] == pytest.approx(np.cos(0.7) / np.sin(0.7))
    assert Gam[1, 1, 0] == pytest.approx(Gam[1, 0, 1])


def test_levi_civita_is_metric_and_torsion_free(rng):
    lc = G.levi_civita(warped_metric, 2)
    for x in rng.uniform(-0.5, 0.5, size=(5, 2)):
        assert np.max(np.abs(G.torsion(lc, x))) < 1e-14
        assert np.max(np.abs(G.covariant_derivative(lc, warped_metric, "ll", x))) < 1e-12
        # the dual of Levi-Civita is itself
        assert np.allclose(G.dual_connection(warped_metric, lc).at(x), lc.at(x), atol=1e-12)


def test_dual_is_an_involution_and_satisfies_duality(rng):
    conn = G.Connection(lambda x: C.einsum("k,ij->kij", C.stack([x[0], C.sin(x[1])]), np.ones((2, 2))), 2)
    dual = G.dual_connection(warped_metric, conn)
    back = G.dual_connection(warped_metric, dual)
    x = np.array([0.2, -0.3])
    assert np.allclose(back.at(x), conn.at(x), atol=1e-12)
    X, Y, Z = rng.normal(size=(3, 10, 2))
    assert np.max(np.abs(G.duality_residual(warped_metric, conn, dual, x, X, Y, Z))) < 1e-12


def test_alpha_family_endpoints_and_midpoint():
    conn = G.constant_connection(np.arange(8.0).reshape(2, 2, 2))
    dual = G.dual_connection(lambda x: np.eye(2), conn)
    x = np.zeros(2)
    assert np.allclose(G.alpha_family(conn, dual, -1.0).at(x), conn.at(x))
    assert np.allclose(G.alpha_family(conn, dual, 1.0).at(x), dual.at(x))
    mid = G.alpha_family(conn, dual, 0.0).at(x)
    assert np.allclose(mid, 0.5 * (conn.at(x) + dual.at(x)))


def test_curvature_antisymmetry_and_bianchi(rng):
    lc = G.levi_civita(warped_metric, 2)
    x = np.array([0.1, 0.4])
    R = np.asarray(G.curvature(lc, x))
    assert np.allclose(R, -np.swapaxes(R, 2, 3), atol=1e-12)
    bianchi = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
    assert np.max(np.abs(bianchi)) < 1e-12


def test_flat_metric_in_polar_coordinates_is_flat():
    g = lambda x: C.array([[1.0 + 0.0 * x[0], 0.0 * x[0]], [0.0 * x[0], x[0] * x[0]]])
    R = G.curvature(G.levi_civita(g, 2), np.array([1.3, 0.4]))
    assert np.max(np.abs(R)) < 1e-13


def test_exterior_derivative_squares_to_zero(rng):
    f = lambda x: C.sin(x[0] * x[1]) + C.exp(x[2])
    a = lambda x: C.stack([x[1] * x[2], C.sin(x[0]), x[0] * x[0] * x[1]])
    x = rng.normal(size=3)
    df = lambda y: C.with_gradient(f, y)[1]
    assert np.max(np.abs(G.exterior_derivative(df, 1, x))) < 1e-13

    def da(y):
        J = C.with_gradient(a, y)[1]                     # J[j, i] = d_i a_j
        return J - C.transpose(J)
    assert np.max(np.abs(G.exterior_derivative(da, 2, x))) < 1e-12
    with pytest.raises(UnsupportedError):
        G.exterior_derivative(a, 3, x)


def test_symplectic_connection_from_flat_preserves_omega():
    w = lambda x: (1.0 + x[0] * x[0]) * np.array([[0.0, 1.0], [-1.0, 0.0]])
    conn = G.symplectic_connection_from(G.zero_connection(2), w)
    for x in ([0.3, 0.1], [-0.7, 1.2]):
        assert np.max(np.abs(G.torsion(conn, x))) < 1e-14
        assert np.max(np.abs(G.covariant_derivative(conn, w, "ll", x))) < 1e-13


def test_gauge_by_identity_is_trivial():
    lc = G.levi_civita(warped_metric, 2)
    gauged = G.gauge_transform(lc, lambda x: np.eye(2))
    x = np.array([0.2, 0.2])
    assert np.allclose(gauged.at(x), lc.at(x), atol=1e-14)


def test_metric_value_validation():
    with pytest.raises(DomainError):
        G.metric_value(lambda x: np.array([[1.0, 0.0], [0.0, -1.0]]), [0.0, 0.0])
    with pytest.raises(DomainError):
        G.metric_value(lambda x: np.array([[1.0, 0.5], [0.0, 1.0]]), [0.0, 0.0])
    with pytest.raises(UnsupportedError):
        G.covariant_derivative(G.zero_connection(2), warped_metric, "uu", [0.0, 0.0])


def test_transport_on_sphere_latitude_has_known_holonomy():
    g = sphere_metric(2.0)
    lc = G.levi_civita(g, 2)
    curve = G.Curve(lambda t: C.stack([1.0 + 0.0 * t, 2.0 * np.pi * t]))
    v0 = np.array([1.0 / 2.0, 0.0])                         # unit vector along d_polar
    v1 = G.parallel_transport(lc, curve, v0, steps=400)
    gm = np.asarray(g(np.array([1.0, 0.0])))
    assert v1 @ gm @ v1 == pytest.approx(1.0, abs=1e-10)
    # the rotation angle is the enclosed solid angle 2 pi (1 - cos 1)
    e1, e2 = v0, np.array([0.0, 1.0 / (2.0 * np.sin(1.0))])
    angle = np.arctan2(v1 @ gm @ e2, v1 @ gm @ e1)
    expected = 2.0 * np.pi * (1.0 - np.cos(1.0))
    assert min(abs(abs(angle) - expected), abs(abs(angle) - (2 * np.pi - expected))) < 1e-8


def test_geodesic_shoot_on_flat_plane():
    v, length = G.geodesic_shoot(G.zero_connection(2), lambda x: np.eye(2), [0.0, 0.0], [3.0, 4.0], steps=20)
    assert np.allclose(v, [3.0, 4.0])
    assert length == pytest.approx(5.0, rel=1e-12)
