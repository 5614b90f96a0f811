"""Almost-Hermitian and almost-contact identities on the zoo entries."""
import numpy as np
import pytest

from infogeo import structures as ST
from infogeo import zoo
from infogeo.errors import InvalidSectionError, PreconditionError, UnsupportedError
from infogeo.geometry import (dual_connection, levi_civita,
                              symplectic_connection_from, torsion, zero_connection)


def pts(entry, count=6, seed=3):
    return entry.points(np.random.default_rng(seed), count)


@pytest.mark.parametrize("name", ["flat2", "flat4", "cp1", "sphere2"])
def test_kahler_entries_have_parallel_omega(name):
    e = zoo.get(name)
    rep = ST.kahler_defect(e.structure, pts(e))
    assert rep.passed and rep.meta["kahler"]


def test_nonkahler_control_is_detected():
    e = zoo.get("nonkahler4")
    rep = ST.kahler_defect(e.structure, pts(e))
    assert rep.passed and not rep.meta["kahler"]
    assert rep.checks[0].kind == "control" and rep.checks[0].residual > 1e-3
    assert np.max(np.abs(ST.nijenhuis_tensor(e.structure.theta, e.control_point))) > 1e-3


@pytest.mark.parametrize("name", ["cp1", "flat4"])
def test_statistical_symplectic_on_kahler(name):
    e = zoo.get(name)
    s = e.structure
    rep = ST.statistical_symplectic_check(s, levi_civita(s.metric, s.dim), pts(e))
    assert rep.passed
    assert rep.by_name("dual_torsion").residual < 1e-9


def test_dual_of_symplectic_connection_is_almost_symplectic_everywhere():
    for name in ("cp1", "sphere2", "nonkahler4"):
        e = zoo.get(name)
        s = e.structure
        conn = symplectic_connection_from(zero_connection(s.dim), s.omega)
        rep = ST.statistical_symplectic_check(s, conn, pts(e), designated=e.control_point)
        assert rep.by_name("dual_omega").residual < 1e-8


def test_dual_torsion_of_flat_symplectic_connection_on_cp1_is_nonzero():
    # torsion-freeness of the dual singles out Codazzi-type connections, not all symplectic ones
    s = zoo.get("cp1").structure
    conn = symplectic_connection_from(zero_connection(2), s.omega)
    dual = dual_connection(s.metric, conn)
    assert np.max(np.abs(torsion(dual, [0.3, 0.4]))) > 0.1


def test_statistical_symplectic_rejects_nonsymplectic_connection():
    s = zoo.get("cp1").structure
    with pytest.raises(PreconditionError):
        ST.statistical_symplectic_check(s, zero_connection(2), pts(zoo.get("cp1")))


def test_goldberg_commutator_vanishes_on_kahler_only():
    assert ST.goldberg_commutator(zoo.get("cp1").structure, [0.3, -0.2]) < 1e-8
    e = zoo.get("nonkahler4")
    assert ST.goldberg_commutator(e.structure, e.control_point) > 1e-3


def test_curvature_identities_for_levi_civita_on_cp1():
    s = zoo.get("cp1").structure
    lc = levi_civita(s.metric, 2)
    rep = ST.curvature_identity_check(s.metric, lc, lc, [0.4, 0.1], theta=s.theta, geometry="cp1")
    assert rep.passed
    assert rep.by_name("statistical_curvature").kind == "assert"
    assert rep.by_name("theta_intertwining").residual < 1e-8


def test_parallel_section_and_hamiltonian_form():
    s = zoo.get("cp1").structure
    lc = levi_civita(s.metric, 2)
    d = ST.parallel_section_defect(lc, lc, s.theta, [0.2, 0.5], [1.0, 0.3], [-0.4, 2.0])
    assert np.max(np.abs(d)) < 1e-12
    points = pts(zoo.get("cp1"))
    form, chk = ST.hamiltonian_form_from_section(s.metric, s.theta, points, "cp1")
    assert chk.kind == "report" and chk.residual < 1e-12
    assert np.allclose(np.asarray(form(points[1])), np.asarray(s.omega(points[1])), atol=1e-14)
    with pytest.raises(InvalidSectionError):
        ST.hamiltonian_form_from_section(s.metric, lambda x: np.eye(2), points)


@pytest.mark.parametrize("name,flags", [
    ("contact3", (True, False, True)),
    ("shs3", (False, False, True)),
    ("cokahler", (False, True, True)),
])
def test_flags_are_derived(name, flags):
    e = zoo.get(name)
    derived = ST.derive_flags(e.geometry, np.random.default_rng(0))
    assert (derived.is_contact, derived.is_cosymplectic, derived.is_shs) == flags


@pytest.mark.parametrize("name", ["contact3", "shs3", "cokahler", "cokahler_flat"])
def test_compatibility_identities(name):
    e = zoo.get(name)
    assert ST.compatibility_check(e.structure, pts(e)).passed


@pytest.mark.parametrize("name,conn", [("contact3", "shs"), ("shs3", "shs"), ("shs3", "shs_perturbed")])
def test_shs_connections_and_dual_torsion_formulas(name, conn):
    e = zoo.get(name)
    c = e.connections[conn]
    assert ST.shs_connection_check(c, e.structure, pts(e)).passed
    rep = ST.dual_torsion_formula_check(e.structure, c, pts(e))
    assert rep.passed


def test_short_dual_torsion_forms_miss_on_contact3():
    e = zoo.get("contact3")
    rep = ST.dual_torsion_formula_check(e.structure, e.connections["shs"], pts(e))
    assert rep.by_name("Tik_short").residual > 0.5
    assert rep.by_name("Tik_short").kind == "report"


def test_contact_obstruction_witness():
    e = zoo.get("contact3")
    s = e.structure
    dual = dual_connection(s.metric, e.connections["shs"])
    rep = ST.contact_obstruction_check(s, dual, pts(e), origin=np.zeros(3))
    c = rep.checks[0]
    assert c.passed and c.witness == pytest.approx(1.0, abs=1e-9)


def test_shs_check_refuses_unflagged_structure():
    e = zoo.get("contact3")
    bare = ST.AlmostContactMetricStructure(e.geometry, darboux=False)
    with pytest.raises(PreconditionError):
        ST.shs_connection_check(zero_connection(3), bare, pts(e))
    with pytest.raises(UnsupportedError):
        ST.dual_torsion_formula_check(bare, zero_connection(3), pts(e))


@pytest.mark.parametrize("eps,a", [(0.0, 0.0), (0.5, -1.0), (-1.0, 0.5), (1.0, 1.0)])
def test_cokahler_family(eps, a):
    e = zoo.get("cokahler")
    (conn, partner), rep = ST.cokahler_statistical_family(e.structure, eps, a, pts(e, 4))
    assert rep.passed
    assert ST.leaf_parallelism_check(e.structure, conn, pts(e, 3)).passed


def test_cokahler_family_refuses_contact():
    e = zoo.get("contact3")
    with pytest.raises(PreconditionError):
        ST.cokahler_statistical_family(e.structure, 0.5, 0.5, pts(e))


def test_shs_difference_is_omega_symmetric():
    e = zoo.get("shs3")
    rep = ST.shs_difference_symmetry(e.connections["shs"], e.connections["shs_perturbed"], e.structure, pts(e))
    assert rep.passed


def test_reeb_derivative_vanishes_for_invariant_connection():
    e = zoo.get("contact3")
    assert np.max(np.abs(ST.reeb_derivative(e.connections["shs"], [0.1, 0.2, 0.3]))) == 0.0


@pytest.mark.parametrize("a", [0.0, 0.5, -1.0])
def test_holomorphic_christoffels_from_potential(a):
    rep = ST.holomorphic_christoffel_check(zoo.get("cp1").structure, a, [0.3, -0.4])
    assert rep.passed


def test_diastasis_properties():
    s = zoo.get("cp1").structure
    z, w = np.array([0.3, 0.1]), np.array([-0.2, 0.5])
    zc, wc = complex(*z), complex(*w)
    closed = np.log((1 + abs(zc) ** 2) * (1 + abs(wc) ** 2) / abs(1 + zc * wc.conjugate()) ** 2)
    assert float(ST.diastasis(s.potential_ext, z, w)) == pytest.approx(closed, rel=1e-13)
    assert float(ST.diastasis(s.potential_ext, z, z)) == 0.0
    h = ST.diastasis_hessian(s.potential_ext, z)
    # g(d_z, d_zbar) = h / 2 and the metric is (1 + |z|^2)^-2 |dz|^2
    assert h[0, 0].real == pytest.approx(1.0 / (1 + abs(zc) ** 2) ** 2, rel=1e-12)
    flat = zoo.get("flat2").structure
    assert float(ST.diastasis(flat.potential_ext, z, w)) == pytest.approx(abs(zc - wc) ** 2, rel=1e-14)


def test_wirtinger_frames():
    V, W = ST.wirtinger_frames(2)
    assert V.shape == (4, 2) and np.allclose(W, V.conj())
    z = ST.complex_coords(np.array([1.0, 2.0, 3.0, 4.0]))
    assert np.allclose(z, [1 + 2j, 3 + 4j])
