import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergq.errors import DomainError, InvalidInputError, NearSingularError
from bergq.group import (
    GroupElement,
    cyclic_product,
    dihedral,
    one_dim_characters,
    reflecting_hyperplanes,
    relative_invariant,
    sign_character,
    symmetric,
    trivial_character,
)
from bergq.intlin import monomial_deck_group
from bergq.maps import (
    BallAutomorphism,
    DomainSpec,
    MonomialMap,
    PolydiscLambdaWeight,
    PullbackWeight,
    RelativeWeight,
    UnitWeight,
    ball,
    ball_automorphism_eval,
    conjugated_map,
    diagonal_power_map,
    dihedral_map,
    monomial_map,
    polydisc,
    power_map,
    symmetrization_map,
    weight_eval,
)
from bergq.mpoly import MultiPoly, jacobian_det_poly

from oracles import moebius_jacobian

U2 = np.array([[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]]) * np.exp(0.3j)


def rand_ball(rng, n, d, r=0.9):
    x = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * r * rng.uniform(0.1, 1, size=(n, 1)) ** (1 / (2 * d))


# domains


def test_domain_measure_constants():
    assert polydisc(2).measure_constant == pytest.approx(np.pi**2)
    assert ball(3).measure_constant == pytest.approx(np.pi**3 / 6)
    with pytest.raises(InvalidInputError):
        DomainSpec("annulus", 2)


def test_domain_membership():
    assert polydisc(2).contains([0.9, 0.9j])
    assert not ball(2).contains([0.9, 0.9j])
    np.testing.assert_array_equal(ball(1).contains(np.array([[0.5], [1.0]])), [True, False])


# catalog maps


def test_symmetrization_examples():
    np.testing.assert_allclose(symmetrization_map(2)([1, 2]), [3, 2])
    np.testing.assert_allclose(symmetrization_map(3)([1, 1, 1]), [3, 3, 1])
    np.testing.assert_allclose(symmetrization_map(2)([0.3, 0.3]), [0.6, 0.09])


def test_dihedral_map_examples():
    np.testing.assert_allclose(dihedral_map(2)([1, 1]), [2, 1])
    np.testing.assert_allclose(dihedral_map(3)([1, -1]), [0, -1])
    with pytest.raises(InvalidInputError):
        dihedral_map(1)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_dihedral_jacobian(k):
    expected = MultiPoly(2, {(k, 0): k, (0, k): -k})
    assert jacobian_det_poly(dihedral_map(k)) == expected


def test_monomial_map_examples():
    z = np.array([0.3 + 0.1j, -0.4j])
    np.testing.assert_allclose(monomial_map(np.eye(2, dtype=int))(z), z)
    np.testing.assert_allclose(monomial_map([[1, 1], [0, 3]])([2, 1]), [2, 1])
    m = monomial_map([[1, 1], [0, 3]])
    assert m.jacobian(z) == pytest.approx(3 * z[1] ** 3)


def test_monomial_jacobian_matches_finite_difference():
    A = [[2, 1], [1, 3]]
    m = MonomialMap(A)
    z = np.array([0.4 + 0.2j, -0.3 + 0.5j])
    h = 1e-6
    cols = [(m(z + h * e) - m(z - h * e)) / (2 * h) for e in np.eye(2)]
    assert m.jacobian(z) == pytest.approx(np.linalg.det(np.stack(cols, -1)), rel=1e-8)


def test_monomial_jacobian_guard():
    m = monomial_map([[1, 1], [0, 3]])
    with pytest.raises(NearSingularError):
        m.jacobian([0.5, 0.0], guard=True)


def test_monomial_map_rejects_bad_matrix():
    with pytest.raises(InvalidInputError):
        monomial_map([[1, 2], [2, 4]])
    with pytest.raises(InvalidInputError):
        monomial_map([[1, -1], [0, 1]])


def test_power_map_examples():
    z = np.array([0.2j, 0.7])
    np.testing.assert_allclose(power_map(1, 1)(z), z)
    np.testing.assert_allclose(power_map(2, 3)([1, 1]), [1, 1])
    np.testing.assert_allclose(power_map(2, 1)([0.5, 0.3]), [0.25, 0.3])


# ball automorphisms


def test_automorphism_identity():
    z = np.array([0.1, 0.4j])
    point, jac = ball_automorphism_eval(BallAutomorphism(d=2), z)
    np.testing.assert_array_equal(point, z)
    assert jac == 1


def test_automorphism_unitary_only():
    z = np.array([0.1, 0.4j])
    point, jac = ball_automorphism_eval(BallAutomorphism(unitary=U2, d=2), z)
    np.testing.assert_allclose(point, U2 @ z, atol=1e-15)
    assert jac == pytest.approx(np.linalg.det(U2))


def test_automorphism_involution():
    rng = np.random.default_rng(3)
    psi = BallAutomorphism(center=[0.3, -0.2j])
    for z in rand_ball(rng, 20, 2):
        np.testing.assert_allclose(psi(psi(z)), z, atol=1e-8)


def test_automorphism_maps_center_to_origin():
    a = np.array([0.3, -0.2j])
    np.testing.assert_allclose(BallAutomorphism(center=a)(a), 0, atol=1e-15)


def test_automorphism_preserves_ball():
    rng = np.random.default_rng(4)
    psi = BallAutomorphism(center=[0.5, 0.4j], unitary=U2)
    pts = psi(rand_ball(rng, 200, 2, r=0.999))
    assert np.all(np.sum(np.abs(pts) ** 2, axis=-1) < 1)


def test_automorphism_jacobian_matches_closed_form():
    rng = np.random.default_rng(5)
    a = np.array([0.3 + 0.1j, -0.2j, 0.1])
    psi = BallAutomorphism(center=a)
    for z in rand_ball(rng, 10, 3):
        assert abs(psi.jacobian(z) - moebius_jacobian(a, z)) <= 1e-12 * abs(moebius_jacobian(a, z))


def test_automorphism_domain_errors():
    with pytest.raises(DomainError):
        BallAutomorphism(center=[0.8, 0.8])
    psi = BallAutomorphism(center=[0.1, 0.0])
    with pytest.raises(DomainError):
        psi([0.9, 0.9])


def test_automorphism_rejects_non_unitary():
    with pytest.raises(InvalidInputError):
        BallAutomorphism(unitary=np.diag([2, 1]), d=2)


# conjugated maps


def test_conjugated_identity_psi():
    G = symmetric(2)
    psi = BallAutomorphism(d=2)
    z = np.array([0.2, -0.5j])
    for g in G:
        m = conjugated_map(psi, g)
        np.testing.assert_allclose(m(z), g.inverse @ z)
        assert m.jacobian(z) == pytest.approx(np.linalg.det(g.inverse))


def test_conjugated_trivial_sigma():
    psi = BallAutomorphism(center=[0.3, 0.1j])
    e = GroupElement.from_matrix(np.eye(2, dtype=complex))
    z = np.array([0.2, -0.5j])
    m = conjugated_map(psi, e)
    np.testing.assert_allclose(m(z), z, atol=1e-12)
    assert m.jacobian(z) == pytest.approx(1, abs=1e-8)


@pytest.mark.parametrize("G", [symmetric(2), dihedral(3)], ids=str)
def test_conjugation_is_anti_homomorphism(G):
    psi = BallAutomorphism(center=[0.3, 0.1j], unitary=U2)
    rng = np.random.default_rng(6)
    zs = rand_ball(rng, 5, 2)
    for i, s in enumerate(G):
        for j, t in enumerate(G):
            ts = G.elements[G.table[j, i]]  # t * s
            left = conjugated_map(psi, s)(conjugated_map(psi, t)(zs))
            np.testing.assert_allclose(left, conjugated_map(psi, ts)(zs), atol=1e-9)


# weights


def test_unit_and_lambda_two_weights():
    z = np.array([0.3, 0.8j])
    assert weight_eval(UnitWeight(), z) == 1
    assert weight_eval(PolydiscLambdaWeight(2), z) == 1
    assert weight_eval(PolydiscLambdaWeight(3), z) == pytest.approx((1 - 0.09) * (1 - 0.64))
    assert weight_eval(PolydiscLambdaWeight(3, normalized=True), z) == pytest.approx(4 * 0.91 * 0.36)
    with pytest.raises(InvalidInputError):
        PolydiscLambdaWeight(1)


def test_pullback_weight():
    w = PullbackWeight(PolydiscLambdaWeight(3), lambda z: z / 2)
    assert w(np.array([0.5, 0.0])) == pytest.approx(1 - 1 / 16)


def test_relative_weight_example():
    G = symmetric(2)
    hs = reflecting_hyperplanes(G)
    ell = relative_invariant(trivial_character(G), hs)
    w = RelativeWeight(UnitWeight(), ell, symmetrization_map(2), trivial_character(G), G)
    assert weight_eval(w, np.array([0.5, 0.0])) == pytest.approx(4)


def test_relative_weight_near_hyperplane():
    G = symmetric(2)
    ell = relative_invariant(sign_character(G), reflecting_hyperplanes(G))
    w = RelativeWeight(UnitWeight(), ell, symmetrization_map(2))
    with pytest.raises(NearSingularError):
        w(np.array([0.3, 0.3]))


CATALOG = [
    (symmetric(2), symmetrization_map(2)),
    (symmetric(3), symmetrization_map(3)),
    (dihedral(3), dihedral_map(3)),
    (dihedral(4), dihedral_map(4)),
    (cyclic_product(2, 3), diagonal_power_map([2, 3])),
    (monomial_deck_group([[1, 1], [0, 3]]), monomial_map([[1, 1], [0, 3]])),
]


@pytest.mark.parametrize("G,theta", CATALOG, ids=lambda x: str(x)[:24])
def test_theta_invariance(G, theta):
    rng = np.random.default_rng(7)
    zs = rand_ball(rng, 20, G.dimension)
    base = theta(zs)
    for g in G:
        assert np.max(np.abs(theta(zs @ g.inverse.T) - base)) <= 1e-10


points2 = st.tuples(*[st.floats(-0.65, 0.65)] * 4).map(
    lambda t: np.array([complex(t[0], t[1]), complex(t[2], t[3])])
)


@settings(max_examples=30, deadline=None)
@given(points2, st.sampled_from([2, 3, 4]))
def test_relative_weight_is_invariant(z, k):
    G = dihedral(k)
    theta = dihedral_map(k)
    hs = reflecting_hyperplanes(G)
    for chi in one_dim_characters(G):
        ell = relative_invariant(chi, hs)
        w = RelativeWeight(PolydiscLambdaWeight(3), ell, theta, chi, G)
        try:
            ref = w(z)
        except NearSingularError:
            continue
        for g in G:
            assert abs(w(g.inverse @ z) - ref) <= 1e-9 * max(1, ref)
