import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergq.errors import (
    GroupTooLargeError,
    InvalidInputError,
    NotACharacterError,
    UnsupportedError,
)
from bergq.group import (
    Character,
    FiniteGroup,
    GroupElement,
    act_function,
    act_point,
    build_group,
    character_exponents,
    cyclic_product,
    dihedral,
    explicit,
    is_pseudoreflection,
    one_dim_characters,
    project,
    reflecting_hyperplanes,
    relative_invariant,
    sign_character,
    symmetric,
    trivial_character,
)
from bergq.mpoly import MultiPoly

SWAP = np.array([[0, 1], [1, 0]])


def elem(m):
    return GroupElement.from_matrix(np.asarray(m, dtype=complex))


def proportional(p: MultiPoly, q: MultiPoly) -> bool:
    tp, tq = p.terms, q.terms
    if set(tp) != set(tq):
        return False
    ratios = [tp[e] / tq[e] for e in tp]
    return np.allclose(ratios, ratios[0], atol=1e-12)


# construction


def test_symmetric_two():
    G = symmetric(2)
    assert G.order == 2
    assert G.index_of(SWAP) is not None


@pytest.mark.parametrize("d,order", [(1, 1), (3, 6), (4, 24)])
def test_symmetric_orders(d, order):
    assert symmetric(d).order == order


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_dihedral_order(k):
    assert dihedral(k).order == 2 * k


def test_cyclic_product_elements():
    G = cyclic_product(2, 3)
    assert G.order == 6
    got = {(round(g.matrix[0, 0].real), round(np.angle(g.matrix[1, 1]) * 3 / (2 * np.pi)) % 3) for g in G}
    assert got == {(s, j) for s in (1, -1) for j in range(3)}
    assert all(np.count_nonzero(g.matrix - np.diag(g.matrix.diagonal())) == 0 for g in G)


def test_build_group_strings():
    assert build_group("sym:3").order == 6
    assert build_group("dihedral:4").order == 8
    assert build_group("cyclic:2,2").order == 4
    assert build_group(("explicit", [SWAP])).order == 2
    with pytest.raises(InvalidInputError):
        build_group("nope:2")


def test_closure_cap():
    with pytest.raises(GroupTooLargeError):
        symmetric(5, cap=100)


def test_non_unitary_rejected():
    with pytest.raises(InvalidInputError):
        explicit([np.array([[2, 0], [0, 1]])])


@pytest.mark.parametrize("G", [symmetric(3), dihedral(4), cyclic_product(2, 3)], ids=str)
def test_group_closed_with_single_identity(G):
    t = G.table
    assert sorted(np.unique(t)) == list(range(G.order))
    idents = [i for i, g in enumerate(G) if np.allclose(g.matrix, np.eye(G.dimension))]
    assert idents == [G.identity_index]
    for i, g in enumerate(G):
        assert np.allclose(g.matrix @ g.inverse, np.eye(G.dimension), atol=1e-12)
        assert abs(abs(g.det) - 1) < 1e-12
        assert G.elements[G.inverse_index[i]].matrix == pytest.approx(g.inverse)


def test_group_json_roundtrip():
    G = dihedral(3)
    H = FiniteGroup.from_dict(G.to_dict())
    assert H.order == G.order
    for a, b in zip(G, H):
        assert np.allclose(a.matrix, b.matrix)


# actions


def test_act_point_identity():
    np.testing.assert_allclose(act_point(elem(np.eye(2)), [1, 2j]), [1, 2j])


def test_act_point_swap():
    np.testing.assert_allclose(act_point(elem(SWAP), [3, 4]), [4, 3])


def test_act_point_inverse_convention():
    np.testing.assert_allclose(act_point(elem(np.diag([1j, 1])), [1, 0]), [-1j, 0])


def test_act_point_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        act_point(elem(SWAP), [1, 2, 3])


def test_act_function():
    f = lambda z: z[..., 0]  # noqa: E731
    z = np.array([0.2, 0.7j])
    assert act_function(elem(np.eye(2)), f)(z) == f(z)
    assert act_function(elem(SWAP), f)(z) == z[1]
    w = np.exp(2j * np.pi / 3)
    g = elem(np.diag([w, 1 / w]))
    h = lambda z: z[..., 0] * z[..., 1]  # noqa: E731
    assert act_function(g, h)(z) == pytest.approx(h(z))


def test_is_pseudoreflection():
    assert is_pseudoreflection(elem(SWAP))
    assert not is_pseudoreflection(elem(np.eye(2)))
    assert not is_pseudoreflection(elem(-np.eye(2)))


# hyperplanes and characters


def test_hyperplanes_s2():
    (h,) = reflecting_hyperplanes(symmetric(2))
    assert h.order == 2
    assert proportional(h.linear_form, MultiPoly(2, {(1, 0): 1, (0, 1): -1}))
    assert max(abs(c) for c in h.linear_form.terms.values()) == 1


def test_hyperplanes_s3():
    hs = reflecting_hyperplanes(symmetric(3))
    assert len(hs) == 3 and all(h.order == 2 for h in hs)


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_hyperplanes_dihedral(k):
    hs = reflecting_hyperplanes(dihedral(k))
    assert len(hs) == k and all(h.order == 2 for h in hs)


def test_hyperplane_invariants():
    for G in (symmetric(3), dihedral(4), cyclic_product(3, 4)):
        for h in reflecting_hyperplanes(G):
            g = h.generator
            coeffs = np.array([h.linear_form.coefficient(e) for e in np.eye(G.dimension, dtype=int)])
            # basis of the hyperplane {coeffs . z = 0}
            _, _, vh = np.linalg.svd(coeffs[None, :])
            for v in vh[1:].conj():
                assert np.allclose(g.matrix @ v, v, atol=1e-10)
            powers = [np.linalg.matrix_power(g.matrix, j) for j in range(1, h.order + 1)]
            assert np.allclose(powers[-1], np.eye(G.dimension))
            assert not any(np.allclose(p, np.eye(G.dimension)) for p in powers[:-1])
            assert abs(g.det ** h.order - 1) < 1e-10


def test_hyperplanes_need_pseudoreflections():
    with pytest.raises(InvalidInputError):
        reflecting_hyperplanes(explicit([-np.eye(2)]))


def test_exponents_sign_s2():
    G = symmetric(2)
    assert character_exponents(sign_character(G), reflecting_hyperplanes(G)) == [1]


def test_exponents_trivial():
    G = dihedral(3)
    assert character_exponents(trivial_character(G), reflecting_hyperplanes(G)) == [0, 0, 0]


def test_exponents_z4_minus_one():
    G = cyclic_product(4)
    gen = G.index_of(np.diag([1j]))
    vals = [(-1) ** round(np.angle(g.matrix[0, 0]) / (np.pi / 2)) for g in G]
    chi = Character(G, np.array(vals, dtype=complex), "minus")
    chi.check()
    assert chi(gen) == -1
    assert character_exponents(chi, reflecting_hyperplanes(G)) == [2]


def test_exponents_reject_non_character():
    G = symmetric(2)
    chi = Character(G, np.array([1, 1j]), "bogus")
    with pytest.raises(NotACharacterError):
        character_exponents(chi, reflecting_hyperplanes(G))
    with pytest.raises(NotACharacterError):
        chi.check()


@pytest.mark.parametrize("G", [symmetric(2), symmetric(3), dihedral(2), dihedral(3), dihedral(4), cyclic_product(2, 3)], ids=str)
def test_sign_exponents_are_m_minus_one(G):
    hs = reflecting_hyperplanes(G)
    assert character_exponents(sign_character(G), hs) == [h.order - 1 for h in hs]


def test_relative_invariant_examples():
    G = symmetric(2)
    hs = reflecting_hyperplanes(G)
    assert relative_invariant(trivial_character(G), hs) == MultiPoly.constant(2)
    assert proportional(relative_invariant(sign_character(G), hs), MultiPoly(2, {(1, 0): 1, (0, 1): -1}))


@pytest.mark.parametrize("k", [2, 4, 6])
def test_relative_invariant_dihedral_rho(k):
    G = dihedral(k)
    hs = reflecting_hyperplanes(G)
    chars = {c.label: c for c in one_dim_characters(G)}
    kp = k // 2
    ell1 = relative_invariant(chars["rho1"], hs)
    ell2 = relative_invariant(chars["rho2"], hs)
    assert proportional(ell1, MultiPoly(2, {(kp, 0): 1, (0, kp): 1}))
    assert proportional(ell2, MultiPoly(2, {(kp, 0): 1, (0, kp): -1}))


def test_sign_character_values():
    G = symmetric(2)
    chi = sign_character(G)
    assert chi(G.index_of(SWAP)) == -1
    assert chi(G.identity_index) == 1
    D = dihedral(3)
    w = np.exp(2j * np.pi / 3)
    assert sign_character(D)(D.index_of(np.diag([w, 1 / w]))) == pytest.approx(1)


@pytest.mark.parametrize("G,count", [(symmetric(3), 2), (dihedral(3), 2), (dihedral(4), 4), (cyclic_product(2, 2), 4), (cyclic_product(2, 3), 6)], ids=str)
def test_one_dim_character_counts(G, count):
    chars = one_dim_characters(G)
    assert len(chars) == count
    for chi in chars:
        chi.check()
    tables = np.array([c.values for c in chars])
    assert np.linalg.matrix_rank(tables) == count


def test_characters_unsupported_for_explicit():
    with pytest.raises(UnsupportedError):
        one_dim_characters(explicit([SWAP]))


# projection


def test_project_examples():
    G = symmetric(2)
    f = lambda z: z[..., 0]  # noqa: E731
    a, b = 0.3 + 0.1j, -0.2j
    z = np.array([a, b])
    assert project(trivial_character(G), f, z) == pytest.approx((a + b) / 2)
    assert project(sign_character(G), f, z) == pytest.approx((a - b) / 2)
    inv = lambda z: z[..., 0] + z[..., 1]  # noqa: E731
    assert project(trivial_character(G), inv, z) == pytest.approx(inv(z))


points2 = st.tuples(*[st.floats(-0.7, 0.7)] * 4).map(
    lambda t: np.array([complex(t[0], t[1]), complex(t[2], t[3])])
)


@settings(max_examples=30, deadline=None)
@given(points2, st.sampled_from([2, 3, 4]))
def test_projection_idempotent_and_equivariant(z, k):
    G = dihedral(k)
    f = lambda z: z[..., 0] ** 3 + 2 * z[..., 1] + z[..., 0] * z[..., 1] ** 2  # noqa: E731
    for chi in one_dim_characters(G):
        pf = project(chi, f, z)
        ppf = project(chi, lambda x, chi=chi: project(chi, f, x), z)
        assert abs(ppf - pf) <= 1e-10 * max(1, abs(pf))
        for t, g in enumerate(G):
            moved = project(chi, f, act_point(g, z))
            assert abs(moved - chi(t) * pf) <= 1e-10 * max(1, abs(pf))


@settings(max_examples=30, deadline=None)
@given(points2)
def test_projection_completeness_abelian(z):
    G = cyclic_product(2, 3)
    f = lambda z: np.exp(z[..., 0] - 2 * z[..., 1]) + z[..., 1] ** 5  # noqa: E731
    total = sum(project(chi, f, z) for chi in one_dim_characters(G))
    assert abs(total - f(z)) <= 1e-10 * max(1, abs(f(z)))
