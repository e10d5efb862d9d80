import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergq.errors import InvalidInputError
from bergq.mpoly import (
    MultiPoly,
    PolyMapExpr,
    elementary_symmetric,
    jacobian_det_poly,
    poly_eval,
    poly_partial,
)
from bergq.maps import symmetrization_map


def var(d, i):
    return MultiPoly.variable(d, i)


# examples


def test_eval_monomial():
    p = MultiPoly(2, {(2, 1): 1})
    assert poly_eval(p, [2, 3]) == 12


def test_eval_zero_polynomial():
    assert poly_eval(MultiPoly(3), [1, 2, 3]) == 0


def test_eval_e2_three_vars():
    assert poly_eval(elementary_symmetric(3, 2), [1, 2, 3]) == 1 * 2 + 1 * 3 + 2 * 3


def test_eval_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        poly_eval(MultiPoly(2, {(1, 0): 1}), [1, 2, 3])


def test_eval_batch_shape():
    p = var(2, 0) * var(2, 1)
    z = np.arange(12).reshape(3, 2, 2)
    out = poly_eval(p, z)
    assert out.shape == (3, 2)
    np.testing.assert_array_equal(out, z[..., 0] * z[..., 1])


def test_partial_power_rule():
    p = MultiPoly(2, {(2, 1): 1})
    assert poly_partial(p, 1) == MultiPoly(2, {(1, 1): 2})


def test_partial_constant():
    assert poly_partial(MultiPoly.constant(2, 5), 1).is_zero()


def test_partial_second_variable():
    p = var(2, 0) + var(2, 1) ** 2
    assert poly_partial(p, 2) == MultiPoly(2, {(0, 1): 2})


@pytest.mark.parametrize("i", [0, 3])
def test_partial_index_out_of_range(i):
    with pytest.raises(InvalidInputError):
        poly_partial(var(2, 0), i)


def test_jacobian_symmetrization_d2():
    assert jacobian_det_poly(symmetrization_map(2)) == var(2, 0) - var(2, 1)


def test_jacobian_symmetrization_d3_value():
    assert poly_eval(jacobian_det_poly(symmetrization_map(3)), [1, 2, 3]) == -2


def test_jacobian_identity():
    ident = PolyMapExpr([var(3, i) for i in range(3)])
    assert jacobian_det_poly(ident) == MultiPoly.constant(3)


@pytest.mark.parametrize("d,k,z,expected", [(2, 1, [1, 2], 3), (2, 2, [1, 2], 2), (3, 2, [1, 2, 3], 11)])
def test_elementary_symmetric(d, k, z, expected):
    p = elementary_symmetric(d, k)
    assert poly_eval(p, z) == expected
    assert all(c == 1 for c in p.terms.values())


@pytest.mark.parametrize("k", [0, 4])
def test_elementary_symmetric_range(k):
    with pytest.raises(InvalidInputError):
        elementary_symmetric(3, k)


def test_zero_coefficients_dropped():
    p = MultiPoly(2, {(1, 0): 1, (0, 1): 0})
    assert list(p.terms) == [(1, 0)]
    assert (var(2, 0) - var(2, 0)).is_zero()


def test_bad_exponent_rejected():
    with pytest.raises(InvalidInputError):
        MultiPoly(2, {(1,): 1})
    with pytest.raises(InvalidInputError):
        MultiPoly(2, {(1, -1): 1})


def test_polymap_needs_square_shape():
    with pytest.raises(InvalidInputError):
        PolyMapExpr([var(2, 0)])


def test_json_roundtrip():
    p = MultiPoly(3, {(1, 0, 2): 2 - 1j, (0, 0, 0): 0.5})
    text = p.to_json()
    assert json.loads(text)["dim"] == 3
    assert MultiPoly.from_json(text) == p


def test_from_dict_malformed():
    with pytest.raises(InvalidInputError):
        MultiPoly.from_dict({"dim": 2})


def test_polymap_roundtrip():
    m = symmetrization_map(3)
    assert PolyMapExpr.from_dict(m.to_dict()).components == m.components


# properties

coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
exponent = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(exponent, coeff, max_size=6).map(lambda t: MultiPoly(2, t))
points = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
).map(lambda t: np.array([complex(t[0], t[1]), complex(t[2], t[3])]))


@settings(max_examples=60, deadline=None)
@given(polys, points, st.sampled_from([1, 2]))
def test_partial_matches_central_difference(p, z, i):
    h = 1e-5
    e = np.zeros(2)
    e[i - 1] = h
    fd = (poly_eval(p, z + e) - poly_eval(p, z - e)) / (2 * h)
    assert abs(poly_eval(poly_partial(p, i), z) - fd) <= 1e-6 * max(1.0, abs(fd))


@settings(max_examples=60, deadline=None)
@given(polys, polys, coeff, coeff, points)
def test_eval_is_linear(p, q, a, b, z):
    lhs = poly_eval(a * p + b * q, z)
    rhs = a * poly_eval(p, z) + b * poly_eval(q, z)
    scale = abs(a) * sum(abs(c) for c in p.terms.values()) + abs(b) * sum(
        abs(c) for c in q.terms.values()
    )
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, scale)


@settings(max_examples=40, deadline=None)
@given(polys, polys, points)
def test_product_evaluates_as_product(p, q, z):
    assert abs(poly_eval(p * q, z) - poly_eval(p, z) * poly_eval(q, z)) <= 1e-9 * (
        1 + abs(poly_eval(p, z)) * abs(poly_eval(q, z))
    )


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_vandermonde_exact(d):
    V = MultiPoly.constant(d)
    for i in range(d):
        for j in range(i + 1, d):
            V = V * (var(d, i) - var(d, j))
    assert jacobian_det_poly(symmetrization_map(d)) == V
