"""Sparse multivariate polynomials with complex coefficients.

Polynomials are immutable.  Terms live in a dict keyed by exponent tuples and
are kept in lexicographic order, so two polynomials compare equal exactly
when their term tables match.  Evaluation is vectorised over the leading axes
of the point array: a point batch has shape ``(..., dim)``.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError

Exponent = tuple[int, ...]


def _as_points(z, dim: int) -> np.ndarray:
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise InvalidInputError(
            f"expected points with last axis of length {dim}, got shape {arr.shape}"
        )
    return arr


class MultiPoly:
    """Polynomial in ``dim`` complex variables.

    Parameters
    ----------
    dim : int
        Number of variables.
    terms : mapping
        Exponent tuple -> coefficient.  Zero coefficients are dropped and
        repeated exponents are not possible (it is a mapping).
    """

    __slots__ = ("_dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], complex] | None = None):
        if int(dim) < 1:
            raise InvalidInputError("polynomial dimension must be positive")
        self._dim = int(dim)
        table: dict[Exponent, complex] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self._dim or any(e < 0 for e in exp):
                raise InvalidInputError(f"bad exponent {exp} for dimension {self._dim}")
            c = complex(coeff)
            if c != 0:
                table[exp] = table.get(exp, 0j) + c
        self._terms = {e: table[e] for e in sorted(table) if table[e] != 0}

    # construction helpers

    @classmethod
    def constant(cls, dim: int, value: complex = 1.0) -> "MultiPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim: int, i: int) -> "MultiPoly":
        """The coordinate function ``z_i`` (0-based ``i``)."""
        if not 0 <= i < dim:
            raise InvalidInputError(f"variable index {i} out of range for dimension {dim}")
        exp = [0] * dim
        exp[i] = 1
        return cls(dim, {tuple(exp): 1.0})

    @classmethod
    def linear(cls, coeffs: Sequence[complex]) -> "MultiPoly":
        """Linear form ``sum_j coeffs[j] * z_j``."""
        dim = len(coeffs)
        terms = {}
        for j, c in enumerate(coeffs):
            exp = [0] * dim
            exp[j] = 1
            terms[tuple(exp)] = c
        return cls(dim, terms)

    # accessors

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> dict[Exponent, complex]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e in self._terms), default=-1)

    def coefficient(self, exp: Sequence[int]) -> complex:
        return self._terms.get(tuple(exp), 0j)

    def chop(self, rtol: float = 1e-12) -> "MultiPoly":
        """Zero real and imaginary parts below ``rtol`` times the largest coefficient."""
        if not self._terms:
            return self
        tol = rtol * max(abs(c) for c in self._terms.values())
        snap = lambda x: 0.0 if abs(x) < tol else x  # noqa: E731
        return MultiPoly(self.dim, {e: complex(snap(c.real), snap(c.imag)) for e, c in self._terms.items()})

    # arithmetic

    def _check_dim(self, other: "MultiPoly") -> None:
        if other._dim != self._dim:
            raise InvalidInputError(
                f"dimension mismatch: {self._dim} vs {other._dim}"
            )

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check_dim(other)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly.constant(self._dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0j) + c
        return MultiPoly(self._dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self._dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, complex] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0j) + c1 * c2
        return MultiPoly(self._dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise InvalidInputError("only non-negative integer powers are supported")
        result = MultiPoly.constant(self._dim)
        base = self
        n = int(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._dim == other._dim and self._terms == other._terms

    def __hash__(self):
        return hash((self._dim, tuple(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return f"MultiPoly({self._dim}, 0)"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(
                f"z{j + 1}" + (f"^{k}" if k > 1 else "") for j, k in enumerate(e) if k
            )
            parts.append(f"({c:g})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # evaluation

    def __call__(self, z) -> np.ndarray | complex:
        return poly_eval(self, z)

    def partial(self, i: int) -> "MultiPoly":
        return poly_partial(self, i)

    # serialisation

    def to_dict(self) -> dict:
        return {
            "dim": self._dim,
            "terms": [
                {"exp": list(e), "re": c.real, "im": c.imag}
                for e, c in self._terms.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MultiPoly":
        try:
            dim = int(data["dim"])
            terms: dict[Exponent, complex] = {}
            for t in data["terms"]:
                e = tuple(int(x) for x in t["exp"])
                terms[e] = terms.get(e, 0j) + complex(t.get("re", 0.0), t.get("im", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed polynomial record: {exc}") from exc
        return cls(dim, terms)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MultiPoly":
        return cls.from_dict(json.loads(text))


def poly_eval(p: MultiPoly, z):
    """Evaluate ``p`` at a point or a batch of points.

    A single point (1-d input) gives a Python complex; a batch of shape
    ``(..., dim)`` gives an array of shape ``(...)``.
    """
    arr = _as_points(z, p.dim)
    out = np.zeros(arr.shape[:-1], dtype=complex)
    for exp, coeff in p._terms.items():
        mono = np.full(arr.shape[:-1], coeff, dtype=complex)
        for j, k in enumerate(exp):
            if k:
                mono = mono * arr[..., j] ** k
        out = out + mono
    if arr.ndim == 1:
        return complex(out)
    return out


def poly_partial(p: MultiPoly, i: int) -> MultiPoly:
    """Formal derivative with respect to ``z_i``; ``i`` is 1-based."""
    if not 1 <= i <= p.dim:
        raise InvalidInputError(f"coordinate index {i} out of range 1..{p.dim}")
    j = i - 1
    out = {}
    for exp, coeff in p._terms.items():
        k = exp[j]
        if k == 0:
            continue
        e = list(exp)
        e[j] = k - 1
        out[tuple(e)] = coeff * k
    return MultiPoly(p.dim, out)


def _det(matrix: list[list[MultiPoly]], dim: int) -> MultiPoly:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = MultiPoly(dim)
    for col in range(n):
        entry = matrix[0][col]
        if entry.is_zero():
            continue
        minor = [row[:col] + row[col + 1:] for row in matrix[1:]]
        term = entry * _det(minor, dim)
        total = total + term if col % 2 == 0 else total - term
    return total


class PolyMapExpr:
    """Polynomial self-map of ``C^dim`` given by its component polynomials."""

    def __init__(self, components: Iterable[MultiPoly]):
        comps = tuple(components)
        if not comps:
            raise InvalidInputError("a polynomial map needs at least one component")
        dim = comps[0].dim
        if any(c.dim != dim for c in comps) or len(comps) != dim:
            raise InvalidInputError(
                "a polynomial map C^d -> C^d needs d components in d variables"
            )
        self.components = comps
        self.dim = dim
        self._jac: MultiPoly | None = None

    def __call__(self, z) -> np.ndarray:
        arr = _as_points(z, self.dim)
        return np.stack([np.asarray(poly_eval(c, arr)) for c in self.components], axis=-1)

    @property
    def jacobian_poly(self) -> MultiPoly:
        if self._jac is None:
            self._jac = jacobian_det_poly(self)
        return self._jac

    def jacobian(self, z):
        """Complex Jacobian determinant at ``z`` (point or batch)."""
        return poly_eval(self.jacobian_poly, z)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "components": [c.to_dict() for c in self.components]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PolyMapExpr":
        return cls(MultiPoly.from_dict(c) for c in data["components"])

    def __repr__(self) -> str:
        return f"PolyMapExpr({list(self.components)!r})"


def jacobian_det_poly(m: PolyMapExpr) -> MultiPoly:
    """Determinant of the Jacobian matrix of ``m``, expanded by cofactors."""
    rows = [[poly_partial(c, j) for j in range(1, m.dim + 1)] for c in m.components]
    return _det(rows, m.dim)


def elementary_symmetric(d: int, k: int) -> MultiPoly:
    """The elementary symmetric polynomial of degree ``k`` in ``d`` variables."""
    if not 1 <= k <= d:
        raise InvalidInputError(f"degree {k} out of range 1..{d}")
    terms = {}
    for subset in itertools.combinations(range(d), k):
        e = [0] * d
        for j in subset:
            e[j] = 1
        terms[tuple(e)] = 1.0
    return MultiPoly(d, terms)
