"""Finite pseudoreflection groups as explicit sets of unitary matrices.

Convention: a group element ``g`` acts on points by ``g . z = g^{-1} z`` and on
functions by ``g(f)(z) = f(g^{-1} . z) = f(g z)``.  A function is
``chi``-relative invariant when ``g(f) = chi(g) f`` for all ``g``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    GroupTooLargeError,
    InvalidInputError,
    NotACharacterError,
    UnsupportedError,
)
from .mpoly import MultiPoly

MATRIX_TOL = 1e-10
RANK_TOL = 1e-9
DEFAULT_CAP = 10_000


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Unitary matrix with its inverse and determinant cached."""

    matrix: np.ndarray
    inverse: np.ndarray
    det: complex

    @classmethod
    def from_matrix(cls, m, tol: float = MATRIX_TOL) -> "GroupElement":
        m = np.array(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"group element must be a square matrix, got {m.shape}")
        inv = m.conj().T
        if np.linalg.norm(m @ inv - np.eye(m.shape[0])) > tol:
            raise InvalidInputError("group element is not unitary")
        m.setflags(write=False)
        inv.setflags(write=False)
        return cls(m, inv, complex(np.linalg.det(m)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def inv(self) -> "GroupElement":
        return GroupElement(self.inverse, self.matrix, 1.0 / self.det)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.matrix @ other.matrix, other.inverse @ self.inverse, self.det * other.det
        )

    def act(self, z) -> np.ndarray:
        return act_point(self, z)


def _key(m: np.ndarray) -> tuple:
    flat = np.concatenate([m.real.ravel(), m.imag.ravel()])
    return tuple(np.round(flat * 1e6).astype(np.int64).tolist())


@dataclass(eq=False)
class FiniteGroup:
    """A finite matrix group listed element by element.

    ``kind`` and ``params`` record the catalog constructor
    (``symmetric``, ``dihedral``, ``cyclic_product``) or ``explicit``.
    """

    dimension: int
    elements: tuple[GroupElement, ...]
    name: str
    kind: str = "explicit"
    params: tuple = ()
    _table: np.ndarray | None = field(default=None, repr=False)
    _inverse_index: tuple[int, ...] | None = field(default=None, repr=False)
    _lookup: dict | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, m) -> int:
        """Index of the element equal to ``m`` within ``MATRIX_TOL`` (Frobenius)."""
        m = m.matrix if isinstance(m, GroupElement) else np.asarray(m, dtype=complex)
        if self._lookup is None:
            self._lookup = {_key(g.matrix): i for i, g in enumerate(self.elements)}
        i = self._lookup.get(_key(m))
        if i is not None and np.linalg.norm(self.elements[i].matrix - m) <= MATRIX_TOL:
            return i
        stack = np.stack([g.matrix for g in self.elements])
        dist = np.linalg.norm(stack - m, axis=(1, 2))
        i = int(np.argmin(dist))
        if dist[i] > MATRIX_TOL:
            raise InvalidInputError("matrix is not an element of the group")
        return i

    @property
    def identity_index(self) -> int:
        return self.index_of(np.eye(self.dimension))

    @property
    def inverse_index(self) -> tuple[int, ...]:
        if self._inverse_index is None:
            self._inverse_index = tuple(self.index_of(g.inverse) for g in self.elements)
        return self._inverse_index

    @property
    def table(self) -> np.ndarray:
        """Multiplication table: ``table[i, j]`` is the index of ``g_i g_j``."""
        if self._table is None:
            n = self.order
            t = np.empty((n, n), dtype=np.int64)
            for i, a in enumerate(self.elements):
                for j, b in enumerate(self.elements):
                    t[i, j] = self.index_of(a.matrix @ b.matrix)
            self._table = t
        return self._table

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "params": list(self.params),
            "dim": self.dimension,
            "elements": [
                [[[float(x.real), float(x.imag)] for x in row] for row in g.matrix]
                for g in self.elements
            ],
        }

    @classmethod
    def from_dict(cls, data) -> "FiniteGroup":
        try:
            mats = [
                np.array([[complex(re, im) for re, im in row] for row in m])
                for m in data["elements"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed group record: {exc}") from exc
        elems = tuple(GroupElement.from_matrix(m) for m in mats)
        return cls(
            int(data.get("dim", mats[0].shape[0])),
            elems,
            str(data.get("name", "explicit")),
            str(data.get("kind", "explicit")),
            tuple(data.get("params", ())),
        )


@dataclass(frozen=True, eq=False)
class Character:
    """One-dimensional character: ``values[i]`` is ``chi(group.elements[i])``."""

    group: FiniteGroup
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.group.order,):
            raise NotACharacterError("character table length must equal the group order")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, index: int) -> complex:
        return complex(self.values[index])

    def of_inverse(self) -> np.ndarray:
        """Values ``chi(g^{-1})`` in element order."""
        return self.values[list(self.group.inverse_index)]

    def is_trivial(self) -> bool:
        return bool(np.allclose(self.values, 1.0, atol=1e-12))

    def check(self, tol: float = 1e-10) -> None:
        """Raise ``NotACharacterError`` unless the table is multiplicative."""
        v = self.values
        if abs(v[self.group.identity_index] - 1) > tol:
            raise NotACharacterError("character is not 1 at the identity")
        if np.max(np.abs(np.abs(v) - 1)) > tol:
            raise NotACharacterError("character values must have modulus one")
        t = self.group.table
        if np.max(np.abs(v[t] - np.outer(v, v))) > tol:
            raise NotACharacterError("character is not multiplicative")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "values": [[float(x.real), float(x.imag)] for x in self.values],
        }


@dataclass(frozen=True, eq=False)
class ReflectionHyperplane:
    """Reflecting hyperplane ``{linear_form = 0}`` with its cyclic stabilizer.

    ``generator`` generates the pointwise stabilizer, which has ``order``
    elements; ``det(generator)`` is a primitive ``order``-th root of unity.
    """

    linear_form: MultiPoly
    generator: GroupElement
    generator_index: int
    order: int


# group construction


def _generate(gens: Sequence[GroupElement], dim: int, cap: int) -> list[GroupElement]:
    ident = GroupElement.from_matrix(np.eye(dim))
    elems = [ident]
    seen = {_key(ident.matrix)}
    queue = deque([ident])
    while queue:
        a = queue.popleft()
        for g in gens:
            b = a @ g
            k = _key(b.matrix)
            if k in seen:
                continue
            seen.add(k)
            elems.append(b)
            if len(elems) > cap:
                raise GroupTooLargeError(f"group closure exceeds {cap} elements")
            queue.append(b)
    return elems


def _from_generators(mats, name, kind, params, cap) -> FiniteGroup:
    gens = [GroupElement.from_matrix(m) for m in mats]
    if not gens:
        raise InvalidInputError("need at least one generator")
    dim = gens[0].dim
    if any(g.dim != dim for g in gens):
        raise InvalidInputError("generators have different sizes")
    elems = _generate(gens, dim, cap)
    return FiniteGroup(dim, tuple(elems), name, kind, tuple(params))


def root_of_unity(n: int, j: int = 1) -> complex:
    """``exp(2 pi i j / n)`` with rounding noise removed from exact cases."""
    z = np.exp(2j * np.pi * j / n)
    re = 0.0 if abs(z.real) < 1e-15 else z.real
    im = 0.0 if abs(z.imag) < 1e-15 else z.imag
    return complex(re, im)


def symmetric(d: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Permutation matrices of the symmetric group on ``d`` letters."""
    d = int(d)
    if d < 1:
        raise InvalidInputError("symmetric group needs d >= 1")
    gens = []
    for i in range(d - 1):
        p = np.eye(d)
        p[[i, i + 1]] = p[[i + 1, i]]
        gens.append(p)
    if not gens:
        gens = [np.eye(d)]
    return _from_generators(gens, f"sym:{d}", "symmetric", (d,), cap)


def dihedral(k: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Dihedral group of order ``2k`` acting on ``C^2``.

    Generated by ``diag(w, 1/w)`` (``w = exp(2 pi i / k)``) and the swap.
    """
    k = int(k)
    if k < 2:
        raise InvalidInputError("dihedral group needs k >= 2")
    w = root_of_unity(k)
    delta = np.diag([w, 1 / w])
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    return _from_generators([delta, swap], f"dihedral:{k}", "dihedral", (k,), cap)


def cyclic_product(*orders: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """``Z_{n_1} x ... x Z_{n_d}`` acting diagonally by roots of unity."""
    orders = tuple(int(n) for n in orders)
    if not orders or any(n < 1 for n in orders):
        raise InvalidInputError("cyclic_product needs positive orders")
    d = len(orders)
    gens = []
    for j, n in enumerate(orders):
        diag = np.ones(d, dtype=complex)
        diag[j] = root_of_unity(n)
        gens.append(np.diag(diag))
    name = "cyclic:" + ",".join(map(str, orders))
    return _from_generators(gens, name, "cyclic_product", orders, cap)


def explicit(matrices, name: str = "explicit", cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Group generated by the given unitary matrices."""
    return _from_generators(list(matrices), name, "explicit", (), cap)


def build_group(spec, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Build a catalog group.

    ``spec`` is either a string ``"sym:d"``, ``"dihedral:k"``,
    ``"cyclic:n1,n2,..."`` or a tuple ``(kind, *params)`` with kind one of
    ``symmetric``, ``dihedral``, ``cyclic_product``, ``explicit``.
    """
    if isinstance(spec, str):
        kind, _, rest = spec.partition(":")
        try:
            params = tuple(int(x) for x in rest.split(",") if x.strip())
        except ValueError as exc:
            raise InvalidInputError(f"bad group spec {spec!r}") from exc
        kind = {"sym": "symmetric", "cyclic": "cyclic_product"}.get(kind, kind)
    else:
        kind, *params = spec
    if kind == "symmetric" and len(params) == 1:
        return symmetric(params[0], cap=cap)
    if kind == "dihedral" and len(params) == 1:
        return dihedral(params[0], cap=cap)
    if kind == "cyclic_product" and params:
        return cyclic_product(*params, cap=cap)
    if kind == "explicit" and len(params) == 1:
        return explicit(params[0], cap=cap)
    raise InvalidInputError(f"unknown group spec {spec!r}")


# actions


def act_point(g: GroupElement, z) -> np.ndarray:
    """``g . z = g^{-1} z`` for a point or a batch of points."""
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != g.dim:
        raise InvalidInputError(f"point dimension {z.shape[-1]} != group dimension {g.dim}")
    return z @ g.inverse.T


def act_function(g: GroupElement, f: Callable) -> Callable:
    """``g(f)``, the function ``z -> f(g^{-1} . z)``."""
    ginv = g.inv()
    return lambda z: f(act_point(ginv, z))


def is_pseudoreflection(g: GroupElement) -> bool:
    """True when ``id - g`` has rank one (``g`` is assumed of finite order)."""
    sv = np.linalg.svd(np.eye(g.dim) - g.matrix, compute_uv=False)
    return int(np.sum(sv > RANK_TOL)) == 1


def _normal_form(g: GroupElement) -> np.ndarray:
    r = np.eye(g.dim) - g.matrix
    u = r[int(np.argmax(np.linalg.norm(r, axis=1)))]
    mags = np.abs(u)
    lead = int(np.flatnonzero(mags >= mags.max() - 1e-9)[0])
    u = u / u[lead]
    # drop rounding noise so exact forms such as z1 - z2 come out exact
    return np.where(np.abs(u.real) < 1e-12, 0, u.real) + 1j * np.where(np.abs(u.imag) < 1e-12, 0, u.imag)


def reflecting_hyperplanes(G: FiniteGroup) -> list[ReflectionHyperplane]:
    """Distinct reflecting hyperplanes of ``G`` with their cyclic stabilizers.

    The linear form is scaled so that its first largest-magnitude
    coefficient equals 1.
    """
    classes: dict[tuple, list[int]] = {}
    normals: dict[tuple, np.ndarray] = {}
    for i, g in enumerate(G.elements):
        if not is_pseudoreflection(g):
            continue
        u = _normal_form(g)
        key = tuple(np.round(np.concatenate([u.real, u.imag]) * 1e8).astype(np.int64))
        classes.setdefault(key, []).append(i)
        normals.setdefault(key, u)
    if not classes:
        raise InvalidInputError(f"group {G.name} contains no pseudoreflections")
    out = []
    for key, members in classes.items():
        m = len(members) + 1
        target = np.exp(2j * np.pi / m)
        gen = min(members, key=lambda i: abs(G.elements[i].det - target))
        det = G.elements[gen].det
        powers = det ** np.arange(1, m)
        if abs(powers[-1] * det - 1) > 1e-8 or np.any(np.abs(powers[:-1] - 1) < 1e-8):
            raise InvalidInputError("hyperplane stabilizer is not cyclic of the expected order")
        out.append(
            ReflectionHyperplane(MultiPoly.linear(normals[key]), G.elements[gen], gen, m)
        )
    return out


# characters


def trivial_character(G: FiniteGroup) -> Character:
    return Character(G, np.ones(G.order, dtype=complex), "trivial")


def sign_character(G: FiniteGroup) -> Character:
    """``sgn(g) = 1 / det(g)``."""
    return Character(G, np.array([1.0 / g.det for g in G.elements]), "sign")


def _root_exponent(x: complex, n: int) -> int:
    return int(np.round(np.angle(x) * n / (2 * np.pi))) % n


def one_dim_characters(G: FiniteGroup) -> list[Character]:
    """All one-dimensional characters of a catalog group, trivial first."""
    if G.kind == "symmetric":
        d = G.params[0]
        if d == 1:
            return [trivial_character(G)]
        return [trivial_character(G), sign_character(G)]
    if G.kind == "dihedral":
        k = G.params[0]
        chars = [trivial_character(G), sign_character(G)]
        if k % 2 == 0:
            rho1, rho2 = [], []
            for g in G.elements:
                m = g.matrix
                if abs(m[0, 1]) < 0.5:  # rotation diag(w^j, w^-j)
                    j = _root_exponent(m[0, 0], k)
                    rho1.append((-1) ** j)
                    rho2.append((-1) ** j)
                else:  # swap @ diag(w^j, w^-j) has w^j in the lower-left slot
                    j = _root_exponent(m[1, 0], k)
                    rho1.append((-1) ** j)
                    rho2.append(-((-1) ** j))
            chars.append(Character(G, np.array(rho1, dtype=complex), "rho1"))
            chars.append(Character(G, np.array(rho2, dtype=complex), "rho2"))
        return chars
    if G.kind == "cyclic_product":
        orders = G.params
        exps = np.array(
            [
                [_root_exponent(g.matrix[j, j], n) for j, n in enumerate(orders)]
                for g in G.elements
            ]
        )
        chars = []
        for r in itertools.product(*(range(n) for n in orders)):
            phase = sum(exps[:, j] * r[j] / n for j, n in enumerate(orders))
            label = "chi(" + ",".join(map(str, r)) + ")"
            chars.append(Character(G, np.exp(2j * np.pi * phase), label))
        return chars
    raise UnsupportedError(f"one-dimensional characters not available for {G.kind} groups")


def character_exponents(chi: Character, hyperplanes: Sequence[ReflectionHyperplane]) -> list[int]:
    """Least ``c_i >= 0`` with ``chi(a_i) = det(a_i)^{c_i}`` for each hyperplane."""
    out = []
    for h in hyperplanes:
        val = chi(h.generator_index)
        det = h.generator.det
        for c in range(h.order):
            if abs(det**c - val) < 1e-8:
                out.append(c)
                break
        else:
            raise NotACharacterError(
                f"chi(a) = {val} is not a power of det(a) = {det} on a reflecting hyperplane"
            )
    return out


def relative_invariant(chi: Character, hyperplanes: Sequence[ReflectionHyperplane]) -> MultiPoly:
    """Generator ``prod_i l_i^{c_i}`` of the ``chi``-relative invariant polynomials."""
    result = MultiPoly.constant(chi.group.dimension)
    for h, c in zip(hyperplanes, character_exponents(chi, hyperplanes)):
        if c:
            result = result * h.linear_form**c
    return result.chop()


def project(chi: Character, f: Callable, z, G: FiniteGroup | None = None):
    """Averaging projection ``(1/|G|) sum_g chi(g^{-1}) f(g^{-1} . z)``."""
    G = chi.group if G is None else G
    z = np.asarray(z, dtype=complex)
    coeffs = chi.of_inverse()
    total = 0
    for c, g in zip(coeffs, G.elements):
        # g^{-1} . z is the plain matrix product g z
        total = total + c * np.asarray(f(z @ g.matrix.T))
    total = total / G.order
    return complex(total) if np.ndim(total) == 0 else total
