"""Exact integer matrix tools: adjugate, Smith normal form, monomial deck groups.

All arithmetic is done on Python integers; results are returned as
``int64`` numpy arrays, so entries must fit in 64 bits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GroupTooLargeError, InvalidInputError
from .group import DEFAULT_CAP, FiniteGroup, GroupElement, root_of_unity

MAX_SIZE = 8
_INT64_MAX = 2**63 - 1


def _to_rows(B) -> list[list[int]]:
    arr = np.asarray(B)
    if arr.ndim != 2:
        raise InvalidInputError("integer matrix must be two-dimensional")
    rows = []
    for row in arr.tolist():
        out = []
        for x in row:
            if int(x) != x:
                raise InvalidInputError(f"non-integer entry {x!r}")
            out.append(int(x))
        rows.append(out)
    return rows


def _square(B) -> list[list[int]]:
    rows = _to_rows(B)
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise InvalidInputError("matrix must be square")
    if n > MAX_SIZE:
        raise InvalidInputError(f"matrix size {n} exceeds supported maximum {MAX_SIZE}")
    return rows


def _to_array(rows) -> np.ndarray:
    if any(abs(x) > _INT64_MAX for r in rows for x in r):
        raise InvalidInputError("integer entries overflow 64 bits")
    return np.array(rows, dtype=np.int64).reshape(len(rows), -1)


def det_int(rows: list[list[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def adjugate(B) -> np.ndarray:
    """Classical adjugate, ``B @ adj(B) = det(B) I``."""
    rows = _square(B)
    n = len(rows)
    if n == 1:
        return _to_array([[1]])
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            # transpose of the cofactor matrix
            adj[j][i] = (-1) ** (i + j) * det_int(minor)
    return _to_array(adj)


@dataclass(frozen=True)
class SNFResult:
    """``A = P @ D @ Q`` with ``P, Q`` unimodular and ``D = diag(delta)``."""

    P: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    delta: tuple[int, ...]


def smith_normal_form(A) -> SNFResult:
    """Smith normal form of a nonsingular square integer matrix.

    Reduction uses row and column operations, always pivoting on the entry
    of least nonzero absolute value.  The diagonal is returned non-negative
    with each entry dividing the next.
    """
    D = _square(A)
    n = len(D)
    if det_int(D) == 0:
        raise InvalidInputError("Smith normal form requires a nonsingular matrix")
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]

    # Invariant: P @ D @ Q == A.  A row op D <- E D is paired with P <- P E^{-1},
    # a column op D <- D F with Q <- F^{-1} Q.
    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        for r in P:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        Q[i], Q[j] = Q[j], Q[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        for r in P:
            r[src] -= c * r[dst]

    def add_col(dst, src, c):  # col_dst += c * col_src
        for r in D:
            r[dst] += c * r[src]
        Q[src] = [a - c * b for a, b in zip(Q[src], Q[dst])]

    def negate_row(i):
        D[i] = [-a for a in D[i]]
        for r in P:
            r[i] = -r[i]

    for t in range(n):
        while True:
            entries = [
                (abs(D[i][j]), i, j)
                for i in range(t, n)
                for j in range(t, n)
                if D[i][j] != 0
            ]
            _, pi, pj = min(entries)
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = D[t][t]
            done = True
            for i in range(t + 1, n):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    done = done and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    done = done and D[t][j] == 0
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            negate_row(t)
    delta = tuple(D[i][i] for i in range(n))
    return SNFResult(_to_array(P), _to_array(D), _to_array(Q), delta)


def monomial_deck_group(A, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Diagonal unitary ``t`` with ``prod_j t_j^{A_ij} = 1`` for every row ``i``.

    Elements are ``diag(exp(2 pi i (A^{-1} m)_j))`` for ``m`` running over
    coset representatives ``P n`` of ``Z^d / A Z^d``, ``0 <= n_i < delta_i``.
    The group has ``|det A|`` elements.
    """
    rows = _square(A)
    n = len(rows)
    det = det_int(rows)
    if det == 0:
        raise InvalidInputError("deck group requires a nonsingular matrix")
    if abs(det) > cap:
        raise GroupTooLargeError(f"deck group order {abs(det)} exceeds cap {cap}")
    snf = smith_normal_form(rows)
    adj = adjugate(rows).tolist()
    P = snf.P.tolist()
    mats = []
    seen = set()
    for idx in itertools.product(*(range(abs(d)) for d in snf.delta)):
        m = [sum(P[i][k] * idx[k] for k in range(n)) for i in range(n)]
        # A^{-1} m = adj(A) m / det(A), reduced mod 1
        frac = [
            Fraction(sum(adj[j][i] * m[i] for i in range(n)), det) % 1 for j in range(n)
        ]
        key = tuple(frac)
        if key in seen:
            continue
        seen.add(key)
        mats.append(np.diag([root_of_unity(x.denominator, x.numerator) for x in frac]))
    elems = tuple(GroupElement.from_matrix(m) for m in mats)
    name = "deck:" + str(rows)
    return FiniteGroup(n, elems, name, "explicit", ())
