"""Kernel evaluators on fiber representatives.

A quotient kernel ``B(theta(z), theta(w))`` is always evaluated from fiber
representatives ``z, w`` of the covering domain.  All evaluators broadcast
over leading axes: ``z`` and ``w`` have shape ``(..., d)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInputError, NearSingularError
from .group import (
    Character,
    FiniteGroup,
    one_dim_characters,
    reflecting_hyperplanes,
    relative_invariant,
    root_of_unity,
    sign_character,
    trivial_character,
)
from .intlin import _square, adjugate, det_int, monomial_deck_group
from .maps import BallAutomorphism, ConjugatedMap
from .mpoly import MultiPoly

POLE_TOL = 1e-12
HYPERPLANE_TOL = 1e-9


def _pts(z, dim: int) -> np.ndarray:
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise InvalidInputError(f"expected points of dimension {dim}, got shape {arr.shape}")
    return arr


def _guard(x, tol: float, what: str) -> None:
    if np.any(np.abs(x) < tol):
        raise NearSingularError(what)


def _evaluator(f) -> Callable:
    """Accept a MultiPoly, a map with ``.jacobian`` or a plain callable."""
    if f is None:
        return lambda z: np.ones(np.shape(z)[:-1], dtype=complex)
    if isinstance(f, MultiPoly):
        return lambda z: np.asarray(f(z))
    if hasattr(f, "jacobian"):
        return lambda z: np.asarray(f.jacobian(z))
    return lambda z: np.asarray(f(z))


def _linear(M: np.ndarray) -> Callable:
    return lambda z: z @ M.T


@dataclass(frozen=True, eq=False)
class KernelOracle:
    """Two-point kernel ``K(z, w)``, holomorphic in ``z`` and antiholomorphic in ``w``.

    ``fiber_maps`` lists maps sending a representative to every other point
    of its fiber; the kernel value must not depend on the choice.
    """

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str
    dim: int
    fiber_maps: tuple = field(default=(), repr=False)

    def __call__(self, z, w):
        z = _pts(z, self.dim)
        w = _pts(w, self.dim)
        out = np.asarray(self.evaluator(z, w), dtype=complex)
        return complex(out) if out.ndim == 0 else out

    def fiber(self, z) -> list[np.ndarray]:
        """All fiber representatives of ``z`` (including ``z`` itself)."""
        z = _pts(z, self.dim)
        if not self.fiber_maps:
            return [z]
        return [np.asarray(f(z)) for f in self.fiber_maps]


# base kernels


def _polydisc_eval(lam: float) -> Callable:
    def ev(z, w):
        t = 1 - z * np.conj(w)
        _guard(t, POLE_TOL, "polydisc kernel evaluated at a boundary pole")
        if lam == 2:
            return np.prod(t**-2, axis=-1)
        return np.prod(np.power(t, -lam), axis=-1)

    return ev


def base_kernel(kind: str, d: int, lam: float | None = None) -> KernelOracle:
    """Bergman kernel of the polydisc or ball, or the weighted polydisc kernel.

    Parameters
    ----------
    kind : {"polydisc", "ball", "weighted_polydisc"}
    d : int
        Dimension.
    lam : float, optional
        Weight exponent for ``weighted_polydisc``; must exceed 1.
    """
    if d < 1:
        raise InvalidInputError("dimension must be positive")
    if kind == "polydisc":
        return KernelOracle(_polydisc_eval(2), f"polydisc({d})", d)
    if kind == "weighted_polydisc":
        if lam is None or lam <= 1:
            raise InvalidInputError("weighted polydisc kernel needs lam > 1")
        return KernelOracle(_polydisc_eval(float(lam)), f"weighted_polydisc({d},{lam})", d)
    if kind == "ball":
        def ev(z, w):
            t = 1 - np.sum(z * np.conj(w), axis=-1)
            _guard(t, POLE_TOL, "ball kernel evaluated at a boundary pole")
            return t ** -(d + 1)

        return KernelOracle(ev, f"ball({d})", d)
    raise InvalidInputError(f"unknown base kernel kind {kind!r}")


# group-averaging formulas


def quotient_kernel_sum(
    G: FiniteGroup, chi: Character, ell_rho, base: KernelOracle
) -> KernelOracle:
    """Kernel of the ``chi``-relative invariant subspace pushed to the quotient.

    ``(z, w) -> sum_g chi(g^{-1}) base(g z, w) / (l(z) conj(l(w)))``, where
    ``g z`` is the plain matrix product (the action of ``g^{-1}``).
    ``ell_rho`` may be a MultiPoly, a callable or ``None`` (constant 1).
    """
    if G.dimension != base.dim:
        raise InvalidInputError("group and base kernel dimensions differ")
    coeffs = chi.of_inverse()
    mats = [g.matrix for g in G.elements]
    ell = _evaluator(ell_rho)

    def ev(z, w):
        lz, lw = ell(z), ell(w)
        _guard(lz, HYPERPLANE_TOL, "relative invariant vanishes at z")
        _guard(lw, HYPERPLANE_TOL, "relative invariant vanishes at w")
        total = 0
        for c, M in zip(coeffs, mats):
            total = total + c * base.evaluator(z @ M.T, w)
        return total / (lz * np.conj(lw))

    label = f"quotient_sum[{G.name},{chi.label},{base.label}]"
    return KernelOracle(ev, label, base.dim, tuple(_linear(M) for M in mats))


def quotient_kernel_sign(G: FiniteGroup, theta, base: KernelOracle) -> KernelOracle:
    """Sign-character case with ``l = J_theta`` taken from the actual map."""
    oracle = quotient_kernel_sum(G, sign_character(G), theta, base)
    return KernelOracle(
        oracle.evaluator, f"quotient_sign[{G.name},{base.label}]", base.dim, oracle.fiber_maps
    )


def conjugated_kernel(
    G: FiniteGroup, psi: BallAutomorphism, F_jacobian, base: KernelOracle
) -> KernelOracle:
    """``sum_g J_{Psi_g}(z) base(Psi_g z, w) / (J_F(z) conj(J_F(w)))``.

    ``Psi_g`` is the conjugate ``Psi^{-1} o g^{-1} o Psi``; the fibers of
    ``F`` are the orbits of these maps.
    """
    if G.dimension != base.dim or psi.dim != base.dim:
        raise InvalidInputError("dimension mismatch between group, automorphism and kernel")
    cmaps = [ConjugatedMap(psi, g) for g in G.elements]
    jac_f = _evaluator(F_jacobian)

    def ev(z, w):
        jz, jw = jac_f(z), jac_f(w)
        _guard(jz, HYPERPLANE_TOL, "J_F vanishes at z")
        _guard(jw, HYPERPLANE_TOL, "J_F vanishes at w")
        total = 0
        for m in cmaps:
            total = total + m.jacobian(z) * base.evaluator(m(z), w)
        return total / (jz * np.conj(jw))

    return KernelOracle(ev, f"conjugated[{G.name},{base.label}]", base.dim, tuple(cmaps))


def rudin_ball_kernel(G: FiniteGroup, psi: BallAutomorphism | None, F_jacobian) -> KernelOracle:
    """Bergman kernel of ``F(B_d)`` for a proper map ``F`` with deck group conjugate to ``G``."""
    psi = BallAutomorphism(d=G.dimension) if psi is None else psi
    oracle = conjugated_kernel(G, psi, F_jacobian, base_kernel("ball", G.dimension))
    return KernelOracle(oracle.evaluator, f"rudin[{G.name}]", G.dimension, oracle.fiber_maps)


# symmetrized polydisc


def _vandermonde(z: np.ndarray) -> np.ndarray:
    d = z.shape[-1]
    out = np.ones(z.shape[:-1], dtype=complex)
    for i in range(d):
        for j in range(i + 1, d):
            out = out * (z[..., i] - z[..., j])
    return out


def _entry_matrix(z, w, lam: float) -> np.ndarray:
    t = 1 - z[..., :, None] * np.conj(w[..., None, :])
    _guard(t, POLE_TOL, "kernel matrix entry at a boundary pole")
    return t**-2 if lam == 2 else np.power(t, -lam)


def permanent(A) -> np.ndarray | complex:
    """Permanent of ``(..., n, n)`` matrices by Ryser's inclusion-exclusion."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[-1]
    if A.ndim < 2 or A.shape[-2] != n:
        raise InvalidInputError("permanent needs square matrices")
    if n > 12:
        raise InvalidInputError("permanent supported up to n = 12")
    total = np.zeros(A.shape[:-2], dtype=complex)
    for size in range(1, n + 1):
        for cols in itertools.combinations(range(n), size):
            rowsums = A[..., list(cols)].sum(axis=-1)
            total = total + (-1) ** size * np.prod(rowsums, axis=-1)
    total = (-1) ** n * total
    return complex(total) if total.ndim == 0 else total


def symmetrized_kernel_det(d: int, lam: float = 2) -> KernelOracle:
    """``det((1 - z_i conj w_j)^(-lam)) / (V(z) conj V(w))`` with ``V`` the Vandermonde product."""
    if d < 1 or lam <= 1:
        raise InvalidInputError("need d >= 1 and lam > 1")

    def ev(z, w):
        vz, vw = _vandermonde(z), _vandermonde(w)
        _guard(vz, HYPERPLANE_TOL, "repeated coordinates in z")
        _guard(vw, HYPERPLANE_TOL, "repeated coordinates in w")
        return np.linalg.det(_entry_matrix(z, w, lam)) / (vz * np.conj(vw))

    perms = [np.eye(d)[list(p)] for p in itertools.permutations(range(d))]
    return KernelOracle(ev, f"sym_det({d},{lam})", d, tuple(_linear(P) for P in perms))


def symmetrized_kernel_perm(d: int, lam: float = 2) -> KernelOracle:
    """``perm((1 - z_i conj w_j)^(-lam))``."""
    if d < 1 or lam <= 1:
        raise InvalidInputError("need d >= 1 and lam > 1")

    def ev(z, w):
        return permanent(_entry_matrix(z, w, lam))

    perms = [np.eye(d)[list(p)] for p in itertools.permutations(range(d))]
    return KernelOracle(ev, f"sym_perm({d},{lam})", d, tuple(_linear(P) for P in perms))


# dihedral quotient of the bidisc


def _bidisc(a, b):
    return (1 - a) ** -2 * (1 - b) ** -2


def _dihedral_fibers(k: int) -> tuple:
    om = root_of_unity(k)
    maps = []
    for j in range(k):
        rot = np.diag([om**j, om**-j])
        maps.append(_linear(rot))
        maps.append(_linear(np.array([[0, 1], [1, 0]]) @ rot))
    return tuple(maps)


def dihedral_kernels(k: int) -> tuple[KernelOracle, KernelOracle]:
    """Sign-character and trivial-character kernels of ``D_{2k}`` on the bidisc.

    Both are written as explicit sums over the ``2k`` group elements: the
    rotations ``diag(w^i, w^-i)`` and the reflections that also swap the
    coordinates.  The sign kernel is divided by ``J(z) conj J(w)`` with
    ``J = k (z1^k - z2^k)``.
    """
    if k < 2:
        raise InvalidInputError("dihedral kernels need k >= 2")
    om = root_of_unity(k)

    def terms(z, w):
        z1, z2 = z[..., 0], z[..., 1]
        w1, w2 = np.conj(w[..., 0]), np.conj(w[..., 1])
        rot = refl = 0
        for i in range(1, k + 1):
            a, b = om**i, om ** (k - i)
            rot = rot + _bidisc(a * z1 * w1, b * z2 * w2)
            refl = refl + _bidisc(a * z2 * w1, b * z1 * w2)
        return rot, refl

    def sign_ev(z, w):
        jz = k * (z[..., 0] ** k - z[..., 1] ** k)
        jw = k * (w[..., 0] ** k - w[..., 1] ** k)
        _guard(jz, HYPERPLANE_TOL, "z lies on a reflecting line")
        _guard(jw, HYPERPLANE_TOL, "w lies on a reflecting line")
        rot, refl = terms(z, w)
        return (rot - refl) / (jz * np.conj(jw))

    def trivial_ev(z, w):
        rot, refl = terms(z, w)
        return rot + refl

    fibers = _dihedral_fibers(k)
    return (
        KernelOracle(sign_ev, f"dihedral_sign({k})", 2, fibers),
        KernelOracle(trivial_ev, f"dihedral_trivial({k})", 2, fibers),
    )


def dihedral_sign_kernel_simplified(k: int) -> KernelOracle:
    """Single-fraction form of the ``D_{2k}`` sign kernel.

    Each pair of rotation/reflection terms is combined over a common
    denominator; with ``X_l = 1 + z_l^2 conj(w1 w2)`` and
    ``a_i = w^i conj(w1) + w^-i conj(w2)`` the summand is
    ``(2(1 + z1 z2 conj(w1 w2)) - (z1 + z2) a_i)(w^i conj(w1) - w^-i conj(w2))``
    over ``(X1 X2 - a_i (z2 X1 + z1 X2) + z1 z2 a_i^2)^2``, and the sum is
    multiplied by ``(z1 - z2) / (k^2 (z1^k - z2^k) conj(w1^k - w2^k))``.
    Kept as an independent check on the explicit sum.
    """
    if k < 2:
        raise InvalidInputError("dihedral kernels need k >= 2")
    om = root_of_unity(k)

    def ev(z, w):
        z1, z2 = z[..., 0], z[..., 1]
        w1, w2 = np.conj(w[..., 0]), np.conj(w[..., 1])
        den0 = k**2 * (z1**k - z2**k) * (w1**k - w2**k)
        _guard(den0, HYPERPLANE_TOL, "point on a reflecting line")
        x1 = 1 + z1**2 * w1 * w2
        x2 = 1 + z2**2 * w1 * w2
        total = 0
        for i in range(1, k + 1):
            a = om**i * w1 + om ** (k - i) * w2
            num = (2 * (1 + z1 * z2 * w1 * w2) - (z1 + z2) * a) * (om**i * w1 - om ** (k - i) * w2)
            den = (x1 * x2 - a * (z2 * x1 + z1 * x2) + z1 * z2 * a**2) ** 2
            total = total + num / den
        return (z1 - z2) * total / den0

    return KernelOracle(ev, f"dihedral_sign_simplified({k})", 2, _dihedral_fibers(k))


# monomial polyhedra and ellipsoids


def monomial_polyhedron_kernel(B) -> KernelOracle:
    """Bergman kernel of the monomial polyhedron defined by ``B``, pulled back by ``Phi_A``.

    With ``A = adj(B)`` and deck group ``G`` of ``Phi_A``:
    ``K(z, w) = sum_g det(g) B_D(g z, w) / (J(z) conj J(w))`` and
    ``J(z) = det(A) z^(c - 1)``, ``c`` the column sums of ``A``.  Writing
    the Jacobian as a single monomial keeps the kernel finite at zero
    coordinates where ``c_j = 1``.
    """
    rows = _square(B)
    A = adjugate(rows)
    if np.any(A < 0):
        raise InvalidInputError("adj(B) must have non-negative entries")
    detA = det_int(A.tolist())
    G = monomial_deck_group(A)
    exps = A.sum(axis=0) - 1
    dets = [g.det for g in G.elements]
    mats = [g.matrix for g in G.elements]
    d = len(rows)
    base = _polydisc_eval(2)
    singular = exps > 0

    def ev(z, w):
        if np.any(singular):
            _guard(z[..., singular], HYPERPLANE_TOL, "zero coordinate in z")
            _guard(w[..., singular], HYPERPLANE_TOL, "zero coordinate in w")
        jz = detA * np.prod(z**exps, axis=-1)
        jw = detA * np.prod(w**exps, axis=-1)
        total = 0
        for c, M in zip(dets, mats):
            total = total + c * base(z @ M.T, w)
        return total / (jz * np.conj(jw))

    return KernelOracle(ev, f"monomial{rows}", d, tuple(_linear(M) for M in mats))


def fat_hartogs_matrix(gamma: int) -> list[list[int]]:
    """``B`` describing ``{|z1|^gamma < |z2| < 1}``."""
    if gamma < 1:
        raise InvalidInputError("gamma must be a positive integer")
    return [[gamma, -1], [0, 1]]


def fat_hartogs_kernel(gamma: int) -> KernelOracle:
    """Explicit root-of-unity sum for the fat Hartogs triangle.

    The deck group of ``(z1, z2) -> (z1 z2, z2^gamma)`` is
    ``diag(w^-j, w^j)``, all of determinant one, so
    ``K = sum_j B_D((w^-j z1, w^j z2), w) / (gamma^2 (z2 conj w2)^gamma)``.
    """
    if gamma < 1:
        raise InvalidInputError("gamma must be a positive integer")
    om = root_of_unity(gamma)

    def ev(z, w):
        z1, z2 = z[..., 0], z[..., 1]
        w1, w2 = np.conj(w[..., 0]), np.conj(w[..., 1])
        _guard(z2, HYPERPLANE_TOL, "z2 = 0")
        _guard(w2, HYPERPLANE_TOL, "w2 = 0")
        total = 0
        for j in range(1, gamma + 1):
            total = total + _bidisc(om**-j * z1 * w1, om**j * z2 * w2)
        return total / (gamma**2 * (z2 * w2) ** gamma)

    fibers = tuple(_linear(np.diag([om**-j, om**j])) for j in range(gamma))
    return KernelOracle(ev, f"fat_hartogs({gamma})", 2, fibers)


def ellipsoid_kernel(p: int, q: int) -> KernelOracle:
    """Bergman kernel of ``{|u1|^(2/p) + |u2|^(2/q) < 1}`` pulled back by ``(z1^p, z2^q)``."""
    if p < 1 or q < 1:
        raise InvalidInputError("ellipsoid exponents must be positive integers")
    wp, wq = root_of_unity(p), root_of_unity(q)

    def ev(z, w):
        a = z[..., 0] * np.conj(w[..., 0])
        b = z[..., 1] * np.conj(w[..., 1])
        if p > 1:
            _guard(a, POLE_TOL, "z1 conj(w1) = 0")
        if q > 1:
            _guard(b, POLE_TOL, "z2 conj(w2) = 0")
        total = 0
        for i in range(1, p + 1):
            for j in range(1, q + 1):
                t = 1 - (wp**i * a + wq**j * b)
                _guard(t, POLE_TOL, "ball kernel evaluated at a boundary pole")
                total = total + wp**i * wq**j / t**3
        # integer powers, so 0**0 == 1 as required
        return total / ((p * q) ** 2 * a ** (p - 1) * b ** (q - 1))

    fibers = tuple(
        _linear(np.diag([wp**i, wq**j])) for i in range(p) for j in range(q)
    )
    return KernelOracle(ev, f"ellipsoid({p},{q})", 2, fibers)


# abelian groups


def abelian_kernel_reassembly(G: FiniteGroup, base: KernelOracle) -> KernelOracle:
    """``(1/|G|) sum_chi l_chi(z) K_chi(z, w) conj(l_chi(w))`` over all characters.

    Each ``K_chi`` is the group-sum quotient kernel; the result should be
    ``base`` itself, since the relative invariant subspaces exhaust the space.
    """
    if G.order == 1:
        chars = [trivial_character(G)]
        hyper: Sequence = []
    else:
        chars = one_dim_characters(G)
        hyper = reflecting_hyperplanes(G)
    parts = []
    for chi in chars:
        ell = relative_invariant(chi, hyper) if hyper else None
        parts.append((_evaluator(ell), quotient_kernel_sum(G, chi, ell, base)))

    def ev(z, w):
        total = 0
        for ell, K in parts:
            total = total + ell(z) * K.evaluator(z, w) * np.conj(ell(w))
        return total / G.order

    return KernelOracle(ev, f"reassembled[{G.name},{base.label}]", base.dim)
