"""Catalog maps, ball automorphisms, domains and weight functions.

Points of a quotient domain are always handled through a fiber
representative in the covering domain; nothing here takes raw coordinates
of the image domain.

Every map object exposes ``__call__(z)`` and ``jacobian(z)`` on points or
batches of shape ``(..., d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidInputError, NearSingularError
from .group import Character, FiniteGroup, GroupElement
from .intlin import _square, det_int
from .mpoly import MultiPoly, PolyMapExpr, elementary_symmetric

EPS = 1e-9
# contour rule for derivatives of holomorphic maps: nodes on a circle of
# radius FD_RADIUS times the distance to the nearest pole (capped)
FD_NODES = 16
FD_RADIUS = 0.1


# domains


@dataclass(frozen=True)
class DomainSpec:
    """Unit polydisc or unit ball in ``C^d``.

    ``measure_constant`` is the Euclidean volume, so that Lebesgue measure
    divided by it is a probability measure.
    """

    kind: str
    d: int

    def __post_init__(self):
        if self.kind not in ("polydisc", "ball"):
            raise InvalidInputError(f"unknown domain kind {self.kind!r}")
        if self.d < 1:
            raise InvalidInputError("domain dimension must be positive")

    @property
    def measure_constant(self) -> float:
        if self.kind == "polydisc":
            return pi**self.d
        return pi**self.d / factorial(self.d)

    def contains(self, z) -> np.ndarray | bool:
        z = np.asarray(z, dtype=complex)
        if self.kind == "polydisc":
            inside = np.all(np.abs(z) < 1, axis=-1)
        else:
            inside = np.sum(np.abs(z) ** 2, axis=-1) < 1
        return bool(inside) if inside.ndim == 0 else inside


def polydisc(d: int) -> DomainSpec:
    return DomainSpec("polydisc", d)


def ball(d: int) -> DomainSpec:
    return DomainSpec("ball", d)


# catalog polynomial maps


def symmetrization_map(d: int) -> PolyMapExpr:
    """``(s_1, ..., s_d)``, the elementary symmetric polynomials."""
    return PolyMapExpr(elementary_symmetric(d, k) for k in range(1, d + 1))


def dihedral_map(k: int) -> PolyMapExpr:
    """``(z1^k + z2^k, z1 z2)``."""
    if k < 2:
        raise InvalidInputError("dihedral map needs k >= 2")
    return PolyMapExpr(
        [MultiPoly(2, {(k, 0): 1, (0, k): 1}), MultiPoly(2, {(1, 1): 1})]
    )


def power_map(p: int, q: int) -> PolyMapExpr:
    """``(z1^p, z2^q)``."""
    if p < 1 or q < 1:
        raise InvalidInputError("power map exponents must be positive")
    return PolyMapExpr([MultiPoly(2, {(p, 0): 1}), MultiPoly(2, {(0, q): 1})])


def diagonal_power_map(orders) -> PolyMapExpr:
    """``(z1^{n1}, ..., zd^{nd})``, the basic map of ``cyclic_product(n1..nd)``."""
    d = len(orders)
    comps = []
    for j, n in enumerate(orders):
        e = [0] * d
        e[j] = int(n)
        comps.append(MultiPoly(d, {tuple(e): 1}))
    return PolyMapExpr(comps)


class MonomialMap:
    """``z -> (z^{a^1}, ..., z^{a^d})`` for the rows ``a^i`` of ``A``.

    The Jacobian is ``det A * prod_i z^{a^i} / prod_i z_i``, which is the
    monomial ``det A * z^{c - 1}`` with ``c`` the column sums of ``A``.
    """

    def __init__(self, A):
        rows = _square(A)
        if any(x < 0 for r in rows for x in r):
            raise InvalidInputError("monomial map needs a non-negative exponent matrix")
        self.det = det_int(rows)
        if self.det == 0:
            raise InvalidInputError("monomial map needs a nonsingular exponent matrix")
        self.A = np.array(rows, dtype=np.int64)
        self.dim = len(rows)
        self._jac_exp = self.A.sum(axis=0) - 1

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise InvalidInputError("dimension mismatch")
        return np.stack(
            [np.prod(z ** self.A[i], axis=-1) for i in range(self.dim)], axis=-1
        )

    def jacobian(self, z, guard: bool = False):
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise InvalidInputError("dimension mismatch")
        jac = self.det * np.prod(z**self._jac_exp, axis=-1)
        if guard and np.any(np.abs(jac) < EPS):
            raise NearSingularError("monomial map Jacobian vanishes (zero coordinate)")
        return complex(jac) if jac.ndim == 0 else jac


def monomial_map(A) -> MonomialMap:
    return MonomialMap(A)


# ball automorphisms


def _fd_jacobian(f: Callable, z: np.ndarray, h) -> np.ndarray:
    """Determinant of the complex Jacobian of a holomorphic map.

    Each partial derivative is the trapezoidal rule for the Cauchy integral
    on a circle of radius ``h`` about ``z`` in that coordinate, which
    converges like ``(h / R)^FD_NODES`` with ``R`` the distance to the
    nearest singularity.  ``h`` may be a scalar or one radius per point.
    """
    d = z.shape[-1]
    h = np.broadcast_to(np.asarray(h, dtype=float), z.shape[:-1])[..., None]
    nodes = np.exp(2j * np.pi * np.arange(FD_NODES) / FD_NODES)
    cols = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        acc = 0
        for r in nodes:
            acc = acc + np.conj(r) * f(z + h * r * e)
        cols.append(acc / (FD_NODES * h))
    return np.linalg.det(np.stack(cols, axis=-1))


class BallAutomorphism:
    """``Psi(z) = U phi_a(z)`` with ``phi_a`` the involutive Moebius map of the ball.

    ``phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`` where ``P_a`` projects
    onto ``span(a)``, ``Q_a = I - P_a`` and ``s_a = sqrt(1 - |a|^2)``.
    With ``a = 0`` the map is exactly ``z -> U z``.
    """

    def __init__(self, center=None, unitary=None, d: int | None = None):
        if center is None:
            if d is None:
                raise InvalidInputError("need a center or a dimension")
            center = np.zeros(d)
        a = np.asarray(center, dtype=complex)
        if a.ndim != 1:
            raise InvalidInputError("center must be a point")
        if np.sum(np.abs(a) ** 2) >= 1:
            raise DomainError("automorphism center must lie in the open ball")
        self.center = a
        self.dim = a.shape[0]
        U = np.eye(self.dim, dtype=complex) if unitary is None else np.asarray(unitary, complex)
        if U.shape != (self.dim, self.dim) or np.linalg.norm(U @ U.conj().T - np.eye(self.dim)) > 1e-10:
            raise InvalidInputError("unitary factor must be a unitary d x d matrix")
        self.unitary = U
        self._det_u = complex(np.linalg.det(U))
        self._trivial_center = not np.any(a)

    @property
    def is_identity(self) -> bool:
        return self._trivial_center and np.allclose(self.unitary, np.eye(self.dim), atol=0)

    def _moebius(self, z: np.ndarray) -> np.ndarray:
        a = self.center
        aa = np.vdot(a, a).real
        za = z @ a.conj()
        proj = za[..., None] / aa * a
        s = np.sqrt(1 - aa)
        return (a - proj - s * (z - proj)) / (1 - za)[..., None]

    def _radius(self, y: np.ndarray) -> np.ndarray:
        # phi_a has its pole on <y, a> = 1; keep the contour well inside
        a = self.center
        dist = np.abs(1 - y @ a.conj()) / np.linalg.norm(a)
        return np.minimum(FD_RADIUS, FD_RADIUS * dist)

    def _check(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise InvalidInputError("dimension mismatch")
        if np.any(np.sum(np.abs(z) ** 2, axis=-1) >= 1):
            raise DomainError("point lies outside the open unit ball")
        return z

    def __call__(self, z) -> np.ndarray:
        z = self._check(z)
        if self._trivial_center:
            return z @ self.unitary.T
        return self._moebius(z) @ self.unitary.T

    def inverse(self, z) -> np.ndarray:
        z = self._check(z)
        y = z @ self.unitary.conj()
        if self._trivial_center:
            return y
        return self._moebius(y)

    def jacobian(self, z):
        z = self._check(z)
        if self._trivial_center:
            out = np.full(z.shape[:-1], self._det_u, dtype=complex)
        else:
            out = _fd_jacobian(lambda x: self._moebius(x) @ self.unitary.T, z, self._radius(z))
        return complex(out) if np.ndim(out) == 0 else out

    def inverse_jacobian(self, z):
        z = self._check(z)
        if self._trivial_center:
            out = np.full(z.shape[:-1], 1 / self._det_u, dtype=complex)
        else:
            U = self.unitary
            out = _fd_jacobian(lambda x: self._moebius(x @ U.conj()), z, self._radius(z @ U.conj()))
        return complex(out) if np.ndim(out) == 0 else out


def ball_automorphism_eval(psi: BallAutomorphism, z):
    """Return ``(psi(z), J_psi(z))``."""
    return psi(z), psi.jacobian(z)


class ConjugatedMap:
    """``Psi_sigma = Psi^{-1} o sigma^{-1} o Psi`` where ``sigma^{-1}`` is the
    matrix inverse applied to points.

    The Jacobian follows from the chain rule:
    ``J_{Psi^{-1}}(sigma^{-1} Psi z) * det(sigma^{-1}) * J_Psi(z)``.
    """

    def __init__(self, psi: BallAutomorphism, sigma: GroupElement):
        if psi.dim != sigma.dim:
            raise InvalidInputError("dimension mismatch between automorphism and group")
        self.psi = psi
        self.sigma = sigma

    def __call__(self, z) -> np.ndarray:
        return self.psi.inverse(self.psi(z) @ self.sigma.inverse.T)

    def jacobian(self, z):
        y = self.psi(z) @ self.sigma.inverse.T
        return self.psi.inverse_jacobian(y) * (1 / self.sigma.det) * self.psi.jacobian(z)


def conjugated_map(psi: BallAutomorphism, sigma: GroupElement) -> ConjugatedMap:
    return ConjugatedMap(psi, sigma)


class ComposedMap:
    """``outer o inner`` with Jacobian ``J_outer(inner z) * J_inner(z)``."""

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner
        self.dim = inner.dim

    def __call__(self, z):
        return self.outer(self.inner(z))

    def jacobian(self, z):
        return self.outer.jacobian(self.inner(z)) * self.inner.jacobian(z)


# weights


class UnitWeight:
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape[:-1])
        return float(out) if out.ndim == 0 else out


class PolydiscLambdaWeight:
    """``prod_j (1 - |z_j|^2)^(lam - 2)``, optionally times ``(lam - 1)^d``.

    The factor ``(lam - 1)^d`` makes ``prod_j (1 - z_j conj(w_j))^(-lam)`` the
    reproducing kernel against the normalized volume measure.
    """

    def __init__(self, lam: float, normalized: bool = False):
        if lam <= 1:
            raise InvalidInputError("weight exponent needs lam > 1")
        self.lam = float(lam)
        self.normalized = normalized

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.prod((1 - np.abs(z) ** 2) ** (self.lam - 2), axis=-1)
        if self.normalized:
            out = out * (self.lam - 1) ** z.shape[-1]
        return float(out) if np.ndim(out) == 0 else out


class PullbackWeight:
    """``base(map(z))``."""

    def __init__(self, base: Callable, mapping: Callable):
        self.base = base
        self.mapping = mapping

    def __call__(self, z):
        return self.base(self.mapping(z))


class RelativeWeight:
    """``|l(z)|^2 / |J_theta(z)|^2 * base(z)`` at fiber points ``z``.

    ``base`` is the invariant weight on the covering domain, i.e. the
    quotient weight already pulled back through ``theta``.
    """

    def __init__(self, base: Callable, ell: Callable, theta, character: Character | None = None,
                 group: FiniteGroup | None = None):
        self.base = base
        self.ell = ell
        self.theta = theta
        self.character = character
        self.group = group

    def __call__(self, z):
        ell = np.abs(np.asarray(self.ell(z))) ** 2
        jac = np.abs(np.asarray(self.theta.jacobian(z))) ** 2
        if np.any(ell < EPS**2) or np.any(jac < EPS**2):
            raise NearSingularError("relative weight evaluated on a reflecting hyperplane")
        out = ell / jac * np.asarray(self.base(z))
        return float(out) if np.ndim(out) == 0 else out


def weight_eval(w: Callable, z):
    return w(z)
