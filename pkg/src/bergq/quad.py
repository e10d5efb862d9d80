"""Monte-Carlo quadrature and verification harnesses.

Integrals are taken against normalized Lebesgue measure (a probability
measure) on the polydisc or ball.  Integrals over a quotient ``theta(Omega)``
are pulled back to ``Omega``::

    int_{theta(Omega)} g dV = (1/|G|) int_Omega g(theta(z)) |J_theta(z)|^2 dV(z)

Sampling is split into fixed-size chunks; chunk ``j`` draws from
``default_rng(seed ^ j)`` and chunk statistics are merged in chunk order, so
results are bit-identical for a given seed regardless of thread count.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import factorial
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInputError, SamplerError
from .group import (
    Character,
    FiniteGroup,
    character_exponents,
    one_dim_characters,
    project,
    reflecting_hyperplanes,
    relative_invariant,
    sign_character,
)
from .kernels import KernelOracle, quotient_kernel_sum
from .maps import DomainSpec, RelativeWeight
from .mpoly import MultiPoly

CHUNK = 1 << 14
MIN_SAMPLES = 1000
MIN_EFFICIENCY = 1e-4


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error (max over real and imaginary parts)."""

    mean: complex
    stderr: float
    n: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "re": self.mean.real,
            "im": self.mean.imag,
            "stderr": self.stderr,
            "n": self.n,
            "seed": self.seed,
        }


@dataclass
class VerificationReport:
    """Outcome of a family of checks; ``passed`` iff every residual is within its threshold."""

    name: str
    inputs_digest: str
    passed: bool
    details: list = field(default_factory=list)

    @classmethod
    def from_checks(cls, name: str, inputs: dict, checks: list[dict]) -> "VerificationReport":
        blob = json.dumps(inputs, sort_keys=True, default=str).encode()
        digest = hashlib.sha256(blob).hexdigest()
        passed = all(bool(c["residual"] <= c["threshold"]) for c in checks)
        return cls(name, digest, passed, checks)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def check(name: str, residual: float, threshold: float, **extra) -> dict:
    """One row of a report."""
    return {"check": name, "residual": float(residual), "threshold": float(threshold), **extra}


# sampling


def sample_domain(domain: DomainSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` uniform points of the domain, shape ``(n, d)``.

    The ball is sampled by rejection from its bounding polydisc; exact zero
    coordinates (a null set) are rejected too.
    """
    d = domain.d
    if domain.kind == "polydisc":
        out = np.empty((0, d), dtype=complex)
        while out.shape[0] < n:
            m = n - out.shape[0]
            r = np.sqrt(rng.random((m, d)))
            pts = r * np.exp(2j * np.pi * rng.random((m, d)))
            out = np.concatenate([out, pts[np.all(pts != 0, axis=1)]])
        return out
    efficiency = 1 / factorial(d)
    if efficiency < MIN_EFFICIENCY:
        raise SamplerError(f"rejection efficiency {efficiency:.2e} too low for the {d}-ball")
    parts, have = [], 0
    while have < n:
        m = int((n - have) / efficiency * 1.1) + 16
        r = np.sqrt(rng.random((m, d)))
        pts = r * np.exp(2j * np.pi * rng.random((m, d)))
        keep = (np.sum(np.abs(pts) ** 2, axis=1) < 1) & np.all(pts != 0, axis=1)
        parts.append(pts[keep])
        have += int(keep.sum())
    return np.concatenate(parts)[:n]


def _chunk_stats(domain, integrand, weight, m, seed):
    rng = np.random.default_rng(seed)
    pts = sample_domain(domain, rng, m)
    vals = np.asarray(integrand(pts), dtype=complex)
    if weight is not None:
        vals = vals * np.asarray(weight(pts))
    mean = vals.mean()
    m2re = float(np.sum((vals.real - mean.real) ** 2))
    m2im = float(np.sum((vals.imag - mean.imag) ** 2))
    return m, mean, m2re, m2im


def mc_integrate(
    domain: DomainSpec,
    integrand: Callable,
    weight: Callable | None = None,
    n: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
) -> MCEstimate:
    """Estimate ``int f w dV`` over ``domain`` with ``dV`` the normalized volume.

    Parameters
    ----------
    integrand, weight : callable
        Vectorised over point arrays of shape ``(m, d)``.
    n : int
        Sample count, at least 1000.
    seed : int
        Non-negative 64-bit seed.
    workers : int, optional
        Thread count for chunk evaluation; the result does not depend on it.
    """
    n = int(n)
    if n < MIN_SAMPLES:
        raise InvalidInputError(f"need at least {MIN_SAMPLES} samples")
    if not 0 <= int(seed) < 2**64:
        raise InvalidInputError("seed must be a non-negative 64-bit integer")
    seed = int(seed)
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    jobs = [(domain, integrand, weight, m, seed ^ j) for j, m in enumerate(sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            stats = list(pool.map(lambda a: _chunk_stats(*a), jobs))
    else:
        stats = [_chunk_stats(*a) for a in jobs]

    # pairwise merge of (count, mean, M2) in chunk order
    cnt, mean, m2re, m2im = stats[0]
    for cb, mb, m2re_b, m2im_b in stats[1:]:
        tot = cnt + cb
        delta = mb - mean
        mean = mean + delta * (cb / tot)
        m2re += m2re_b + delta.real**2 * cnt * cb / tot
        m2im += m2im_b + delta.imag**2 * cnt * cb / tot
        cnt = tot
    se = max(np.sqrt(m2re / (cnt - 1) / cnt), np.sqrt(m2im / (cnt - 1) / cnt))
    return MCEstimate(complex(mean), float(se), cnt, seed)


def _map_eval(theta) -> Callable:
    if theta is None:
        return lambda z: z
    return theta


def _jac_eval(theta) -> Callable:
    if theta is None:
        return lambda z: np.ones(z.shape[:-1])
    return lambda z: np.asarray(theta.jacobian(z))


def mc_integrate_quotient(
    domain: DomainSpec,
    G: FiniteGroup | None,
    theta,
    integrand: Callable,
    weight: Callable | None = None,
    n: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
) -> MCEstimate:
    """Estimate ``int_{theta(Omega)} g w dV`` from fiber representatives.

    ``integrand`` and ``weight`` take fiber points ``z`` and return the
    values at ``theta(z)``.  ``theta=None`` means the identity map.
    """
    order = 1 if G is None else G.order
    jac = _jac_eval(theta)

    def pulled(z):
        return np.asarray(integrand(z)) * np.abs(jac(z)) ** 2

    est = mc_integrate(domain, pulled, weight, n, seed, workers)
    return MCEstimate(est.mean / order, est.stderr / order, est.n, est.seed)


# verification harnesses


def verify_reproducing(
    kernel: KernelOracle,
    domain: DomainSpec,
    G: FiniteGroup | None,
    theta,
    weight: Callable | None,
    test_functions: dict[str, Callable],
    eval_points: Sequence,
    n: int = 200_000,
    seed: int = 0,
    tol_sigma: float = 4.0,
    raw_weight: Callable | None = None,
    name: str = "reproducing",
) -> VerificationReport:
    """Check ``int f(u) K(z, u) w(u) dV(u) = f(theta(z))`` on the quotient.

    ``test_functions`` map quotient coordinates ``u = theta(z)`` to values.
    The integrand uses ``K(z, w)``, the inner product of ``f`` with
    ``K(., z)``.  With ``raw_weight`` the residual against that weight is
    recorded as well, without affecting the verdict.
    """
    th = _map_eval(theta)
    checks = []
    for zi, z0 in enumerate(eval_points):
        z0 = np.asarray(z0, dtype=complex)
        for fname, f in test_functions.items():
            target = complex(np.asarray(f(th(z0[None, :])))[0])

            def integrand(w, f=f, z0=z0):
                return np.asarray(f(th(w))) * kernel.evaluator(z0, w)

            est = mc_integrate_quotient(domain, G, theta, integrand, weight, n, seed)
            row = check(
                f"{fname}@z{zi}",
                abs(est.mean - target),
                tol_sigma * est.stderr,
                estimate=est.mean,
                expected=target,
                stderr=est.stderr,
            )
            if raw_weight is not None:
                raw = mc_integrate_quotient(domain, G, theta, integrand, raw_weight, n, seed)
                row["raw_residual"] = abs(raw.mean - target)
            checks.append(row)
    inputs = {
        "kernel": kernel.label,
        "domain": [domain.kind, domain.d],
        "points": [np.asarray(p).tolist() for p in eval_points],
        "functions": list(test_functions),
        "n": n,
        "seed": seed,
        "tol_sigma": tol_sigma,
    }
    return VerificationReport.from_checks(name, inputs, checks)


def verify_projection_identity(
    domain: DomainSpec,
    G: FiniteGroup,
    chi: Character,
    theta,
    ell_rho,
    base: KernelOracle,
    weight: Callable | None,
    phis: dict[str, Callable],
    eval_points: Sequence,
    n: int = 200_000,
    seed: int = 0,
    tol_sigma: float = 4.0,
    name: str = "projection-identity",
) -> VerificationReport:
    """Compare both sides of the weighted projection identity at each point.

    Left: projection on ``Omega`` (kernel ``base``, weight ``weight``) of
    ``l * (phi o theta)``.  Right: ``l(w)`` times the projection of ``phi`` on
    the quotient, whose kernel is the group-sum kernel for ``chi`` and whose
    weight is ``|l|^2 / |J_theta|^2 * weight``.  The two sides use
    independent sample streams; the band is ``tol_sigma`` times the combined
    standard error.
    """
    ell = ell_rho if ell_rho is not None else MultiPoly.constant(G.dimension)
    qk = quotient_kernel_sum(G, chi, ell, base)
    unit = (lambda z: np.ones(z.shape[:-1])) if weight is None else weight
    rel_w = RelativeWeight(unit, ell, theta, chi, G)
    rhs_seed = seed ^ (1 << 40)
    checks = []
    for wi, w0 in enumerate(eval_points):
        w0 = np.asarray(w0, dtype=complex)
        l0 = complex(ell(w0))
        for pname, phi in phis.items():

            def lhs_f(v, phi=phi, w0=w0):
                return ell(v) * np.asarray(phi(theta(v))) * base.evaluator(w0, v)

            def rhs_f(v, phi=phi, w0=w0):
                return np.asarray(phi(theta(v))) * qk.evaluator(w0, v)

            lhs = mc_integrate(domain, lhs_f, weight, n, seed)
            rhs = mc_integrate_quotient(domain, G, theta, rhs_f, rel_w, n, rhs_seed)
            rhs_val = l0 * rhs.mean
            se = np.hypot(lhs.stderr, abs(l0) * rhs.stderr)
            checks.append(
                check(
                    f"{pname}@w{wi}",
                    abs(lhs.mean - rhs_val),
                    tol_sigma * se,
                    lhs=lhs.mean,
                    rhs=rhs_val,
                    stderr=float(se),
                )
            )
    inputs = {
        "group": G.name,
        "character": chi.label,
        "base": base.label,
        "phis": list(phis),
        "points": [np.asarray(p).tolist() for p in eval_points],
        "n": n,
        "seed": seed,
        "tol_sigma": tol_sigma,
    }
    return VerificationReport.from_checks(name, inputs, checks)


def _test_polynomial(d: int, degree: int, rng: np.random.Generator) -> MultiPoly:
    terms = {}
    for exp in np.ndindex(*([degree + 1] * d)):
        if sum(exp) <= degree:
            terms[exp] = complex(rng.normal(), rng.normal())
    return MultiPoly(d, terms)


def _points_off(hyper, d, rng, count, radius=0.9, margin=1e-3) -> np.ndarray:
    pts = []
    while len(pts) < count:
        z = radius * np.sqrt(rng.random(d)) * np.exp(2j * np.pi * rng.random(d))
        if all(abs(h.linear_form(z)) > margin for h in hyper):
            pts.append(z)
    return np.array(pts)


def _rel(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(1.0, np.abs(b))))


def verify_structural(
    G: FiniteGroup,
    theta,
    seed: int = 0,
    n_points: int = 20,
    n_jacobian: int = 50,
    name: str | None = None,
) -> VerificationReport:
    """Group-module invariants for a catalog group and its basic map.

    Checks: invariance of ``theta``, idempotency and equivariance of every
    character projection, completeness for abelian groups, invariance of
    ``P f / l`` along orbits, constancy of ``J_theta / prod l_i^(m_i - 1)``
    and the exponents of the sign character.
    """
    rng = np.random.default_rng(seed)
    d = G.dimension
    hyper = reflecting_hyperplanes(G)
    chars = one_dim_characters(G)
    pts = _points_off(hyper, d, rng, n_points)
    ells = [relative_invariant(chi, hyper) for chi in chars]
    f = _test_polynomial(d, max(e.degree() for e in ells) + 2, rng)
    mats = [g.matrix for g in G.elements]
    checks = []

    th = np.asarray(theta(pts))
    checks.append(
        check("theta_invariance", max(_rel(theta(pts @ M.T), th) for M in mats), 1e-10)
    )

    for chi, ell in zip(chars, ells):
        pf = np.array([project(chi, f, z) for z in pts])

        def pf_fn(z, chi=chi):
            return project(chi, f, z)

        ppf = np.array([project(chi, pf_fn, z) for z in pts])
        checks.append(check(f"idempotent[{chi.label}]", _rel(ppf, pf), 1e-10))

        eq = 0.0
        for t, M in enumerate(mats):
            moved = np.array([project(chi, f, z @ M.T) for z in pts])
            eq = max(eq, _rel(moved, chi(t) * pf))
        checks.append(check(f"equivariant[{chi.label}]", eq, 1e-10))

        q = pf / np.asarray(ell(pts))
        div = 0.0
        for M in mats:
            moved = pts @ M.T
            qm = np.array([project(chi, f, z) for z in moved]) / np.asarray(ell(moved))
            div = max(div, float(np.max(np.abs(qm - q) / np.maximum(np.abs(q), 1e-300))))
        checks.append(check(f"quotient_invariant[{chi.label}]", div, 1e-8))

    if G.kind == "cyclic_product":
        total = sum(np.array([project(chi, f, z) for z in pts]) for chi in chars)
        checks.append(check("completeness", _rel(total, np.asarray(f(pts))), 1e-10))

    jpts = _points_off(hyper, d, rng, n_jacobian)
    prod = MultiPoly.constant(d)
    for h in hyper:
        prod = prod * h.linear_form ** (h.order - 1)
    ratio = np.asarray(theta.jacobian(jpts)) / np.asarray(prod(jpts))
    spread = float(np.max(np.abs(ratio - ratio[0])) / abs(ratio[0]))
    checks.append(check("jacobian_factorization", spread, 1e-8, constant=complex(ratio[0])))

    exps = character_exponents(sign_character(G), hyper)
    bad = sum(c != h.order - 1 for c, h in zip(exps, hyper))
    checks.append(check("sign_exponents", bad, 0, exponents=exps))

    inputs = {"group": G.name, "theta": repr(theta), "seed": seed}
    return VerificationReport.from_checks(name or f"structural[{G.name}]", inputs, checks)
