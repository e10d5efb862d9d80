"""Named verification suites shared by the CLI and the acceptance tests.

Each suite returns a ``VerificationReport``.  Deterministic suites draw their
random points from ``seed`` (default 0); stochastic suites need an explicit
seed.
"""

from __future__ import annotations

import itertools
import time
from typing import Callable

import numpy as np

from .errors import InvalidInputError
from .group import (
    cyclic_product,
    dihedral,
    explicit,
    one_dim_characters,
    reflecting_hyperplanes,
    relative_invariant,
    sign_character,
    symmetric,
    trivial_character,
)
from .intlin import adjugate, det_int, monomial_deck_group, smith_normal_form
from .kernels import (
    KernelOracle,
    abelian_kernel_reassembly,
    base_kernel,
    conjugated_kernel,
    dihedral_kernels,
    dihedral_sign_kernel_simplified,
    ellipsoid_kernel,
    fat_hartogs_kernel,
    fat_hartogs_matrix,
    monomial_polyhedron_kernel,
    quotient_kernel_sign,
    quotient_kernel_sum,
    rudin_ball_kernel,
    symmetrized_kernel_det,
    symmetrized_kernel_perm,
)
from .maps import (
    BallAutomorphism,
    ComposedMap,
    MonomialMap,
    diagonal_power_map,
    dihedral_map,
    polydisc,
    power_map,
    symmetrization_map,
)
from .mpoly import MultiPoly
from .quad import (
    VerificationReport,
    check,
    verify_projection_identity,
    verify_reproducing,
    verify_structural,
)

SUITES = (
    "closed-vs-sum",
    "spot-values",
    "fiber",
    "reproducing",
    "projection-identity",
    "structural",
    "snf",
    "polynomial",
    "degenerations",
    "all",
)
STOCHASTIC = frozenset({"reproducing", "projection-identity", "all"})

EXACT_TOL = 1e-9


# random fiber points


def random_points(
    rng: np.random.Generator,
    count: int,
    d: int,
    kind: str = "polydisc",
    radius: float = 0.9,
    avoid: Callable | None = None,
    margin: float = 0.05,
) -> np.ndarray:
    """``count`` points with ``|z_j| < radius`` (polydisc) or ``|z| < radius`` (ball).

    ``avoid`` is a function that must stay above ``margin`` in modulus at
    the returned points, e.g. a Jacobian.
    """
    out = []
    while len(out) < count:
        z = np.sqrt(rng.random(d)) * np.exp(2j * np.pi * rng.random(d))
        if kind == "ball":
            z = z / np.sqrt(d)
        z = radius * z
        if avoid is not None and abs(complex(avoid(z))) < margin:
            continue
        out.append(z)
    return np.array(out)


def _rel_err(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))))


def _compare(name, k1: KernelOracle, k2: KernelOracle, z, w, tol=EXACT_TOL) -> dict:
    return check(name, _rel_err(k1(z, w), k2(z, w)), tol, pairs=len(z))


def _jac(m) -> Callable:
    return lambda z: m.jacobian(z)


# suites


def closed_vs_sum(seed: int = 0, pairs: int = 100) -> VerificationReport:
    """Closed forms against the group-averaging formula at random fiber pairs."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    checks = []
    for d, lam in itertools.product((2, 3), (2, 3)):
        s = symmetrization_map(d)
        S = symmetric(d)
        base = base_kernel("polydisc", d) if lam == 2 else base_kernel("weighted_polydisc", d, lam)
        z = random_points(rng, pairs, d, avoid=_jac(s))
        w = random_points(rng, pairs, d, avoid=_jac(s))
        checks.append(
            _compare(f"sym_det(d={d},lam={lam})", symmetrized_kernel_det(d, lam),
                     quotient_kernel_sign(S, s, base), z, w)
        )
        checks.append(
            _compare(f"sym_perm(d={d},lam={lam})", symmetrized_kernel_perm(d, lam),
                     quotient_kernel_sum(S, trivial_character(S), None, base), z, w)
        )
    for k in (2, 3, 4):
        phi = dihedral_map(k)
        G = dihedral(k)
        P = base_kernel("polydisc", 2)
        z = random_points(rng, pairs, 2, avoid=_jac(phi))
        w = random_points(rng, pairs, 2, avoid=_jac(phi))
        sgn, triv = dihedral_kernels(k)
        checks.append(_compare(f"dihedral_sign(k={k})", sgn, quotient_kernel_sign(G, phi, P), z, w))
        checks.append(
            _compare(f"dihedral_trivial(k={k})", triv,
                     quotient_kernel_sum(G, trivial_character(G), None, P), z, w)
        )
        checks.append(
            _compare(f"dihedral_simplified(k={k})", dihedral_sign_kernel_simplified(k), sgn, z, w)
        )
    for p, q in itertools.product((1, 2), (1, 2)):
        F = power_map(p, q)
        z = random_points(rng, pairs, 2, kind="ball", avoid=_jac(F))
        w = random_points(rng, pairs, 2, kind="ball", avoid=_jac(F))
        checks.append(
            _compare(f"ellipsoid_vs_rudin(p={p},q={q})", ellipsoid_kernel(p, q),
                     rudin_ball_kernel(cyclic_product(p, q), None, F), z, w)
        )
    for gamma in (1, 2, 3):
        B = fat_hartogs_matrix(gamma)
        A = adjugate(B)
        Phi = MonomialMap(A)
        G = monomial_deck_group(A)
        z = random_points(rng, pairs, 2, avoid=_jac(Phi))
        w = random_points(rng, pairs, 2, avoid=_jac(Phi))
        mono = monomial_polyhedron_kernel(B)
        group_sum = quotient_kernel_sum(G, sign_character(G), Phi, base_kernel("polydisc", 2))
        checks.append(_compare(f"monomial_vs_deck_sum(gamma={gamma})", mono, group_sum, z, w))
        checks.append(
            _compare(f"monomial_vs_explicit(gamma={gamma})", mono, fat_hartogs_kernel(gamma), z, w)
        )
    elapsed = time.perf_counter() - t0
    checks.append(check("runtime_seconds", elapsed, 10.0))
    return VerificationReport.from_checks(
        "closed-vs-sum", {"seed": seed, "pairs": pairs}, checks
    )


SPOT_VALUES = {
    "sym_det(2,2)": 28 / 9,
    "sym_perm(2,2)": 25 / 9,
    "dihedral_sign(2)": 376 / 225,
    "fat_hartogs(1)": 64 / 9,
    "ellipsoid(2,1)": 1 / 0.75**3 - 1 / 1.25**3,
}


def spot_values() -> VerificationReport:
    """Hand-evaluated kernel values on the diagonal."""
    z = np.array([0.5, 0.0])
    zh = np.array([0.0, 0.5])
    got = {
        "sym_det(2,2)": symmetrized_kernel_det(2, 2)(z, z),
        "sym_perm(2,2)": symmetrized_kernel_perm(2, 2)(z, z),
        "dihedral_sign(2)": dihedral_kernels(2)[0](z, z),
        "fat_hartogs(1)": monomial_polyhedron_kernel(fat_hartogs_matrix(1))(zh, zh),
        "ellipsoid(2,1)": ellipsoid_kernel(2, 1)(z, z),
    }
    checks = [
        check(k, abs(got[k] - v), EXACT_TOL, value=got[k], expected=v)
        for k, v in SPOT_VALUES.items()
    ]
    return VerificationReport.from_checks("spot-values", {"points": [z, zh]}, checks)


def _quotient_catalog() -> list[tuple[str, KernelOracle, str, Callable | None]]:
    """(name, kernel, domain kind, function that must stay away from zero)."""
    P2 = base_kernel("polydisc", 2)
    out = []
    for d in (2, 3):
        s = symmetrization_map(d)
        out.append((f"sym_det({d},2)", symmetrized_kernel_det(d, 2), "polydisc", _jac(s)))
        out.append((f"sym_perm({d},2)", symmetrized_kernel_perm(d, 2), "polydisc", _jac(s)))
    for k in (2, 3, 4):
        phi = dihedral_map(k)
        sgn, triv = dihedral_kernels(k)
        out.append((f"dihedral_sign({k})", sgn, "polydisc", _jac(phi)))
        out.append((f"dihedral_trivial({k})", triv, "polydisc", None))
        G = dihedral(k)
        hyper = reflecting_hyperplanes(G)
        for chi in one_dim_characters(G):
            ell = relative_invariant(chi, hyper)
            out.append(
                (f"dihedral_sum({k},{chi.label})", quotient_kernel_sum(G, chi, ell, P2),
                 "polydisc", _jac(phi))
            )
    for gamma in (1, 2, 3):
        Phi = MonomialMap(adjugate(fat_hartogs_matrix(gamma)))
        out.append(
            (f"monomial(gamma={gamma})", monomial_polyhedron_kernel(fat_hartogs_matrix(gamma)),
             "polydisc", _jac(Phi))
        )
    for p, q in ((2, 1), (2, 2), (1, 3)):
        F = power_map(p, q)
        out.append((f"ellipsoid({p},{q})", ellipsoid_kernel(p, q), "ball", _jac(F)))
    s2 = symmetrization_map(2)
    psi = BallAutomorphism([0.3, 0.1j])
    F = ComposedMap(s2, psi)
    out.append(("rudin(S2,psi)", rudin_ball_kernel(symmetric(2), psi, F), "ball", _jac(F)))
    return out


def fiber_independence(seed: int = 0, pairs: int = 20) -> VerificationReport:
    """``K(s z, t w) = K(z, w)`` over all fiber moves ``s, t``."""
    rng = np.random.default_rng(seed)
    checks = []
    for name, K, kind, avoid in _quotient_catalog():
        z = random_points(rng, pairs, K.dim, kind=kind, avoid=avoid)
        w = random_points(rng, pairs, K.dim, kind=kind, avoid=avoid)
        ref = K(z, w)
        worst = 0.0
        zf, wf = K.fiber(z), K.fiber(w)
        for a in zf:
            for b in wf:
                worst = max(worst, _rel_err(K(a, b), ref))
        checks.append(check(name, worst, EXACT_TOL, moves=len(zf)))
    return VerificationReport.from_checks("fiber", {"seed": seed, "pairs": pairs}, checks)


REPRO_FUNCTIONS = {
    "1": lambda u: np.ones(u.shape[:-1], dtype=complex),
    "u1": lambda u: u[..., 0],
    "u2": lambda u: u[..., 1],
    "u1u2": lambda u: u[..., 0] * u[..., 1],
}
REPRO_POINTS = (
    np.array([0.4, 0.1]),
    np.array([-0.3 + 0.2j, 0.5j]),
    np.array([0.6, -0.2 - 0.3j]),
)


def reproducing(seed: int, samples: int = 200_000, tol_sigma: float = 4.0) -> VerificationReport:
    """Monte-Carlo reproducing property on four quotient domains plus a negative control."""
    t0 = time.perf_counter()
    D2 = polydisc(2)
    cases = [
        ("sym_det(2,2)", symmetrized_kernel_det(2, 2), symmetric(2), symmetrization_map(2)),
        ("dihedral_sign(2)", dihedral_kernels(2)[0], dihedral(2), dihedral_map(2)),
    ]
    for gamma in (1, 2):
        A = adjugate(fat_hartogs_matrix(gamma))
        cases.append(
            (f"fat_hartogs({gamma})", monomial_polyhedron_kernel(fat_hartogs_matrix(gamma)),
             monomial_deck_group(A), MonomialMap(A))
        )
    checks = []
    for name, K, G, theta in cases:
        rep = verify_reproducing(
            K, D2, G, theta, None, REPRO_FUNCTIONS, REPRO_POINTS, samples, seed, tol_sigma
        )
        for c in rep.details:
            checks.append({**c, "check": f"{name}:{c['check']}"})
    # the polydisc kernel is the wrong kernel for the symmetrized bidisc
    neg = verify_reproducing(
        base_kernel("polydisc", 2), D2, symmetric(2), symmetrization_map(2), None,
        {"u1": REPRO_FUNCTIONS["u1"]}, REPRO_POINTS, samples, seed, tol_sigma,
    )
    checks.append(check("negative_control_rejected", 0.0 if not neg.passed else 1.0, 0.0))
    checks.append(check("runtime_seconds", time.perf_counter() - t0, 120.0))
    inputs = {"seed": seed, "samples": samples, "tol_sigma": tol_sigma}
    return VerificationReport.from_checks("reproducing", inputs, checks)


PROJECTION_PHIS = {
    "conj_u1": lambda u: np.conj(u[..., 0]),
    "abs_u1_sq": lambda u: np.abs(u[..., 0]) ** 2,
}


def projection_identity(seed: int, samples: int = 200_000, tol_sigma: float = 4.0) -> VerificationReport:
    """Projection identity for ``S_2`` (sign and trivial) and ``Z_2`` on ``C^1``."""
    checks = []
    S2 = symmetric(2)
    hyper = reflecting_hyperplanes(S2)
    pts = REPRO_POINTS
    for chi in (sign_character(S2), trivial_character(S2)):
        rep = verify_projection_identity(
            polydisc(2), S2, chi, symmetrization_map(2), relative_invariant(chi, hyper),
            base_kernel("polydisc", 2), None, PROJECTION_PHIS, pts, samples, seed, tol_sigma,
        )
        checks += [{**c, "check": f"S2[{chi.label}]:{c['check']}"} for c in rep.details]
    Z2 = cyclic_product(2)
    hz = reflecting_hyperplanes(Z2)
    for chi in one_dim_characters(Z2):
        rep = verify_projection_identity(
            polydisc(1), Z2, chi, diagonal_power_map([2]), relative_invariant(chi, hz),
            base_kernel("polydisc", 1), None, PROJECTION_PHIS,
            (np.array([0.3]), np.array([0.5j]), np.array([-0.4 + 0.4j])),
            samples, seed, tol_sigma,
        )
        checks += [{**c, "check": f"Z2[{chi.label}]:{c['check']}"} for c in rep.details]
    inputs = {"seed": seed, "samples": samples, "tol_sigma": tol_sigma}
    return VerificationReport.from_checks("projection-identity", inputs, checks)


STRUCTURAL_CASES = (
    ("S2", lambda: symmetric(2), lambda: symmetrization_map(2)),
    ("S3", lambda: symmetric(3), lambda: symmetrization_map(3)),
    ("D4", lambda: dihedral(2), lambda: dihedral_map(2)),
    ("D6", lambda: dihedral(3), lambda: dihedral_map(3)),
    ("Z2xZ3", lambda: cyclic_product(2, 3), lambda: diagonal_power_map([2, 3])),
)


def structural(seed: int = 0) -> VerificationReport:
    checks = []
    for name, G, theta in STRUCTURAL_CASES:
        rep = verify_structural(G(), theta(), seed=seed)
        checks += [{**c, "check": f"{name}:{c['check']}"} for c in rep.details]
    return VerificationReport.from_checks("structural", {"seed": seed}, checks)


def _random_nonsingular(rng, n, lo, hi):
    while True:
        M = rng.integers(lo, hi + 1, size=(n, n))
        det = det_int(M.tolist())
        if det != 0:
            return M, det


def integer_suite(seed: int = 0, count: int = 200) -> VerificationReport:
    """Exact adjugate/SNF invariants and deck-group checks on random matrices."""
    rng = np.random.default_rng(seed)
    adj_bad = snf_bad = 0
    for _ in range(count):
        n = int(rng.integers(1, 5))
        B, det = _random_nonsingular(rng, n, -5, 5)
        adjB = adjugate(B).astype(object)
        if not np.array_equal(B.astype(object) @ adjB, det * np.eye(n, dtype=np.int64).astype(object)):
            adj_bad += 1
        r = smith_normal_form(B)
        P, D, Q = (x.astype(object) for x in (r.P, r.D, r.Q))
        delta = [abs(x) for x in r.delta]
        ok = (
            np.array_equal(P @ D @ Q, B.astype(object))
            and abs(det_int(r.P.tolist())) == 1
            and abs(det_int(r.Q.tolist())) == 1
            and all(delta[i + 1] % delta[i] == 0 for i in range(n - 1))
            and int(np.prod(delta, dtype=object)) == abs(det)
            and np.array_equal(D, np.diag(r.delta).astype(object))
        )
        snf_bad += not ok
    checks = [check("adjugate_identity_failures", adj_bad, 0), check("snf_invariant_failures", snf_bad, 0)]

    order_bad = 0
    worst = 0.0
    for _ in range(count // 4):
        n = int(rng.integers(1, 4))
        A, det = _random_nonsingular(rng, n, 0, 3)
        G = monomial_deck_group(A)
        order_bad += G.order != abs(det)
        Phi = MonomialMap(A)
        z = random_points(rng, 5, n)
        ref = Phi(z)
        for g in G.elements:
            worst = max(worst, float(np.max(np.abs(Phi(z @ g.matrix.T) - ref))))
    checks.append(check("deck_order_failures", order_bad, 0))
    checks.append(check("deck_invariance", worst, 1e-10))
    return VerificationReport.from_checks("snf", {"seed": seed, "count": count}, checks)


def _vandermonde_poly(d: int) -> MultiPoly:
    V = MultiPoly.constant(d)
    for i in range(d):
        for j in range(i + 1, d):
            V = V * (MultiPoly.variable(d, i) - MultiPoly.variable(d, j))
    return V


def polynomial_suite() -> VerificationReport:
    """Coefficient-exact Jacobian identities."""
    checks = []
    for d in (1, 2, 3, 4):
        ok = symmetrization_map(d).jacobian_poly == _vandermonde_poly(d)
        checks.append(check(f"J_s=Vandermonde(d={d})", 0 if ok else 1, 0))
    for k in range(2, 7):
        target = MultiPoly(2, {(k, 0): k, (0, k): -k})
        ok = dihedral_map(k).jacobian_poly == target
        checks.append(check(f"J_phi=k(z1^k-z2^k)(k={k})", 0 if ok else 1, 0))
    return VerificationReport.from_checks("polynomial", {}, checks)


def degenerations(seed: int = 0, pairs: int = 20) -> VerificationReport:
    """Special parameter values that collapse to a base kernel."""
    rng = np.random.default_rng(seed)
    checks = []
    zb, wb = random_points(rng, pairs, 2, "ball"), random_points(rng, pairs, 2, "ball")
    B2 = base_kernel("ball", 2)
    checks.append(_compare("ellipsoid(1,1)=ball", ellipsoid_kernel(1, 1), B2, zb, wb, 1e-12))
    trivial2 = explicit([np.eye(2)], name="trivial:2")
    ident = BallAutomorphism(d=2)
    checks.append(_compare("rudin(trivial)=ball", rudin_ball_kernel(trivial2, ident, None), B2, zb, wb, 1e-12))
    checks.append(
        _compare("conjugated(trivial,id)=base", conjugated_kernel(trivial2, ident, None, B2), B2, zb, wb, 1e-12)
    )
    z, w = random_points(rng, pairs, 2), random_points(rng, pairs, 2)
    P2 = base_kernel("polydisc", 2)
    checks.append(_compare("monomial(I)=polydisc", monomial_polyhedron_kernel(np.eye(2, dtype=int)), P2, z, w, 1e-12))
    checks.append(
        _compare("quotient_sum(trivial)=base",
                 quotient_kernel_sum(trivial2, trivial_character(trivial2), None, P2), P2, z, w, 1e-12)
    )
    checks.append(
        _compare("quotient_sign(trivial,id)=base",
                 quotient_kernel_sign(trivial2, diagonal_power_map([1, 1]), P2), P2, z, w, 1e-12)
    )
    W = base_kernel("weighted_polydisc", 2, 3.0)
    checks.append(
        _compare("quotient_sum(trivial)=weighted",
                 quotient_kernel_sum(trivial2, trivial_character(trivial2), None, W), W, z, w, 1e-12)
    )
    for name, G, d in (
        ("Z2", cyclic_product(2), 1),
        ("Z2xZ2", cyclic_product(2, 2), 2),
        ("Z2xZ3", cyclic_product(2, 3), 2),
        ("trivial", cyclic_product(1, 1), 2),
    ):
        base = base_kernel("polydisc", d)
        hyper_avoid = None
        if G.order > 1:
            hyper = reflecting_hyperplanes(G)
            hyper_avoid = lambda x, hyper=hyper: np.prod([h.linear_form(x) for h in hyper])
        zz = random_points(rng, pairs, d, avoid=hyper_avoid)
        ww = random_points(rng, pairs, d, avoid=hyper_avoid)
        checks.append(
            _compare(f"reassembly({name})", abelian_kernel_reassembly(G, base), base, zz, ww, 1e-10)
        )
    return VerificationReport.from_checks("degenerations", {"seed": seed, "pairs": pairs}, checks)


def run_suite(
    name: str,
    seed: int | None = None,
    samples: int = 200_000,
    tol_sigma: float = 4.0,
) -> VerificationReport:
    """Run a named suite; ``all`` concatenates every suite."""
    if name not in SUITES:
        raise InvalidInputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if name in STOCHASTIC and seed is None:
        raise InvalidInputError(f"suite {name!r} is stochastic and needs an explicit seed")
    s = 0 if seed is None else int(seed)
    runners = {
        "closed-vs-sum": lambda: closed_vs_sum(s),
        "spot-values": spot_values,
        "fiber": lambda: fiber_independence(s),
        "reproducing": lambda: reproducing(s, samples, tol_sigma),
        "projection-identity": lambda: projection_identity(s, samples, tol_sigma),
        "structural": lambda: structural(s),
        "snf": lambda: integer_suite(s),
        "polynomial": polynomial_suite,
        "degenerations": lambda: degenerations(s),
    }
    if name != "all":
        return runners[name]()
    checks = []
    for key, run in runners.items():
        rep = run()
        checks += [{**c, "check": f"{key}/{c['check']}"} for c in rep.details]
    inputs = {"seed": s, "samples": samples, "tol_sigma": tol_sigma}
    return VerificationReport.from_checks("all", inputs, checks)
