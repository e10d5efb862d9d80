"""Command-line front end: ``bergq kernel | verify | inspect``.

Points are flat interleaved arrays ``[re1, im1, re2, im2, ...]`` of fiber
representatives.  Every command prints one JSON line to stdout that echoes
its resolved configuration.  Exit codes: 0 success or pass, 1 verification
failure, 2 invalid input or a near-singular evaluation.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .errors import BergqError, NearSingularError
from .group import (
    FiniteGroup,
    build_group,
    one_dim_characters,
    reflecting_hyperplanes,
    relative_invariant,
    sign_character,
    trivial_character,
)
from .intlin import adjugate, smith_normal_form
from .kernels import (
    KernelOracle,
    base_kernel,
    dihedral_kernels,
    ellipsoid_kernel,
    fat_hartogs_kernel,
    monomial_polyhedron_kernel,
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
    power_map,
    symmetrization_map,
)
from .mpoly import MultiPoly
from .quad import _jsonable
from .suites import SUITES, run_suite

PRESETS = (
    "polydisc",
    "ball",
    "weighted-polydisc",
    "sym-det",
    "sym-perm",
    "dihedral-sign",
    "dihedral-trivial",
    "monomial",
    "fat-hartogs",
    "ellipsoid",
    "quotient-sum",
    "rudin",
)
INSPECT = ("group", "hyperplanes", "characters", "snf", "jacobian")

POINT_HELP = "flat interleaved JSON array [re1, im1, re2, im2, ...]"


class UsageError(BergqError):
    """Bad command-line values (as opposed to bad flags, which argparse handles)."""


# parsing helpers


def parse_point(text: str, d: int | None = None) -> np.ndarray:
    try:
        vals = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"point is not valid JSON: {exc}") from exc
    if not isinstance(vals, list) or not vals or len(vals) % 2:
        raise UsageError("point must be a non-empty flat array of even length")
    try:
        arr = np.array(vals, dtype=float)
    except (TypeError, ValueError) as exc:
        raise UsageError("point entries must be numbers") from exc
    if arr.ndim != 1:
        raise UsageError("point must be a flat array")
    z = arr[0::2] + 1j * arr[1::2]
    if d is not None and z.shape[0] != d:
        raise UsageError(f"point has dimension {z.shape[0]}, expected {d}")
    return z


def flat_point(z: np.ndarray) -> list[float]:
    return [float(x) for c in np.asarray(z) for x in (c.real, c.imag)]


def parse_matrix(text: str) -> list[list[int]]:
    try:
        m = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"matrix is not valid JSON: {exc}") from exc
    if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
        raise UsageError("matrix must be a nested JSON array")
    return m


def parse_map(spec: str):
    """``sym:d``, ``dihedral:k``, ``power:p,q``, ``cyclic:n1,...`` or ``monomial:<matrix>``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "monomial":
            return MonomialMap(parse_matrix(rest))
        args = [int(x) for x in rest.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad map spec {spec!r}") from exc
    if kind == "sym" and len(args) == 1:
        return symmetrization_map(args[0])
    if kind == "dihedral" and len(args) == 1:
        return dihedral_map(args[0])
    if kind == "power" and len(args) == 2:
        return power_map(*args)
    if kind == "cyclic" and args:
        return diagonal_power_map(args)
    raise UsageError(f"unknown map spec {spec!r}")


def default_map(G: FiniteGroup):
    if G.kind == "symmetric":
        return symmetrization_map(G.params[0])
    if G.kind == "dihedral":
        return dihedral_map(G.params[0])
    if G.kind == "cyclic_product":
        return diagonal_power_map(G.params)
    raise UsageError("no catalog map for this group; pass --map")


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise UsageError(f"--{name.replace('_', '-')} is required for this preset")
    return val


def _pick_character(G: FiniteGroup, label: str):
    if label == "sign":
        return sign_character(G)
    if label == "trivial":
        return trivial_character(G)
    chars = one_dim_characters(G)
    for i, chi in enumerate(chars):
        if label in (chi.label, str(i)):
            return chi
    raise UsageError(f"unknown character {label!r}; have {[c.label for c in chars]}")


def build_kernel(args) -> tuple[KernelOracle, dict]:
    """Resolve ``--preset`` and its parameters into a kernel."""
    p = args.preset
    lam = args.lam
    if p == "polydisc":
        d = _need(args, "d")
        return base_kernel("polydisc", d), {"d": d}
    if p == "ball":
        d = _need(args, "d")
        return base_kernel("ball", d), {"d": d}
    if p == "weighted-polydisc":
        d, lam = _need(args, "d"), _need(args, "lam")
        return base_kernel("weighted_polydisc", d, lam), {"d": d, "lambda": lam}
    if p in ("sym-det", "sym-perm"):
        d = _need(args, "d")
        lam = 2.0 if lam is None else lam
        fn = symmetrized_kernel_det if p == "sym-det" else symmetrized_kernel_perm
        return fn(d, lam), {"d": d, "lambda": lam}
    if p in ("dihedral-sign", "dihedral-trivial"):
        k = _need(args, "k")
        sgn, triv = dihedral_kernels(k)
        return (sgn if p == "dihedral-sign" else triv), {"k": k}
    if p == "monomial":
        B = parse_matrix(_need(args, "matrix"))
        return monomial_polyhedron_kernel(B), {"matrix": B}
    if p == "fat-hartogs":
        g = _need(args, "gamma")
        return fat_hartogs_kernel(g), {"gamma": g}
    if p == "ellipsoid":
        pp, q = _need(args, "p"), _need(args, "q")
        return ellipsoid_kernel(pp, q), {"p": pp, "q": q}
    if p == "quotient-sum":
        G = build_group(_need(args, "group"))
        chi = _pick_character(G, args.character)
        ell = None if chi.is_trivial() else relative_invariant(chi, reflecting_hyperplanes(G))
        base = (
            base_kernel("polydisc", G.dimension)
            if lam is None or lam == 2
            else base_kernel("weighted_polydisc", G.dimension, lam)
        )
        params = {"group": args.group, "character": chi.label, "lambda": 2.0 if lam is None else lam}
        return quotient_kernel_sum(G, chi, ell, base), params
    if p == "rudin":
        G = build_group(_need(args, "group"))
        theta = parse_map(args.map) if args.map else default_map(G)
        center = parse_point(args.psi_center, G.dimension) if args.psi_center else None
        psi = BallAutomorphism(center, d=G.dimension)
        F = theta if center is None else ComposedMap(theta, psi)
        params = {
            "group": args.group,
            "map": args.map,
            "psi_center": None if center is None else flat_point(center),
        }
        return rudin_ball_kernel(G, psi, F), params
    raise UsageError(f"unknown preset {p!r}")


# commands


def cmd_kernel(args) -> tuple[dict, int]:
    K, params = build_kernel(args)
    z = parse_point(args.z, K.dim)
    w = parse_point(args.w, K.dim)
    val = K(z, w)
    rec = {
        "preset": args.preset,
        "label": K.label,
        "params": params,
        "z": flat_point(z),
        "w": flat_point(w),
        "re": float(val.real),
        "im": float(val.imag),
    }
    return rec, 0


def cmd_verify(args) -> tuple[dict, int]:
    rep = run_suite(args.suite, args.seed, args.samples, args.tol_sigma)
    rec = rep.to_dict()
    rec["pass"] = rec.pop("passed")
    return rec, 0 if rep.passed else 1


def _poly_record(p: MultiPoly) -> dict:
    return {"text": repr(p), **p.to_dict()}


def cmd_inspect(args) -> tuple[dict, int]:
    what = args.what
    if what == "snf":
        B = parse_matrix(_need(args, "matrix"))
        r = smith_normal_form(B)
        return {
            "matrix": B,
            "P": r.P.tolist(),
            "D": [int(x) for x in r.delta],
            "Q": r.Q.tolist(),
            "adjugate": adjugate(B).tolist(),
        }, 0
    if what == "jacobian":
        m = parse_map(_need(args, "map"))
        if isinstance(m, MonomialMap):
            exps = tuple(int(e) for e in m.A.sum(axis=0) - 1)
            poly = MultiPoly(m.dim, {exps: m.det})
        else:
            poly = m.jacobian_poly
        return {"map": args.map, "jacobian": _poly_record(poly)}, 0
    G = build_group(_need(args, "group"))
    if what == "group":
        return {"group": G.name, "order": G.order, **G.to_dict()}, 0
    if what == "hyperplanes":
        hyper = reflecting_hyperplanes(G)
        return {
            "group": G.name,
            "count": len(hyper),
            "hyperplanes": [
                {
                    "form": _poly_record(h.linear_form),
                    "order": h.order,
                    "generator_index": h.generator_index,
                    "generator_det": h.generator.det,
                }
                for h in hyper
            ],
        }, 0
    if what == "characters":
        chars = one_dim_characters(G)
        return {"group": G.name, "count": len(chars), "characters": [c.to_dict() for c in chars]}, 0
    raise UsageError(f"unknown inspect target {what!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bergq",
        description="Weighted Bergman kernels of quotient domains.",
        epilog=f"Points are {POINT_HELP}.",
    )
    parser.add_argument("--version", action="version", version=f"bergq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="evaluate a kernel at a pair of fiber points")
    k.add_argument("--preset", required=True, choices=PRESETS)
    k.add_argument("--z", required=True, help=POINT_HELP)
    k.add_argument("--w", required=True, help=POINT_HELP)
    k.add_argument("--d", type=int)
    k.add_argument("--lambda", dest="lam", type=float)
    k.add_argument("--k", type=int)
    k.add_argument("--p", type=int)
    k.add_argument("--q", type=int)
    k.add_argument("--gamma", type=int)
    k.add_argument("--matrix", help="integer matrix as nested JSON, e.g. '[[2,-1],[0,1]]'")
    k.add_argument("--group", help="sym:d | dihedral:k | cyclic:n1,n2,...")
    k.add_argument("--character", default="sign", help="sign, trivial, a label or an index")
    k.add_argument("--map", help="sym:d | dihedral:k | power:p,q | cyclic:n1,.. | monomial:<matrix>")
    k.add_argument("--psi-center", help="ball automorphism center, " + POINT_HELP)
    k.add_argument("--out")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--samples", type=int, default=200_000)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol-sigma", type=float, default=4.0)
    v.add_argument("--out")

    i = sub.add_parser("inspect", help="print group, hyperplane, character, SNF or Jacobian data")
    i.add_argument("--what", required=True, choices=INSPECT)
    i.add_argument("--group")
    i.add_argument("--matrix")
    i.add_argument("--map")
    i.add_argument("--out")
    return parser


COMMANDS = {"kernel": cmd_kernel, "verify": cmd_verify, "inspect": cmd_inspect}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    config = {k: v for k, v in vars(args).items() if k != "out"}
    try:
        rec, code = COMMANDS[args.command](args)
    except NearSingularError as exc:
        rec, code = {"error": "near-singular", "detail": str(exc)}, 2
    except (BergqError, ValueError) as exc:
        rec, code = {"error": "invalid-input", "detail": str(exc)}, 2
    out = {"command": args.command, "config": config, **rec}
    text = json.dumps(_jsonable(out))
    print(text)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if code == 2:
        print(f"bergq: {rec.get('error')}: {rec.get('detail')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
