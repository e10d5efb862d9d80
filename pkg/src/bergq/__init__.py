"""Weighted Bergman kernels of quotient domains by finite pseudoreflection groups.

Submodules
----------
mpoly    sparse polynomials, polynomial maps and their Jacobians
group    pseudoreflection groups, hyperplanes, characters, projections
intlin   adjugate, Smith normal form, monomial deck groups
maps     catalog maps, ball automorphisms, domains and weights
kernels  base kernels, group-averaging formulas and closed forms
quad     Monte-Carlo quadrature and verification harnesses
suites   named verification suites used by the CLI
"""

__version__ = "0.1.0"

from .errors import (
    BergqError,
    DomainError,
    GroupTooLargeError,
    InvalidInputError,
    NearSingularError,
    NotACharacterError,
    SamplerError,
    UnsupportedError,
)
from .group import (
    Character,
    FiniteGroup,
    GroupElement,
    build_group,
    one_dim_characters,
    project,
    reflecting_hyperplanes,
    relative_invariant,
    sign_character,
    trivial_character,
)
from .kernels import KernelOracle, base_kernel, quotient_kernel_sum
from .mpoly import MultiPoly, PolyMapExpr
from .quad import MCEstimate, VerificationReport, mc_integrate, mc_integrate_quotient

__all__ = [
    "BergqError",
    "DomainError",
    "GroupTooLargeError",
    "InvalidInputError",
    "NearSingularError",
    "NotACharacterError",
    "SamplerError",
    "UnsupportedError",
    "Character",
    "FiniteGroup",
    "GroupElement",
    "build_group",
    "one_dim_characters",
    "project",
    "reflecting_hyperplanes",
    "relative_invariant",
    "sign_character",
    "trivial_character",
    "KernelOracle",
    "base_kernel",
    "quotient_kernel_sum",
    "MultiPoly",
    "PolyMapExpr",
    "MCEstimate",
    "VerificationReport",
    "mc_integrate",
    "mc_integrate_quotient",
]
