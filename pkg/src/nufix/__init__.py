"""nufix: a finite-poset workbench for behaviour-functor fixed points.

The package computes, at desk scale, final coalgebras of mixed-variance
behaviour families over finite (pointed) posets: inner terminal sequences
with embedding-projection chains, the outer iteration that solves
Z ~ |nu F(Z, Z)|, the bisimulation games and quotients that motivate the
construction, and the inclusion/lifting adjunction for lazy families.
"""

from .errors import NufixError
from .posets import (
    EpPair,
    FinPoset,
    Iso,
    MonoMap,
    boolean_lattice,
    coalesced_sum,
    compose,
    discrete,
    ep_check,
    fun_space,
    hasse,
    identity,
    iso_check,
    lift,
    product,
    separated_sum,
    strict_fun_space,
    strict_upsets,
    unit,
    upsets,
    validate_poset,
)
from .functors import (
    Backend,
    CoalgebraSpec,
    FunctorInstance,
    instantiate,
    parse,
    pretty,
    reindex_ep,
    rel_lift,
)
from .engine import (
    FinalCoalgebra,
    SolutionReport,
    TerminalSequence,
    check_limit_colimit,
    coinductive_extension,
    final_coalgebra,
    nu_on_transformation,
    solve_hob,
    terminal_sequence,
)
from .bisim import (
    Equivalence,
    LtsSpec,
    Relation,
    behavioural_equiv,
    coalg_bisim,
    dimmed_bisim,
    lemma1_check,
    quotient,
    value_bisim,
)
from .mediator import adjunction_check, include, lift_left_adjoint, solve_lifted

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "CoalgebraSpec",
    "EpPair",
    "Equivalence",
    "FinPoset",
    "FinalCoalgebra",
    "FunctorInstance",
    "Iso",
    "LtsSpec",
    "MonoMap",
    "NufixError",
    "Relation",
    "SolutionReport",
    "TerminalSequence",
    "adjunction_check",
    "behavioural_equiv",
    "boolean_lattice",
    "check_limit_colimit",
    "coalesced_sum",
    "coalg_bisim",
    "coinductive_extension",
    "compose",
    "dimmed_bisim",
    "discrete",
    "ep_check",
    "final_coalgebra",
    "fun_space",
    "hasse",
    "identity",
    "include",
    "instantiate",
    "iso_check",
    "lemma1_check",
    "lift",
    "lift_left_adjoint",
    "nu_on_transformation",
    "parse",
    "pretty",
    "product",
    "quotient",
    "reindex_ep",
    "rel_lift",
    "separated_sum",
    "solve_hob",
    "solve_lifted",
    "strict_fun_space",
    "strict_upsets",
    "terminal_sequence",
    "unit",
    "upsets",
    "validate_poset",
    "value_bisim",
]
