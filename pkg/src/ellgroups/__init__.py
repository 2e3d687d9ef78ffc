"""Decision procedures for lattice-ordered group validity over free groups,
right-order extension of finite free-group subsets, and machine-checkable
certificates (derivation trees, truncated right orders, piecewise-linear
automorphisms of the rational line)."""

from .words import IDENTITY, Word, ball, concat_reduce, initial_subterms, invert, word
from .terms import (
    ParseError,
    parse_statement,
    parse_term,
    parse_word_set,
    to_meet_of_joins,
)
from .rightorder import (
    LgInvalid,
    LgValid,
    TruncatedRightOrder,
    clay_smith,
    decide_valid_lg,
    find_bifurcation,
)
from .derivation import DerivationTree, RuleSystem, check, search
from .groups import (
    FreeGroupOracle,
    IntLatticeOracle,
    KleinBottleOracle,
    decide_presented_lg,
)
from .biorder import (
    decide_abelian_order_extension,
    decide_klein_biorderable,
    decide_valid_rg,
)

__all__ = [
    "IDENTITY",
    "Word",
    "ball",
    "concat_reduce",
    "initial_subterms",
    "invert",
    "word",
    "ParseError",
    "parse_statement",
    "parse_term",
    "parse_word_set",
    "to_meet_of_joins",
    "LgInvalid",
    "LgValid",
    "TruncatedRightOrder",
    "clay_smith",
    "decide_valid_lg",
    "find_bifurcation",
    "DerivationTree",
    "RuleSystem",
    "check",
    "search",
    "FreeGroupOracle",
    "IntLatticeOracle",
    "KleinBottleOracle",
    "decide_presented_lg",
    "decide_abelian_order_extension",
    "decide_klein_biorderable",
    "decide_valid_rg",
]
