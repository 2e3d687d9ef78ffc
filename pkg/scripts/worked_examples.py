#!/usr/bin/env python3
"""Walk through the library's flagship examples with full witnesses.

Prints, for a handful of inequations over F(2), the Klein bottle group,
and the integers: the verdict, the positive-cone or sign witness for
failures, the derivation tree for successes, and the piecewise-linear
automorphisms realizing a counterexample on the rational line.
"""

import json
from fractions import Fraction

from ellgroups.biorder import decide_klein_biorderable, decide_valid_rg
from ellgroups.derivation import RuleSystem, tree_to_json
from ellgroups.groups import FreeGroupOracle, KleinBottleOracle, decide_presented_lg
from ellgroups.rightorder import (
    LgInvalid,
    clay_smith,
    counterexample_automorphisms,
    decide_valid_lg,
    evaluate_pl,
    find_bifurcation,
    product_closure_in_ball,
)
from ellgroups.terms import parse_group_word
from ellgroups.words import IDENTITY, render_word

F2 = FreeGroupOracle(2)
KLEIN = KleinBottleOracle()


def W(s):
    return parse_group_word(s, 2)


def words(text):
    return frozenset(W(p.strip()) for p in text.split(","))


def show(title):
    print()
    print("=" * len(title))
    print(title)
    print("=" * len(title))


def main():
    show("e <= x*x \\/ y*y \\/ x^-1*y^-1 is valid in all lattice-ordered groups")
    S = words("x*x, y*y, x^-1*y^-1")
    print("product closure:", sorted(render_word(w) for w in product_closure_in_ball(S, 2)))
    print("decide:", decide_valid_lg(S))
    print("truncated extension:", clay_smith(S, 2))

    show("e <= x*x \\/ x*y \\/ y*x^-1 fails; a 2-truncated right order extends the set")
    T = words("x*x, x*y, y*x^-1")
    witness = clay_smith(T, 2)
    print("positives:", sorted(render_word(w) for w in witness.positives))
    verdict = decide_valid_lg(T)
    assert isinstance(verdict, LgInvalid)
    print("witness order:", " < ".join(render_word(w) for w in verdict.order))
    autos = counterexample_automorphisms(T, verdict.order, 2)
    rank = {w: Fraction(i) for i, w in enumerate(verdict.order)}
    for gen, auto in sorted(autos.items()):
        print(f"  generator {gen} breakpoints: {auto.breakpoints}")
    for t in sorted(T):
        print(
            f"  moving rank of e along {render_word(t)}:",
            evaluate_pl(autos, t, rank[IDENTITY]),
        )
    print("bifurcation word:", render_word(find_bifurcation(T, 2, 3)))

    show("e <= x \\/ y*x^-1*y^-1 separates the two varieties")
    pair = words("x, y*x^-1*y^-1")
    print("all lattice-ordered groups:", type(decide_valid_lg(pair)).__name__)
    rg = decide_valid_rg(pair, 2)
    print("o-groups:", type(rg).__name__)
    print(json.dumps(tree_to_json(rg.certificate, RuleSystem.BI_ORDER, F2), indent=2))

    show("The Klein bottle group: a relative validity and a non-orderability certificate")
    print("e <= y^-1*x^-1 \\/ x under x*y*x^-1*y = e:",
          type(decide_presented_lg(words("y^-1*x^-1, x"), KLEIN)).__name__)
    tree = decide_klein_biorderable()
    print(json.dumps(tree_to_json(tree, RuleSystem.BI_ORDER, KLEIN), indent=2))


if __name__ == "__main__":
    main()
