import json
import random

import pytest

from ellgroups.derivation import (
    CertificateError,
    RuleSystem,
    check,
    closure_leaf,
    exchange_extension,
    exchange_node,
    leaf,
    product_node,
    search,
    tree_from_json,
    tree_to_json,
    widen_tree,
)
from ellgroups.groups import FreeGroupOracle, IntLatticeOracle, KleinBottleOracle
from ellgroups.rightorder import clay_smith, decide_valid_lg, LgValid
from ellgroups.terms import parse_group_word
from ellgroups.words import IDENTITY, ball

F2 = FreeGroupOracle(2)
Z = IntLatticeOracle(1)
KLEIN = KleinBottleOracle()


def W(s, k=2):
    return parse_group_word(s, k)


def integer_tree_for_3_minus5():
    # {3,-5} descends to {3,-3}, {3,-2}; then {2,-2}, {1,-2}; then {1,-1}
    leaf_11 = leaf({(1,), (-1,)}, (1,))
    t_1_m2 = product_node(
        {(1,), (-2,)}, (-2,), (-1,), (-1,), leaf_11, leaf_11
    )
    leaf_22 = leaf({(2,), (-2,)}, (2,))
    t_3_m2 = product_node({(3,), (-2,)}, (3,), (2,), (1,), leaf_22, t_1_m2)
    leaf_33 = leaf({(3,), (-3,)}, (3,))
    return product_node({(3,), (-5,)}, (-5,), (-3,), (-2,), leaf_33, t_3_m2)


def free_tree_for_squares():
    # {xx, yy, x^-1 y^-1} via x^-1*y^-1 = (x^-1)(y^-1), then both squares
    c1 = leaf({W("x"), W("y*y"), W("x^-1")}, W("x"))
    left = product_node(
        {W("x*x"), W("y*y"), W("x^-1")}, W("x*x"), W("x"), W("x"), c1, c1
    )
    c2 = leaf({W("x*x"), W("y"), W("y^-1")}, W("y"))
    right = product_node(
        {W("x*x"), W("y*y"), W("y^-1")}, W("y*y"), W("y"), W("y"), c2, c2
    )
    return product_node(
        {W("x*x"), W("y*y"), W("x^-1*y^-1")},
        W("x^-1*y^-1"),
        W("x^-1"),
        W("y^-1"),
        left,
        right,
    )


def conjugate_exchange_tree():
    # {x, y x^-1 y^-1} from the leaf {x, x^-1} by rotating (y x^-1)(y^-1)
    base = leaf({W("x"), W("x^-1")}, W("x"))
    return exchange_node(
        {W("x"), W("y*x^-1*y^-1")},
        W("y*x^-1*y^-1"),
        W("y*x^-1"),
        W("y^-1"),
        base,
    )


class TestCheck:
    def test_integer_tree_accepted(self):
        check(integer_tree_for_3_minus5(), RuleSystem.RIGHT_ORDER, Z)

    def test_free_tree_accepted(self):
        check(free_tree_for_squares(), RuleSystem.RIGHT_ORDER, F2)

    def test_exchange_tree_accepted_in_bi_order_system(self):
        check(conjugate_exchange_tree(), RuleSystem.BI_ORDER, F2)

    def test_exchange_tree_rejected_in_right_order_system(self):
        with pytest.raises(CertificateError, match="exchange"):
            check(conjugate_exchange_tree(), RuleSystem.RIGHT_ORDER, F2)

    def test_leaf_requires_inverse(self):
        with pytest.raises(CertificateError, match="inverse"):
            check(leaf({W("x")}, W("x")), RuleSystem.RIGHT_ORDER, F2)

    def test_leaf_on_identity(self):
        check(leaf({IDENTITY, W("x")}, IDENTITY), RuleSystem.RIGHT_ORDER, F2)

    def test_closure_leaf(self):
        tree = closure_leaf({(1,), (-2,)}, [(1,), (1,), (-2,)])
        check(tree, RuleSystem.RIGHT_ORDER, Z)

    def test_closure_leaf_bad_product(self):
        with pytest.raises(CertificateError, match="identity"):
            check(
                closure_leaf({(1,), (-2,)}, [(1,), (-2,)]),
                RuleSystem.RIGHT_ORDER,
                Z,
            )

    def test_closure_leaf_foreign_factor(self):
        with pytest.raises(CertificateError, match="factor"):
            check(
                closure_leaf({(1,), (-2,)}, [(2,), (-2,)]),
                RuleSystem.RIGHT_ORDER,
                Z,
            )

    def test_product_premises_must_match(self):
        good = leaf({W("x"), W("x^-1")}, W("x"))
        with pytest.raises(CertificateError, match="premise"):
            check(
                product_node(
                    {W("x*x")}, W("x*x"), W("x"), W("x"), good, good
                ),
                RuleSystem.RIGHT_ORDER,
                F2,
            )

    def test_bad_factorization(self):
        c1 = leaf({W("x"), W("x^-1")}, W("x"))
        with pytest.raises(CertificateError, match="multiply"):
            check(
                product_node(
                    {W("x"), W("x^-1")}, W("x"), W("y"), W("y"), c1, c1
                ),
                RuleSystem.RIGHT_ORDER,
                F2,
            )

    def test_klein_sensitivity(self):
        # the Klein leaf {y, x y x^-1} is only a leaf modulo the relation
        klein_leaf = leaf(
            {KLEIN.canonicalize(W("y")), KLEIN.canonicalize(W("x*y*x^-1"))},
            KLEIN.canonicalize(W("y")),
        )
        check(klein_leaf, RuleSystem.BI_ORDER, KLEIN)
        free_leaf = leaf({W("y"), W("x*y*x^-1")}, W("y"))
        with pytest.raises(CertificateError):
            check(free_leaf, RuleSystem.BI_ORDER, F2)

    def test_non_canonical_conclusion_rejected(self):
        with pytest.raises(CertificateError, match="canonical"):
            check(leaf({W("x*y"), W("x")}, W("x")), RuleSystem.BI_ORDER, KLEIN)


class TestSearch:
    def test_finds_square_certificate(self):
        S = {W("x*x"), W("y*y"), W("x^-1*y^-1")}
        tree = search(S, RuleSystem.RIGHT_ORDER, F2)
        assert tree is not None
        check(tree, RuleSystem.RIGHT_ORDER, F2)

    def test_finds_exchange_certificate(self):
        S = {W("x"), W("y*x^-1*y^-1")}
        tree = search(S, RuleSystem.BI_ORDER, F2)
        assert tree is not None
        assert any(n.rule == "exchange" for n in _walk(tree))
        check(tree, RuleSystem.BI_ORDER, F2)

    def test_single_generator_not_found(self):
        assert search({W("x")}, RuleSystem.RIGHT_ORDER, F2, max_depth=4) is None

    def test_integer_example(self):
        tree = search({(3,), (-5,)}, RuleSystem.RIGHT_ORDER, Z, max_depth=4)
        assert tree is not None
        check(tree, RuleSystem.RIGHT_ORDER, Z)

    def test_rejects_non_canonical_input(self):
        with pytest.raises(ValueError):
            search({W("x*y*x^-1")}, RuleSystem.BI_ORDER, KLEIN)

    def test_deterministic(self):
        S = {W("x*x"), W("y*y"), W("x^-1*y^-1")}
        t1 = search(S, RuleSystem.RIGHT_ORDER, F2)
        t2 = search(S, RuleSystem.RIGHT_ORDER, F2)
        assert t1 == t2

    def test_search_successes_roundtrip_through_checker(self):
        import itertools

        elems = sorted(w for w in ball(2, 2) if w != IDENTITY)
        rng = random.Random(3)
        family = [
            frozenset(c)
            for r in (1, 2, 3)
            for c in itertools.combinations(elems, r)
        ]
        valid = [S for S in family if isinstance(decide_valid_lg(S), LgValid)]
        for S in rng.sample(valid, 120):
            tree = search(S, RuleSystem.RIGHT_ORDER, F2, max_depth=3, universe_cap=24)
            if tree is not None:
                check(tree, RuleSystem.RIGHT_ORDER, F2)

    def test_never_returns_a_tree_for_extendable_sets(self):
        # soundness: a right-order-extendable set has no derivation, so
        # exhausting the budget must come back empty, never with a tree
        import itertools

        elems = sorted(w for w in ball(2, 2) if w != IDENTITY)
        rng = random.Random(9)
        family = [
            frozenset(c)
            for r in (1, 2, 3)
            for c in itertools.combinations(elems, r)
        ]
        extendable = [S for S in family if clay_smith(S, 2) is not None]
        for S in rng.sample(extendable, 25):
            assert search(S, RuleSystem.RIGHT_ORDER, F2, max_depth=2, universe_cap=16) is None


def _walk(tree):
    yield tree
    for c in tree.children:
        yield from _walk(c)


class TestTreeTransformers:
    def test_widening_preserves_acceptance(self):
        extra = {W("y*x"), W("x^-1*y^-1")}
        for tree, system, oracle in (
            (free_tree_for_squares(), RuleSystem.RIGHT_ORDER, F2),
            (conjugate_exchange_tree(), RuleSystem.BI_ORDER, F2),
        ):
            widened = widen_tree(tree, extra)
            check(widened, system, oracle)
            assert widened.conclusion == tree.conclusion | extra

    def test_widening_with_element_equal_to_split(self):
        # widening by the split element itself exercises the retained-c form
        tree = free_tree_for_squares()
        widened = widen_tree(tree, {W("x*x")})
        check(widened, RuleSystem.RIGHT_ORDER, F2)

    def test_exchange_extension_on_worked_tree(self):
        # rotating (y x^-1)(y^-1) back gives y^-1 y x^-1 = x^-1
        tree = conjugate_exchange_tree()  # concludes {x, y x^-1 y^-1}
        a, b = W("y*x^-1"), W("y^-1")
        extended = exchange_extension(tree, a * b, a, b, F2)
        check(extended, RuleSystem.BI_ORDER, F2)
        assert extended.conclusion == {W("x"), W("x^-1")}

    def test_exchange_extension_random_instances(self):
        rng = random.Random(5)
        pool = sorted(w for w in ball(2, 2) if w != IDENTITY)
        count = 0
        while count < 50:
            c = rng.choice(pool)
            junk = frozenset(rng.sample(pool, rng.randint(0, 2)))
            a = rng.choice(pool)
            b = rng.choice(pool)
            ab = a * b
            if ab == IDENTITY:
                continue
            base = junk | {c, c.inverse(), ab}
            tree = leaf(base, c)
            extended = exchange_extension(tree, ab, a, b, F2)
            check(extended, RuleSystem.BI_ORDER, F2)
            assert b * a in extended.conclusion
            count += 1


class TestJsonRoundTrip:
    def test_free_tree(self):
        tree = free_tree_for_squares()
        doc = tree_to_json(tree, RuleSystem.RIGHT_ORDER, F2)
        text = json.dumps(doc, sort_keys=True)
        back, system = tree_from_json(json.loads(text), F2)
        assert system is RuleSystem.RIGHT_ORDER
        assert back == tree
        check(back, system, F2)

    def test_klein_tree(self):
        from ellgroups.biorder import decide_klein_biorderable

        tree = decide_klein_biorderable()
        doc = tree_to_json(tree, RuleSystem.BI_ORDER, KLEIN)
        back, system = tree_from_json(json.loads(json.dumps(doc)), KLEIN)
        assert back == tree
        check(back, system, KLEIN)

    def test_integer_tree(self):
        tree = integer_tree_for_3_minus5()
        doc = tree_to_json(tree, RuleSystem.RIGHT_ORDER, Z)
        back, system = tree_from_json(doc, Z)
        assert back == tree
        check(back, system, Z)
