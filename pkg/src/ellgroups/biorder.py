"""Validity in representable lattice-ordered groups (classes of o-groups).

Validity of e <= t_1 v ... v t_n in all o-groups is semidecided from two
sides. A derivation tree in the bi-order rule system certifies validity.
For invalidity, the free group is embedded into truncated integral power
series in noncommuting variables (x_i maps to 1 + e_i X_i); ordering
series by the sign of the first nonzero coefficient in a graded
lexicographic monomial order yields a two-sided group order for every
choice of variable signs and variable precedence. If one such order (or
its dual) makes every join member strictly positive, the join set
extends to an order and the inequation fails. Neither side is complete,
so exhausted budgets surface as Unknown rather than a guess.

The free abelian case is decided exactly: a finite set of nonzero
integer vectors extends to a group order of Z^k if and only if some
rational functional is strictly positive on it, and otherwise a nonzero
nonnegative integer combination of the vectors sums to zero. Exactly one
of the two exists; feasibility runs by exact Fourier-Motzkin
elimination, and the vanishing combination by growing brute force.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Union

from . import derivation
from .derivation import (
    DerivationTree,
    Invalid,
    RuleSystem,
    Unknown,
    Valid,
    exchange_node,
    leaf,
)
from .groups import FreeGroupOracle, KleinBottleOracle
from .words import IDENTITY, Word

__all__ = [
    "MagnusOrder",
    "magnus_expand",
    "series_multiply",
    "magnus_sign",
    "RgBudgets",
    "decide_valid_rg",
    "ExtendsToOrder",
    "DoesNotExtend",
    "decide_abelian_order_extension",
    "decide_klein_biorderable",
]

Series = dict[tuple[int, ...], int]


def series_multiply(a: Series, b: Series, degree: int) -> Series:
    out: Series = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            if len(ma) + len(mb) <= degree:
                m = ma + mb
                c = out.get(m, 0) + ca * cb
                if c:
                    out[m] = c
                elif m in out:
                    del out[m]
    return out


def _letter_series(letter: int, degree: int, epsilon: tuple[int, ...]) -> Series:
    g = abs(letter)
    e = epsilon[g - 1]
    if letter > 0:
        return {(): 1, (g,): e}
    # (1 + eX)^-1 = 1 - eX + (eX)^2 - ... truncated
    out: Series = {(): 1}
    for j in range(1, degree + 1):
        out[(g,) * j] = (-e) ** j
    return out


def magnus_expand(w: Word, degree: int, epsilon: tuple[int, ...]) -> Series:
    """Truncated series of the word under x_i -> 1 + epsilon_i X_i."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    out: Series = {(): 1}
    for letter in w.letters:
        out = series_multiply(out, _letter_series(letter, degree, epsilon), degree)
    return out


@dataclass(frozen=True)
class MagnusOrder:
    """A two-sided order on the free group: variable signs plus a variable
    precedence for the graded-lexicographic comparison of monomials."""

    epsilon: tuple[int, ...]
    precedence: tuple[int, ...]

    def monomial_key(self, m: tuple[int, ...]) -> tuple:
        rank = {g: i for i, g in enumerate(self.precedence)}
        return (len(m), tuple(rank[g] for g in m))


def magnus_sign(w: Word, order: MagnusOrder, degree: int) -> Optional[int]:
    """Sign of w under the order: +1, -1, or None when every coefficient
    up to the given degree vanishes (always for the identity)."""
    series = magnus_expand(w, degree, order.epsilon)
    series.pop((), None)
    if not series:
        return None
    lead = min(series, key=order.monomial_key)
    return 1 if series[lead] > 0 else -1


@dataclass(frozen=True)
class RgBudgets:
    search_depth: int = 4
    universe_cap: int = 32
    max_orders: Optional[int] = None  # cap on (signs, precedence) pairs; None = all
    degree_growth: int = 4  # cap multiplier for the truncation degree


def _uniform_sign_order(
    join: frozenset[Word], k: int, budgets: RgBudgets
) -> tuple[Optional[tuple[MagnusOrder, int]], int]:
    base_degree = max(1, max(len(w) for w in join))
    tried = 0
    words = sorted(join)
    for eps in itertools.product((1, -1), repeat=k):
        if budgets.max_orders is not None and tried >= budgets.max_orders:
            return None, tried
        # the series depends on the signs only, not on the precedence
        cached: list[Series] = []
        for w in words:
            d = base_degree
            series = magnus_expand(w, d, eps)
            series.pop((), None)
            while not series and d < base_degree * budgets.degree_growth:
                d *= 2
                series = magnus_expand(w, d, eps)
                series.pop((), None)
            cached.append(series)
        for perm in itertools.permutations(range(1, k + 1)):
            if budgets.max_orders is not None and tried >= budgets.max_orders:
                return None, tried
            tried += 1
            order = MagnusOrder(eps, perm)
            signs = []
            for series in cached:
                if not series:
                    signs.append(None)
                    continue
                lead = min(series, key=order.monomial_key)
                signs.append(1 if series[lead] > 0 else -1)
            if None in signs:
                continue
            if all(s == 1 for s in signs) or all(s == -1 for s in signs):
                return (order, signs[0]), tried
    return None, tried


def decide_valid_rg(
    join: Iterable[Word], k: int, budgets: RgBudgets = RgBudgets()
) -> Union[Valid, Invalid, Unknown]:
    """Semidecide e <= join in all o-groups over F(k).

    A uniform strict Magnus sign across the join set exhibits an order
    (or its dual) whose positive cone contains the set, refuting the
    inequation; a bi-order derivation tree certifies it. Budgets
    exhausted on both sides yield Unknown.
    """
    join = frozenset(join)
    if not join:
        raise ValueError("empty join set")
    if IDENTITY in join:
        return Valid(leaf(join, IDENTITY), "identity")

    witness, orders_tried = _uniform_sign_order(join, k, budgets)
    if witness is not None:
        order, sign = witness
        return Invalid(
            witness={
                "epsilon": order.epsilon,
                "perm": order.precedence,
                "sign": "pos" if sign == 1 else "neg",
            },
            method="magnus-order",
        )

    if budgets.search_depth > 0:
        tree = derivation.search(
            join,
            RuleSystem.BI_ORDER,
            FreeGroupOracle(k),
            max_depth=budgets.search_depth,
            universe_cap=budgets.universe_cap,
        )
        if tree is not None:
            return Valid(tree, "derivation-search")

    return Unknown(
        budgets={
            "search_depth": budgets.search_depth,
            "universe_cap": budgets.universe_cap,
            "orders_tried": orders_tried,
            "degree_growth": budgets.degree_growth,
        }
    )


@dataclass(frozen=True)
class ExtendsToOrder:
    functional: tuple[int, ...]  # integer functional, strictly positive on the set


@dataclass(frozen=True)
class DoesNotExtend:
    # nonzero nonnegative combination summing to zero: ((vector, count), ...)
    combination: tuple[tuple[tuple[int, ...], int], ...]


def _fourier_motzkin(
    rows: list[tuple[list[Fraction], Fraction]], k: int
) -> Optional[list[Fraction]]:
    """Feasibility of {coeffs . phi >= const}; returns a witness or None."""
    stages = []
    current = rows
    for var in range(k):
        lowers = []  # phi_var >= bound(rest)
        uppers = []  # phi_var <= bound(rest)
        rest = []
        for coeffs, const in current:
            c = coeffs[0]
            tail = coeffs[1:]
            # a bound reads phi_var >= (or <=) const + coefs . remaining
            if c > 0:
                lowers.append(([-x / c for x in tail], const / c))
            elif c < 0:
                uppers.append(([-x / c for x in tail], const / c))
            else:
                rest.append((tail, const))
        for lo_c, lo_b in lowers:
            for up_c, up_b in uppers:
                # lower bound <= upper bound
                rest.append(([u - l for l, u in zip(lo_c, up_c)], lo_b - up_b))
        stages.append((lowers, uppers))
        current = rest
    for coeffs, const in current:
        if const > 0:
            return None
    phi: list[Fraction] = []
    for var in range(k - 1, -1, -1):
        lowers, uppers = stages[var]
        lo = max(
            (b + sum(c * p for c, p in zip(cs, phi)) for cs, b in lowers),
            default=None,
        )
        hi = min(
            (b + sum(c * p for c, p in zip(cs, phi)) for cs, b in uppers),
            default=None,
        )
        if lo is None and hi is None:
            value = Fraction(0)
        elif lo is None:
            value = hi
        elif hi is None:
            value = lo
        else:
            value = (lo + hi) / 2
        phi.insert(0, value)
    return phi


_COMBINATION_CAP = 512  # safety net; duality guarantees a hit long before


def decide_abelian_order_extension(
    vectors: Iterable[tuple[int, ...]], k: int
) -> Union[ExtendsToOrder, DoesNotExtend]:
    """Exact dichotomy for order extension of finite subsets of Z^k.

    Returns a strictly positive integer functional, or a nonzero
    nonnegative integer combination of the vectors summing to zero.
    Witnesses are re-verified by substitution before returning.
    """
    vs = sorted(set(tuple(v) for v in vectors))
    if not vs:
        raise ValueError("empty vector set")
    if any(len(v) != k for v in vs):
        raise ValueError("vector length differs from rank")
    if any(all(x == 0 for x in v) for v in vs):
        raise ValueError("the zero vector never extends to an order")

    rows = [([Fraction(x) for x in v], Fraction(1)) for v in vs]
    phi = _fourier_motzkin(rows, k)
    if phi is not None:
        scale = lcm(*(f.denominator for f in phi)) if phi else 1
        functional = tuple(int(f * scale) for f in phi)
        for v in vs:
            assert sum(c * x for c, x in zip(functional, v)) > 0
        return ExtendsToOrder(functional)

    for total in range(1, _COMBINATION_CAP + 1):
        for combo in itertools.combinations_with_replacement(vs, total):
            if all(sum(col) == 0 for col in zip(*combo)):
                counts = [(v, combo.count(v)) for v in vs if v in combo]
                assert all(
                    sum(v[i] * c for v, c in counts) == 0 for i in range(k)
                )
                return DoesNotExtend(tuple(counts))
    raise AssertionError("duality violated: no functional and no combination")


def decide_klein_biorderable() -> DerivationTree:
    """Certificate that the Klein bottle group carries no two-sided order:
    a single generator set is already in the bi-order family.

    The premise {y, x y x^-1} is a leaf since x y x^-1 = y^-1 in the
    group, and rotating the factorization y = x^-1 * (x y) closes the
    exchange step down to {y}. The tree passes the checker against the
    Klein oracle (and its leaf fails against a free oracle).
    """
    oracle = KleinBottleOracle()
    y = oracle.canonicalize(Word((2,)))
    y_inv = oracle.canonicalize(Word((1, 2, -1)))  # x y x^-1
    premise = leaf({y, y_inv}, y)
    x_inv = oracle.canonicalize(Word((-1,)))
    xy = oracle.canonicalize(Word((1, 2)))
    tree = exchange_node({y}, y, x_inv, xy, premise)
    derivation.check(tree, RuleSystem.BI_ORDER, oracle)
    return tree
