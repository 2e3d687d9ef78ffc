"""Deciders for "e <= t_1 v ... v t_n" over free groups, with witnesses.

Two complete and independent procedures are provided:

* the difference-system method: orient every pairwise quotient of the
  initial subterms by a sign, and test each resulting tournament of
  strict inequalities for a directed cycle; the inequation is valid
  exactly when every sign choice is cyclic;

* the truncated-right-order method: backtracking extension of the input
  set to a product-closed, total positive cone inside the ball of the
  maximal input length.

An invalid inequation yields an acyclic witness, which converts into
piecewise-linear order-automorphisms of the real line moving the rank
of e strictly down along every join member.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .words import (
    IDENTITY,
    DifferenceClass,
    Word,
    ball,
    difference_classes,
    initial_subterms,
)

__all__ = [
    "DifferenceClass",
    "DifferenceSystem",
    "Acyclic",
    "Cycle",
    "LgValid",
    "LgInvalid",
    "TruncatedRightOrder",
    "PLAutomorphism",
    "build_difference_system",
    "consistent",
    "decide_valid_lg",
    "product_closure_in_ball",
    "clay_smith",
    "counterexample_automorphisms",
    "evaluate_pl",
    "find_bifurcation",
]


@dataclass(frozen=True)
class DifferenceSystem:
    """Initial subterms of a join set together with the sign slots.

    Every unordered pair of distinct nodes is oriented by exactly one
    class. A class whose representative (or its inverse) already lies in
    the base join set carries the corresponding forced sign; if both lie
    in the base, the system is immediately cyclic.
    """

    base: frozenset[Word]
    nodes: tuple[Word, ...]
    classes: tuple[DifferenceClass, ...]
    immediately_cyclic: bool


@dataclass(frozen=True)
class Acyclic:
    order: tuple[Word, ...]  # node words, ascending


@dataclass(frozen=True)
class Cycle:
    nodes: tuple[Word, ...]  # directed cycle, first node repeated implicitly


@dataclass(frozen=True)
class LgValid:
    assignments_checked: int
    nodes_explored: int = 0


@dataclass(frozen=True)
class LgInvalid:
    system: DifferenceSystem
    signs: tuple[int, ...]  # aligned with system.classes
    order: tuple[Word, ...]  # ascending witness order on the nodes
    assignments_checked: int = 0
    nodes_explored: int = 0


def build_difference_system(join: Iterable[Word]) -> DifferenceSystem:
    base = frozenset(join)
    if IDENTITY in base:
        raise ValueError("identity in the join set; validity is immediate")
    classes = []
    cyclic = False
    for cls in difference_classes(base):
        forced: Optional[int] = None
        if cls.rep in base:
            forced = 1
        if cls.rep.inverse() in base:
            if forced == 1:
                cyclic = True
            forced = forced or -1
        classes.append(cls.with_forced_sign(forced))
    nodes = tuple(sorted(initial_subterms(base)))
    return DifferenceSystem(base, nodes, tuple(classes), cyclic)


def _class_edges(
    sys: DifferenceSystem, index: dict[Word, int]
) -> list[tuple[tuple[int, int], ...]]:
    # per class, the (u, v) node-index pairs meaning "a_u < a_v" under sign +1
    out = []
    for cls in sys.classes:
        out.append(tuple((index[u], index[v]) for u, v in cls.oriented_pairs))
    return out


def consistent(
    sys: DifferenceSystem, signs: Sequence[int]
) -> Union[Acyclic, Cycle]:
    """Test one total sign assignment.

    Sign +1 on a class orients each pair (u, v) as a_u < a_v (the
    quotient u*v^-1 joins the positive set); -1 reverses it. Every node
    pair is oriented, so the digraph is a tournament: acyclic means a
    unique total order, otherwise a directed cycle exists.
    """
    if len(signs) != len(sys.classes):
        raise ValueError("sign assignment must cover every class")
    n = len(sys.nodes)
    index = {w: i for i, w in enumerate(sys.nodes)}
    succ: list[set[int]] = [set() for _ in range(n)]
    for cls, sign in zip(sys.classes, signs):
        if cls.forced_sign is not None and sign != cls.forced_sign:
            raise ValueError(f"sign for class {cls.rep} violates forced sign")
        for u, v in cls.oriented_pairs:
            ui, vi = index[u], index[v]
            if sign == 1:
                succ[ui].add(vi)
            else:
                succ[vi].add(ui)
    # transitive tournaments are exactly those with pairwise distinct
    # out-degrees; the ascending order is by descending score
    scores = [len(s) for s in succ]
    if len(set(scores)) == n:
        order = sorted(range(n), key=lambda i: -scores[i])
        return Acyclic(tuple(sys.nodes[i] for i in order))
    # non-transitive tournament: a directed 3-cycle exists
    for a, b, c in itertools.combinations(range(n), 3):
        for u, v, w in ((a, b, c), (a, c, b)):
            if v in succ[u] and w in succ[v] and u in succ[w]:
                return Cycle((sys.nodes[u], sys.nodes[v], sys.nodes[w]))
    raise AssertionError("tournament with repeated scores but no 3-cycle")


def _add_edges(
    reach: list[int], edges: Iterable[tuple[int, int]]
) -> Optional[list[int]]:
    # reach[u] is the bitmask of nodes strictly reachable from u;
    # returns the updated closure, or None if an edge closes a cycle
    reach = list(reach)
    n = len(reach)
    for u, v in edges:
        if (reach[v] >> u) & 1:
            return None
        add = reach[v] | (1 << v)
        if reach[u] | add == reach[u]:
            continue
        for w in range(n):
            if w == u or (reach[w] >> u) & 1:
                reach[w] |= add
    return reach


def decide_valid_lg(join: Iterable[Word]) -> Union[LgValid, LgInvalid]:
    """Decide validity of e <= join in all lattice-ordered groups.

    Valid exactly when every total sign assignment on the difference
    classes yields a cyclic tournament. Signs are enumerated with the
    classes in canonical order, +1 before -1, and the first acyclic
    assignment wins; subtrees whose partial orientation already contains
    a cycle are skipped, which cannot change the outcome or the witness.
    ``assignments_checked`` counts complete assignments covered, so it
    matches plain exhaustive enumeration.
    """
    join = frozenset(join)
    if not join:
        raise ValueError("empty join set")
    if IDENTITY in join:
        return LgValid(assignments_checked=0)
    sys = build_difference_system(join)
    if sys.immediately_cyclic:
        return LgValid(assignments_checked=0)

    index = {w: i for i, w in enumerate(sys.nodes)}
    edges = _class_edges(sys, index)
    n = len(sys.nodes)
    forced = [
        (i, cls.forced_sign)
        for i, cls in enumerate(sys.classes)
        if cls.forced_sign is not None
    ]
    free = [i for i, cls in enumerate(sys.classes) if cls.forced_sign is None]
    m = len(free)

    nodes_explored = 0

    def oriented(ci: int, sign: int) -> tuple[tuple[int, int], ...]:
        if sign == 1:
            return edges[ci]
        return tuple((v, u) for u, v in edges[ci])

    base: Optional[list[int]] = [0] * n
    for ci, sign in forced:
        nodes_explored += 1
        base = _add_edges(base, oriented(ci, sign))
        if base is None:
            break
    if base is None:
        return LgValid(assignments_checked=2**m, nodes_explored=nodes_explored)

    signs = [cls.forced_sign or 0 for cls in sys.classes]
    checked = 0

    def dfs(level: int, reach: list[int]) -> Optional[LgInvalid]:
        nonlocal checked, nodes_explored
        if level == m:
            checked += 1
            order = sorted(range(n), key=lambda i: -bin(reach[i]).count("1"))
            return LgInvalid(
                system=sys,
                signs=tuple(signs),
                order=tuple(sys.nodes[i] for i in order),
                assignments_checked=checked,
                nodes_explored=nodes_explored,
            )
        ci = free[level]
        for sign in (1, -1):
            nodes_explored += 1
            nxt = _add_edges(reach, oriented(ci, sign))
            if nxt is None:
                checked += 2 ** (m - level - 1)
                continue
            signs[ci] = sign
            found = dfs(level + 1, nxt)
            if found is not None:
                return found
            signs[ci] = 0
        return None

    found = dfs(0, base)
    if found is not None:
        return found
    return LgValid(assignments_checked=checked, nodes_explored=nodes_explored)


def decide_valid_lg_bruteforce(join: Iterable[Word]) -> Union[LgValid, LgInvalid]:
    """Plain enumeration of all sign assignments; for cross-checking only."""
    join = frozenset(join)
    if not join:
        raise ValueError("empty join set")
    if IDENTITY in join:
        return LgValid(assignments_checked=0)
    sys = build_difference_system(join)
    if sys.immediately_cyclic:
        return LgValid(assignments_checked=0)
    free = [i for i, cls in enumerate(sys.classes) if cls.forced_sign is None]
    checked = 0
    for choice in itertools.product((1, -1), repeat=len(free)):
        signs = [cls.forced_sign or 0 for cls in sys.classes]
        for i, s in zip(free, choice):
            signs[i] = s
        checked += 1
        verdict = consistent(sys, signs)
        if isinstance(verdict, Acyclic):
            return LgInvalid(
                system=sys,
                signs=tuple(signs),
                order=verdict.order,
                assignments_checked=checked,
            )
    return LgValid(assignments_checked=checked)


@dataclass(frozen=True)
class TruncatedRightOrder:
    """A positive-cone fragment: product-closed in the l-ball, total below l."""

    rank: int
    l: int
    positives: frozenset[Word]


def product_closure_in_ball(words: Iterable[Word], l: int) -> frozenset[Word]:
    """Least superset closed under reduced products of length <= l."""
    current = set(words)
    while True:
        snapshot = sorted(current)
        added = False
        for a in snapshot:
            for b in snapshot:
                c = a * b
                if len(c) <= l and c not in current:
                    current.add(c)
                    added = True
        if not added:
            return frozenset(current)


def clay_smith(words: Iterable[Word], k: int) -> Optional[TruncatedRightOrder]:
    """Decide right-order extension in F(k) by truncated-order backtracking.

    With l the maximal input length, the input is closed under in-ball
    products; as long as some element of the (l-1)-ball is undecided,
    the least one is tried positive, then negative, re-closing each
    time. A branch containing e is dead. Returns a full truncated order
    on success, None when every branch dies (no right order extends the
    input). The empty set extends trivially.
    """
    start = frozenset(words)
    l = max(1, max((len(w) for w in start), default=1))
    interior = sorted(w for w in ball(k, l - 1) if w != IDENTITY)

    def extend(current: frozenset[Word]) -> Optional[frozenset[Word]]:
        if IDENTITY in current:
            return None
        for t in interior:
            if t not in current and t.inverse() not in current:
                for candidate in (t, t.inverse()):
                    closed = product_closure_in_ball(current | {candidate}, l)
                    result = extend(closed)
                    if result is not None:
                        return result
                return None
        return current

    result = extend(product_closure_in_ball(start, l))
    if result is None:
        return None
    return TruncatedRightOrder(rank=k, l=l, positives=result)


class WitnessError(RuntimeError):
    """An invalidity witness failed an internal consistency guarantee."""


@dataclass(frozen=True)
class PLAutomorphism:
    """An increasing piecewise-linear bijection of the rationals.

    Linear interpolation between breakpoints, slope 1 outside their hull.
    No breakpoints means the identity map.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self) -> None:
        pts = self.breakpoints
        for (p1, q1), (p2, q2) in zip(pts, pts[1:]):
            if not (p1 < p2 and q1 < q2):
                raise ValueError("breakpoints must increase in both coordinates")

    def __call__(self, p: Fraction) -> Fraction:
        pts = self.breakpoints
        if not pts:
            return p
        if p <= pts[0][0]:
            return pts[0][1] - (pts[0][0] - p)
        if p >= pts[-1][0]:
            return pts[-1][1] + (p - pts[-1][0])
        for (p1, q1), (p2, q2) in zip(pts, pts[1:]):
            if p1 <= p <= p2:
                return q1 + (q2 - q1) * (p - p1) / (p2 - p1)
        raise AssertionError("unreachable")

    def inverse(self) -> "PLAutomorphism":
        return PLAutomorphism(tuple((q, p) for p, q in self.breakpoints))


def counterexample_automorphisms(
    join: Iterable[Word], order: Sequence[Word], k: int
) -> dict[int, PLAutomorphism]:
    """Turn an acyclic witness order into one PL map per generator.

    Nodes receive consecutive integer ranks along the order. Generator g
    maps rank(u) to rank(u*g) whenever both are nodes; by construction
    these partial maps are strictly increasing, so a violation signals a
    broken witness and raises WitnessError.
    """
    join = frozenset(join)
    nodes = frozenset(order)
    if nodes != initial_subterms(join):
        raise WitnessError("order does not enumerate the initial subterms")
    rank = {w: Fraction(i) for i, w in enumerate(order)}
    autos: dict[int, PLAutomorphism] = {}
    for g in range(1, k + 1):
        gen = Word((g,))
        pairs = sorted(
            {(rank[u], rank[u * gen]) for u in order if u * gen in nodes}
        )
        for (p1, q1), (p2, q2) in zip(pairs, pairs[1:]):
            if not q1 < q2:
                raise WitnessError(
                    f"partial map for generator {g} is not increasing"
                )
        autos[g] = PLAutomorphism(tuple(pairs))
    return autos


def evaluate_pl(
    autos: dict[int, PLAutomorphism], w: Word, p: Fraction
) -> Fraction:
    """Apply the word's letters left to right; inverse letters invert maps."""
    for letter in w.letters:
        f = autos[abs(letter)]
        p = f(p) if letter > 0 else f.inverse()(p)
    return p


def find_bifurcation(
    words: Iterable[Word], k: int, max_len: int
) -> Optional[Word]:
    """Least word s (length-lex) splitting the given extendable set.

    Returns s not in the set or its inverses such that the set stays
    right-order extendable with s adjoined and also with s^-1 adjoined,
    or None when no such word of length <= max_len exists.
    """
    base = frozenset(words)
    if clay_smith(base, k) is None:
        raise ValueError("base set does not extend to a right order")
    excluded = base | {w.inverse() for w in base}
    for s in sorted(ball(k, max_len)):
        if s == IDENTITY or s in excluded:
            continue
        if (
            clay_smith(base | {s}, k) is not None
            and clay_smith(base | {s.inverse()}, k) is not None
        ):
            return s
    return None
