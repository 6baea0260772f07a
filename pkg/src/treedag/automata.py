"""Minimal acyclic DFAs from compacted trees, and bounds on their number.

A compacted tree of size ``n`` becomes a DFA over ``{a, b}`` as follows: the
states are the ``n`` internal nodes plus the left-most leaf; the initial
state is the root; reading ``a`` (resp. ``b``) moves to the resolved left
(resp. right) child; the leaf is the sink (both transitions self-loop, never
final).  Any subset of internal nodes may be final, except that the unique
node with both children resolving to the sink must always be final — its
language would otherwise be empty, clashing with the sink's.

A DFA is the minimal automaton of some finite language exactly when it has a
unique sink, is acyclic apart from the sink's self-loops, is initially
connected, and is reduced (distinct states recognize distinct languages).
With ``m2n`` the number of such DFAs on ``n`` transient states plus a sink,
counted up to isomorphism, the construction yields

    2^(n-1) * c_n  <=  m2n  <=  2^(n-1) * r_n

because compacted trees with legal final sets give pairwise non-isomorphic
minimal DFAs, while forgetting final states maps every minimal DFA onto a
relaxed tree (unfold the transition DAG depth-first, left edge first; first
visits become spine nodes, revisits become pointers).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import CapacityError, DomainError, ValidationError
from .exact_count import CountTable, compacted_table, relaxed_table
from .trees import RelaxedTree, enumerate_relaxed, is_compacted

__all__ = [
    "Dfa",
    "BRUTE_FORCE_CAP",
    "tree_to_dfa",
    "is_minimal_finite",
    "canonical_form",
    "language_of",
    "brute_count_minimal",
    "dfa_bounds",
    "dfa_to_dot",
    "minimal_dfa_csv",
]

#: Largest ``n`` accepted by :func:`brute_count_minimal`: the loop visits
#: ``r_n * 2^n`` automata, fine at 4 (2032) and pointless beyond.
BRUTE_FORCE_CAP = 4


@dataclass(frozen=True)
class Dfa:
    """A complete DFA over the two-letter alphabet ``{a, b}``.

    States are ``0 .. n_states - 1``; ``a`` and ``b`` are the transition
    tables (``a[q]`` is the state reached from ``q`` reading ``a``).
    ``sink`` designates the dead state.
    """

    n_states: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    initial: int
    finals: frozenset[int]
    sink: int

    def __init__(self, n_states, a, b, initial, finals, sink):
        object.__setattr__(self, "n_states", int(n_states))
        object.__setattr__(self, "a", tuple(int(x) for x in a))
        object.__setattr__(self, "b", tuple(int(x) for x in b))
        object.__setattr__(self, "initial", int(initial))
        object.__setattr__(self, "finals", frozenset(int(q) for q in finals))
        object.__setattr__(self, "sink", int(sink))

    def validate(self) -> None:
        """Raise :class:`ValidationError` naming the first violated invariant.

        Checks: transition tables are total and in range, the designated sink
        is a non-final state whose transitions self-loop, the graph is acyclic
        apart from the sink's loops, and every state is reachable from the
        initial state.
        """
        n = self.n_states
        if n <= 0:
            raise ValidationError("a DFA needs at least one state")
        if len(self.a) != n or len(self.b) != n:
            raise ValidationError(
                f"transition tables have lengths {len(self.a)}, {len(self.b)}; "
                f"expected {n}"
            )
        for table, letter in ((self.a, "a"), (self.b, "b")):
            for q, t in enumerate(table):
                if not 0 <= t < n:
                    raise ValidationError(
                        f"transition {letter} from state {q} targets {t}, "
                        f"outside 0..{n - 1}"
                    )
        if not 0 <= self.initial < n:
            raise ValidationError(f"initial state {self.initial} out of range")
        if not self.finals <= set(range(n)):
            raise ValidationError("final set contains out-of-range states")
        if not 0 <= self.sink < n:
            raise ValidationError(f"sink {self.sink} out of range")
        if self.sink in self.finals:
            raise ValidationError("sink must not be final")
        if self.a[self.sink] != self.sink or self.b[self.sink] != self.sink:
            raise ValidationError("sink transitions must self-loop")
        if _topo_order(self) is None:
            raise ValidationError("transition graph has a cycle outside the sink")
        if not _initially_connected(self):
            raise ValidationError("not initially connected: unreachable states exist")


def _topo_order(dfa: Dfa) -> Optional[list[int]]:
    """Children-first order of the non-sink states, or None on a cycle.

    Edges into the designated sink are ignored; any other cycle (including
    self-loops) returns None.
    """
    n, s = dfa.n_states, dfa.sink
    state = [0] * n  # 0 unvisited, 1 on stack, 2 done
    order: list[int] = []
    for root in range(n):
        if root == s or state[root] == 2:
            continue
        stack = [(root, 0)]
        if state[root] == 0:
            state[root] = 1
        while stack:
            q, phase = stack.pop()
            if phase == 1:
                state[q] = 2
                order.append(q)
                continue
            stack.append((q, 1))
            for t in (dfa.a[q], dfa.b[q]):
                if t == s:
                    continue
                if state[t] == 1:
                    return None
                if state[t] == 0:
                    state[t] = 1
                    stack.append((t, 0))
    return order


def _initially_connected(dfa: Dfa) -> bool:
    seen = {dfa.initial}
    frontier = [dfa.initial]
    while frontier:
        q = frontier.pop()
        for t in (dfa.a[q], dfa.b[q]):
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    return len(seen) == dfa.n_states


def _reduced_by_interning(dfa: Dfa, sink: int, order: Sequence[int]) -> bool:
    """Reduced-check for acyclic automata via language interning.

    Two states recognize the same language exactly when their finality and
    the languages after ``a`` and ``b`` all agree (word derivatives), so
    interning the triple ``(final?, class_a, class_b)`` children-first gives
    one class id per distinct language.  The table is pre-seeded so that any
    non-final state with both transitions into the empty class collapses into
    the sink's class — those states also recognize the empty language.
    """
    empty = 0
    cls = {sink: empty}
    table = {(False, empty, empty): empty}
    for q in order:  # children-first, so both child classes are known
        key = (q in dfa.finals, cls[dfa.a[q]], cls[dfa.b[q]])
        if key not in table:
            table[key] = len(table)
        cls[q] = table[key]
    return len(set(cls.values())) == dfa.n_states


def _reduced_by_refinement(dfa: Dfa) -> bool:
    """Reduced-check via Moore partition refinement (no acyclicity needed)."""
    n = dfa.n_states
    cls = [1 if q in dfa.finals else 0 for q in range(n)]
    while True:
        keys = [(cls[q], cls[dfa.a[q]], cls[dfa.b[q]]) for q in range(n)]
        renumber: dict[tuple, int] = {}
        nxt = [renumber.setdefault(k, len(renumber)) for k in keys]
        if len(renumber) == len(set(cls)):
            return len(renumber) == n
        cls = nxt


def is_minimal_finite(dfa: Dfa) -> bool:
    """True when the DFA is the minimal automaton of some finite language.

    Checks the four characterizing conditions: a unique sink (non-final,
    self-looping on both letters), acyclicity apart from the sink's loops,
    initial connectivity, and reducedness.  Reducedness is evaluated twice —
    structurally by language interning and independently by Moore partition
    refinement — and the two must agree.
    """
    sinks = [
        q
        for q in range(dfa.n_states)
        if dfa.a[q] == q and dfa.b[q] == q and q not in dfa.finals
    ]
    if len(sinks) != 1:
        return False
    sink = sinks[0]
    probe = dfa if sink == dfa.sink else Dfa(
        dfa.n_states, dfa.a, dfa.b, dfa.initial, dfa.finals, sink
    )
    order = _topo_order(probe)
    if order is None:
        return False
    if not _initially_connected(probe):
        return False
    structural = _reduced_by_interning(probe, sink, order)
    refined = _reduced_by_refinement(probe)
    assert structural == refined, "reduced checks disagree"
    return structural


def tree_to_dfa(tree: RelaxedTree, finals: Iterable[int]) -> Dfa:
    """Build the DFA of a compacted tree with the given final node labels.

    ``finals`` lists postorder labels of internal nodes (``2 .. n + 1``); it
    must contain the unique node whose children both resolve to the sink.
    States are the labels shifted down by one (state = label - 1), so the
    sink is state 0 and the initial state (the root) is state ``n``.
    Raises :class:`ValidationError` for non-compacted trees or illegal
    final sets.
    """
    if tree.n < 1:
        raise ValidationError("a size-0 tree has no transient states")
    if not is_compacted(tree):
        raise ValidationError("tree is not compacted: two nodes share both children")
    finals = frozenset(int(q) for q in finals)
    n = tree.n
    labels = set(range(2, n + 2))
    if not finals <= labels:
        raise ValidationError(
            f"final labels {sorted(finals - labels)} outside internal nodes 2..{n + 1}"
        )
    children = tree.children_labels()
    forced = [u for u, pair in children.items() if pair == (1, 1)]
    assert len(forced) == 1, "compacted tree must have one node with both children at the sink"
    if forced[0] not in finals:
        raise ValidationError(
            f"node {forced[0]} has both children at the sink and must be final"
        )
    a = [0] * (n + 1)
    b = [0] * (n + 1)
    for u, (left, right) in children.items():
        a[u - 1] = left - 1
        b[u - 1] = right - 1
    dfa = Dfa(n + 1, a, b, n, frozenset(q - 1 for q in finals), 0)
    dfa.validate()
    return dfa


def canonical_form(dfa: Dfa) -> tuple:
    """Isomorphism-invariant form: relabel by BFS from the initial state.

    Transitions are letter-labeled, so the Breadth-first traversal (following
    ``a`` then ``b``) assigns each reachable state a unique rank; two DFAs
    are isomorphic exactly when their relabeled tuples coincide.  Requires
    initial connectivity (otherwise unreachable states have no rank).
    """
    if not _initially_connected(dfa):
        raise ValidationError("canonical form needs an initially connected DFA")
    rank = {dfa.initial: 0}
    queue = [dfa.initial]
    head = 0
    while head < len(queue):
        q = queue[head]
        head += 1
        for t in (dfa.a[q], dfa.b[q]):
            if t not in rank:
                rank[t] = len(rank)
                queue.append(t)
    n = dfa.n_states
    a = [0] * n
    b = [0] * n
    for q in range(n):
        a[rank[q]] = rank[dfa.a[q]]
        b[rank[q]] = rank[dfa.b[q]]
    return (
        n,
        tuple(a),
        tuple(b),
        frozenset(rank[q] for q in dfa.finals),
        rank[dfa.sink],
    )


def language_of(dfa: Dfa, max_len: int) -> list[str]:
    """All accepted words of length at most ``max_len``, lexicographically.

    On the acyclic automata this module builds, a ``max_len`` of at least
    ``n_states`` returns the whole (finite) language; the explicit bound
    keeps the walk finite on any input.
    """
    words: list[str] = []

    def walk(q: int, prefix: str) -> None:
        if q in dfa.finals:
            words.append(prefix)
        if len(prefix) < max_len and q != dfa.sink:
            walk(dfa.a[q], prefix + "a")
            walk(dfa.b[q], prefix + "b")

    walk(dfa.initial, "")
    return sorted(words)


def brute_count_minimal(n: int, *, cap: int = BRUTE_FORCE_CAP) -> int:
    """Exact count of minimal finite-language DFAs with ``n`` transient states.

    Every candidate arises from a relaxed tree (the transition structure) and
    a subset of the transient states as finals; each minimal DFA arises from
    exactly one such pair, which the canonical-form cross-check enforces.
    """
    if n < 1:
        raise DomainError(f"need at least one transient state, got n={n}")
    if n > cap:
        raise CapacityError(
            f"brute-force count is capped at n={cap} "
            f"(cost grows like r_n * 2^n minimality checks)"
        )
    count = 0
    forms: set[tuple] = set()
    for tree in enumerate_relaxed(n):
        children = tree.children_labels()
        a = [0] * (n + 1)
        b = [0] * (n + 1)
        for u, (left, right) in children.items():
            a[u - 1] = left - 1
            b[u - 1] = right - 1
        for mask in range(1 << n):
            finals = frozenset(q + 1 for q in range(n) if mask >> q & 1)
            dfa = Dfa(n + 1, a, b, n, finals, 0)
            if is_minimal_finite(dfa):
                count += 1
                forms.add(canonical_form(dfa))
    assert len(forms) == count, "distinct (tree, finals) pairs collided"
    return count


def dfa_bounds(
    n: int,
    *,
    r_table: Optional[CountTable] = None,
    c_table: Optional[CountTable] = None,
) -> tuple[int, int]:
    """The sandwich ``(2^(n-1) c_n, 2^(n-1) r_n)`` around ``m2n``."""
    if n < 1:
        raise DomainError(f"need at least one transient state, got n={n}")
    c_n = (c_table or compacted_table(n)).value(n, n)
    r_n = (r_table or relaxed_table(n)).value(n, n)
    return (c_n << (n - 1), r_n << (n - 1))


def dfa_bounds_csv(max_n: int) -> str:
    """CSV ``n,lower,upper`` of the sandwich bounds for ``1 <= n <= max_n``."""
    r_table = relaxed_table(max(max_n, 1), mode="rolling-row")
    c_table = compacted_table(max(max_n, 1), mode="rolling-row")
    lines = ["n,lower,upper"]
    for n in range(1, max_n + 1):
        lower, upper = dfa_bounds(n, r_table=r_table, c_table=c_table)
        lines.append(f"{n},{lower},{upper}")
    return "\n".join(lines) + "\n"


def minimal_dfa_csv(max_n: int, *, cap: int = BRUTE_FORCE_CAP) -> str:
    """CSV ``n,lower,m2n,upper`` for ``1 <= n <= max_n`` (brute-forced)."""
    r_table = relaxed_table(max(max_n, 1))
    c_table = compacted_table(max(max_n, 1))
    lines = ["n,lower,m2n,upper"]
    for n in range(1, max_n + 1):
        lower, upper = dfa_bounds(n, r_table=r_table, c_table=c_table)
        lines.append(f"{n},{lower},{brute_count_minimal(n, cap=cap)},{upper}")
    return "\n".join(lines) + "\n"


def dfa_to_dot(dfa: Dfa, *, name: str = "dfa") -> str:
    """Render as GraphViz DOT: finals double-circled, sink dashed.

    States are printed as ``q0, q1, ...`` in BFS order from the initial
    state (the order :func:`canonical_form` uses), with an arrow into ``q0``.
    """
    n, a, b, finals, sink = canonical_form(dfa)
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  start [shape=point];"]
    for q in range(n):
        attrs = ["shape=doublecircle" if q in finals else "shape=circle"]
        if q == sink:
            attrs.append("style=dashed")
        lines.append(f'  q{q} [{", ".join(attrs)}];')
    lines.append("  start -> q0;")
    for q in range(n):
        if q == sink:
            continue  # self-loops omitted for readability
        if a[q] == b[q]:
            lines.append(f'  q{q} -> q{a[q]} [label="a,b"];')
        else:
            lines.append(f'  q{q} -> q{a[q]} [label="a"];')
            lines.append(f'  q{q} -> q{b[q]} [label="b"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
