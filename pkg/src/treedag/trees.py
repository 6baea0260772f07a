"""Relaxed binary trees, decorated lattice paths, and the bijection between them.

A *relaxed binary tree* of size ``n`` consists of

* a *spine*: a plane binary tree with ``n`` internal nodes (and hence ``n + 1``
  leaves), and
* a *pointer* attached to every leaf except the left-most one.

Nodes are labelled ``1 .. n + 1`` in postorder, where the labelled nodes are
the ``n`` internal nodes together with the left-most leaf (which, being first
in postorder, always receives label ``1``).  The remaining ``n`` leaves are
*pointer leaves*; each one stores the label of an already-visited node, i.e.
a pointer leaf whose postorder visit happens when ``c`` labelled nodes have
been seen may target any label in ``1 .. c``.  Resolving every pointer leaf to
its target turns the spine into a DAG in which every node has out-degree two
(internal) or zero (the left-most leaf).

A relaxed tree is *compacted* when the subtrees obtained by expanding the DAG
below each node back into a plane binary tree are pairwise distinct.
Equivalently (and this is the form both checks below exploit): no two nodes
may share both their resolved left child and their resolved right child.

The bijection to lattice paths walks the spine in postorder, emitting ``H``
for a leaf and ``V`` for an internal node, and then drops the leading ``H``
(the left-most leaf).  The result is a path from ``(0, 0)`` to ``(n, n)``
with unit east (``H``) and north (``V``) steps staying weakly below the
diagonal; every ``H`` carries the decoration of its pointer target, and an
``H`` whose start lies at height ``k`` may carry any decoration in
``1 .. k + 1``.  The inverse replays the step sequence as a postorder parse.

Compactedness translates to paths via the *C-decoration* predicate: label
every ``V`` with its final altitude plus one and every ``H`` with its
decoration; for each ``V`` let ``v2`` be the label of the immediately
preceding step and ``v1`` the label of the last earlier step ending on the
diagonal ray running south-west from the ``V``'s endpoint (``1`` when no such
step exists).  The pair ``(v1, v2)`` is exactly the pair of resolved child
labels of the internal node the ``V`` represents.  A path is C-decorated when
no ``HHV`` factor repeats, as ``(h1, h2)``, the ``(v1, v2)`` pair of an
earlier ``V`` — repeating one would recreate an earlier node's child pair at
a cherry, which is precisely how compactedness fails.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import CapacityError, ValidationError

__all__ = [
    "DecoratedPath",
    "RelaxedTree",
    "ENUMERATION_CAP",
    "to_path",
    "from_path",
    "is_compacted",
    "is_c_decorated",
    "is_h_decorated",
    "enumerate_relaxed",
    "tree_to_dot",
]

#: Largest size accepted by :func:`enumerate_relaxed`.  Sizes grow like
#: ``n! * 4^n``; 6 keeps exhaustive sweeps under twenty thousand objects.
ENUMERATION_CAP = 6


# ---------------------------------------------------------------------------
# decorated paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecoratedPath:
    """A horizontally decorated lattice path.

    ``steps`` is the step word over ``{"H", "V"}``; ``decorations`` holds one
    positive integer per ``H``, in step order.  The path starts at ``(0, 0)``;
    ``H`` moves east, ``V`` moves north.
    """

    steps: tuple[str, ...]
    decorations: tuple[int, ...]

    def __init__(self, steps: Sequence[str], decorations: Sequence[int]):
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(self, "decorations", tuple(int(d) for d in decorations))

    # -- basic shape ------------------------------------------------------

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def size(self) -> int:
        """Number of ``V`` steps (the size of the corresponding tree)."""
        return sum(1 for s in self.steps if s == "V")

    @property
    def is_complete(self) -> bool:
        """True when the path ends on the diagonal (as many ``V`` as ``H``)."""
        h = sum(1 for s in self.steps if s == "H")
        return h == self.length - h

    def endpoint(self) -> tuple[int, int]:
        h = sum(1 for s in self.steps if s == "H")
        return (h, self.length - h)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        """Raise :class:`ValidationError` naming the first violated invariant.

        Checks, in order: step alphabet, decoration count, the sub-diagonal
        constraint (every prefix has at least as many ``H`` as ``V``), and the
        decoration range (an ``H`` starting at height ``k`` carries a
        decoration in ``1 .. k + 1``).
        """
        n_h = 0
        for s in self.steps:
            if s not in ("H", "V"):
                raise ValidationError(f"unknown step {s!r}: steps must be 'H' or 'V'")
            if s == "H":
                n_h += 1
        if len(self.decorations) != n_h:
            raise ValidationError(
                f"{n_h} H steps but {len(self.decorations)} decorations"
            )
        x = y = 0
        deco = iter(self.decorations)
        for i, s in enumerate(self.steps):
            if s == "H":
                d = next(deco)
                if not 1 <= d <= y + 1:
                    raise ValidationError(
                        f"decoration {d} at step {i} outside 1..{y + 1} "
                        f"(H starts at height {y})"
                    )
                x += 1
            else:
                y += 1
                if y > x:
                    raise ValidationError(
                        f"step {i} lifts the path above the diagonal "
                        f"(reached ({x}, {y}))"
                    )

    # -- serialization ------------------------------------------------------

    def tokens(self) -> str:
        """Serialize as space-separated tokens ``H:d`` and ``V``."""
        out = []
        deco = iter(self.decorations)
        for s in self.steps:
            out.append(f"H:{next(deco)}" if s == "H" else "V")
        return " ".join(out)

    @classmethod
    def from_tokens(cls, text: str) -> "DecoratedPath":
        """Parse the :meth:`tokens` format (whitespace-separated)."""
        steps: list[str] = []
        decorations: list[int] = []
        for tok in text.split():
            if tok == "V":
                steps.append("V")
            elif tok.startswith("H:"):
                try:
                    decorations.append(int(tok[2:]))
                except ValueError:
                    raise ValidationError(f"bad decoration in token {tok!r}") from None
                steps.append("H")
            else:
                raise ValidationError(f"unknown token {tok!r}: expected 'H:d' or 'V'")
        return cls(steps, decorations)


# ---------------------------------------------------------------------------
# relaxed trees
# ---------------------------------------------------------------------------

# A spine is represented as nested pairs: an internal node is a 2-tuple
# (left, right) and a leaf is None.  The bare leaf (size 0) is None itself.
Spine = "tuple | None"


def _postorder(spine) -> Iterator[str]:
    """Yield ``"L"``/``"N"`` for each leaf/internal node of a spine, postorder."""
    stack = [(spine, False)]
    while stack:
        node, seen = stack.pop()
        if node is None:
            yield "L"
        elif seen:
            yield "N"
        else:
            stack.append((node, True))
            stack.append((node[1], False))
            stack.append((node[0], False))


def _spine_internal_count(spine) -> int:
    return sum(1 for ev in _postorder(spine) if ev == "N")


@dataclass(frozen=True)
class RelaxedTree:
    """A relaxed binary tree: a spine plus pointer targets.

    ``spine`` uses nested 2-tuples for internal nodes and ``None`` for
    leaves (size 0 is the bare ``None``).  ``pointers`` lists the target
    label of each non-left-most leaf in postorder.
    """

    n: int
    spine: object = field(repr=False)
    pointers: tuple[int, ...]

    def __init__(self, n: int, spine, pointers: Sequence[int]):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "spine", _freeze_spine(spine))
        object.__setattr__(self, "pointers", tuple(int(p) for p in pointers))

    def validate(self) -> None:
        """Raise :class:`ValidationError` naming the first violated invariant.

        Checks: the spine has exactly ``n`` internal nodes, there is one
        pointer per non-left-most leaf, and every pointer targets a label
        already assigned at the moment its leaf is visited in postorder.
        """
        if self.n < 0:
            raise ValidationError(f"negative size {self.n}")
        internal = _spine_internal_count(self.spine)
        if internal != self.n:
            raise ValidationError(
                f"spine has {internal} internal nodes, expected n={self.n}"
            )
        if len(self.pointers) != self.n:
            raise ValidationError(
                f"{len(self.pointers)} pointers for {self.n} pointer leaves"
            )
        labelled = 0  # labels assigned so far during the walk
        ptr = iter(self.pointers)
        first = True
        for ev in _postorder(self.spine):
            if ev == "L":
                if first:
                    first = False
                    labelled += 1  # the left-most leaf takes label 1
                else:
                    t = next(ptr)
                    if not 1 <= t <= labelled:
                        raise ValidationError(
                            f"pointer target {t} outside 1..{labelled} "
                            "(targets must precede the leaf in postorder)"
                        )
            else:
                labelled += 1

    # -- resolved structure -------------------------------------------------

    def children_labels(self) -> dict[int, tuple[int, int]]:
        """Map each internal node's label to its resolved child labels.

        A spine child that is itself internal resolves to its own label, the
        left-most leaf resolves to ``1``, and a pointer leaf resolves to its
        target.  Labels run ``1 .. n + 1`` in postorder; the dictionary holds
        the ``n`` internal nodes (labels ``2 .. n + 1`` are internal exactly
        when the tree is non-empty and the walk assigns them in order).
        """
        label = 0
        ptr = iter(self.pointers)
        values: list[int] = []  # resolved label of each completed subtree
        children: dict[int, tuple[int, int]] = {}
        first = True
        for ev in _postorder(self.spine):
            if ev == "L":
                if first:
                    first = False
                    label += 1
                    values.append(label)
                else:
                    values.append(next(ptr))
            else:
                right = values.pop()
                left = values.pop()
                label += 1
                children[label] = (left, right)
                values.append(label)
        return children

    def __hash__(self) -> int:
        return hash((self.n, self.spine, self.pointers))


def _freeze_spine(spine):
    if spine is None:
        return None
    left, right = spine
    return (_freeze_spine(left), _freeze_spine(right))


# ---------------------------------------------------------------------------
# the bijection
# ---------------------------------------------------------------------------


def to_path(tree: RelaxedTree) -> DecoratedPath:
    """Map a relaxed tree to its decorated path.

    The spine is walked in postorder emitting ``H`` per leaf and ``V`` per
    internal node; the leading ``H`` (the left-most leaf) is dropped, and each
    remaining ``H`` is decorated with its leaf's pointer target.
    """
    tree.validate()
    steps: list[str] = []
    first = True
    for ev in _postorder(tree.spine):
        if ev == "L":
            if first:
                first = False
                continue
            steps.append("H")
        else:
            steps.append("V")
    return DecoratedPath(steps, tree.pointers)


def from_path(path: DecoratedPath) -> RelaxedTree:
    """Map a complete decorated path back to its relaxed tree.

    Re-prepends the dropped leading ``H`` and replays the word as a postorder
    parse: ``H`` pushes a leaf, ``V`` pops the right then the left subtree.
    Raises :class:`ValidationError` if the path is not a complete sub-diagonal
    path with in-range decorations.
    """
    path.validate()
    if not path.is_complete:
        x, y = path.endpoint()
        raise ValidationError(
            f"path ends at ({x}, {y}), not on the diagonal: no tree corresponds"
        )
    stack: list = [None]  # the left-most leaf
    for s in path.steps:
        if s == "H":
            stack.append(None)
        else:
            if len(stack) < 2:
                raise ValidationError("V step closes more subtrees than are open")
            right = stack.pop()
            left = stack.pop()
            stack.append((left, right))
    if len(stack) != 1:
        raise ValidationError(f"{len(stack)} subtrees left open at end of path")
    return RelaxedTree(path.size, stack[0], path.decorations)


# ---------------------------------------------------------------------------
# compactedness and path decorations
# ---------------------------------------------------------------------------


def is_compacted(tree: RelaxedTree) -> bool:
    """True when the expanded subtrees below all nodes are pairwise distinct.

    Two independent checks are run and must agree:

    * bottom-up interning of expanded-subtree shapes — each node's shape key
      is the pair of its resolved children's shape ids, so two nodes get the
      same id exactly when their expansions are equal plane trees;
    * the child-pair criterion — the tree fails to be compacted exactly when
      two nodes share both resolved children.
    """
    children = tree.children_labels()
    # child-pair criterion
    pairs = list(children.values())
    by_pairs = len(pairs) == len(set(pairs))
    # shape interning (labels come out of children_labels in postorder, and
    # every resolved child label is smaller than its parent's label)
    shape: dict[int, int] = {1: 0}
    interned: dict[tuple[int, int], int] = {}
    distinct = True
    for label in sorted(children):
        left, right = children[label]
        key = (shape[left], shape[right])
        if key in interned:
            distinct = False
            shape[label] = interned[key]
        else:
            interned[key] = len(interned) + 1
            shape[label] = interned[key]
    assert distinct == by_pairs, "compactedness checks disagree"
    return distinct


def _v_pairs(path: DecoratedPath) -> Iterator[tuple[int, int, int]]:
    """Yield ``(step_index, v1, v2)`` for each ``V`` step of a valid path.

    ``v2`` is the label of the step immediately before the ``V`` and ``v1``
    the label of the last earlier step ending on the south-west diagonal ray
    from the ``V``'s endpoint (``1`` when no step ends on it, i.e. the ray
    first meets the path at its starting point).  Labels: an ``H`` carries its
    decoration, a ``V`` its final altitude plus one.
    """
    x = y = 0
    last_on_diag: dict[int, int] = {}
    prev_label = 1  # the dropped left-most leaf precedes everything
    deco = iter(path.decorations)
    for i, s in enumerate(path.steps):
        if s == "H":
            x += 1
            label = next(deco)
        else:
            y += 1
            label = y + 1
            v1 = last_on_diag.get(x - y, 1)  # endpoint diag, before adding self
            yield (i, v1, prev_label)
        last_on_diag[x - y] = label
        prev_label = label


def is_c_decorated(path: DecoratedPath) -> bool:
    """True when no ``HHV`` factor repeats an earlier ``V``'s ``(v1, v2)`` pair.

    Mirrors compactedness through the bijection: ``(v1, v2)`` of a ``V`` is
    the resolved child pair of its internal node, and an ``HHV`` factor is a
    cherry whose child pair is ``(h1, h2)``; a compacted tree is exactly one
    where no cherry duplicates the child pair of an earlier node.
    """
    path.validate()
    seen: set[tuple[int, int]] = set()
    steps = path.steps
    # decoration of each H step by index, for pattern lookups
    deco_at: dict[int, int] = {}
    deco = iter(path.decorations)
    for i, s in enumerate(steps):
        if s == "H":
            deco_at[i] = next(deco)
    for i, v1, v2 in _v_pairs(path):
        if i >= 2 and steps[i - 1] == "H" and steps[i - 2] == "H":
            if (deco_at[i - 2], deco_at[i - 1]) in seen:
                return False
        seen.add((v1, v2))
    return True


def is_h_decorated(path: DecoratedPath) -> bool:
    """True when every ``HHV`` factor has ``h1 != h2``, except ``h1 == h2 == 1``."""
    path.validate()
    deco_at: dict[int, int] = {}
    deco = iter(path.decorations)
    for i, s in enumerate(path.steps):
        if s == "H":
            deco_at[i] = next(deco)
    for i, s in enumerate(path.steps):
        if s == "V" and i >= 2 and path.steps[i - 1] == "H" and path.steps[i - 2] == "H":
            h1, h2 = deco_at[i - 2], deco_at[i - 1]
            if h1 == h2 != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------


def _spines(n: int) -> Iterator[object]:
    """All plane binary spines with ``n`` internal nodes, left size ascending."""
    if n == 0:
        yield None
        return
    for k in range(n):
        for left in _spines(k):
            for right in _spines(n - 1 - k):
                yield (left, right)


def _pointer_bounds(spine) -> list[int]:
    """Upper bound of each pointer leaf's target, in postorder."""
    bounds: list[int] = []
    labelled = 0
    first = True
    for ev in _postorder(spine):
        if ev == "L":
            if first:
                first = False
                labelled += 1
            else:
                bounds.append(labelled)
        else:
            labelled += 1
    return bounds


def enumerate_relaxed(n: int, *, cap: int = ENUMERATION_CAP) -> Iterator[RelaxedTree]:
    """Yield every relaxed binary tree of size ``n``.

    Order: spines by recursive left-subtree size, then pointer target tuples
    lexicographically.  Sizes above ``cap`` raise :class:`CapacityError`
    (counts grow like ``n! 4^n``; see the counting tables for how fast).
    """
    if n < 0:
        raise ValidationError(f"negative size {n}")
    if n > cap:
        raise CapacityError(
            f"exhaustive enumeration is capped at n={cap}; "
            f"size {n} would produce too many trees to iterate"
        )
    for spine in _spines(n):
        bounds = _pointer_bounds(spine)
        for targets in itertools.product(*(range(1, b + 1) for b in bounds)):
            yield RelaxedTree(n, spine, targets)


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------


def tree_to_dot(tree: RelaxedTree, *, name: str = "relaxed") -> str:
    """Render the tree as GraphViz DOT: solid spine edges, dashed pointers.

    Nodes carry their postorder labels; the left-most leaf is drawn as a box,
    internal nodes as circles.  Each internal node's left edge is emitted
    before its right edge, and edges to pointer leaves are drawn dashed,
    pointing at the target label.
    """
    tree.validate()
    lines = [f"digraph {name} {{", "  ordering=out;"]
    lines.append('  1 [shape=box, label="1"];')
    # walk assigning labels, collecting edges with spine/pointer flavor
    label = 0
    ptr = iter(tree.pointers)
    # value stack entries: (resolved label, is_pointer_leaf)
    values: list[tuple[int, bool]] = []
    edges: list[str] = []
    first = True
    for ev in _postorder(tree.spine):
        if ev == "L":
            if first:
                first = False
                label += 1
                values.append((label, False))
            else:
                values.append((next(ptr), True))
        else:
            right = values.pop()
            left = values.pop()
            label += 1
            lines.append(f'  {label} [shape=circle, label="{label}"];')
            for child, dashed in (left, right):
                style = ' [style=dashed]' if dashed else ""
                edges.append(f"  {label} -> {child}{style};")
            values.append((label, False))
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
