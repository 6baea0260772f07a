"""Tests for relaxed trees, decorated paths, and the bijection."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treedag.errors import CapacityError, ValidationError
from treedag.exact_count import COMPACTED_PREFIX, RELAXED_PREFIX
from treedag.trees import (
    DecoratedPath,
    RelaxedTree,
    ENUMERATION_CAP,
    enumerate_relaxed,
    from_path,
    is_c_decorated,
    is_compacted,
    is_h_decorated,
    to_path,
    tree_to_dot,
)


@pytest.fixture(scope="module")
def trees_by_size():
    return {n: list(enumerate_relaxed(n)) for n in range(6)}


# ---------------------------------------------------------------------------
# exhaustive counts
# ---------------------------------------------------------------------------


def test_enumeration_counts_match_relaxed_sequence(trees_by_size):
    for n, trees in trees_by_size.items():
        assert len(trees) == RELAXED_PREFIX[n]


def test_compacted_counts_match_compacted_sequence(trees_by_size):
    for n, trees in trees_by_size.items():
        assert sum(1 for t in trees if is_compacted(t)) == COMPACTED_PREFIX[n]


def test_h_decorated_paths_are_equinumerous_with_compacted(trees_by_size):
    # different set than the C-decorated paths, same count
    for n in (3, 4):
        count = sum(1 for t in trees_by_size[n] if is_h_decorated(to_path(t)))
        assert count == COMPACTED_PREFIX[n]


def test_enumeration_yields_distinct_trees(trees_by_size):
    for trees in trees_by_size.values():
        assert len(set(trees)) == len(trees)


# ---------------------------------------------------------------------------
# the bijection
# ---------------------------------------------------------------------------


def test_roundtrip_tree_to_path_to_tree(trees_by_size):
    for trees in trees_by_size.values():
        for t in trees:
            p = to_path(t)
            p.validate()
            assert p.is_complete
            assert p.size == t.n
            assert from_path(p) == t


def test_bijection_is_injective_on_paths(trees_by_size):
    for n, trees in trees_by_size.items():
        paths = {to_path(t) for t in trees}
        assert len(paths) == len(trees)


def test_size_zero_tree_and_empty_path():
    (t,) = enumerate_relaxed(0)
    assert t.spine is None
    assert t.pointers == ()
    assert to_path(t).tokens() == ""
    assert from_path(DecoratedPath((), ())) == t


def test_size_one_path():
    assert [to_path(t).tokens() for t in enumerate_relaxed(1)] == ["H:1 V"]


def test_size_two_paths_frozen_set():
    got = sorted(to_path(t).tokens() for t in enumerate_relaxed(2))
    assert got == ["H:1 H:1 V V", "H:1 V H:1 V", "H:1 V H:2 V"]


def test_hvhv_second_decoration_targets_second_node():
    # the path H V H V with decorations (1, 2): the root's right pointer
    # must resolve to the node labelled 2 (the first internal node)
    t = from_path(DecoratedPath("HVHV", (1, 2)))
    assert t.children_labels() == {2: (1, 1), 3: (2, 2)}


def test_construction_rule_on_hand_built_tree():
    # Spine: root over two cherries; left cherry = (left-most leaf, ptr->1),
    # right cherry = (ptr->2, ptr->1).  Postorder labels: leaf=1, left
    # cherry=2, right cherry=3, root=4.
    tree = RelaxedTree(3, ((None, None), (None, None)), (1, 2, 1))
    path = to_path(tree)
    assert path.tokens() == "H:1 V H:2 H:1 V V"
    assert from_path(path) == tree
    assert tree.children_labels() == {2: (1, 1), 3: (2, 1), 4: (2, 3)}
    assert is_compacted(tree)


# ---------------------------------------------------------------------------
# compactedness and decorations
# ---------------------------------------------------------------------------


def test_c_decoration_mirrors_compactedness(trees_by_size):
    for trees in trees_by_size.values():
        for t in trees:
            assert is_c_decorated(to_path(t)) == is_compacted(t)


def test_unique_non_compacted_tree_of_size_three(trees_by_size):
    bad = [t for t in trees_by_size[3] if not is_compacted(t)]
    assert len(bad) == 1
    p = to_path(bad[0])
    assert p.tokens() == "H:1 V H:1 H:1 V V"
    assert not is_c_decorated(p)
    # ...yet it is H-decorated: the cherry repeats (1, 1), which the simpler
    # predicate allows — the two classes differ as sets, agreeing in count
    assert is_h_decorated(p)


def test_h_decoration_rejects_equal_nontrivial_pair():
    p = DecoratedPath("HVHHVV", (1, 2, 2))
    p.validate()
    assert not is_h_decorated(p)
    # the same path is C-decorated: no earlier V has child pair (2, 2)
    assert is_c_decorated(p)


def test_compactedness_checks_agree_by_construction(trees_by_size):
    # is_compacted asserts internally that the shape-interning check and the
    # child-pair check coincide; a disagreement would raise here
    for trees in trees_by_size.values():
        for t in trees:
            is_compacted(t)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "path, fragment",
    [
        (DecoratedPath("HV", (2,)), "outside 1..1"),
        (DecoratedPath("VH", (1,)), "above the diagonal"),
        (DecoratedPath("HX", (1,)), "unknown step"),
        (DecoratedPath("HV", ()), "0 decorations"),
    ],
)
def test_path_validation_errors(path, fragment):
    with pytest.raises(ValidationError, match=fragment):
        path.validate()


def test_from_path_rejects_incomplete_path():
    with pytest.raises(ValidationError, match="not on the diagonal"):
        from_path(DecoratedPath("H", (1,)))


@pytest.mark.parametrize(
    "tree, fragment",
    [
        (RelaxedTree(1, (None, None), (2,)), "outside 1..1"),
        (RelaxedTree(2, (None, None), (1,)), "expected n=2"),
        (RelaxedTree(1, (None, None), (1, 1)), "2 pointers"),
    ],
)
def test_tree_validation_errors(tree, fragment):
    with pytest.raises(ValidationError, match=fragment):
        tree.validate()


def test_enumeration_cap():
    with pytest.raises(CapacityError, match=f"capped at n={ENUMERATION_CAP}"):
        list(enumerate_relaxed(ENUMERATION_CAP + 1))
    # the cap is overridable for callers who accept the cost
    assert sum(1 for _ in enumerate_relaxed(2, cap=2)) == 3


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_tokens_roundtrip(trees_by_size):
    for trees in trees_by_size.values():
        for t in trees:
            p = to_path(t)
            assert DecoratedPath.from_tokens(p.tokens()) == p


@pytest.mark.parametrize("text", ["Q", "H:x", "H", "V:1"])
def test_token_parse_errors(text):
    with pytest.raises(ValidationError):
        DecoratedPath.from_tokens(text)


def test_dot_export_golden():
    tree = RelaxedTree(3, ((None, None), (None, None)), (1, 2, 1))
    dot = tree_to_dot(tree)
    assert dot == (
        "digraph relaxed {\n"
        "  ordering=out;\n"
        '  1 [shape=box, label="1"];\n'
        '  2 [shape=circle, label="2"];\n'
        '  3 [shape=circle, label="3"];\n'
        '  4 [shape=circle, label="4"];\n'
        "  2 -> 1;\n"
        "  2 -> 1 [style=dashed];\n"
        "  3 -> 2 [style=dashed];\n"
        "  3 -> 1 [style=dashed];\n"
        "  4 -> 2;\n"
        "  4 -> 3;\n"
        "}\n"
    )


# ---------------------------------------------------------------------------
# randomized structure checks
# ---------------------------------------------------------------------------


@st.composite
def relaxed_trees(draw, max_n: int = 10):
    n = draw(st.integers(min_value=0, max_value=max_n))

    def spine(size):
        if size == 0:
            return None
        k = draw(st.integers(min_value=0, max_value=size - 1))
        return (spine(k), spine(size - 1 - k))

    sp = spine(n)
    # pointer bounds: walk postorder counting labelled nodes
    bounds = []
    labelled = 0
    first = True
    stack = [(sp, False)]
    while stack:
        node, seen = stack.pop()
        if node is None:
            if first:
                first = False
                labelled += 1
            else:
                bounds.append(labelled)
        elif seen:
            labelled += 1
        else:
            stack.append((node, True))
            stack.append((node[1], False))
            stack.append((node[0], False))
    targets = [draw(st.integers(min_value=1, max_value=b)) for b in bounds]
    return RelaxedTree(n, sp, targets)


@given(relaxed_trees())
@settings(max_examples=200, deadline=None)
def test_random_tree_roundtrip_and_agreement(tree):
    tree.validate()
    p = to_path(tree)
    p.validate()
    assert from_path(p) == tree
    assert is_c_decorated(p) == is_compacted(tree)
