"""Exact uniform unranking and random sampling of decorated paths and trees.

Unranking inverts the counting recurrence ``r[a][b] = r[a][b-1] +
(b+1) * r[a-1][b]`` step by step.  Reading the path backward from ``(n, n)``,
the paths ending at ``(a, b)`` split into: those whose last step is ``V``
(``r[a][b-1]`` of them, taken first), then ``b + 1`` blocks of paths whose
last step is ``H`` with decoration ``1 .. b + 1`` in ascending order, each
block of size ``r[a-1][b]``.  Walking this decomposition maps an index in
``[0, r_n)`` to a unique decorated path in ``O(n)`` big-integer operations,
and replaying it in reverse recovers the index (ranking).

Uniform sampling draws a uniform big integer below ``r_n`` (by rejection from
fixed-width random blocks, so there is no modulo bias) and unranks it.
Compacted trees are sampled by rejection — sample relaxed, accept when
compacted — because the compacted recurrence's negative term rules out the
positive weighted-choice decomposition that direct unranking needs.  The
acceptance rate ``c_n / r_n`` decays only like a fourth root of ``n``, so
the expected number of attempts stays small at any size this module reaches.
"""

from __future__ import annotations

import random
from typing import Optional, Union

from .errors import RangeError, ValidationError
from .exact_count import CountTable, FULL_TRIANGLE_CAP, relaxed_table
from .trees import DecoratedPath, RelaxedTree, from_path, is_compacted

__all__ = [
    "SamplerContext",
    "unrank_relaxed",
    "rank_relaxed",
    "sample_relaxed",
    "sample_compacted",
]


class SamplerContext:
    """Counting table plus RNG stream for exact uniform sampling.

    The table must be a full-triangle relaxed table covering ``max_n``
    (built on demand when not supplied).  The RNG is any object exposing
    ``getrandbits``; by default a :class:`random.Random` seeded with ``seed``.
    A context owns its RNG stream and must not be shared across threads
    while sampling; the underlying table is immutable and may back any
    number of concurrent contexts.
    """

    def __init__(
        self,
        max_n: int,
        *,
        seed: Optional[int] = None,
        rng=None,
        table: Optional[CountTable] = None,
        cap: int = FULL_TRIANGLE_CAP,
    ):
        if table is None:
            table = relaxed_table(max_n, mode="full-triangle", cap=cap)
        if table.kind != "relaxed":
            raise ValidationError(f"sampler needs a relaxed table, got {table.kind!r}")
        if table.mode != "full-triangle":
            raise ValidationError(
                "sampler needs a full-triangle table (rolling-row keeps only "
                "the last row, which unranking cannot walk)"
            )
        if table.max_n < max_n:
            raise ValidationError(
                f"table covers n ≤ {table.max_n}, context requires {max_n}"
            )
        self.table = table
        self.max_n = int(max_n)
        self.rng = rng if rng is not None else random.Random(seed)
        #: attempts used by the most recent sample_compacted call
        self.last_attempts: int = 0
        #: attempts accumulated over all sample_compacted calls
        self.total_attempts: int = 0

    def random_index(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` without modulo bias.

        Draws fixed-width blocks of ``bound.bit_length()`` random bits and
        rejects values ``≥ bound``; fewer than two draws are needed on
        average.
        """
        if bound <= 0:
            raise RangeError(f"empty range: bound {bound}")
        bits = bound.bit_length()
        while True:
            value = self.rng.getrandbits(bits)
            if value < bound:
                return value


def _resolve_table(n: int, ctx: Union[SamplerContext, CountTable, None]) -> CountTable:
    if ctx is None:
        return relaxed_table(n, mode="full-triangle")
    table = ctx.table if isinstance(ctx, SamplerContext) else ctx
    if table.kind != "relaxed" or table.mode != "full-triangle":
        raise ValidationError("unranking needs a full-triangle relaxed table")
    if table.max_n < n:
        raise ValidationError(f"table covers n ≤ {table.max_n}, need {n}")
    return table


def unrank_relaxed(
    n: int, index: int, ctx: Union[SamplerContext, CountTable, None] = None
) -> DecoratedPath:
    """Return the ``index``-th decorated path of size ``n``.

    Bijective from ``[0, r_n)`` onto decorated paths of length ``2n``; raises
    :class:`RangeError` outside that range.  ``ctx`` may be a
    :class:`SamplerContext`, a full-triangle relaxed :class:`CountTable`,
    or ``None`` to build a throwaway table.
    """
    if n < 0:
        raise RangeError(f"negative size {n}")
    table = _resolve_table(n, ctx)
    total = table.value(n, n)
    if not 0 <= index < total:
        raise RangeError(f"index {index} outside [0, {total}) for size {n}")
    steps_rev: list[str] = []
    decorations_rev: list[int] = []
    a = b = n
    while (a, b) != (0, 0):
        v_block = table.value(a, b - 1) if b > 0 else 0
        if index < v_block:
            steps_rev.append("V")
            b -= 1
        else:
            index -= v_block
            h_block = table.value(a - 1, b)
            decorations_rev.append(index // h_block + 1)
            index %= h_block
            steps_rev.append("H")
            a -= 1
    return DecoratedPath(reversed(steps_rev), reversed(decorations_rev))


def rank_relaxed(
    path: DecoratedPath, ctx: Union[SamplerContext, CountTable, None] = None
) -> int:
    """Return the index :func:`unrank_relaxed` maps to ``path``.

    Replays the same backward decomposition, accumulating the block offsets.
    """
    path.validate()
    if not path.is_complete:
        x, y = path.endpoint()
        raise ValidationError(f"path ends at ({x}, {y}), not on the diagonal")
    n = path.size
    table = _resolve_table(n, ctx)
    # decorations of H steps in step order
    deco = list(path.decorations)
    index = 0
    a = b = n
    for s in reversed(path.steps):
        if s == "V":
            b -= 1
        else:
            v_block = table.value(a, b - 1) if b > 0 else 0
            index += v_block + (deco.pop() - 1) * table.value(a - 1, b)
            a -= 1
    return index


def sample_relaxed(n: int, ctx: SamplerContext) -> DecoratedPath:
    """Draw a decorated path exactly uniformly among the ``r_n`` of size ``n``.

    Deterministic function of the context's RNG stream state: one uniform
    index draw followed by unranking.
    """
    if n > ctx.max_n:
        raise ValidationError(f"context covers n ≤ {ctx.max_n}, got {n}")
    index = ctx.random_index(ctx.table.value(n, n))
    return unrank_relaxed(n, index, ctx)


def sample_compacted(n: int, ctx: SamplerContext) -> RelaxedTree:
    """Draw a compacted tree uniformly, by rejection from the relaxed sampler.

    Every relaxed tree is equally likely per attempt, so conditioning on
    acceptance is exactly uniform over compacted trees.  The attempt count of
    the last call is exposed as ``ctx.last_attempts`` (and accumulated in
    ``ctx.total_attempts``).
    """
    attempts = 0
    while True:
        attempts += 1
        tree = from_path(sample_relaxed(n, ctx))
        if is_compacted(tree):
            ctx.last_attempts = attempts
            ctx.total_attempts += attempts
            return tree
