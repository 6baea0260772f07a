"""Exception taxonomy shared by all treedag modules.

The CLI maps these onto process exit codes: validation/range/domain
problems are usage errors (exit 2), capacity and precision problems get
exit 3, and a failed certificate or bound violation exits 1 without
raising at all.
"""


class TreedagError(Exception):
    """Base class for all library-raised errors."""


class CapacityError(TreedagError):
    """A size cap would be exceeded (memory or combinatorial explosion guard)."""


class PrecisionError(TreedagError):
    """Requested numeric work cannot be concluded at the given precision."""


class ValidationError(TreedagError, ValueError):
    """A structural invariant of an input object is violated."""


class RangeError(TreedagError, ValueError):
    """An index or parameter lies outside its documented range."""


class DomainError(TreedagError, ValueError):
    """Arguments outside an operation's mathematical domain."""
