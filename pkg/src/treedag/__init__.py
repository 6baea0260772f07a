"""Exact enumeration, uniform sampling, and certified asymptotics for
relaxed and compacted binary trees.

The package is organized in three layers:

* exact integer/rational combinatorics — counting triangles
  (:mod:`~treedag.exact_count`), the tree/path bijection
  (:mod:`~treedag.trees`), uniform samplers (:mod:`~treedag.sampling`),
  rational lemma sweeps (:mod:`~treedag.exact_checks`), and minimal-DFA
  bounds (:mod:`~treedag.automata`);
* rigorous numerics — outward-rounded interval arithmetic
  (:mod:`~treedag.intervals`), interval Airy-function enclosures
  (:mod:`~treedag.airy`), and grid certification of the four bound
  inequalities (:mod:`~treedag.bounds`);
* numeric estimation — stretched-exponential constant extrapolation
  (:mod:`~treedag.extrapolate`) and its convergence figures
  (:mod:`~treedag.figures`).

The :mod:`~treedag.cli` module exposes all of it as the ``treedag``
command.
"""

from .airy import (
    airy_ai,
    airy_ai_prime,
    airy_pair,
    airy_root_a1,
    phi,
    psi,
    psi_root_x0,
)
from .automata import (
    Dfa,
    brute_count_minimal,
    dfa_bounds,
    language_of,
    tree_to_dfa,
)
from .bounds import (
    BoundCertificate,
    BoundFamilyParams,
    FAMILY_IDS,
    bound_profile,
    check_inequality,
    family_params,
)
from .errors import (
    CapacityError,
    DomainError,
    PrecisionError,
    RangeError,
    TreedagError,
    ValidationError,
)
from .exact_checks import EXACT_CHECKS, CheckReport
from .exact_count import (
    COMPACTED_PREFIX,
    RELAXED_PREFIX,
    CountTable,
    compacted_table,
    relaxed_table,
)
from .extrapolate import (
    ExtrapolationEstimate,
    convergence_csv,
    extrapolate_gamma,
    ratio_diagnostics,
    u_sequence,
)
from .figures import emit_figure
from .intervals import Interval, IntervalContext
from .sampling import (
    SamplerContext,
    rank_relaxed,
    sample_compacted,
    sample_relaxed,
    unrank_relaxed,
)
from .trees import (
    DecoratedPath,
    RelaxedTree,
    enumerate_relaxed,
    from_path,
    is_compacted,
    to_path,
)

__version__ = "0.1.0"

__all__ = [
    "COMPACTED_PREFIX",
    "EXACT_CHECKS",
    "FAMILY_IDS",
    "RELAXED_PREFIX",
    "BoundCertificate",
    "BoundFamilyParams",
    "CapacityError",
    "CheckReport",
    "CountTable",
    "DecoratedPath",
    "Dfa",
    "DomainError",
    "ExtrapolationEstimate",
    "Interval",
    "IntervalContext",
    "PrecisionError",
    "RangeError",
    "RelaxedTree",
    "SamplerContext",
    "TreedagError",
    "ValidationError",
    "airy_ai",
    "airy_ai_prime",
    "airy_pair",
    "airy_root_a1",
    "bound_profile",
    "brute_count_minimal",
    "check_inequality",
    "compacted_table",
    "convergence_csv",
    "dfa_bounds",
    "emit_figure",
    "enumerate_relaxed",
    "extrapolate_gamma",
    "family_params",
    "from_path",
    "is_compacted",
    "language_of",
    "phi",
    "psi",
    "psi_root_x0",
    "rank_relaxed",
    "ratio_diagnostics",
    "relaxed_table",
    "sample_compacted",
    "sample_relaxed",
    "to_path",
    "tree_to_dfa",
    "u_sequence",
    "unrank_relaxed",
]
