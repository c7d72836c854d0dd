"""Exact computation in automorphism groups of binary rooted trees.

The package has two halves that meet in the middle:

* group-theory side — packed tree automorphisms, mod-2 parity functionals
  and their kernel/constancy subgroups, explicit topological generator
  families, and counting engines (closure BFS, exhaustive predicate counts,
  level-kernel enumeration) that cross-check a closed-form order formula;

* dynamics side — exact arithmetic in F_{p^(2^d)}, preimage trees of
  z^2 + c over finite fields with canonically normalized labelings, and a
  Frobenius probe that maps quadratic-character data onto the parity
  functionals of the extracted tree automorphism.
"""

__version__ = "0.1.0"

from .automorphisms import TreeAutomorphism, graft, level_words, node_count, word_index
from .counting import count_predicate, kernel_count, verify_order_table
from .dynamics import (
    LabeledTree,
    find_pcf_params,
    orbit_portrait,
    preimage_tree,
)
from .fields import build_field
from .functionals import Portrait, membership, sample_member
from .generators import closure, pink_generators, pink_log2_order
from .labeling import LabelingError, label_tree, verify_identities
from .probe import (
    check_embedding,
    frobenius_automorphism,
    kummer_rank,
    level_product_character,
)

__all__ = [
    "TreeAutomorphism",
    "graft",
    "level_words",
    "node_count",
    "word_index",
    "Portrait",
    "membership",
    "sample_member",
    "closure",
    "pink_generators",
    "pink_log2_order",
    "count_predicate",
    "kernel_count",
    "verify_order_table",
    "build_field",
    "LabeledTree",
    "orbit_portrait",
    "find_pcf_params",
    "preimage_tree",
    "LabelingError",
    "label_tree",
    "verify_identities",
    "frobenius_automorphism",
    "check_embedding",
    "level_product_character",
    "kummer_rank",
    "__version__",
]
