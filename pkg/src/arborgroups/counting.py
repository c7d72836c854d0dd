"""Exhaustive predicate counts over Aut(T_n) and level-kernel counts.

Two independent counting routes back the order formula:

* ``count_predicate`` enumerates every packed parity vector at depth n
  (2^(2^n - 1) of them, so n <= 5) and counts those satisfying a membership
  predicate, optionally sharded by the top 8 bits across worker processes.
* ``kernel_count`` counts the elements supported on level n-1 alone that
  satisfy the relevant even-sum conditions — the kernel of restriction to
  depth n-1 inside the predicate group.  It enumerates level patterns
  directly and, independently, multiplies per-node block counts (the
  conditions touch disjoint sets of leaf bits grouped under one anchor).

Together with the closure BFS these give the three-way agreement that
``verify_order_table`` reports row by row.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .automorphisms import level_words, node_count, word_index
from .functionals import Portrait, predicate_spec, variant_modes
from .generators import DEFAULT_BUDGET, closure, pink_generators, pink_log2_order

_MODE_CODE = {None: 0, "zero": 1, "equal": 2}


@dataclass
class CountReport:
    portrait: Portrait
    n: int
    variant: str
    count: int
    log2: int | None
    elapsed: float
    method: str


def _mask_arrays(spec):
    p = np.array(spec.p_masks, dtype=np.uint64) if spec.p_masks else np.empty(0, np.uint64)
    if spec.r_masks:
        rl = np.array([m[0] for m in spec.r_masks], dtype=np.uint64)
        rqa = np.array([m[1] for m in spec.r_masks], dtype=np.uint64)
        rqb = np.array([m[2] for m in spec.r_masks], dtype=np.uint64)
    else:
        rl = rqa = rqb = np.empty(0, np.uint64)
    return p, rl, rqa, rqb


def _count_shard(args):
    nbits, p, pm, rl, rqa, rqb, rm, start, stop = args
    return int(_kernels.count_matching(nbits, p, pm, rl, rqa, rqb, rm, start, stop))


def count_predicate(
    n: int, variant: str, portrait: Portrait, workers: int = 1
) -> CountReport:
    """Exact number of depth-n automorphisms in the variant's group."""
    if n > 5:
        raise ValueError("exhaustive counting enumerates 2^(2^n - 1) vectors; n <= 5")
    spec = predicate_spec(portrait, n, variant)
    nbits = node_count(n)
    p, rl, rqa, rqb = _mask_arrays(spec)
    pm = _MODE_CODE[spec.p_mode]
    rm = _MODE_CODE[spec.r_mode]
    total = 1 << nbits
    t0 = time.perf_counter()
    if workers <= 1 or nbits <= 8:
        count = int(_kernels.count_matching(nbits, p, pm, rl, rqa, rqb, rm, 0, total))
        method = "exhaustive"
    else:
        shard = total >> 8
        jobs = [
            (nbits, p, pm, rl, rqa, rqb, rm, k * shard, (k + 1) * shard)
            for k in range(256)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            count = sum(pool.map(_count_shard, jobs))
        method = "sharded"
    elapsed = time.perf_counter() - t0
    log2 = count.bit_length() - 1 if count and count & (count - 1) == 0 else None
    return CountReport(
        portrait=portrait,
        n=n,
        variant=variant,
        count=count,
        log2=log2,
        elapsed=elapsed,
        method=method,
    )


# ----------------------------------------------------------------------
# level kernels


def kernel_kind(portrait: Portrait, n: int) -> str:
    """Which kernel the depth recursion uses at this step."""
    case = portrait.case
    if case == "chebyshev":
        raise ValueError("no kernel machinery for the (2,1) portrait")
    if case == "special":
        return "St" if n >= 5 else "S"
    if case == "shorttail":
        return "St"
    return "S"


def kernel_log2_formula(portrait: Portrait, n: int, kind: str) -> int:
    """Closed-form log2 kernel size (empty anchor windows drop their terms)."""
    r = portrait.r
    base = 1 << (n - 1)
    if n <= r:
        return base
    if kind == "S":
        return base - (1 << (n - r))
    if kind != "St":
        raise ValueError(f"unknown kernel kind {kind!r}")
    if portrait.case == "special":
        extra = (1 << (n - 5)) if n >= 5 else 0
        return base - (1 << (n - 3)) - extra
    if portrait.case == "shorttail":
        return base - 3 * (1 << (n - r - 1))
    raise ValueError("the refined kernel exists only for s = 1 and (3,2)")


def _kernel_masks(portrait: Portrait, n: int, kind: str, root: str = ""):
    """Even-sum constraint masks over level-(n-1) bits, anchored under ``root``.

    Bit positions are relative to the first level-(n-1) descendant of root.
    """
    r = portrait.r
    if kind == "St" and portrait.case == "longtail":
        raise ValueError("the refined kernel exists only for s = 1 and (3,2)")
    offset = word_index(root + "a" * (n - 1 - len(root)))
    masks = []
    if n <= r:
        return masks

    def level_mask(words):
        m = 0
        for w in words:
            m |= 1 << (word_index(w) - offset)
        return m

    for x in level_words(n - r - 1 - len(root)):
        x = root + x
        masks.append(level_mask(x + "a" + w for w in level_words(r - 1)))
        masks.append(level_mask(x + "b" + w for w in level_words(r - 1)))
        if kind == "St" and portrait.case == "shorttail":
            masks.append(
                level_mask(
                    x + wt + w
                    for wt in ("ab", "bb")
                    for w in level_words(r - 2)
                )
            )
    if kind == "St" and portrait.case == "special" and n >= 5:
        for y in level_words(n - 5 - len(root)):
            y = root + y
            masks.append(
                level_mask(
                    y + w + "a" + t for w in level_words(2) for t in "ab"
                )
            )
    return masks


@dataclass
class KernelReport:
    portrait: Portrait
    n: int
    kind: str
    count_direct: int
    count_blocks: int
    log2: int | None
    formula_log2: int
    agree: bool
    elapsed: float
    masks: list

    def matches(self, pattern: int) -> bool:
        """Test one level-(n-1) bit pattern against the kernel conditions."""
        return all((pattern & m).bit_count() % 2 == 0 for m in self.masks)


def _count_patterns(width: int, masks) -> int:
    count = 0
    for pattern in range(1 << width):
        if all((pattern & m).bit_count() % 2 == 0 for m in masks):
            count += 1
    return count


def kernel_count(portrait: Portrait, n: int, kind: str | None = None) -> KernelReport:
    """Count level-(n-1)-supported elements satisfying the kernel conditions."""
    if n > 5:
        raise ValueError("direct kernel enumeration covers n <= 5")
    if kind is None:
        kind = kernel_kind(portrait, n)
    t0 = time.perf_counter()
    width = 1 << (n - 1)
    masks = _kernel_masks(portrait, n, kind)
    direct = _count_patterns(width, masks)

    # independent route: blocks of leaf bits under one anchor are disjoint
    if not masks:
        blocks = 1 << width
    else:
        if kind == "St" and portrait.case == "special" and n >= 5:
            block_level = n - 5
        else:
            block_level = n - portrait.r - 1
        block_root = "a" * block_level
        block_width = 1 << (n - 1 - block_level)
        per_block = _count_patterns(
            block_width, _kernel_masks(portrait, n, kind, root=block_root)
        )
        blocks = per_block ** (1 << block_level)
    elapsed = time.perf_counter() - t0
    log2 = direct.bit_length() - 1 if direct and direct & (direct - 1) == 0 else None
    return KernelReport(
        portrait=portrait,
        n=n,
        kind=kind,
        count_direct=direct,
        count_blocks=blocks,
        log2=log2,
        formula_log2=kernel_log2_formula(portrait, n, kind),
        agree=direct == blocks and log2 == kernel_log2_formula(portrait, n, kind),
        elapsed=elapsed,
        masks=masks,
    )


# ----------------------------------------------------------------------
# the combined order table


def verify_order_table(
    portrait: Portrait,
    n_max: int,
    budget: int = DEFAULT_BUDGET,
    predicate_max_bits: int = 15,
    workers: int = 1,
) -> list:
    """Compare formula vs. closure vs. predicate count vs. kernel recursion.

    Infeasible cells (order above budget, vector count above
    2^predicate_max_bits) are left as None and do not fail the row.
    """
    rows = []
    for n in range(1, n_max + 1):
        formula = pink_log2_order(portrait, n)
        log2_closure = None
        if n <= 5 and (1 << formula) <= budget:
            rep = closure(pink_generators(portrait, n), budget=budget)
            if not rep.exhausted:
                log2_closure = rep.log2
        log2_predicate = None
        if node_count(n) <= predicate_max_bits:
            log2_predicate = count_predicate(n, "tBp", portrait, workers=workers).log2
        kernel_log2 = recursion_ok = None
        if n >= 2:
            kind = kernel_kind(portrait, n)
            kernel_log2 = kernel_log2_formula(portrait, n, kind)
            if n <= 5:
                krep = kernel_count(portrait, n, kind)
                if not krep.agree:
                    kernel_log2 = None
            recursion_ok = (
                kernel_log2 is not None
                and pink_log2_order(portrait, n - 1) + kernel_log2 == formula
            )
        agree = all(
            v == formula for v in (log2_closure, log2_predicate) if v is not None
        ) and (n < 2 or recursion_ok)
        rows.append(
            {
                "n": n,
                "r": portrait.r,
                "s": portrait.s,
                "log2_formula": formula,
                "log2_closure": log2_closure,
                "log2_predicate": log2_predicate,
                "kernel_log2": kernel_log2,
                "recursion_ok": recursion_ok,
                "agree": agree,
            }
        )
    return rows
