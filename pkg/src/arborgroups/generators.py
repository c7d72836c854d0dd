"""Topological generators of the tail subgroups, their closures, and orders.

The r generators at depth n have closed-form parity supports: generator i
for i <= s is supported on the single word a^(i-1); for i >= s+1 it is
supported on the words

    a^(i-s-1) (b a^(l-1))^k a^s,   k >= 0,  l := r - s,

truncated to the stored levels (length <= n-1).  The same elements arise by
grafting: alpha_1 swaps the root, alpha_{s+1} = (alpha_s, alpha_r), and
alpha_i = (alpha_{i-1}, id) otherwise; the tests rebuild the ladder that way
and compare.

``closure`` computes the exact order of the generated subgroup by
breadth-first left multiplication over canonical packed encodings, delegated
to the selected kernel backend for depth <= 5 (bitmap visited set) and run
over a Python set at depth >= 6 (hash visited set, budget-capped).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .automorphisms import TreeAutomorphism, node_count, word_index
from .functionals import Portrait

DEFAULT_BUDGET = 1 << 25


def _check_portrait(portrait: Portrait):
    if portrait.case == "chebyshev":
        raise ValueError(
            "the (2,1) portrait is covered by the order formula only; "
            "its generators are not built"
        )


def support_words(i: int, portrait: Portrait, depth: int):
    """Support of generator i at depth ``depth``, in increasing length."""
    _check_portrait(portrait)
    r, s = portrait
    if not 1 <= i <= r:
        raise ValueError(f"generator index {i} outside 1..{r}")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if i <= s:
        word = "a" * (i - 1)
        return [word] if len(word) <= depth - 1 else []
    tail = "b" + "a" * (r - s - 1)
    words = []
    word = "a" * (i - s - 1) + "a" * s
    while len(word) <= depth - 1:
        words.append(word)
        word = "a" * (i - s - 1) + tail * (len(words)) + "a" * s
    return words


def pink_generator(i: int, portrait: Portrait, depth: int) -> TreeAutomorphism:
    bits = 0
    for w in support_words(i, portrait, depth):
        bits |= 1 << word_index(w)
    return TreeAutomorphism(depth, bits)


@dataclass(frozen=True)
class GeneratorSet:
    portrait: Portrait
    depth: int
    generators: list

    def __iter__(self):
        return iter(self.generators)


def pink_generators(portrait: Portrait, depth: int) -> GeneratorSet:
    _check_portrait(portrait)
    gens = [pink_generator(i, portrait, depth) for i in range(1, portrait.r + 1)]
    return GeneratorSet(portrait=portrait, depth=depth, generators=gens)


def pink_log2_order(portrait: Portrait, n: int) -> int:
    """log2 of the order of the generated subgroup at depth n (closed form)."""
    r, s = portrait
    if n < 1:
        raise ValueError("depth must be >= 1")
    if n <= r:
        return (1 << n) - 1
    if s == 1 and r == 2:
        return n + 1
    if s == 1 and r >= 3:
        return (1 << n) - 3 * (1 << (n - r)) + 2
    if (r, s) == (3, 2):
        return (1 << n) - 5 * (1 << (n - 4)) + 2
    return (1 << n) - (1 << (n - r + 1)) + 1


@dataclass
class ClosureReport:
    order: int | None
    log2: int | None
    exhausted: bool
    lower_bound: int
    elapsed: float
    method: str
    backend: str = field(default=_kernels.BACKEND_NAME)


def _closure_pyset(gens, budget):
    seen = {0}
    frontier = [0]
    packed = [g.bits for g in gens]
    depth = gens[0].depth
    nbits = node_count(depth)
    n_inner = (nbits - 1) >> 1
    while frontier:
        nxt = []
        for cur in frontier:
            img = [0] * nbits
            for i in range(n_inner):
                j = 2 * img[i]
                p = (cur >> i) & 1
                img[2 * i + 1] = j + 1 + p
                img[2 * i + 2] = j + 2 - p
            for g in packed:
                new = cur
                for i in range(nbits):
                    new ^= ((g >> img[i]) & 1) << i
                if new not in seen:
                    if len(seen) >= budget:
                        return len(seen), True
                    seen.add(new)
                    nxt.append(new)
        frontier = nxt
    return len(seen), False


def closure(gens: GeneratorSet, budget: int = DEFAULT_BUDGET) -> ClosureReport:
    """Exact order of the subgroup generated by ``gens``, within ``budget``."""
    generators = list(gens.generators)
    if not generators:
        raise ValueError("need at least one generator")
    depth = generators[0].depth
    if budget < 1:
        raise ValueError("budget must be >= 1")
    t0 = time.perf_counter()
    if depth <= 5:
        packed = np.array([g.bits for g in generators], dtype=np.uint64)
        count, exhausted = _kernels.closure_count(packed, node_count(depth), budget)
        count = int(count)
        method = f"bitmap-bfs/{_kernels.BACKEND_NAME}"
    else:
        count, exhausted = _closure_pyset(generators, budget)
        method = "hashset-bfs/python"
    elapsed = time.perf_counter() - t0
    if exhausted:
        return ClosureReport(
            order=None,
            log2=None,
            exhausted=True,
            lower_bound=count,
            elapsed=elapsed,
            method=method,
        )
    log2 = count.bit_length() - 1 if count & (count - 1) == 0 else None
    return ClosureReport(
        order=count,
        log2=log2,
        exhausted=False,
        lower_bound=count,
        elapsed=elapsed,
        method=method,
    )
