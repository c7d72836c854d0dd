"""Compiled enumeration kernels.

Automorphisms of the depth-n tree are packed integers with one parity bit
per node in heap order (nbits = 2^n - 1 <= 31 here), so a visited set can be
a flat bitmap and group multiplication is a short bit loop.
"""

import numpy as np
from numba import njit

U1 = np.uint64(1)
M1 = np.uint64(0x5555555555555555)
M2 = np.uint64(0x3333333333333333)
M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
H01 = np.uint64(0x0101010101010101)


@njit(cache=True)
def _popcount(v):
    v = v - ((v >> U1) & M1)
    v = (v & M2) + ((v >> np.uint64(2)) & M2)
    v = (v + (v >> np.uint64(4))) & M4
    return (v * H01) >> np.uint64(56)


@njit(cache=True)
def closure_count(gens, nbits, budget):
    """Order of the subgroup generated by ``gens`` inside Aut(T_n).

    gens: uint64 array of packed parity vectors; nbits = 2^n - 1 <= 31.
    Breadth-first left multiplication from the identity over a bitmap
    visited set.  Returns (count, exhausted); when exhausted, count == budget
    is only a lower bound.
    """
    visited = np.zeros(((1 << nbits) + 7) >> 3, dtype=np.uint8)
    queue = np.empty(budget, dtype=np.uint32)
    visited[0] = 1
    queue[0] = 0
    head = 0
    tail = 1
    img = np.empty(nbits, dtype=np.uint32)
    n_inner = (nbits - 1) >> 1
    while head < tail:
        cur = np.uint64(queue[head])
        head += 1
        img[0] = 0
        for i in range(n_inner):
            j = 2 * img[i]
            p = np.uint32((cur >> np.uint64(i)) & U1)
            img[2 * i + 1] = j + 1 + p
            img[2 * i + 2] = j + 2 - p
        for k in range(gens.shape[0]):
            g = gens[k]
            new = np.uint64(0)
            for i in range(nbits):
                bit = ((g >> np.uint64(img[i])) ^ (cur >> np.uint64(i))) & U1
                new |= bit << np.uint64(i)
            byte = new >> np.uint64(3)
            mask = np.uint8(1 << (new & np.uint64(7)))
            if not (visited[byte] & mask):
                if tail >= budget:
                    return tail, True
                visited[byte] |= mask
                queue[tail] = np.uint32(new)
                tail += 1
    return tail, False


@njit(cache=True)
def count_matching(nbits, p_masks, p_mode, r_lin, r_qa, r_qb, r_mode, start, stop):
    """Count packed vectors v in [start, stop) satisfying a mask predicate.

    Mode codes: 0 = unconstrained, 1 = every value zero, 2 = all values equal.
    Each p mask contributes parity(v & mask); each quadratic triple
    contributes parity(v & lin) ^ (parity(v & qa) & parity(v & qb)).
    """
    count = 0
    np_ = p_masks.shape[0]
    nr = r_lin.shape[0]
    for x in range(start, stop):
        v = np.uint64(x)
        ok = True
        first = -1
        if p_mode != 0:
            for k in range(np_):
                val = np.int64(_popcount(v & p_masks[k]) & U1)
                if p_mode == 1:
                    if val != 0:
                        ok = False
                        break
                else:
                    if first < 0:
                        first = val
                    elif val != first:
                        ok = False
                        break
        if ok and r_mode != 0:
            first = -1
            for k in range(nr):
                val = np.int64(_popcount(v & r_lin[k]) & U1)
                val ^= np.int64(
                    (_popcount(v & r_qa[k]) & U1) & (_popcount(v & r_qb[k]) & U1)
                )
                if r_mode == 1:
                    if val != 0:
                        ok = False
                        break
                else:
                    if first < 0:
                        first = val
                    elif val != first:
                        ok = False
                        break
        if ok:
            count += 1
    return count
