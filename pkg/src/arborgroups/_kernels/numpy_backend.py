"""Vectorized enumeration kernels (no compilation step).

Same contracts as numba_backend, implemented with chunked numpy array
passes: the closure BFS builds node-image tables for a whole frontier chunk
at once, and the predicate counter filters a chunk of packed vectors one
mask at a time.
"""

import numpy as np

_CHUNK = 1 << 16  # frontier slice for the BFS image-table matrix
_COUNT_CHUNK = 1 << 22


def _image_tables(cur, nbits):
    """Node-image tables img[e, i] for each packed element cur[e]."""
    img = np.empty((cur.shape[0], nbits), dtype=np.uint64)
    img[:, 0] = 0
    for i in range((nbits - 1) >> 1):
        p = (cur >> np.uint64(i)) & np.uint64(1)
        base = 2 * img[:, i]
        img[:, 2 * i + 1] = base + 1 + p
        img[:, 2 * i + 2] = base + 2 - p
    return img


def closure_count(gens, nbits, budget):
    """Order of the subgroup generated by ``gens`` (see numba_backend)."""
    gens = np.asarray(gens, dtype=np.uint64)
    visited = np.zeros(((1 << nbits) + 7) >> 3, dtype=np.uint8)
    visited[0] = 1
    count = 1
    frontier = np.zeros(1, dtype=np.uint64)
    while frontier.size:
        produced = []
        for lo in range(0, frontier.size, _CHUNK):
            cur = frontier[lo : lo + _CHUNK]
            img = _image_tables(cur, nbits)
            for g in gens:
                new = np.zeros(cur.shape[0], dtype=np.uint64)
                for i in range(nbits):
                    bit = ((g >> img[:, i]) ^ (cur >> np.uint64(i))) & np.uint64(1)
                    new |= bit << np.uint64(i)
                produced.append(new)
        cand = np.unique(np.concatenate(produced))
        byte = (cand >> np.uint64(3)).astype(np.int64)
        bit = np.uint8(1) << (cand & np.uint64(7)).astype(np.uint8)
        fresh = cand[(visited[byte] & bit) == 0]
        if fresh.size:
            if count + fresh.size > budget:
                return budget, True
            byte = (fresh >> np.uint64(3)).astype(np.int64)
            bit = np.uint8(1) << (fresh & np.uint64(7)).astype(np.uint8)
            np.bitwise_or.at(visited, byte, bit)
            count += fresh.size
        frontier = fresh
    return count, False


def _parity(v, mask):
    return (np.bitwise_count(v & mask) & np.uint64(1)).astype(np.uint8)


def count_matching(nbits, p_masks, p_mode, r_lin, r_qa, r_qb, r_mode, start, stop):
    """Count packed vectors in [start, stop) matching the mask predicate."""
    count = 0
    for lo in range(start, stop, _COUNT_CHUNK):
        v = np.arange(lo, min(lo + _COUNT_CHUNK, stop), dtype=np.uint64)
        if p_mode == 1:
            for m in p_masks:
                v = v[_parity(v, m) == 0]
                if not v.size:
                    break
        elif p_mode == 2 and len(p_masks):
            ref = _parity(v, p_masks[0])
            for m in p_masks[1:]:
                keep = _parity(v, m) == ref
                v, ref = v[keep], ref[keep]
        if v.size and r_mode != 0:
            ref = None
            for lin, qa, qb in zip(r_lin, r_qa, r_qb):
                val = _parity(v, lin) ^ (_parity(v, qa) & _parity(v, qb))
                if r_mode == 1:
                    v = v[val == 0]
                else:
                    if ref is None:
                        ref = val
                        continue
                    keep = val == ref
                    v, ref = v[keep], ref[keep]
                if not v.size:
                    break
        count += v.size
    return count
