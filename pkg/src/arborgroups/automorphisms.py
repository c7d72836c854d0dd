"""Automorphisms of the finite binary rooted tree, packed into integers.

Nodes of the depth-n tree are words over the alphabet {a, b} of length at
most n; the root is the empty word.  An automorphism is determined by one
parity bit per node of levels 0..n-1: parity 1 means the two subtrees
hanging off that node are exchanged.  Bits are stored in heap order,

    idx("") = 0,    idx(w + "a") = 2*idx(w) + 1,    idx(w + "b") = 2*idx(w) + 2,

so a depth-n element is an integer with 2^n - 1 significant bits and the
group has exactly 2^(2^n - 1) elements.

The action on a word is letter by letter: the k-th output letter is the
k-th input letter flipped by the parity at the *input* prefix of length
k-1, appended after the image of that prefix.  Composition therefore obeys

    Par(sigma o tau, x) = Par(sigma, tau(x)) XOR Par(tau, x).

The wire format is "ATn:<depth>:<hex>" with bit j of byte k holding node
index 8k + j (little-endian bytes, lowercase hex, zero pad bits).
"""

from __future__ import annotations

import itertools
import random

ALPHABET = "ab"


def node_count(depth: int) -> int:
    """Number of parity-carrying nodes of a depth-n tree: 2^n - 1."""
    return (1 << depth) - 1


def word_index(word: str) -> int:
    """Heap index of a node word."""
    i = 0
    for ch in word:
        if ch == "a":
            i = 2 * i + 1
        elif ch == "b":
            i = 2 * i + 2
        else:
            raise ValueError(f"bad letter {ch!r} in tree word")
    return i


def index_word(i: int) -> str:
    """Inverse of word_index."""
    letters = []
    while i > 0:
        if i & 1:
            letters.append("a")
            i = (i - 1) // 2
        else:
            letters.append("b")
            i = (i - 2) // 2
    return "".join(reversed(letters))


def level_words(level: int):
    """All words of a given length, in lexicographic (a < b) order."""
    return ("".join(t) for t in itertools.product(ALPHABET, repeat=level))


def level_of_index(i: int) -> int:
    return (i + 1).bit_length() - 1


class TreeAutomorphism:
    """Immutable automorphism of the depth-n binary rooted tree."""

    __slots__ = ("depth", "bits")

    def __init__(self, depth: int, bits: int):
        if depth < 1:
            raise ValueError("depth must be a positive integer")
        if not 0 <= bits < (1 << node_count(depth)):
            raise ValueError("parity vector out of range for depth")
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("TreeAutomorphism is immutable")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def identity(cls, depth: int) -> "TreeAutomorphism":
        return cls(depth, 0)

    @classmethod
    def root_swap(cls, depth: int) -> "TreeAutomorphism":
        """The element exchanging the two maximal subtrees (parity at the root)."""
        return cls(depth, 1)

    @classmethod
    def from_support(cls, depth: int, words) -> "TreeAutomorphism":
        """Element whose parity is 1 exactly on the given node words."""
        bits = 0
        for w in words:
            if len(w) >= depth:
                raise ValueError(f"support word {w!r} at level {len(w)} needs depth > {len(w)}")
            bits |= 1 << word_index(w)
        return cls(depth, bits)

    @classmethod
    def random(cls, depth: int, rng: random.Random) -> "TreeAutomorphism":
        return cls(depth, rng.getrandbits(node_count(depth)))

    # ------------------------------------------------------------------
    # basic queries

    def par(self, word: str) -> int:
        """Parity bit at a node (word of length < depth)."""
        if len(word) >= self.depth:
            raise ValueError("no parity stored at or beyond the leaf level")
        return (self.bits >> word_index(word)) & 1

    def support(self) -> list:
        """Sorted list of node words carrying parity 1."""
        words = [index_word(i) for i in range(node_count(self.depth)) if (self.bits >> i) & 1]
        return sorted(words, key=lambda w: (len(w), w))

    def apply(self, word: str) -> str:
        """Image of a word (length <= depth) under the automorphism."""
        if len(word) > self.depth:
            raise ValueError("word longer than tree depth")
        out = []
        prefix_idx = 0
        for ch in word:
            p = (self.bits >> prefix_idx) & 1
            flipped = ch if p == 0 else ("b" if ch == "a" else "a")
            out.append(flipped)
            prefix_idx = 2 * prefix_idx + (1 if ch == "a" else 2)
        return "".join(out)

    def node_image_table(self) -> list:
        """img[i] = heap index of the image of node i, for all 2^n - 1 nodes.

        Built level by level from the recurrence
        img[child(i, t)] = child(img[i], t XOR Par(i)).
        """
        n = node_count(self.depth)
        img = [0] * n
        half = 1 << (self.depth - 1)
        for i in range(half - 1):
            p = (self.bits >> i) & 1
            j = img[i]
            img[2 * i + 1] = 2 * j + 1 + p
            img[2 * i + 2] = 2 * j + 2 - p
        return img

    # ------------------------------------------------------------------
    # group structure

    def __mul__(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        """Composition self o other (other acts first)."""
        if not isinstance(other, TreeAutomorphism):
            return NotImplemented
        if self.depth != other.depth:
            raise ValueError("cannot compose automorphisms of different depths")
        timg = other.node_image_table()
        bits = 0
        sbits, obits = self.bits, other.bits
        for i in range(node_count(self.depth)):
            bits |= (((sbits >> timg[i]) ^ (obits >> i)) & 1) << i
        return TreeAutomorphism(self.depth, bits)

    def inverse(self) -> "TreeAutomorphism":
        img = self.node_image_table()
        bits = 0
        for i in range(node_count(self.depth)):
            bits |= ((self.bits >> i) & 1) << img[i]
        return TreeAutomorphism(self.depth, bits)

    def order(self, cap: int = 1 << 20) -> int:
        """Multiplicative order (the group is a finite 2-group)."""
        k = 1
        acc = self
        e = TreeAutomorphism.identity(self.depth)
        while acc != e:
            acc = acc * self
            k += 1
            if k > cap:
                raise RuntimeError("order cap exceeded")
        return k

    def restrict(self, depth: int) -> "TreeAutomorphism":
        """Truncate to a shallower tree (levels occupy contiguous bit ranges)."""
        if not 1 <= depth <= self.depth:
            raise ValueError("restriction depth must be in 1..depth")
        return TreeAutomorphism(depth, self.bits & ((1 << node_count(depth)) - 1))

    # ------------------------------------------------------------------
    # serialization

    def encode(self) -> str:
        nbits = node_count(self.depth)
        nbytes = (nbits + 7) // 8
        return f"ATn:{self.depth}:{self.bits.to_bytes(nbytes, 'little').hex()}"

    @classmethod
    def decode(cls, text: str) -> "TreeAutomorphism":
        parts = text.split(":")
        if len(parts) != 3 or parts[0] != "ATn":
            raise ValueError(f"malformed header in {text!r}")
        try:
            depth = int(parts[1])
        except ValueError:
            raise ValueError(f"bad depth field in {text!r}") from None
        if depth < 1:
            raise ValueError("depth must be positive")
        nbits = node_count(depth)
        nbytes = (nbits + 7) // 8
        if len(parts[2]) != 2 * nbytes:
            raise ValueError(f"expected {2 * nbytes} hex digits for depth {depth}")
        try:
            raw = bytes.fromhex(parts[2])
        except ValueError:
            raise ValueError(f"non-hex characters in {text!r}") from None
        bits = int.from_bytes(raw, "little")
        if bits >> nbits:
            raise ValueError("nonzero padding bits")
        return cls(depth, bits)

    # ------------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, TreeAutomorphism)
            and self.depth == other.depth
            and self.bits == other.bits
        )

    def __hash__(self):
        return hash((self.depth, self.bits))

    def __repr__(self):
        return f"TreeAutomorphism(depth={self.depth}, support={self.support()})"


def graft(left: TreeAutomorphism, right: TreeAutomorphism) -> TreeAutomorphism:
    """The depth-(n+1) element acting by `left` below a and `right` below b.

    This is the wreath-product pair (left, right) with trivial root parity.
    """
    if left.depth != right.depth:
        raise ValueError("graft parts must have equal depth")
    depth = left.depth + 1
    bits = 0
    for part, first in ((left, "a"), (right, "b")):
        for i in range(node_count(part.depth)):
            if (part.bits >> i) & 1:
                bits |= 1 << word_index(first + index_word(i))
    return TreeAutomorphism(depth, bits)
