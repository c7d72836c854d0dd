"""Critical orbits of z^2 + c over F_p and exact preimage trees.

The map f(z) = z^2 + c sends the critical point 0 along a rho-shaped
orbit: a tail of length s+1 followed by a cycle of length r-s, which is
equivalent to f^r(0) = -f^s(0) for minimal r > s.  Strictly preperiodic
parameters (s >= 1, and excluding the Chebyshev shape (r, s) = (2, 1))
are the ones the rest of this package studies; they are exactly the roots
of the integer polynomial F_{r,s}(x) = f_x^r(0) + f_x^s(0).

Given such a parameter and a base point x0 that is neither postcritical
nor periodic, the iterated preimages f^{-n}(x0) form a complete binary
tree of exact field elements: each node value has two distinct square
roots of (value - c) as children, and the lex-smaller root receives the
label `a`.  All downstream labeling algorithms start from this canonical
assignment.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .automorphisms import level_words
from .fields import FieldCtx, _is_prime
from .functionals import Portrait

__all__ = [
    "BasePointError",
    "LabeledTree",
    "OrbitPortrait",
    "PortraitError",
    "find_pcf_params",
    "misiurewicz_mod2_matches",
    "misiurewicz_poly",
    "mod2_iterate_check",
    "orbit_portrait",
    "preimage_tree",
]


class PortraitError(ValueError):
    """The parameter c does not have the required critical-orbit shape."""


class BasePointError(ValueError):
    """The base point x0 is postcritical or periodic."""


@dataclass(frozen=True)
class OrbitPortrait:
    """Shape of the critical orbit of z^2 + c over F_p.

    Attributes
    ----------
    p, c : int
        Prime modulus and parameter.
    r, s : int
        Minimal exponents with f^r(0) = -f^s(0), r > s >= 1.
    orbit : tuple of int
        The strict forward orbit f(0), f^2(0), ..., f^r(0).
    distinct : bool
        Whether those r values are pairwise distinct (always true for a
        first-repetition derivation; recorded for report completeness).
    """

    p: int
    c: int
    r: int
    s: int
    orbit: tuple
    distinct: bool

    @property
    def tail(self):
        return self.s + 1

    @property
    def cycle(self):
        return self.r - self.s

    @property
    def portrait(self):
        return Portrait(self.r, self.s)


def orbit_portrait(p, c):
    """Classify the critical orbit of z^2 + c over F_p.

    Returns
    -------
    OrbitPortrait or None
        None when the critical point is periodic (s = 0) or the shape is
        the excluded Chebyshev one (r, s) = (2, 1).
    """
    if not _is_prime(p) or p == 2:
        raise ValueError(f"p must be an odd prime, got {p}")
    c %= p
    values = [0]
    index = {0: 0}
    while True:
        nxt = (values[-1] ** 2 + c) % p
        if nxt in index:
            first = index[nxt]
            break
        index[nxt] = len(values)
        values.append(nxt)
    r, s = len(values) - 1, first - 1
    if s < 1 or (r, s) == (2, 1):
        return None
    orbit = tuple(values[1:])
    assert (values[r] + values[s]) % p == 0
    return OrbitPortrait(p, c, r, s, orbit, len(set(orbit)) == len(orbit))


# ---------------------------------------------------------------------------
# Misiurewicz polynomials over Z


def _critical_iterates(n):
    # f_x^i(0) for i = 1..n as little-endian integer coefficient lists
    out = []
    cur = [0]
    for _ in range(n):
        sq = [0] * (2 * len(cur) - 1)
        for i, a in enumerate(cur):
            if a:
                for j, b in enumerate(cur):
                    sq[i + j] += a * b
        if len(sq) < 2:
            sq += [0] * (2 - len(sq))
        sq[1] += 1
        cur = sq
        out.append(list(cur))
    return out


def misiurewicz_poly(r, s):
    """Exact integer coefficients of F_{r,s}(x) = f_x^r(0) + f_x^s(0).

    Returns
    -------
    list of int
        Little-endian (ascending-degree) coefficients.
    """
    if not r > s >= 1:
        raise ValueError(f"need r > s >= 1, got ({r}, {s})")
    iterates = _critical_iterates(r)
    big, small = iterates[r - 1], iterates[s - 1]
    out = list(big)
    for i, v in enumerate(small):
        out[i] += v
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def mod2_iterate_check(n_max):
    """Verify f_x^n(0) = sum_{i<n} x^(2^i) mod 2 for all n <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    v = 0  # bitmask: bit k is the coefficient of x^k mod 2
    target = 0
    for n in range(1, n_max + 1):
        sq = 0
        t = v
        while t:
            k = (t & -t).bit_length() - 1
            sq |= 1 << (2 * k)
            t &= t - 1
        v = sq ^ 2  # square, then add x
        target |= 1 << (2 ** (n - 1))
        if v != target:
            return False
    return True


def misiurewicz_mod2_matches(r, s):
    """Check F_{r,s} = (x^(2^(r-s-1)) + ... + x)^(2^s) mod 2 exactly."""
    coeffs = misiurewicz_poly(r, s)
    got = 0
    for i, v in enumerate(coeffs):
        if v & 1:
            got |= 1 << i
    expected = 0
    for i in range(s, r):
        expected |= 1 << (2**i)
    return got == expected


def find_pcf_params(r, s, p_max):
    """All (p, c) with p <= p_max prime and portrait exactly (r, s).

    Scans odd primes in increasing order and residues c = 0..p-1 of the
    Misiurewicz polynomial; keeps only parameters whose re-derived orbit
    portrait matches with pairwise-distinct strict orbit values.
    """
    coeffs = misiurewicz_poly(r, s)
    found = []
    for p in range(3, p_max + 1, 2):
        if not _is_prime(p):
            continue
        for c in range(p):
            if sum(v * pow(c, i, p) for i, v in enumerate(coeffs)) % p:
                continue
            op = orbit_portrait(p, c)
            if op is not None and (op.r, op.s) == (r, s) and op.distinct:
                found.append((p, c))
    return found


# ---------------------------------------------------------------------------
# preimage trees


class LabeledTree:
    """A depth-n tree of exact iterated preimages of x0 under z^2 + c.

    Node words are strings over {a, b}; the root is "".  The value map
    satisfies f([wt]) = [w] and [wa] = -[wb] at every internal node.
    Instances are mutated only through :meth:`swap_subtrees`, which the
    labeling passes use to renormalize sign choices.
    """

    __slots__ = ("ctx", "c", "x0", "depth", "portrait", "nodes")

    def __init__(self, ctx, c, x0, depth, portrait, nodes):
        self.ctx = ctx
        self.c = c
        self.x0 = x0
        self.depth = depth
        self.portrait = portrait
        self.nodes = nodes

    def value(self, word):
        return self.nodes[word]

    def copy(self):
        return LabeledTree(
            self.ctx, self.c, self.x0, self.depth, self.portrait, dict(self.nodes)
        )

    def swap_subtrees(self, word):
        """Exchange the labels of the two children of ``word``.

        The whole subtrees move: every descendant suffix t has its values
        at word+"a"+t and word+"b"+t exchanged.
        """
        for length in range(self.depth - len(word) - 1 + 1):
            for t in level_words(length):
                ka, kb = word + "a" + t, word + "b" + t
                self.nodes[ka], self.nodes[kb] = self.nodes[kb], self.nodes[ka]

    def to_json(self):
        return {
            "p": self.ctx.p,
            "m": self.ctx.m,
            "modulus": list(self.ctx.modulus),
            "c": list(self.c.coeffs),
            "x0": list(self.x0.coeffs),
            "depth": self.depth,
            "portrait": {"r": self.portrait.r, "s": self.portrait.s},
            "nodes": {w: list(v.coeffs) for w, v in self.nodes.items()},
        }

    @classmethod
    def from_json(cls, doc):
        from .fields import build_field

        m = doc["m"]
        ctx = build_field(doc["p"], m.bit_length() - 1)
        if list(ctx.modulus) != list(doc["modulus"]):
            raise ValueError("modulus mismatch: document from a different scheme")
        nodes = {w: ctx.element(v) for w, v in doc["nodes"].items()}
        return cls(
            ctx,
            ctx.element(doc["c"]),
            ctx.element(doc["x0"]),
            doc["depth"],
            Portrait(doc["portrait"]["r"], doc["portrait"]["s"]),
            nodes,
        )

    def checksum(self):
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def __repr__(self):
        return (
            f"LabeledTree(p={self.ctx.p}, c={self.c.coeffs[0]}, "
            f"x0={self.x0.coeffs[0]}, depth={self.depth}, "
            f"portrait={self.portrait})"
        )


def preimage_tree(ctx, c, x0, depth):
    """Build the canonical labeled tree of f^{-n}(x0) for n <= depth.

    Parameters
    ----------
    ctx : FieldCtx
        Ambient field; must satisfy ctx.m >= 2^depth so every square
        root in the construction exists.
    c, x0 : int
        Base-field parameter and base point.
    depth : int
        Tree depth, >= 0.

    Raises
    ------
    PortraitError
        c is not strictly preperiodic, or has the Chebyshev shape.
    BasePointError
        x0 lies in the strict forward orbit of 0, or is periodic.
    """
    if not isinstance(ctx, FieldCtx):
        raise TypeError("ctx must be a FieldCtx")
    if depth < 0 or 2**depth > ctx.m:
        raise ValueError(
            f"depth {depth} needs extension degree {2**depth}, ctx has {ctx.m}"
        )
    p = ctx.p
    c %= p
    x0 %= p
    op = orbit_portrait(p, c)
    if op is None:
        raise PortraitError(
            f"c = {c} mod {p}: critical orbit not strictly preperiodic "
            "(or Chebyshev)"
        )
    if x0 in set(op.orbit):
        raise BasePointError(f"x0 = {x0} lies in the forward orbit of 0")
    seen = set()
    v = (x0 * x0 + c) % p
    while v not in seen:
        seen.add(v)
        v = (v * v + c) % p
    if x0 in seen:
        raise BasePointError(f"x0 = {x0} is periodic under z^2 + {c}")

    c_el = ctx.from_int(c)
    nodes = {"": ctx.from_int(x0)}
    for level in range(1, depth + 1):
        for w in level_words(level - 1):
            pair = ctx.sqrt(nodes[w] - c_el)
            if pair is None or pair[0] == pair[1]:
                raise AssertionError(
                    "internal invariant violated: missing or degenerate "
                    f"square root below node {w!r}"
                )
            nodes[w + "a"], nodes[w + "b"] = pair
    return LabeledTree(ctx, c_el, ctx.from_int(x0), depth, op.portrait, nodes)
