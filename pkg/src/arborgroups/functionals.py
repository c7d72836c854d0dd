"""Mod-2 parity functionals on tree automorphisms and the induced subgroups.

For an orbit portrait (r, s) with r > s >= 1 the two basic functionals at a
node x are

    P^a(sigma, x) = sum_{|w| = r-1} Par(sigma, x a w) + sum_{|w'| = s-1} Par(sigma, x b w')
    P^b(sigma, x) = same with the roles of a and b swapped            (mod 2)

The constancy subgroup ("Mp") consists of the elements whose P^a and P^b
agree with one another and across all anchors; the kernel ("Bp") pins the
common value to 0.  Two portraits carry an extra quadratic functional:

* (3, 2): R(sigma, x) is a 16-term linear part plus the product
  [Par(x aa)+Par(x ab)] * [Par(x ba)+Par(x bb)]; the refined groups "tMp" /
  "tBp" additionally require R constant / zero.
* s = 1, r >= 3: R(sigma, x) = Par(x a) Par(x b)
  + sum_{|w| = r-2} (Par(x ab w) + Par(x bb w)); here "tMp" sits inside the
  kernel of P by definition, so membership forces the common P value to 0.

All functionals are evaluated as popcounts of the element's packed parity
vector against precomputed node-index masks; the tests re-derive them as
explicit sums over words.

Anchor windows at finite depth n: P-functionals need |x| <= n - 1 - r, the
(3,2) quadratic needs |x| <= n - 5, the short-tail quadratic
|x| <= n - 1 - r.  An empty window makes the condition vacuous; reports
carry explicit vacuity flags.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .automorphisms import TreeAutomorphism, level_words, word_index

VARIANTS = ("Mp", "Bp", "tMp", "tBp")


class MembershipError(ValueError):
    """Raised when a functional value is requested for a non-member."""


class VacuousWindowError(ValueError):
    """Raised when a value is requested but the anchor window is empty."""


@dataclass(frozen=True)
class Portrait:
    """Critical orbit portrait (r, s): tail length r, re-entry index s."""

    r: int
    s: int

    def __post_init__(self):
        if not (self.r > self.s >= 1):
            raise ValueError(f"portrait needs r > s >= 1, got ({self.r}, {self.s})")

    @property
    def case(self) -> str:
        if (self.r, self.s) == (2, 1):
            return "chebyshev"
        if (self.r, self.s) == (3, 2):
            return "special"
        if self.s == 1:
            return "shorttail"
        return "longtail"

    @property
    def has_quadratic(self) -> bool:
        return self.case in ("special", "shorttail")

    def __iter__(self):
        return iter((self.r, self.s))

    def __str__(self):
        return f"({self.r},{self.s})"


# ----------------------------------------------------------------------
# packed masks (node-index bit sets), cached per anchor


@lru_cache(maxsize=None)
def _pa_mask(x: str, r: int, s: int) -> int:
    m = 0
    for w in level_words(r - 1):
        m |= 1 << word_index(x + "a" + w)
    for w in level_words(s - 1):
        m |= 1 << word_index(x + "b" + w)
    return m


@lru_cache(maxsize=None)
def _pb_mask(x: str, r: int, s: int) -> int:
    m = 0
    for w in level_words(r - 1):
        m |= 1 << word_index(x + "b" + w)
    for w in level_words(s - 1):
        m |= 1 << word_index(x + "a" + w)
    return m


@lru_cache(maxsize=None)
def _v32_mask(y: str) -> int:
    m = 0
    for w in level_words(2):
        m |= 1 << word_index(y + w)
    for w in level_words(1):
        m |= 1 << word_index(y + w)
    return m


@lru_cache(maxsize=None)
def _r32_masks(x: str) -> tuple:
    lin = 0
    for w in level_words(2):
        lin |= 1 << word_index(x + w)
        lin |= 1 << word_index(x + w + "b")
        for t in "ab":
            lin |= 1 << word_index(x + w + "a" + t)
    qa = (1 << word_index(x + "aa")) | (1 << word_index(x + "ab"))
    qb = (1 << word_index(x + "ba")) | (1 << word_index(x + "bb"))
    return lin, qa, qb


@lru_cache(maxsize=None)
def _rr1_masks(x: str, r: int) -> tuple:
    lin = 0
    for w in level_words(r - 2):
        lin |= 1 << word_index(x + "ab" + w)
        lin |= 1 << word_index(x + "bb" + w)
    qa = 1 << word_index(x + "a")
    qb = 1 << word_index(x + "b")
    return lin, qa, qb


def _parity(bits: int, mask: int) -> int:
    return (bits & mask).bit_count() & 1


def _require(depth: int, anchor: str, top_offset: int, what: str):
    if len(anchor) + top_offset > depth - 1:
        raise ValueError(
            f"{what} at anchor {anchor!r} reads level {len(anchor) + top_offset}; "
            f"depth {depth} stores parities up to level {depth - 1}"
        )


# ----------------------------------------------------------------------
# functional evaluation on single elements


def p_a(sigma: TreeAutomorphism, x: str, portrait: Portrait) -> int:
    _require(sigma.depth, x, portrait.r, "P^a")
    return _parity(sigma.bits, _pa_mask(x, portrait.r, portrait.s))


def p_b(sigma: TreeAutomorphism, x: str, portrait: Portrait) -> int:
    _require(sigma.depth, x, portrait.r, "P^b")
    return _parity(sigma.bits, _pb_mask(x, portrait.r, portrait.s))


def v32(sigma: TreeAutomorphism, y: str) -> int:
    """Two-level parity sum entering the (3,2) quadratic functional."""
    _require(sigma.depth, y, 2, "V")
    return _parity(sigma.bits, _v32_mask(y))


def r32(sigma: TreeAutomorphism, x: str) -> int:
    """Quadratic functional of the (3,2) portrait at anchor x."""
    _require(sigma.depth, x, 4, "R(3,2)")
    lin, qa, qb = _r32_masks(x)
    bits = sigma.bits
    return _parity(bits, lin) ^ (_parity(bits, qa) & _parity(bits, qb))


def r_r1(sigma: TreeAutomorphism, x: str, r: int) -> int:
    """Quadratic functional of the short-tail portraits (r, 1), r >= 3."""
    if r < 3:
        raise ValueError("short-tail functional needs r >= 3")
    _require(sigma.depth, x, r, "R(r,1)")
    lin, qa, qb = _rr1_masks(x, r)
    bits = sigma.bits
    return _parity(bits, lin) ^ (_parity(bits, qa) & _parity(bits, qb))


def p_anchors(depth: int, r: int):
    """Anchor words for the P-functionals: all x with |x| <= depth - 1 - r."""
    for m in range(max(0, depth - r)):
        yield from level_words(m)


def r_anchors(depth: int, portrait: Portrait):
    """Anchor words for the case's quadratic functional (empty for long tails)."""
    if portrait.case == "special":
        top = depth - 4
    elif portrait.case == "shorttail":
        top = depth - portrait.r
    else:
        return
    for m in range(max(0, top)):
        yield from level_words(m)


def quadratic(sigma: TreeAutomorphism, x: str, portrait: Portrait) -> int:
    if portrait.case == "special":
        return r32(sigma, x)
    if portrait.case == "shorttail":
        return r_r1(sigma, x, portrait.r)
    raise ValueError(f"portrait {portrait} has no quadratic functional")


# ----------------------------------------------------------------------
# membership


@dataclass
class MembershipReport:
    portrait: Portrait
    depth: int
    in_mp: bool
    in_bp: bool
    in_tmp: bool
    in_tbp: bool
    p_value: int | None
    r_value: int | None
    p_vacuous: bool
    r_vacuous: bool
    violations: list = field(default_factory=list)

    @property
    def in_group(self) -> bool:
        """Membership in the case's main group (the tilde-M predicate group)."""
        return self.in_tmp

    @property
    def h_value(self):
        if not self.in_tmp:
            return None
        case = self.portrait.case
        if case == "longtail":
            return self.p_value
        if case == "shorttail":
            return self.r_value
        if self.p_value is None or self.r_value is None:
            return None
        return (self.p_value, self.r_value)

    def to_json(self) -> dict:
        h = self.h_value
        return {
            "in_group": self.in_group,
            "p": self.p_value,
            "r": self.r_value,
            "h": list(h) if isinstance(h, tuple) else h,
            "violations": list(self.violations),
        }


def membership(sigma: TreeAutomorphism, portrait: Portrait) -> MembershipReport:
    """Evaluate all membership predicates of the portrait's case at once."""
    case = portrait.case
    if case == "chebyshev":
        raise ValueError("the (2,1) portrait is excluded from the membership machinery")
    depth = sigma.depth

    p_vals = []
    violations = []
    p_const = True
    p_zero = True
    first_p = None
    for x in p_anchors(depth, portrait.r):
        va = p_a(sigma, x, portrait)
        vb = p_b(sigma, x, portrait)
        if first_p is None:
            first_p = va
        if va != vb or va != first_p:
            p_const = False
            violations.append({"node": x, "kind": "p_mismatch"})
        if va or vb:
            p_zero = False
            violations.append({"node": x, "kind": "p_nonzero"})
        p_vals.append(va)
    p_vacuous = first_p is None

    r_vals = []
    r_const = True
    r_zero = True
    first_r = None
    if portrait.has_quadratic:
        for x in r_anchors(depth, portrait):
            v = quadratic(sigma, x, portrait)
            if first_r is None:
                first_r = v
            if v != first_r:
                r_const = False
                violations.append({"node": x, "kind": "r_mismatch"})
            if v:
                r_zero = False
                violations.append({"node": x, "kind": "r_nonzero"})
            r_vals.append(v)
    r_vacuous = first_r is None

    in_mp = p_const
    in_bp = p_const and p_zero
    if case == "longtail":
        in_tmp, in_tbp = in_mp, in_bp
    elif case == "special":
        in_tmp = in_mp and r_const
        in_tbp = in_bp and r_const and r_zero
    else:  # shorttail: the refined group sits inside the P-kernel
        in_tmp = in_bp and r_const
        in_tbp = in_bp and r_const and r_zero

    return MembershipReport(
        portrait=portrait,
        depth=depth,
        in_mp=in_mp,
        in_bp=in_bp,
        in_tmp=in_tmp,
        in_tbp=in_tbp,
        p_value=(first_p if (p_const and not p_vacuous) else None),
        r_value=(first_r if (r_const and not r_vacuous) else None),
        p_vacuous=p_vacuous,
        r_vacuous=r_vacuous,
        violations=violations,
    )


def p_value(sigma: TreeAutomorphism, portrait: Portrait) -> int:
    rep = membership(sigma, portrait)
    if rep.p_vacuous:
        raise VacuousWindowError(f"no P anchors at depth {sigma.depth} for {portrait}")
    if not rep.in_mp or rep.p_value is None:
        raise MembershipError(f"element is not in the P-constancy group for {portrait}")
    return rep.p_value


def r_value(sigma: TreeAutomorphism, portrait: Portrait) -> int:
    rep = membership(sigma, portrait)
    if not portrait.has_quadratic:
        raise ValueError(f"portrait {portrait} has no quadratic functional")
    if rep.r_vacuous:
        raise VacuousWindowError(f"no quadratic anchors at depth {sigma.depth} for {portrait}")
    if rep.r_value is None:
        raise MembershipError(f"quadratic functional is not constant for {portrait}")
    return rep.r_value


# ----------------------------------------------------------------------
# predicate specs shared with the counting engine


@dataclass(frozen=True)
class PredicateSpec:
    """Packed-mask form of a membership predicate over depth-n parity vectors.

    p_masks holds the P^a/P^b masks of every anchor (interleaved); each
    quadratic functional contributes (lin, qa, qb).  Modes: 'equal' means all
    values in the family must agree, 'zero' means they must all vanish, None
    means the family is unconstrained.
    """

    depth: int
    p_masks: tuple
    r_masks: tuple  # tuple of (lin, qa, qb)
    p_mode: str | None
    r_mode: str | None

    def matches(self, bits: int) -> bool:
        first = -1
        for m in self.p_masks:
            v = (bits & m).bit_count() & 1
            if self.p_mode == "zero":
                if v:
                    return False
            else:
                if first < 0:
                    first = v
                elif v != first:
                    return False
        first = -1
        for lin, qa, qb in self.r_masks:
            v = (bits & lin).bit_count() & 1
            v ^= ((bits & qa).bit_count() & 1) & ((bits & qb).bit_count() & 1)
            if self.r_mode == "zero":
                if v:
                    return False
            else:
                if first < 0:
                    first = v
                elif v != first:
                    return False
        return True


def variant_modes(portrait: Portrait, variant: str) -> tuple:
    """(p_mode, r_mode) realizing a group variant for the portrait's case."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    case = portrait.case
    if case == "chebyshev":
        raise ValueError("the (2,1) portrait is excluded from the membership machinery")
    if variant == "Mp":
        return "equal", None
    if variant == "Bp":
        return "zero", None
    if case == "longtail":
        return ("equal", None) if variant == "tMp" else ("zero", None)
    if case == "special":
        return ("equal", "equal") if variant == "tMp" else ("zero", "zero")
    # shorttail
    return ("zero", "equal") if variant == "tMp" else ("zero", "zero")


def predicate_spec(portrait: Portrait, depth: int, variant: str) -> PredicateSpec:
    p_mode, r_mode = variant_modes(portrait, variant)
    p_masks = []
    if p_mode is not None:
        for x in p_anchors(depth, portrait.r):
            p_masks.append(_pa_mask(x, portrait.r, portrait.s))
            p_masks.append(_pb_mask(x, portrait.r, portrait.s))
    r_masks = []
    if r_mode is not None and portrait.has_quadratic:
        for x in r_anchors(depth, portrait):
            if portrait.case == "special":
                r_masks.append(_r32_masks(x))
            else:
                r_masks.append(_rr1_masks(x, portrait.r))
    if not r_masks:
        r_mode = None
    return PredicateSpec(
        depth=depth,
        p_masks=tuple(p_masks),
        r_masks=tuple(r_masks),
        p_mode=p_mode,
        r_mode=r_mode,
    )


def sample_member(
    portrait: Portrait,
    depth: int,
    variant: str,
    rng: random.Random,
    max_tries: int = 500_000,
) -> TreeAutomorphism:
    """Rejection-sample a uniform element of a predicate group."""
    spec = predicate_spec(portrait, depth, variant)
    nbits = (1 << depth) - 1
    for _ in range(max_tries):
        bits = rng.getrandbits(nbits)
        if spec.matches(bits):
            return TreeAutomorphism(depth, bits)
    raise RuntimeError(f"no {variant} member found in {max_tries} draws")
