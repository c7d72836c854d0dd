"""Sign normalization for preimage trees of z^2 + c over finite fields.

Every internal node of a preimage tree has two children whose values differ
only by sign, so a tree of depth n encodes 2^(2^n - 1) - fold ambiguity in
how the labels a and b are assigned.  The algorithms here pin the assignment
down by forcing distinguished products of node values onto canonical
constants:

* fourfold products -- for a critical orbit with tail length s >= 2 and
  period entry r, the quotient of the product of the 2^(r-1) a-side
  grandchildren labels by the product of the 2^(s-1) b-side labels (and the
  mirror quotient) squares to -1 at every node x with |x| <= depth - r - 1.
  ``label_longtail`` swaps sibling subtrees until both quotients equal one
  chosen fourth root of unity everywhere in the window.

* eight-factor quotient -- in the boundary case (r, s) = (3, 2) the four
  sums gamma_w(x), w in {aa, ab, ba, bb}, built from the values five levels
  above x, have a product that factors through the square root of 2.
  ``label_special`` normalizes the quotient delta(x) onto a chosen square
  root of 2 by swapping the children of x + "aaa" and x + "aab"; this
  preserves the fourfold normalization.

* lock products and sum ratios -- for tails of length s = 1 the product
  E_y of the 2^(r-2) a-side descendants of y satisfies
  E_{xaa} E_{xab} = ±[xba] and E_{xba} E_{xbb} = ±[xaa], and once both locks
  carry a plus sign the four ratios (E_{xaa} + E_{xab}) / E_{xbb}, ... are a
  common square root of 2.  ``label_shorttail`` fixes the locks and the
  ratios by swapping single sibling pairs chosen so that exactly one factor
  of the intended product changes sign.

All swaps exchange the labels of the two children of a named node (together
with their subtrees), which preserves the defining relations of the tree.
``verify_identities`` re-evaluates every pinned identity, plus the
half-product squares that hold for any labeling, and returns a report that
serializes to JSON.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

__all__ = [
    "LabelingError",
    "Check",
    "LabelingReport",
    "SpecialQuantities",
    "anchor_words",
    "e_product",
    "fourfold_ratios",
    "special_quantities",
    "label_longtail",
    "label_special",
    "label_shorttail",
    "label_tree",
    "verify_identities",
]


class LabelingError(ValueError):
    """A labeling hypothesis failed (wrong case, bad constant, or a product
    identity that should hold up to sign does not)."""


def _words(k):
    return ["".join(t) for t in itertools.product("ab", repeat=k)]


def _prod(tree, words):
    out = tree.ctx.one
    for w in words:
        out = out * tree.value(w)
    return out


def _require_case(tree, allowed, who):
    case = tree.portrait.case
    if case not in allowed:
        raise LabelingError(
            f"{who} applies to portraits of case {'/'.join(allowed)}, "
            f"got {tree.portrait} ({case})"
        )


def _resolve_zeta4(tree, zeta4):
    ctx = tree.ctx
    if zeta4 is None:
        zeta4 = ctx.zeta4()
    if zeta4 is not None and zeta4 * zeta4 != ctx.zero - ctx.one:
        raise LabelingError("zeta4 must square to -1")
    return zeta4

def _resolve_sqrt2(tree, sqrt2):
    ctx = tree.ctx
    if sqrt2 is None:
        sqrt2 = ctx.sqrt2()
    if sqrt2 is not None and sqrt2 * sqrt2 != ctx.from_int(2):
        raise LabelingError("sqrt2 must square to 2")
    return sqrt2


def anchor_words(tree, kind):
    """Nodes at which a product identity of the given kind is checkable.

    Parameters
    ----------
    tree : LabeledTree
    kind : str
        "fourprod" or "shorttail" for the window |x| <= depth - r - 1,
        "delta" for the window |x| <= depth - 5.

    Returns
    -------
    list of str
        Anchor words ordered by level, then lexicographically.  Empty when
        the tree is too shallow for the identity.
    """
    if kind in ("fourprod", "shorttail"):
        top = tree.depth - tree.portrait.r - 1
    elif kind == "delta":
        top = tree.depth - 5
    else:
        raise ValueError(f"unknown anchor kind {kind!r}")
    return [x for k in range(top + 1) for x in _words(k)]


def fourfold_ratios(tree, x):
    """The two quotients of grandchild-label products anchored at x.

    The first is (prod over |w| = r-1 of [xawa]) / (prod over |w'| = s-1 of
    [xbw'a]); the second swaps the roles of a and b.  Both square to -1 on
    any preimage tree with s >= 2.
    """
    r, s = tree.portrait.r, tree.portrait.s
    g1 = _prod(tree, [x + "a" + w + "a" for w in _words(r - 1)]) / _prod(
        tree, [x + "b" + w + "a" for w in _words(s - 1)]
    )
    g2 = _prod(tree, [x + "b" + w + "a" for w in _words(r - 1)]) / _prod(
        tree, [x + "a" + w + "a" for w in _words(s - 1)]
    )
    return g1, g2


def e_product(tree, y):
    """Product of the 2^(r-2) a-side descendant labels [yw'a], |w'| = r-2."""
    r = tree.portrait.r
    return _prod(tree, [y + w + "a" for w in _words(r - 2)])


@dataclass
class SpecialQuantities:
    """The sums and quotients attached to an anchor in the (3, 2) case.

    Attributes
    ----------
    gamma, gamma_prime : dict
        For each w in {aa, ab, ba, bb} the sum s1 s2 t2 ± s3 s4 t1 built
        from the six values [xwaaa], [xwaba], [xwbaa], [xwbba], [xwaa],
        [xwba] five levels above the anchor.
    u_a, u_b : FieldElement
        c [xaaa][xaba] and c [xbaa][xbba].
    delta : FieldElement
        gamma_aa gamma_ab gamma_ba gamma_bb / (4 (c^2+c+1) (2 + u_a + u_b));
        squares to 2 whenever the fourfold products are normalized.
    """

    gamma: dict
    gamma_prime: dict
    u_a: object
    u_b: object
    delta: object


def special_quantities(tree, x):
    """Evaluate the (3, 2)-case sums and the quotient delta at anchor x.

    Raises
    ------
    LabelingError
        If the tree is too shallow at x or a denominator that is nonzero
        for admissible base points vanishes.
    """
    _require_case(tree, ("special",), "special_quantities")
    if len(x) > tree.depth - 5:
        raise LabelingError(
            f"anchor {x!r} needs five levels above it, tree depth {tree.depth}"
        )
    ctx = tree.ctx
    c = tree.c
    gamma, gamma_prime = {}, {}
    for w in _words(2):
        t1 = tree.value(x + w + "aa")
        t2 = tree.value(x + w + "ba")
        left = tree.value(x + w + "aaa") * tree.value(x + w + "aba") * t2
        right = tree.value(x + w + "baa") * tree.value(x + w + "bba") * t1
        gamma[w] = left + right
        gamma_prime[w] = left - right
    u_a = c * tree.value(x + "aaa") * tree.value(x + "aba")
    u_b = c * tree.value(x + "baa") * tree.value(x + "bba")
    two = ctx.from_int(2)
    unit = c * c + c + ctx.one
    denom = ctx.from_int(4) * unit * (two + u_a + u_b)
    if denom.is_zero:
        raise LabelingError(f"vanishing denominator 4(c^2+c+1)(2+U_a+U_b) at {x!r}")
    delta = gamma["aa"] * gamma["ab"] * gamma["ba"] * gamma["bb"] / denom
    return SpecialQuantities(gamma, gamma_prime, u_a, u_b, delta)


# ---------------------------------------------------------------------------
# labeling passes


def _recheck_fourfold(tree, zeta4, upto_level):
    for k in range(upto_level + 1):
        for x in _words(k):
            g1, g2 = fourfold_ratios(tree, x)
            if g1 != zeta4 or g2 != zeta4:
                raise LabelingError(
                    f"fourfold normalization broken at {x!r} after a pass"
                )


def label_longtail(tree, zeta4=None):
    """Normalize both fourfold quotients onto zeta4 at every anchor.

    Works level by level from the top of the tree down: in the pass for
    level n, each anchor x with |x| = n - r - 1 is fixed by swapping the
    children of x + a^r (first quotient) and of x + b a^(r-1) (second
    quotient) when the quotient evaluates to -zeta4.  Later passes only
    touch labels below the window already normalized.

    Parameters
    ----------
    tree : LabeledTree
        Portrait must have s >= 2 (cases "longtail" and "special").
    zeta4 : FieldElement, optional
        Fourth root of unity to normalize onto; defaults to the canonical
        one of the tree's field.

    Returns
    -------
    (LabeledTree, list of str)
        A relabeled copy and the nodes whose children were swapped, in
        order.  The input tree is not modified.
    """
    _require_case(tree, ("longtail", "special"), "label_longtail")
    r = tree.portrait.r
    zeta4 = _resolve_zeta4(tree, zeta4)
    work = tree.copy()
    swaps = []
    if tree.depth < r + 1:
        return work, swaps
    if zeta4 is None:
        raise LabelingError("the field carries no fourth root of unity")
    minus = work.ctx.zero - work.ctx.one
    for n in range(r + 1, work.depth + 1):
        for x in _words(n - r - 1):
            g1, g2 = fourfold_ratios(work, x)
            if g1 == minus * zeta4:
                node = x + "a" * r
                work.swap_subtrees(node)
                swaps.append(node)
            elif g1 != zeta4:
                raise LabelingError(
                    f"first fourfold quotient at {x!r} is not ±zeta4"
                )
            if g2 == minus * zeta4:
                node = x + "b" + "a" * (r - 1)
                work.swap_subtrees(node)
                swaps.append(node)
            elif g2 != zeta4:
                raise LabelingError(
                    f"second fourfold quotient at {x!r} is not ±zeta4"
                )
        _recheck_fourfold(work, zeta4, n - r - 1)
    return work, swaps


def label_special(tree, zeta4=None, sqrt2=None):
    """Normalize the eight-factor quotient delta onto sqrt2, case (3, 2).

    Requires the fourfold quotients to be normalized already (run
    ``label_longtail`` first); raises otherwise.  Anchors are processed by
    increasing level; delta(x) = -sqrt2 is fixed by swapping the children
    of x + "aaa" and of x + "aab", which leaves every fourfold quotient and
    every already-processed delta unchanged.

    Returns
    -------
    (LabeledTree, list of str)
        A relabeled copy and the swapped nodes.  The input is unchanged.
    """
    _require_case(tree, ("special",), "label_special")
    zeta4 = _resolve_zeta4(tree, zeta4)
    sqrt2 = _resolve_sqrt2(tree, sqrt2)
    work = tree.copy()
    swaps = []
    if work.depth < 4:
        return work, swaps
    for x in anchor_words(work, "fourprod"):
        g1, g2 = fourfold_ratios(work, x)
        if g1 != zeta4 or g2 != zeta4:
            raise LabelingError(
                "label_special needs a fourfold-normalized tree; "
                f"quotient at {x!r} is off"
            )
    if work.depth < 5:
        return work, swaps
    if sqrt2 is None:
        raise LabelingError("the field carries no square root of 2")
    minus = work.ctx.zero - work.ctx.one
    for x in anchor_words(work, "delta"):
        delta = special_quantities(work, x).delta
        if delta == minus * sqrt2:
            for node in (x + "aaa", x + "aab"):
                work.swap_subtrees(node)
                swaps.append(node)
            delta = special_quantities(work, x).delta
        if delta != sqrt2:
            raise LabelingError(f"eight-factor quotient at {x!r} is not ±sqrt2")
    return work, swaps


def label_shorttail(tree, sqrt2=None):
    """Normalize lock products and sum ratios onto sqrt2, case s = 1.

    For each anchor x (level by level from the top): a negative lock
    E_{xaa} E_{xab} = -[xba] is fixed by swapping the children of
    x + a^r, which flips exactly the factor [x a a^(r-1) a] of E_{xaa};
    symmetrically x + b a^(r-1) fixes the second lock.  A ratio
    (E_{xaa} + E_{xab}) / E_{xbb} = -sqrt2 is fixed by swapping the
    children of x + aa a^(r-2) and of x + ab a^(r-2), which flips both
    E_{xaa} and E_{xab} and so keeps the locks intact.  The remaining
    three ratios are then equal to sqrt2 automatically; this is checked.

    Returns
    -------
    (LabeledTree, list of str)
        A relabeled copy and the swapped nodes.  The input is unchanged.
    """
    _require_case(tree, ("shorttail",), "label_shorttail")
    r = tree.portrait.r
    sqrt2 = _resolve_sqrt2(tree, sqrt2)
    work = tree.copy()
    swaps = []
    if work.depth < r + 1:
        return work, swaps
    if sqrt2 is None:
        raise LabelingError("the field carries no square root of 2")
    minus = work.ctx.zero - work.ctx.one
    for n in range(r + 1, work.depth + 1):
        for x in _words(n - r - 1):
            eaa, eab = e_product(work, x + "aa"), e_product(work, x + "ab")
            if eaa * eab == minus * work.value(x + "ba"):
                node = x + "a" + "a" * (r - 1)
                work.swap_subtrees(node)
                swaps.append(node)
                eaa = e_product(work, x + "aa")
            if eaa * eab != work.value(x + "ba"):
                raise LabelingError(f"lock E_aa E_ab != ±[xba] at {x!r}")
            eba, ebb = e_product(work, x + "ba"), e_product(work, x + "bb")
            if eba * ebb == minus * work.value(x + "aa"):
                node = x + "b" + "a" * (r - 1)
                work.swap_subtrees(node)
                swaps.append(node)
                eba = e_product(work, x + "ba")
            if eba * ebb != work.value(x + "aa"):
                raise LabelingError(f"lock E_ba E_bb != ±[xaa] at {x!r}")
            ratio = (eaa + eab) / ebb
            if ratio == minus * sqrt2:
                for node in (x + "aa" + "a" * (r - 2), x + "ab" + "a" * (r - 2)):
                    work.swap_subtrees(node)
                    swaps.append(node)
                eaa = e_product(work, x + "aa")
                eab = e_product(work, x + "ab")
                ratio = (eaa + eab) / ebb
            if ratio != sqrt2:
                raise LabelingError(f"ratio (E_aa + E_ab)/E_bb at {x!r} is not ±sqrt2")
            for other in (
                (eab - eaa) / eba,
                (eba + ebb) / eab,
                (ebb - eba) / eaa,
            ):
                if other != sqrt2:
                    raise LabelingError(
                        f"companion ratio at {x!r} failed to lock onto sqrt2"
                    )
    return work, swaps


# ---------------------------------------------------------------------------
# verification and the combined driver


@dataclass(frozen=True)
class Check:
    """One identity evaluation: the anchor node, an identity id, pass/fail."""

    node: str
    id: str
    ok: bool


@dataclass
class LabelingReport:
    """Outcome of labeling and/or verification of one tree."""

    case: str
    zeta4: object
    sqrt2: object
    swaps: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    vacuous: bool = False
    tree_checksum: str = ""

    @property
    def all_ok(self):
        return all(c.ok for c in self.checks)

    def to_json(self):
        return {
            "case": self.case,
            "zeta4": None if self.zeta4 is None else list(self.zeta4.coeffs),
            "sqrt2": None if self.sqrt2 is None else list(self.sqrt2.coeffs),
            "swaps": [{"node": n, "level": lv} for n, lv in self.swaps],
            "checks": [
                {"node": c.node, "id": c.id, "ok": c.ok} for c in self.checks
            ],
            "vacuous": self.vacuous,
            "tree_checksum": self.tree_checksum,
        }


def verify_identities(tree, case=None, zeta4=None, sqrt2=None):
    """Re-evaluate every product identity on a tree and report pass/fail.

    Half-product squares (which hold for any labeling of a preimage tree)
    are checked at every node and height.  On top of that, the identities
    pinned by the labeling pass for the tree's case are compared against
    the canonical constants: fourfold quotients and, for (3, 2), the delta
    quotient, or the shorttail locks and ratios.  Nothing is modified and
    nothing raises on failure; each outcome lands in the report.

    Parameters
    ----------
    tree : LabeledTree
    case : str, optional
        Override the case inferred from the tree's portrait.
    zeta4, sqrt2 : FieldElement, optional
        Constants to compare against; default to the canonical ones.

    Returns
    -------
    LabelingReport
    """
    ctx = tree.ctx
    if case is None:
        case = tree.portrait.case
    if case not in ("longtail", "special", "shorttail"):
        raise LabelingError(f"no identities to verify for case {case!r}")
    zeta4 = _resolve_zeta4(tree, zeta4) if case in ("longtail", "special") else None
    sqrt2 = _resolve_sqrt2(tree, sqrt2) if case in ("special", "shorttail") else None
    checks = []
    # half-product squares at every node and height
    crit = [ctx.zero]
    for _ in range(tree.depth):
        crit.append(crit[-1] * crit[-1] + tree.c)
    for lv in range(tree.depth):
        for y in _words(lv):
            for m in range(1, tree.depth - lv + 1):
                half = _prod(tree, [y + w + "a" for w in _words(m - 1)])
                want = (
                    tree.value(y) - tree.c if m == 1 else crit[m] - tree.value(y)
                )
                checks.append(Check(y, f"halfprod-{m}", half * half == want))
    if case in ("longtail", "special"):
        for x in anchor_words(tree, "fourprod"):
            g1, g2 = fourfold_ratios(tree, x)
            checks.append(Check(x, "fourprod-a", g1 == zeta4))
            checks.append(Check(x, "fourprod-b", g2 == zeta4))
    if case == "special":
        for x in anchor_words(tree, "delta"):
            try:
                ok = special_quantities(tree, x).delta == sqrt2
            except LabelingError:
                ok = False
            checks.append(Check(x, "deltaprod", ok))
    if case == "shorttail":
        for x in anchor_words(tree, "shorttail"):
            eaa, eab = e_product(tree, x + "aa"), e_product(tree, x + "ab")
            eba, ebb = e_product(tree, x + "ba"), e_product(tree, x + "bb")
            checks.append(Check(x, "lock-a", eaa * eab == tree.value(x + "ba")))
            checks.append(Check(x, "lock-b", eba * ebb == tree.value(x + "aa")))
            checks.append(Check(x, "ratio-a1", (eaa + eab) / ebb == sqrt2))
            checks.append(Check(x, "ratio-a2", (eab - eaa) / eba == sqrt2))
            checks.append(Check(x, "ratio-b1", (eba + ebb) / eab == sqrt2))
            checks.append(Check(x, "ratio-b2", (ebb - eba) / eaa == sqrt2))
    return LabelingReport(
        case=case,
        zeta4=zeta4,
        sqrt2=sqrt2,
        swaps=[],
        checks=checks,
        vacuous=tree.depth < tree.portrait.r + 1,
        tree_checksum=tree.checksum(),
    )


def label_tree(tree, zeta4=None, sqrt2=None):
    """Label a tree according to its portrait case and verify the result.

    Dispatches to ``label_longtail`` (s >= 2), then additionally
    ``label_special`` for (3, 2), or to ``label_shorttail`` for s = 1.
    Trees too shallow to carry any pinned identity are returned unchanged
    with ``vacuous`` set in the report.

    Returns
    -------
    (LabeledTree, LabelingReport)
        The relabeled copy and a report whose ``swaps`` lists the swapped
        nodes as (node, level) pairs in the order performed.
    """
    case = tree.portrait.case
    if case == "special":
        work, swaps = label_longtail(tree, zeta4=zeta4)
        work, more = label_special(work, zeta4=zeta4, sqrt2=sqrt2)
        swaps += more
    elif case == "longtail":
        work, swaps = label_longtail(tree, zeta4=zeta4)
    elif case == "shorttail":
        if zeta4 is not None:
            _resolve_zeta4(tree, zeta4)  # validate even though unused
        work, swaps = label_shorttail(tree, sqrt2=sqrt2)
    else:
        raise LabelingError(f"cannot label a tree of case {case!r}")
    report = verify_identities(work, case=case, zeta4=zeta4, sqrt2=sqrt2)
    report.swaps = [(node, len(node)) for node in swaps]
    return work, report
