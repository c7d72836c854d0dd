"""Frobenius probes: Galois data extracted from labeled preimage trees.

Over a finite base field F_q0 containing c and x0, the q0-power map is a
field automorphism commuting with z^2 + c, so it permutes each preimage
level of a tree and induces an automorphism of the labeled binary tree.
``frobenius_automorphism`` extracts that automorphism's parity bits level by
level.

Because the labeling pins distinguished products onto canonical constants,
the Frobenius automorphism must land in the same parity-functional groups
that constrain any tree automorphism compatible with those products:

* its P-functional value at every anchor equals the sign with which it acts
  on the chosen fourth root of unity (tails s >= 2);
* its quadratic-functional value equals the sign on the chosen square root
  of 2 (cases (3, 2) and s = 1), and for s = 1 both P-functionals vanish;
* at every level n the XOR of its parities one level up equals the
  non-square indicator of D_n in F_q0, where D_1 = x0 - c and
  D_n = f^n(0) - x0: the level-n half-product is a square root of D_n, and
  Frobenius fixes it exactly when D_n is a square.

``check_embedding`` and ``level_product_character`` verify these facts;
``kummer_rank`` does the square-class bookkeeping for the discriminants
D_1..D_r together with the constants the case adjoins (-1 and/or 2).  Over
a finite base field the square-class group has order 2, so the spanned
class group has F_2-rank at most 1 and the full-index degree condition
2^(r+e) is never met; the report states this honestly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automorphisms import TreeAutomorphism, level_words, word_index
from .dynamics import orbit_portrait
from .functionals import Portrait, membership, p_a, p_anchors, p_b, quadratic, r_anchors

__all__ = [
    "EmbeddingReport",
    "KummerReport",
    "LevelCharacter",
    "frobenius_automorphism",
    "check_embedding",
    "level_product_character",
    "kummer_rank",
]


def _validate_q0(tree, q0):
    p = tree.ctx.p
    if q0 is None:
        return p
    q, k = q0, 0
    while q > 1 and q % p == 0:
        q //= p
        k += 1
    if q != 1 or k == 0:
        raise ValueError(f"q0 must be a positive power of p = {p}, got {q0}")
    if tree.c ** q0 != tree.c or tree.x0 ** q0 != tree.x0:
        raise ValueError("q0-power map does not fix c and x0")
    return q0


def frobenius_automorphism(tree, q0=None):
    """Tree automorphism induced by the q0-power map on node values.

    Parameters
    ----------
    tree : LabeledTree
        Any preimage tree (labeling state does not matter for existence).
    q0 : int, optional
        A positive power of the field characteristic whose power map fixes
        c and x0.  Defaults to the characteristic itself.

    Returns
    -------
    TreeAutomorphism
        sigma with value(sigma(w)) = value(w)^q0 for every node w.

    Raises
    ------
    ValueError
        If q0 is not a valid power of p.
    RuntimeError
        If the power map leaves the node set, which cannot happen on a
        well-formed preimage tree.
    """
    q0 = _validate_q0(tree, q0)
    image = {"": ""}
    bits = 0
    for lv in range(tree.depth):
        for w in level_words(lv):
            img = image[w]
            moved = tree.value(w + "a") ** q0
            if moved == tree.value(img + "a"):
                par = 0
            elif moved == tree.value(img + "b"):
                par = 1
            else:  # pragma: no cover - impossible on preimage trees
                raise RuntimeError(f"power map left the node set at {w!r}")
            if par:
                bits |= 1 << word_index(w)
            image[w + "a"] = img + ("b" if par else "a")
            image[w + "b"] = img + ("a" if par else "b")
    return TreeAutomorphism(tree.depth, bits)


def _constant_sign(constant, q0):
    """0 if the q0-power map fixes the constant, 1 if it negates it."""
    if constant is None:
        return None
    moved = constant ** q0
    if moved == constant:
        return 0
    if moved == constant.ctx.zero - constant:
        return 1
    raise ValueError("constant is not moved by ±1 under the q0-power map")


@dataclass
class EmbeddingReport:
    """Outcome of checking one automorphism against the sign theorems."""

    sigma: TreeAutomorphism
    q0: int
    portrait: Portrait
    case: str
    membership: object
    signs: dict
    p_matches: object  # bool, or None when no anchor exists / not applicable
    r_matches: object
    p_zero: object  # shorttail only
    checksum_ok: object  # None when no labeling report was supplied

    @property
    def ok(self):
        if not self.membership.in_tmp:
            return False
        if self.checksum_ok is False:
            return False
        return all(
            v for v in (self.p_matches, self.r_matches, self.p_zero) if v is not None
        )

    def to_json(self):
        return {
            "sigma": self.sigma.encode(),
            "q0": self.q0,
            "portrait": {"r": self.portrait.r, "s": self.portrait.s},
            "case": self.case,
            "membership": self.membership.to_json(),
            "signs": dict(self.signs),
            "p_matches": self.p_matches,
            "r_matches": self.r_matches,
            "p_zero": self.p_zero,
            "checksum_ok": self.checksum_ok,
            "ok": self.ok,
        }


def check_embedding(sigma, tree, labeling=None, q0=None):
    """Verify the sign theorems for an automorphism of a labeled tree.

    Checks membership of sigma in the case's refined parity group, then
    compares the P-functional at every anchor with the sign of the
    q0-power map on the labeling's fourth root of unity, and the quadratic
    functional with the sign on the square root of 2.  For tails of length
    one the P-functionals must vanish identically.

    Parameters
    ----------
    sigma : TreeAutomorphism
        Usually ``frobenius_automorphism(tree, q0)``.
    tree : LabeledTree
        Must be labeled for the signs to be meaningful.
    labeling : LabelingReport, optional
        When given, its tree checksum must match the tree (the probe and
        the labeling must talk about the same labels).
    q0 : int, optional
        Base field size sigma came from; defaults to the characteristic.

    Returns
    -------
    EmbeddingReport
        ``.ok`` is True when membership and every applicable sign check
        passed.  Failures are reported, never raised.
    """
    q0 = _validate_q0(tree, q0)
    if sigma.depth != tree.depth:
        raise ValueError("sigma and tree have different depths")
    checksum_ok = None
    if labeling is not None:
        checksum_ok = labeling.tree_checksum == tree.checksum()
        if not checksum_ok:
            raise ValueError(
                "labeling report was produced from a different tree "
                "(checksum mismatch)"
            )
    portrait = tree.portrait
    case = portrait.case
    ctx = tree.ctx
    zsign = _constant_sign(ctx.zeta4(), q0) if case in ("longtail", "special") else None
    rsign = _constant_sign(ctx.sqrt2(), q0) if case in ("special", "shorttail") else None
    signs = {"zeta4": zsign, "sqrt2": rsign}
    report = membership(sigma, portrait)

    p_matches = None
    p_zero = None
    r_matches = None
    anchors = list(p_anchors(tree.depth, portrait.r))
    if case in ("longtail", "special") and anchors:
        p_matches = all(
            p_a(sigma, x, portrait) == zsign and p_b(sigma, x, portrait) == zsign
            for x in anchors
        )
    if case == "shorttail" and anchors:
        p_zero = all(
            p_a(sigma, x, portrait) == 0 and p_b(sigma, x, portrait) == 0
            for x in anchors
        )
    if portrait.has_quadratic:
        r_anchor_list = list(r_anchors(tree.depth, portrait))
        if r_anchor_list:
            r_matches = all(
                quadratic(sigma, x, portrait) == rsign for x in r_anchor_list
            )
    return EmbeddingReport(
        sigma=sigma,
        q0=q0,
        portrait=portrait,
        case=case,
        membership=report,
        signs=signs,
        p_matches=p_matches,
        r_matches=r_matches,
        p_zero=p_zero,
        checksum_ok=checksum_ok,
    )


@dataclass(frozen=True)
class LevelCharacter:
    """Level-n parity XOR of sigma against the square class of D_n."""

    n: int
    d_n: object
    chi: int  # +1 if D_n is a square in F_q0, -1 otherwise
    parity_xor: int
    ok: bool

    def to_json(self):
        return {
            "n": self.n,
            "D_n": list(self.d_n.coeffs),
            "chi": self.chi,
            "parity_xor": self.parity_xor,
            "ok": self.ok,
        }


def level_product_character(tree, sigma, n, q0=None):
    """Compare sigma's level-n parity XOR with the character of D_n.

    The product of the a-side labels at level n is a square root of
    D_n (D_1 = x0 - c, D_n = f^n(0) - x0 for n >= 2), and sigma scales it
    by (-1)^(XOR of parities at level n-1).  For the q0-Frobenius that
    sign must agree with the quadratic character of D_n in F_q0.

    Raises
    ------
    ValueError
        If n is out of range, D_n = 0 (postcritical base point), or D_n
        does not lie in F_q0.
    """
    q0 = _validate_q0(tree, q0)
    if not 1 <= n <= tree.depth:
        raise ValueError(f"level n must satisfy 1 <= n <= {tree.depth}, got {n}")
    if sigma.depth < n:
        raise ValueError("sigma is too shallow for this level")
    ctx = tree.ctx
    crit = ctx.zero
    for _ in range(n):
        crit = crit * crit + tree.c
    d_n = tree.x0 - tree.c if n == 1 else crit - tree.x0
    if d_n.is_zero:
        raise ValueError(f"D_{n} = 0: the base point is postcritical")
    if d_n ** q0 != d_n:
        raise ValueError(f"D_{n} does not lie in the base field of size {q0}")
    euler = d_n ** ((q0 - 1) // 2)
    chi = 1 if euler == ctx.one else -1
    xor = 0
    for x in level_words(n - 1):
        xor ^= sigma.par(x)
    return LevelCharacter(
        n=n, d_n=d_n, chi=chi, parity_xor=xor, ok=(chi == -1) == (xor == 1)
    )


@dataclass
class KummerReport:
    """Square-class data for the discriminants D_1..D_r over F_p."""

    p: int
    c: int
    x0: int
    portrait: Portrait
    case: str
    discs: tuple
    disc_chars: tuple
    gamma_classes: dict
    rank: int
    degree: int
    target: int
    condition_holds: bool
    note: str

    def to_json(self):
        return {
            "p": self.p,
            "c": self.c,
            "x0": self.x0,
            "portrait": {"r": self.portrait.r, "s": self.portrait.s},
            "case": self.case,
            "discs": list(self.discs),
            "disc_chars": list(self.disc_chars),
            "gamma_classes": dict(self.gamma_classes),
            "rank": self.rank,
            "degree": self.degree,
            "target": self.target,
            "condition_holds": self.condition_holds,
            "note": self.note,
        }


def kummer_rank(p, c, x0, portrait=None):
    """Square classes spanned by D_1..D_r and the case's constants over F_p.

    Computes the discriminants D_1 = x0 - c and D_i = f^i(0) - x0, their
    quadratic characters, the characters of the constants the case adjoins
    (-1 for tails s >= 2, 2 for (3, 2) and s = 1), the F_2-rank of the
    spanned subgroup of F_p*/(F_p*)^2, and compares the Kummer degree
    2^rank with the full-index target 2^(r+e), where e = 2 for (3, 2)
    and e = 1 otherwise.

    Raises
    ------
    ValueError
        If the parameter is not strictly preperiodic, the supplied
        portrait does not match, or some D_i vanishes.
    """
    op = orbit_portrait(p, c)
    if op is None:
        raise ValueError(
            f"z^2 + {c} over F_{p} is not strictly preperiodic with r > s >= 1 "
            "(or is the excluded (2, 1) portrait)"
        )
    if portrait is not None and (portrait.r, portrait.s) != (op.r, op.s):
        raise ValueError(
            f"requested portrait {portrait} but the orbit has ({op.r}, {op.s})"
        )
    pt = op.portrait
    case = pt.case
    discs = [(x0 - c) % p]
    discs += [(op.orbit[i - 1] - x0) % p for i in range(2, op.r + 1)]
    if any(d == 0 for d in discs):
        raise ValueError("some D_i vanishes: x0 lies on the critical orbit")

    def char(v):
        return 1 if pow(v % p, (p - 1) // 2, p) == 1 else -1

    disc_chars = tuple(char(d) for d in discs)
    if case == "longtail":
        gamma_classes = {"-1": char(p - 1)}
    elif case == "special":
        gamma_classes = {"-1": char(p - 1), "2": char(2)}
    else:
        gamma_classes = {"2": char(2)}
    rank = 1 if (-1 in disc_chars or -1 in gamma_classes.values()) else 0
    e = 2 if case == "special" else 1
    degree = 2 ** rank
    target = 2 ** (op.r + e)
    return KummerReport(
        p=p,
        c=c,
        x0=x0 % p,
        portrait=pt,
        case=case,
        discs=tuple(discs),
        disc_chars=disc_chars,
        gamma_classes=gamma_classes,
        rank=rank,
        degree=degree,
        target=target,
        condition_holds=degree == target,
        note=(
            "over a finite base field the square-class group has order 2, so "
            "the spanned class group has rank at most 1 and the Kummer degree "
            f"is at most 2 < {target}; the full-index condition cannot hold"
        ),
    )
