"""Tests for the Frobenius probe on labeled preimage trees.

Oracle values: quadratic characters are hand-computed from residue tables
(squares mod 7 are {1, 2, 4}; mod 5 are {1, 4}; mod 11 are {1, 3, 4, 5, 9}),
and the Frobenius sign on a constant is determined by whether the constant
lies in the base field.  The probe's outputs are checked against these.
"""

import functools

import pytest

from arborgroups.automorphisms import TreeAutomorphism
from arborgroups.dynamics import preimage_tree
from arborgroups.fields import build_field
from arborgroups.functionals import Portrait
from arborgroups.labeling import label_tree
from arborgroups.probe import (
    EmbeddingReport,
    KummerReport,
    LevelCharacter,
    check_embedding,
    frobenius_automorphism,
    kummer_rank,
    level_product_character,
)


@functools.lru_cache(maxsize=None)
def labeled(p, c, x0, depth):
    tree = preimage_tree(build_field(p, depth), c, x0, depth)
    work, report = label_tree(tree)
    return work, report


# ---------------------------------------------------------------------------
# frobenius_automorphism


def test_frobenius_depth1_root_parity():
    # f^{-1}(4) = ±sqrt(3) over F_7 and 3 is a non-residue, so the p-power
    # map exchanges the two children
    tree = preimage_tree(build_field(7, 1), 1, 4, 1)
    sigma = frobenius_automorphism(tree, 7)
    assert sigma.par("") == 1


def test_frobenius_respects_values():
    work, _ = labeled(7, 1, 4, 5)
    sigma = frobenius_automorphism(work, 7)
    for w, v in work.nodes.items():
        assert work.value(sigma.apply(w)) == v ** 7
    assert sigma.apply("") == ""


def test_frobenius_identity_at_full_field():
    work, _ = labeled(7, 1, 4, 2)
    q_full = 7 ** work.ctx.m
    assert frobenius_automorphism(work, q_full) == TreeAutomorphism.identity(2)


def test_frobenius_composition():
    for (p, c, x0) in [(7, 1, 4), (5, 2, 0)]:
        tree = preimage_tree(build_field(p, 3), c, x0, 3)
        f1 = frobenius_automorphism(tree, p)
        f2 = frobenius_automorphism(tree, p * p)
        f3 = frobenius_automorphism(tree, p ** 3)
        assert f1 * f1 == f2
        assert f1 * f1 * f1 == f3


def test_frobenius_order_divides_field_degree():
    tree = preimage_tree(build_field(7, 3), 1, 4, 3)
    sigma = frobenius_automorphism(tree, 7)
    assert tree.ctx.m % sigma.order() == 0


def test_frobenius_rejects_bad_q0():
    tree = preimage_tree(build_field(7, 2), 1, 4, 2)
    with pytest.raises(ValueError):
        frobenius_automorphism(tree, 6)
    with pytest.raises(ValueError):
        frobenius_automorphism(tree, 5)
    with pytest.raises(ValueError):
        frobenius_automorphism(tree, 1)


# ---------------------------------------------------------------------------
# check_embedding


def test_embedding_special7_frozen():
    work, rep = labeled(7, 1, 4, 5)
    sigma = frobenius_automorphism(work, 7)
    emb = check_embedding(sigma, work, rep)
    assert emb.membership.in_tmp
    assert emb.membership.p_value == 1  # zeta4 is moved: -1 non-residue mod 7
    assert emb.membership.r_value == 0  # sqrt2 = 3 lies in F_7
    assert emb.signs == {"zeta4": 1, "sqrt2": 0}
    assert emb.p_matches and emb.r_matches
    assert emb.checksum_ok
    assert emb.ok


def test_embedding_special11():
    work, rep = labeled(11, 2, 0, 5)
    sigma = frobenius_automorphism(work, 11)
    emb = check_embedding(sigma, work, rep)
    # -1 and 2 are both non-residues mod 11
    assert emb.signs == {"zeta4": 1, "sqrt2": 1}
    assert emb.membership.p_value == 1 and emb.membership.r_value == 1
    assert emb.ok


def test_embedding_longtail():
    work, rep = labeled(7, 4, 0, 5)  # portrait (4, 2)
    sigma = frobenius_automorphism(work, 7)
    emb = check_embedding(sigma, work, rep)
    assert emb.case == "longtail"
    assert emb.signs == {"zeta4": 1, "sqrt2": None}
    assert emb.membership.p_value == 1
    assert emb.r_matches is None
    assert emb.ok


@pytest.mark.parametrize("params", [(5, 2, 0, 5), (11, 3, 0, 5)])
def test_embedding_shorttail_p_vanishes(params):
    work, rep = labeled(*params)
    sigma = frobenius_automorphism(work, params[0])
    emb = check_embedding(sigma, work, rep)
    assert emb.case == "shorttail"
    # 2 is a non-residue mod 5 and mod 11
    assert emb.signs == {"zeta4": None, "sqrt2": 1}
    assert emb.p_zero
    assert emb.membership.p_value == 0
    assert emb.membership.r_value == 1
    assert emb.ok


def test_embedding_identity_frobenius():
    work, rep = labeled(7, 1, 4, 5)
    q_full = 7 ** work.ctx.m
    sigma = frobenius_automorphism(work, q_full)
    emb = check_embedding(sigma, work, rep, q0=q_full)
    assert sigma == TreeAutomorphism.identity(5)
    assert emb.signs == {"zeta4": 0, "sqrt2": 0}
    assert emb.membership.p_value == 0 and emb.membership.r_value == 0
    assert emb.ok


def test_embedding_detects_non_member():
    work, rep = labeled(7, 1, 4, 5)
    # parity on a single level-4 node makes the P-functional non-constant
    bad = TreeAutomorphism.from_support(5, ["aaaa"])
    emb = check_embedding(bad, work, rep)
    assert not emb.membership.in_tmp
    assert not emb.ok


def test_embedding_checksum_mismatch_raises():
    work, _ = labeled(7, 1, 4, 5)
    _, other_rep = labeled(11, 2, 0, 5)
    sigma = frobenius_automorphism(work, 7)
    with pytest.raises(ValueError):
        check_embedding(sigma, work, other_rep)


def test_embedding_report_json():
    work, rep = labeled(7, 1, 4, 5)
    sigma = frobenius_automorphism(work, 7)
    blob = check_embedding(sigma, work, rep).to_json()
    for key in ("sigma", "q0", "case", "membership", "signs", "ok"):
        assert key in blob
    assert blob["sigma"].startswith("AT")
    assert blob["signs"] == {"zeta4": 1, "sqrt2": 0}
    assert blob["ok"] is True


# ---------------------------------------------------------------------------
# level_product_character


def test_level_character_special7_frozen():
    work, _ = labeled(7, 1, 4, 5)
    sigma = frobenius_automorphism(work, 7)
    expect = {  # n: (D_n as int, chi, parity_xor)
        1: (3, -1, 1),
        2: (5, -1, 1),
        3: (1, +1, 0),
        4: (1, +1, 0),
        5: (1, +1, 0),
    }
    for n, (d, chi, xor) in expect.items():
        lc = level_product_character(work, sigma, n)
        assert lc.d_n == work.ctx.from_int(d)
        assert lc.chi == chi
        assert lc.parity_xor == xor
        assert lc.ok


def test_level_character_shorttail52():
    work, _ = labeled(5, 2, 0, 5)
    sigma = frobenius_automorphism(work, 5)
    expect = {1: (3, -1), 2: (1, +1), 3: (3, -1), 4: (1, +1), 5: (3, -1)}
    for n, (d, chi) in expect.items():
        lc = level_product_character(work, sigma, n)
        assert lc.d_n == work.ctx.from_int(d)
        assert lc.chi == chi
        assert lc.parity_xor == (1 if chi == -1 else 0)
        assert lc.ok


def test_level_character_consistent_on_all_instances():
    for params in [(7, 1, 4, 5), (11, 2, 0, 5), (7, 4, 0, 5), (11, 3, 0, 5)]:
        work, _ = labeled(*params)
        sigma = frobenius_automorphism(work, params[0])
        for n in range(1, work.depth + 1):
            assert level_product_character(work, sigma, n).ok


def test_level_character_identity_sigma():
    # over the full splitting field every base-field constant is a square,
    # so the identity Frobenius is consistent at every level
    work, _ = labeled(7, 1, 4, 5)
    q_full = 7 ** work.ctx.m
    sigma = frobenius_automorphism(work, q_full)
    for n in range(1, 6):
        lc = level_product_character(work, sigma, n, q0=q_full)
        assert lc.chi == 1 and lc.parity_xor == 0 and lc.ok


def test_level_character_range_errors():
    work, _ = labeled(7, 1, 4, 5)
    sigma = frobenius_automorphism(work, 7)
    with pytest.raises(ValueError):
        level_product_character(work, sigma, 0)
    with pytest.raises(ValueError):
        level_product_character(work, sigma, 6)


# ---------------------------------------------------------------------------
# kummer_rank


def test_kummer_special7_frozen():
    rep = kummer_rank(7, 1, 4)
    assert rep.case == "special"
    assert rep.discs == (3, 5, 1)
    assert rep.disc_chars == (-1, -1, 1)
    assert rep.gamma_classes == {"-1": -1, "2": 1}
    assert rep.rank == 1
    assert rep.degree == 2
    assert rep.target == 32  # 2^(r + e) with r = 3, e = 2
    assert rep.condition_holds is False


def test_kummer_shorttail52():
    rep = kummer_rank(5, 2, 0)
    assert rep.case == "shorttail"
    assert rep.discs == (3, 1, 3)
    assert rep.disc_chars == (-1, 1, -1)
    assert rep.gamma_classes == {"2": -1}
    assert rep.rank == 1
    assert rep.degree == 2
    assert rep.target == 16  # 2^(3 + 1)
    assert rep.condition_holds is False


def test_kummer_longtail74():
    rep = kummer_rank(7, 4, 0)
    assert rep.case == "longtail"
    assert rep.discs == (3, 6, 5, 1)
    assert rep.disc_chars == (-1, -1, -1, 1)
    assert rep.gamma_classes == {"-1": -1}
    assert rep.rank == 1
    assert rep.degree == 2
    assert rep.target == 32  # 2^(4 + 1)
    assert rep.condition_holds is False


def test_kummer_rank_at_most_one():
    rep7 = kummer_rank(7, 1, 4)
    rep5 = kummer_rank(5, 2, 0)
    rep11 = kummer_rank(11, 2, 0)
    for rep in (rep7, rep5, rep11):
        assert rep.rank <= 1
        assert rep.degree < rep.target
        assert rep.condition_holds is False
        assert rep.note


def test_kummer_validation():
    with pytest.raises(ValueError):
        kummer_rank(7, 1, 4, portrait=Portrait(4, 2))  # portrait mismatch
    with pytest.raises(ValueError):
        kummer_rank(7, 1, 1)  # x0 on the critical orbit: D_i = 0
    with pytest.raises(ValueError):
        kummer_rank(7, 0, 3)  # c = 0 is periodic, no strictly preperiodic orbit


def test_kummer_json():
    blob = kummer_rank(7, 1, 4).to_json()
    for key in (
        "p", "c", "x0", "portrait", "case", "discs", "disc_chars",
        "gamma_classes", "rank", "degree", "target", "condition_holds", "note",
    ):
        assert key in blob
    assert blob["portrait"] == {"r": 3, "s": 2}
    assert blob["condition_holds"] is False
