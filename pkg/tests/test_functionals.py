"""Tests for the mod-2 parity functionals and membership predicates.

Oracle route: every functional is re-derived here as an explicit sum of
`par` values over enumerated words, independent of the packed-mask
evaluation used by the library.
"""

import random

import pytest

from arborgroups.automorphisms import TreeAutomorphism, level_words
from arborgroups.functionals import (
    MembershipError,
    Portrait,
    VacuousWindowError,
    membership,
    p_a,
    p_anchors,
    p_b,
    p_value,
    r32,
    r_anchors,
    r_r1,
    r_value,
    sample_member,
    v32,
)


def ref_p_a(sig, x, r, s):
    total = 0
    for w in level_words(r - 1):
        total ^= sig.par(x + "a" + w)
    for w in level_words(s - 1):
        total ^= sig.par(x + "b" + w)
    return total


def ref_p_b(sig, x, r, s):
    total = 0
    for w in level_words(r - 1):
        total ^= sig.par(x + "b" + w)
    for w in level_words(s - 1):
        total ^= sig.par(x + "a" + w)
    return total


def ref_v32(sig, y):
    total = 0
    for w in level_words(2):
        total ^= sig.par(y + w)
    for w in level_words(1):
        total ^= sig.par(y + w)
    return total


def ref_r32(sig, x):
    total = 0
    for w in level_words(2):
        total ^= sig.par(x + w) ^ sig.par(x + w + "b")
        for t in "ab":
            total ^= sig.par(x + w + "a" + t)
    qa = sig.par(x + "aa") ^ sig.par(x + "ab")
    qb = sig.par(x + "ba") ^ sig.par(x + "bb")
    return total ^ (qa & qb)


def ref_r_r1(sig, x, r):
    total = sig.par(x + "a") & sig.par(x + "b")
    for w in level_words(r - 2):
        total ^= sig.par(x + "ab" + w) ^ sig.par(x + "bb" + w)
    return total


SPECIAL = Portrait(3, 2)
SHORT31 = Portrait(3, 1)
LONG42 = Portrait(4, 2)


def test_portrait_cases():
    assert SPECIAL.case == "special"
    assert SHORT31.case == "shorttail"
    assert LONG42.case == "longtail"
    assert Portrait(5, 2).case == "longtail"
    assert Portrait(4, 1).case == "shorttail"
    assert Portrait(2, 1).case == "chebyshev"
    with pytest.raises(ValueError):
        Portrait(2, 3)
    with pytest.raises(ValueError):
        Portrait(3, 0)


def test_frozen_values_on_generator_like_element():
    # element supported on {aa, baa, bbaa} at depth 5
    sig = TreeAutomorphism.from_support(5, ["aa", "baa", "bbaa"])
    assert p_a(sig, "", SPECIAL) == 0
    assert p_b(sig, "", SPECIAL) == 0  # 1 (from baa) + 1 (from aa)
    assert v32(sig, "b") == 1  # the single hit is par(baa)
    assert r32(sig, "") == 0


def test_functionals_match_reference_random():
    rng = random.Random(21)
    for _ in range(60):
        sig = TreeAutomorphism.random(5, rng)
        for x in ["", "a", "b"]:
            assert p_a(sig, x, SPECIAL) == ref_p_a(sig, x, 3, 2)
            assert p_b(sig, x, SPECIAL) == ref_p_b(sig, x, 3, 2)
            assert p_a(sig, x, SHORT31) == ref_p_a(sig, x, 3, 1)
            assert p_b(sig, x, SHORT31) == ref_p_b(sig, x, 3, 1)
            assert r_r1(sig, x, 3) == ref_r_r1(sig, x, 3)
        assert p_a(sig, "", LONG42) == ref_p_a(sig, "", 4, 2)
        assert r32(sig, "") == ref_r32(sig, "")
        for y in ["", "a", "b", "aa", "bb"]:
            assert v32(sig, y) == ref_v32(sig, y)


def test_anchor_windows():
    assert list(p_anchors(5, 3)) == ["", "a", "b"]
    assert list(p_anchors(5, 4)) == [""]
    assert list(p_anchors(4, 4)) == []
    assert list(r_anchors(5, SPECIAL)) == [""]
    assert list(r_anchors(6, SPECIAL)) == ["", "a", "b"]
    assert list(r_anchors(5, SHORT31)) == ["", "a", "b"]
    assert list(r_anchors(5, LONG42)) == []


def test_window_bounds_enforced():
    sig = TreeAutomorphism.identity(5)
    with pytest.raises(ValueError):
        p_a(sig, "aa", SPECIAL)  # level 2 anchor needs depth >= 6
    with pytest.raises(ValueError):
        r32(sig, "a")  # needs depth >= 6
    with pytest.raises(ValueError):
        r_r1(sig, "aa", 3)


def test_membership_identity_and_root_swap():
    e = TreeAutomorphism.identity(5)
    rep = membership(e, SPECIAL)
    assert rep.in_mp and rep.in_bp and rep.in_tmp and rep.in_tbp
    assert rep.p_value == 0 and rep.r_value == 0
    assert rep.h_value == (0, 0)
    assert rep.violations == []

    tau = TreeAutomorphism.root_swap(5)
    rep = membership(tau, SPECIAL)
    # root swap has parity only at the root: all functionals vanish
    assert rep.in_tbp


def test_membership_violations_reported():
    # parity at node "aaa" contributes to P^a at the root only
    sig = TreeAutomorphism.from_support(5, ["aaa"])
    rep = membership(sig, SPECIAL)
    assert not rep.in_mp
    assert any(v["kind"] == "p_mismatch" and v["node"] == "" for v in rep.violations)
    assert rep.p_value is None


def test_membership_vacuous_depth():
    sig = TreeAutomorphism.random(3, random.Random(2))
    rep = membership(sig, LONG42)
    assert rep.in_tbp and rep.p_vacuous
    assert rep.p_value is None and rep.h_value is None
    with pytest.raises(VacuousWindowError):
        p_value(sig, LONG42)


def test_p_value_errors_for_non_member():
    sig = TreeAutomorphism.from_support(5, ["aaa"])
    with pytest.raises(MembershipError):
        p_value(sig, SPECIAL)


def test_shorttail_membership_forces_p_zero():
    rng = random.Random(31)
    for _ in range(10):
        sig = sample_member(SHORT31, 5, "tMp", rng)
        rep = membership(sig, SHORT31)
        assert rep.in_tmp and rep.in_bp
        assert rep.p_value == 0


def test_chebyshev_membership_rejected():
    with pytest.raises(ValueError):
        membership(TreeAutomorphism.identity(3), Portrait(2, 1))


# ----------------------------------------------------------------------
# cocycle identities (small seeded suites; the full 10^3 battery runs in
# the acceptance tests)


def test_p_cocycle_identity():
    # P(sig) + P^a(tau, x) = P^a(sig tau, x) for sig in the constancy group
    rng = random.Random(43)
    for portrait in (SPECIAL, SHORT31, LONG42):
        for _ in range(25):
            sig = sample_member(portrait, 5, "Mp", rng)
            tau = TreeAutomorphism.random(5, rng)
            pv = p_value(sig, portrait)
            for x in p_anchors(5, portrait.r):
                assert p_a(sig * tau, x, portrait) == pv ^ p_a(tau, x, portrait)
                assert p_b(sig * tau, x, portrait) == pv ^ p_b(tau, x, portrait)


def test_r32_cocycle_identity():
    rng = random.Random(47)
    for _ in range(25):
        sig = sample_member(SPECIAL, 5, "tMp", rng)
        tau = TreeAutomorphism.random(5, rng)
        rv = r_value(sig, SPECIAL)
        for x in r_anchors(5, SPECIAL):
            assert r32(sig * tau, x) == rv ^ r32(tau, x)


def test_r_r1_cocycle_identity():
    rng = random.Random(53)
    for _ in range(25):
        sig = sample_member(SHORT31, 5, "tMp", rng)
        tau = TreeAutomorphism.random(5, rng)
        rv = r_value(sig, SHORT31)
        for x in r_anchors(5, SHORT31):
            assert r_r1(sig * tau, x, 3) == rv ^ r_r1(tau, x, 3)


def test_value_additivity_on_members():
    rng = random.Random(59)
    for portrait, variant in ((SPECIAL, "tMp"), (SHORT31, "tMp"), (LONG42, "Mp")):
        for _ in range(15):
            sig = sample_member(portrait, 5, variant, rng)
            tau = sample_member(portrait, 5, variant, rng)
            prod = sig * tau
            rep = membership(prod, portrait)
            assert rep.in_tmp
            if portrait.case != "shorttail":
                assert p_value(prod, portrait) == p_value(sig, portrait) ^ p_value(tau, portrait)
            if portrait.case != "longtail":
                assert r_value(prod, portrait) == r_value(sig, portrait) ^ r_value(tau, portrait)
