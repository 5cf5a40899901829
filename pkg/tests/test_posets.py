"""Order-core checks: constructions, counting invariants, maps, ep-pairs,
iso search, Hasse output, interchange formats."""

import itertools
import json

import numpy as np
import pytest

from nufix import posets as P
from nufix.errors import (
    BottomNotLeast,
    CycleDetected,
    DomainMismatch,
    DuplicateElement,
    ElementCapExceeded,
    EpLawViolation,
    NotPointed,
    SizeCapExceeded,
)


def two_chain():
    return P.validate_poset(["bot", "a"], [("bot", "a")], "bot")


# --------------------------------------------------------------------------
# validate_poset


def test_validate_singleton_pointed():
    p = P.validate_poset(["a"], [], "a")
    assert len(p) == 1 and p.is_pointed and p.bottom == "a"


def test_validate_closure_is_computed():
    p = P.validate_poset(["x", "y", "z"], [("x", "y"), ("y", "z")], "x")
    assert p.leq_tags("x", "z")


def test_validate_cycle_detected():
    with pytest.raises(CycleDetected):
        P.validate_poset(["a", "b"], [("a", "b"), ("b", "a")], None)


def test_validate_duplicates_and_bottom():
    with pytest.raises(DuplicateElement):
        P.validate_poset(["a", "a"], [], None)
    with pytest.raises(BottomNotLeast):
        P.validate_poset(["a", "b"], [], "a")


# --------------------------------------------------------------------------
# boolean lattice and endomap counts


def test_boolean_lattice_shape():
    b = P.boolean_lattice()
    assert len(b) == 2 and b.leq_tags("bot", "top") and not b.leq_tags("top", "bot")


def test_boolean_lattice_endomap_counts():
    b = P.boolean_lattice()
    monotone = strict = 0
    for table in itertools.product(range(2), repeat=2):
        t = np.array(table, dtype=np.int32)
        try:
            m = P.MonoMap(b, b, t)
        except DomainMismatch:
            continue
        monotone += 1
        if t[b.bottom_idx] == b.bottom_idx:
            strict += 1
    assert monotone == 3
    assert strict == 2
    fs = P.fun_space(b, b)
    assert len(fs) == 3
    assert len(P.strict_fun_space(b, b)) == 2


# --------------------------------------------------------------------------
# sums, products, lifts


def test_coalesced_sum_of_units_is_unit():
    one = P.unit()
    s = P.coalesced_sum(one, one)
    assert len(s) == 1 and s.is_pointed


def test_coalesced_sum_of_two_chains():
    c = two_chain()
    s = P.coalesced_sum(c, c)
    assert len(s) == 3
    tops = [e for e in s.elements if e != s.bottom]
    assert not s.leq_tags(tops[0], tops[1]) and not s.leq_tags(tops[1], tops[0])
    assert all(s.leq_tags(s.bottom, t) for t in tops)


def test_coalesced_sum_requires_pointed():
    with pytest.raises(NotPointed):
        P.coalesced_sum(P.discrete(["a"]), P.unit())


def test_lift_of_separated_sum_of_units():
    flat = P.lift(P.separated_sum(P.unit(), P.unit()))
    assert len(flat) == 3 and flat.is_pointed
    non_bot = [e for e in flat.elements if e != flat.bottom]
    assert not flat.leq_tags(non_bot[0], non_bot[1])


def test_size_invariants():
    shapes = [p for p in P.all_posets_upto(3) if len(p)]
    pointed = [q for q in map(P.with_declared_bottom, shapes) if q is not None]
    for p in shapes:
        for q in shapes:
            assert len(P.separated_sum(p, q)) == len(p) + len(q)
            assert len(P.product(p, q)) == len(p) * len(q)
        assert len(P.lift(p)) == len(p) + 1
    for p in pointed:
        for q in pointed:
            assert len(P.coalesced_sum(p, q)) == len(p) + len(q) - 1


def test_product_of_pointed_is_pointed():
    b = P.boolean_lattice()
    pb = P.product(b, b)
    assert pb.is_pointed and pb.bottom == ("pair", "bot", "bot")


# --------------------------------------------------------------------------
# function spaces and upsets


def test_fun_space_examples():
    one, b, c2 = P.unit(), P.boolean_lattice(), two_chain()
    assert len(P.strict_fun_space(one, b)) == 1
    f = P.fun_space(c2, b)
    assert len(f) == 3
    assert P.iso_check(f, P.chain(3)) is not None
    s = P.strict_fun_space(c2, b)
    assert len(s) == 2
    assert P.iso_check(s, P.chain(2)) is not None


def test_upsets_examples():
    one, c2 = P.unit(), two_chain()
    su = P.strict_upsets(one)
    assert len(su) == 1 and su.is_pointed
    u1 = P.upsets(one)
    assert len(u1) == 2
    u2 = P.upsets(c2)
    assert len(u2) == 3 and P.iso_check(u2, P.chain(3)) is not None
    assert u2.bottom == ("upset", ())


def test_upsets_agree_with_bool_valued_maps():
    # the inverse image of top is an order-iso between map spaces and upsets
    b = P.boolean_lattice()
    for p in P.all_posets_upto(5):
        f = P.fun_space(p, b, cap=None)
        u = P.upsets(p, cap=None)
        sent = {}
        for tag in f.elements:
            values = tag[1]
            members = tuple(
                e for e, v in zip(p.elements, values) if v == "top"
            )
            sent[tag] = ("upset", members)
        assert set(sent.values()) == set(u.elements)
        for t1 in f.elements:
            for t2 in f.elements:
                assert f.leq_tags(t1, t2) == u.leq_tags(sent[t1], sent[t2])
        q = P.with_declared_bottom(p)
        if q is not None:
            sf = P.strict_fun_space(q, b, cap=None)
            su = P.strict_upsets(q, cap=None)
            assert len(sf) == len(su)


def test_fun_space_counts_against_bruteforce_small():
    from nufix import kernels

    shapes = P.all_posets_upto(4)
    for p in shapes:
        for q in shapes:
            f = P.fun_space(p, q, cap=None)
            assert len(f) == kernels.count_monotone_bruteforce(p.leq, q.leq)


def test_discrete_and_caps():
    d = P.discrete(["a", "b"])
    assert len(d) == 2 and not d.leq_tags("a", "b") and not d.is_pointed
    assert len(P.discrete([])) == 0
    flat = P.lift(d)
    assert len(flat) == 3 and flat.is_pointed
    with pytest.raises(ElementCapExceeded):
        P.upsets(P.discrete([str(i) for i in range(12)]), cap=100)


# --------------------------------------------------------------------------
# maps, composition, ep-pairs


def test_monomap_rejects_non_monotone():
    c2 = two_chain()
    with pytest.raises(DomainMismatch):
        P.MonoMap(c2, c2, np.array([1, 0], dtype=np.int32))


def test_strict_flag_requires_bottom_preservation():
    b = P.boolean_lattice()
    with pytest.raises(NotPointed):
        P.MonoMap(b, b, np.array([1, 1], dtype=np.int32), strict=True)


def test_compose_keeps_strictness():
    b = P.boolean_lattice()
    f = P.identity(b)
    g = P.MonoMap(b, b, np.array([0, 0], dtype=np.int32), strict=True)
    fg = P.compose(f, g)
    assert fg.strict
    assert fg("top") == "bot"


def test_ep_examples():
    one, b = P.unit(), P.boolean_lattice()
    assert P.ep_check(P.identity(one), P.identity(one))
    bot = P.MonoMap.from_tags(one, b, {"*": "bot"}, strict=True)
    bang = P.MonoMap(b, one, np.zeros(2, dtype=np.int32), strict=True)
    assert P.ep_check(bot, bang)
    top = P.MonoMap.from_tags(one, b, {"*": "top"})
    assert not P.ep_check(top, bang)


def test_ep_implies_injective_embedding_surjective_projection():
    import random

    from nufix.laws import random_ep_chain

    rng = random.Random(5)
    for _ in range(50):
        ep1, ep2 = random_ep_chain(rng, 5)
        for ep in (ep1, ep2, ep1.then(ep2)):
            assert ep.e.is_injective()
            assert ep.p.is_surjective()


def test_bottom_ep_and_as_iso():
    one, b = P.unit(), P.boolean_lattice()
    ep = P.bottom_ep(one, b)
    assert ep.as_iso() is None
    ident = P.identity_ep(b)
    assert ident.as_iso() is not None


# --------------------------------------------------------------------------
# iso_check


def test_iso_check_examples():
    c2 = two_chain()
    u2 = P.upsets(c2)
    assert P.iso_check(u2, P.chain(3)) is not None
    assert P.iso_check(c2, P.discrete(["a", "b"])) is None
    got = P.iso_check(u2, u2)
    assert got is not None and got.forward.is_identity()


def test_iso_check_complete_against_permutations():
    import random

    rng = random.Random(1)
    shapes = [p for p in P.all_posets_upto(4) if len(p) >= 2]
    for _ in range(40):
        p = rng.choice(shapes)
        q = rng.choice(shapes)
        got = P.iso_check(p, q)
        brute = False
        if len(p) == len(q):
            for perm in itertools.permutations(range(len(p))):
                perm = np.array(perm)
                if np.array_equal(q.leq[perm][:, perm], p.leq):
                    brute = True
                    break
        assert (got is not None) == brute


def test_iso_check_complete_on_random_medium_posets():
    import random

    from nufix.laws import random_poset

    rng = random.Random(8)
    for _ in range(15):
        n = rng.randint(5, 6)
        p = random_poset(rng, n)
        q = random_poset(rng, n)
        for a, b in [(p, q), (p, p)]:
            if len(a) != len(b):
                continue
            got = P.iso_check(a, b)
            brute = any(
                np.array_equal(b.leq[np.array(perm)][:, np.array(perm)], a.leq)
                for perm in itertools.permutations(range(len(a)))
            )
            assert (got is not None) == brute


def test_iso_check_size_cap():
    big = P.discrete([str(i) for i in range(9)])
    with pytest.raises(SizeCapExceeded):
        P.iso_check(big, big, cap=8)


def test_iso_validates_witness():
    b = P.boolean_lattice()
    with pytest.raises(EpLawViolation):
        P.Iso(
            P.MonoMap(b, b, np.array([0, 0], dtype=np.int32)),
            P.MonoMap(b, b, np.array([0, 0], dtype=np.int32)),
        )


# --------------------------------------------------------------------------
# hasse / dot / json


def test_hasse_examples():
    assert len(P.hasse(P.chain(3))) == 2
    assert P.hasse(P.discrete(["a", "b"])) == []
    b = P.boolean_lattice()
    assert len(P.hasse(P.product(b, b))) == 4


def test_poset_json_roundtrip():
    c = P.coalesced_sum(two_chain(), P.boolean_lattice())
    obj = P.poset_to_json(c)
    back = P.poset_from_json(json.loads(json.dumps(obj)))
    assert back == c


def test_dot_output_mentions_every_element():
    b = P.boolean_lattice()
    dot = P.poset_to_dot(b, "bool")
    assert "rankdir=BT" in dot
    assert dot.count("->") == 1


def test_all_posets_upto_counts():
    # unlabeled poset counts: 1, 2, 5, 16 for sizes 1..4 (plus the empty one)
    shapes = P.all_posets_upto(4)
    by_size = {}
    for p in shapes:
        by_size.setdefault(len(p), []).append(p)
    assert [len(by_size.get(k, [])) for k in range(5)] == [1, 1, 2, 5, 16]
