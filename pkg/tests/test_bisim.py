"""Bisimulation-lab checks: the two game engines, quotients, relation
lifting coincidences, behavioural equivalence."""

import itertools

import pytest

from nufix import bisim as B
from nufix import engine as E
from nufix import functors as F
from nufix import posets as P
from nufix.errors import (
    NotABisimulation,
    NotEquivalence,
    SizeCapExceeded,
    ValueSetMismatch,
)

VALUES = ["p", "q"]


def mk(states, behaviour, values=VALUES):
    return B.LtsSpec(values, states, behaviour)


def output_lts(values):
    return mk(values, {p: (B.OUTPUT, p) for p in values}, values)


# --------------------------------------------------------------------------
# value bisimulation (the plain game)


def test_outputs_give_identity_relation():
    lts = output_lts(["p1", "p2", "p3", "p4"])
    rel = B.value_bisim(lts, lts)
    assert rel.pairs == frozenset((p, p) for p in lts.states)


def test_identical_loops_fully_related():
    l1 = mk(["x"], {"x": (B.INPUT, {"p": "x", "q": "x"})})
    l2 = mk(["y"], {"y": (B.INPUT, {"p": "y", "q": "y"})})
    rel = B.value_bisim(l1, l2)
    assert rel.pairs == frozenset({("x", "y")})


def test_shape_mismatch_excluded():
    l1 = mk(["x"], {"x": (B.OUTPUT, "p")})
    l2 = mk(["y"], {"y": (B.INPUT, {"p": "y", "q": "y"})})
    assert B.value_bisim(l1, l2).pairs == frozenset()


def test_value_set_mismatch_raises():
    l1 = output_lts(["p"])
    l2 = output_lts(["r"])
    with pytest.raises(ValueSetMismatch):
        B.value_bisim(l1, l2)


def test_greatest_means_no_pair_can_be_added():
    lts = mk(
        ["x", "y", "z"],
        {
            "x": (B.INPUT, {"p": "x", "q": "y"}),
            "y": (B.INPUT, {"p": "x", "q": "z"}),
            "z": (B.OUTPUT, "p"),
        },
    )
    rel = B.value_bisim(lts, lts)
    assert B.is_game_bisim(lts, lts, rel.pairs) is None
    for extra in {(a, b) for a in lts.states for b in lts.states} - rel.pairs:
        assert B.is_game_bisim(lts, lts, rel.pairs | {extra}) is not None


# --------------------------------------------------------------------------
# dimmed bisimulation


def test_identity_approx_degenerates_to_value_bisim():
    for behaviour in _all_behaviours(["x", "y"]):
        lts = mk(["x", "y"], behaviour)
        ident = B.Equivalence.identity(VALUES)
        assert B.dimmed_bisim(lts, lts, ident).pairs == B.value_bisim(lts, lts).pairs


def test_total_approx_relates_all_outputs():
    lts = output_lts(["p1", "p2"])
    total = B.Equivalence.total(["p1", "p2"])
    rel = B.dimmed_bisim(lts, lts, total)
    assert rel.pairs == frozenset(itertools.product(lts.states, lts.states))


def test_dimmed_relates_outputs_across_classes():
    lts = mk(["x", "y"], {"x": (B.OUTPUT, "p"), "y": (B.OUTPUT, "q")})
    total = B.Equivalence.total(VALUES)
    assert ("x", "y") in B.dimmed_bisim(lts, lts, total).pairs


def test_union_of_bisimulations_is_a_bisimulation():
    lts = mk(
        ["x", "y", "z"],
        {
            "x": (B.OUTPUT, "p"),
            "y": (B.OUTPUT, "p"),
            "z": (B.INPUT, {"p": "x", "q": "y"}),
        },
    )
    ident = {(s, s) for s in lts.states}
    swap = ident | {("x", "y"), ("y", "x")}
    assert B.is_game_bisim(lts, lts, ident) is None
    assert B.is_game_bisim(lts, lts, swap) is None
    assert B.is_game_bisim(lts, lts, ident | swap) is None


def test_dimmed_output_is_greatest_fixed_point():
    lts = mk(
        ["x", "y", "z"],
        {
            "x": (B.OUTPUT, "p"),
            "y": (B.OUTPUT, "q"),
            "z": (B.INPUT, {"p": "x", "q": "y"}),
        },
    )
    for approx in (B.Equivalence.identity(VALUES), B.Equivalence.total(VALUES)):
        rel = B.dimmed_bisim(lts, lts, approx)
        assert B.is_game_bisim(lts, lts, rel.pairs, approx) is None
        universe = {(a, b) for a in lts.states for b in lts.states}
        for extra in universe - rel.pairs:
            assert B.is_game_bisim(lts, lts, rel.pairs | {extra}, approx) is not None


def test_not_equivalence_rejected():
    with pytest.raises(NotEquivalence):
        B.Equivalence.from_pairs(VALUES, {("p", "q")})


# --------------------------------------------------------------------------
# quotient


def test_quotient_by_identity_is_isomorphic_copy():
    lts = mk(["x", "y"], {"x": (B.INPUT, {"p": "x", "q": "y"}), "y": (B.OUTPUT, "q")})
    ident_states = B.Equivalence.identity(lts.states)
    ident_vals = B.Equivalence.identity(VALUES)
    coalg = B.quotient(lts, ident_states, ident_vals)
    assert len(coalg.carrier) == len(lts.states)


def test_quotient_collapses_outputs_under_total_approx():
    lts = output_lts(["p1", "p2", "p3", "p4"])
    total = B.Equivalence.total(lts.values)
    rel = B.Relation(lts.states, lts.states, total.as_pairs())
    coalg = B.quotient(lts, rel, total)
    assert len(coalg.carrier) == 1


def test_quotient_validates_against_class_instance():
    lts = mk(
        ["x", "y", "z"],
        {
            "x": (B.INPUT, {"p": "y", "q": "z"}),
            "y": (B.OUTPUT, "p"),
            "z": (B.OUTPUT, "q"),
        },
    )
    total = B.Equivalence.total(VALUES)
    greatest = B.dimmed_bisim(lts, lts, total)
    eq = B.Equivalence.from_pairs(lts.states, greatest.pairs)
    coalg = B.quotient(lts, eq, total)
    # CoalgebraSpec construction re-validates membership and monotonicity
    assert set(coalg.carrier.elements) == set(("cls", b) for b in eq.blocks)


def test_quotient_rejects_non_bisimulations():
    lts = mk(["x", "y"], {"x": (B.OUTPUT, "p"), "y": (B.OUTPUT, "q")})
    ident_vals = B.Equivalence.identity(VALUES)
    glue = B.Equivalence.from_blocks([["x", "y"]])
    with pytest.raises(NotABisimulation):
        B.quotient(lts, glue, ident_vals)


def test_quotient_representative_independence():
    lts = mk(
        ["x", "y", "z"],
        {
            "x": (B.INPUT, {"p": "z", "q": "z"}),
            "y": (B.INPUT, {"p": "z", "q": "z"}),
            "z": (B.OUTPUT, "p"),
        },
    )
    ident_vals = B.Equivalence.identity(VALUES)
    eq = B.Equivalence.from_blocks([["x", "y"], ["z"]])
    coalg = B.quotient(lts, eq, ident_vals)
    assert len(coalg.carrier) == 2


# --------------------------------------------------------------------------
# coalgebraic bisimulation and cross-checks


def _all_behaviours(states, values=VALUES):
    options = []
    for _ in states:
        opts = [(B.OUTPUT, p) for p in values]
        for tgt in itertools.product(states, repeat=len(values)):
            opts.append((B.INPUT, dict(zip(values, tgt))))
        options.append(opts)
    for combo in itertools.product(*options):
        yield dict(zip(states, combo))


def test_coalg_bisim_contains_identity_on_self():
    lts = mk(["x", "y"], {"x": (B.OUTPUT, "p"), "y": (B.INPUT, {"p": "x", "q": "x"})})
    c = B.lts_to_coalgebra(lts)
    rel = B.coalg_bisim(c, c)
    assert {(s, s) for s in lts.states} <= rel.pairs


def test_coalg_bisim_equals_value_bisim_exhaustive():
    states = ["x", "y"]
    inst = B.lts_instance(VALUES)
    for behaviour in _all_behaviours(states):
        lts = mk(states, behaviour)
        coalg = B.lts_to_coalgebra(lts, inst)
        assert B.coalg_bisim(coalg, coalg).pairs == B.value_bisim(lts, lts).pairs


def test_coalg_bisim_on_three_state_instances():
    states = ["x", "y", "z"]
    import random

    rng = random.Random(2)
    inst = B.lts_instance(VALUES)
    behaviours = list(_all_behaviours(states))
    rng.shuffle(behaviours)
    for behaviour in behaviours[:40]:
        lts = mk(states, behaviour)
        coalg = B.lts_to_coalgebra(lts, inst)
        assert B.coalg_bisim(coalg, coalg).pairs == B.value_bisim(lts, lts).pairs


def test_coalg_bisim_yields_equivalence_on_single_coalgebra():
    lts = mk(
        ["x", "y", "z"],
        {
            "x": (B.OUTPUT, "p"),
            "y": (B.OUTPUT, "p"),
            "z": (B.INPUT, {"p": "x", "q": "y"}),
        },
    )
    c = B.lts_to_coalgebra(lts)
    assert B.coalg_bisim(c, c).is_equivalence


def test_stuck_states_related_over_strict_upsets():
    one = P.unit()
    inst = F.instantiate("Us(Id)", F.Backend.POINTED_STRICT, one, one)
    flat = P.lift(P.discrete(["s1", "s2"]))
    stuck = ("upset", ())
    coalg = F.CoalgebraSpec(inst, flat, {x: stuck for x in flat.elements})
    rel = B.coalg_bisim(coalg, coalg)
    assert (("lup", "s1"), ("lup", "s2")) in rel.pairs


# --------------------------------------------------------------------------
# behavioural equivalence


def test_behavioural_equiv_identity_on_final_coalgebra():
    b = P.boolean_lattice()
    inst = F.instantiate("Lift(W)", F.Backend.POINTED_STRICT, b, b)
    seq = E.terminal_sequence(inst)
    fin = E.final_coalgebra(seq)
    coalg = F.CoalgebraSpec(
        inst, fin.carrier, {e: fin.structure(e) for e in fin.carrier.elements}
    )
    eq = B.behavioural_equiv(coalg, fin)
    assert all(len(block) == 1 for block in eq.blocks)


def test_behavioural_equiv_one_block_for_stuck_states():
    one = P.unit()
    inst = F.instantiate("Us(Id)", F.Backend.POINTED_STRICT, one, one)
    seq = E.terminal_sequence(inst)
    fin = E.final_coalgebra(seq)
    flat = P.lift(P.discrete(["s1", "s2"]))
    stuck = ("upset", ())
    coalg = F.CoalgebraSpec(inst, flat, {x: stuck for x in flat.elements})
    eq = B.behavioural_equiv(coalg, fin)
    assert len(eq.blocks) == 1


def test_behavioural_equiv_matches_coalg_bisim_partition():
    b = P.boolean_lattice()
    inst = F.instantiate("Bool + W", F.Backend.POINTED_STRICT, b, b)
    seq = E.terminal_sequence(inst)
    fin = E.final_coalgebra(seq)
    carrier = P.lift(P.discrete(["x", "y", "z"]))
    fc = inst.on_object(carrier)
    structure = {
        carrier.bottom: fc.bottom,
        ("lup", "x"): ("inl", "top"),
        ("lup", "y"): ("inl", "top"),
        ("lup", "z"): ("inr", "top"),
    }
    coalg = F.CoalgebraSpec(inst, carrier, structure)
    eq = B.behavioural_equiv(coalg, fin)
    rel = B.coalg_bisim(coalg, coalg)
    assert eq.as_pairs() == rel.pairs


# --------------------------------------------------------------------------
# the lemma-style coincidence


def test_lemma1_identity_approx_small():
    lts = mk(["x", "y"], {"x": (B.INPUT, {"p": "x", "q": "y"}), "y": (B.OUTPUT, "q")})
    ok, ce = B.lemma1_check(lts, B.Equivalence.identity(VALUES))
    assert ok, ce


def test_lemma1_size_cap():
    lts = output_lts(["p1", "p2", "p3", "p4"])
    with pytest.raises(SizeCapExceeded):
        B.lemma1_check(lts, B.Equivalence.identity(lts.values))


def test_planted_non_bisimulation_rejected_by_both_predicates():
    lts = mk(["x", "y"], {"x": (B.OUTPUT, "p"), "y": (B.OUTPUT, "q")})
    ident = B.Equivalence.identity(VALUES)
    planted = {("x", "y")}
    assert B.is_game_bisim(lts, lts, planted, ident) is not None
    coalg = B.lts_to_coalgebra(lts)
    assert not B.is_lifting_bisim(coalg, coalg, planted, ident.as_pairs())


def test_counterexample_reports_clause_names():
    lts = mk(["x", "y"], {"x": (B.OUTPUT, "p"), "y": (B.OUTPUT, "q")})
    pair, clause = B.is_game_bisim(lts, lts, {("x", "y")})
    assert pair == ("x", "y") and clause == "output-match"
    lts2 = mk(
        ["x", "y"],
        {"x": (B.INPUT, {"p": "x", "q": "x"}), "y": (B.INPUT, {"p": "y", "q": "x"})},
    )
    pair, clause = B.is_game_bisim(lts2, lts2, {("x", "y")})
    assert clause == "input-match"
