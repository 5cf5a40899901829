"""Kernel-level checks: both execution paths agree, enumeration order is
deterministic, and the backtracking enumerators match vectorised brute
force."""

import itertools
import os
import subprocess
import sys

import numpy as np

from nufix import kernels
from nufix.posets import all_posets_upto, chain, validate_poset


def random_order(rng, n):
    leq = np.eye(n, dtype=np.bool_)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                leq[i, j] = True
    return kernels.transitive_closure(leq)


def test_closure_matches_loop_reference():
    rng = np.random.RandomState(7)
    for _ in range(30):
        n = rng.randint(0, 9)
        rel = rng.rand(n, n) < 0.2
        out = kernels.transitive_closure(rel)
        ref = kernels._closure_numpy(np.asarray(rel, dtype=np.bool_))
        loops = kernels._closure_loops(np.asarray(rel, dtype=np.bool_))
        assert np.array_equal(out, ref)
        assert np.array_equal(out, loops)


def test_jit_and_python_paths_agree():
    import random

    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(0, 5)
        m = rng.randint(1, 4)
        leq_dom = random_order(rng, n)
        leq_cod = random_order(rng, m)
        order = kernels.linear_extension(leq_dom)
        forced = np.full(n, -1, dtype=np.int32)
        limit = m ** max(n, 1) + 1
        py = kernels._enum_monotone(leq_dom, leq_cod, order, forced, limit)
        via_dispatch = kernels.enum_monotone_tables(leq_dom, leq_cod, limit)
        assert np.array_equal(py, via_dispatch)

        above = (leq_dom.sum(axis=1) - 1).astype(np.int64)
        uorder = np.argsort(above, kind="stable").astype(np.int32)
        py_up = kernels._enum_upsets(leq_dom, uorder, (1 << n) + 1)
        assert np.array_equal(py_up, kernels.enum_upsets(leq_dom, (1 << n) + 1))


def test_python_fallback_subprocess():
    code = (
        "import os; os.environ['NUFIX_NUMBA']='0';"
        "from nufix import kernels; import numpy as np;"
        "assert kernels.KERNEL_BACKEND == 'python';"
        "leq = np.triu(np.ones((3,3), dtype=bool));"
        "t = kernels.enum_monotone_tables(leq, leq, 50);"
        "print(len(t))"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True,
        env={**os.environ, "NUFIX_NUMBA": "0"},
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "10"  # monotone selfmaps of the 3-chain


def test_monotone_enumeration_matches_bruteforce():
    shapes = all_posets_upto(3)
    for p in shapes:
        for q in shapes:
            limit = max(1, len(q)) ** max(1, len(p)) + 1
            tables = kernels.enum_monotone_tables(p.leq, q.leq, limit)
            assert len(tables) == kernels.count_monotone_bruteforce(p.leq, q.leq)
            seen = {tuple(map(int, row)) for row in tables}
            assert len(seen) == len(tables)
            for row in tables:
                assert kernels.monotone_ok(p.leq, q.leq, row)


def test_upset_enumeration_matches_bruteforce():
    for p in all_posets_upto(4):
        masks = kernels.enum_upsets(p.leq, (1 << len(p)) + 1)
        assert len(masks) == kernels.count_upsets_bruteforce(p.leq)
        # empty set first, everything distinct
        if len(masks):
            assert not masks[0].any()
        seen = {row.tobytes() for row in masks}
        assert len(seen) == len(masks)


def test_enumeration_respects_limit():
    five = chain(5)
    tables = kernels.enum_monotone_tables(five.leq, five.leq, 7)
    assert len(tables) == 7
    masks = kernels.enum_upsets(five.leq, 3)
    assert len(masks) == 3


def test_enumeration_deterministic():
    p = chain(3)
    a = kernels.enum_monotone_tables(p.leq, p.leq, 100)
    b = kernels.enum_monotone_tables(p.leq, p.leq, 100)
    assert np.array_equal(a, b)


def test_find_isomorphism_against_permutation_search():
    import random

    rng = random.Random(3)
    shapes = all_posets_upto(4)
    cases = [(p, q) for p in shapes for q in shapes if len(p) == len(q)]
    rng.shuffle(cases)
    for p, q in cases[:60]:
        got = kernels.find_isomorphism(p.leq, q.leq)
        n = len(p)
        brute = None
        for perm in itertools.permutations(range(n)):
            perm = np.array(perm, dtype=np.int32)
            if np.array_equal(q.leq[perm][:, perm], p.leq):
                brute = perm
                break
        assert (got is None) == (brute is None)
        if got is not None:
            assert np.array_equal(q.leq[got][:, got], p.leq)


def test_find_isomorphism_medium_sizes():
    # relabelled 8-element lattice against itself and against a non-iso order
    cube = validate_poset(
        [f"{i}{j}{k}" for i in "01" for j in "01" for k in "01"],
        [
            (a, b)
            for a in [f"{i}{j}{k}" for i in "01" for j in "01" for k in "01"]
            for b in [f"{i}{j}{k}" for i in "01" for j in "01" for k in "01"]
            if all(x <= y for x, y in zip(a, b))
        ],
        "000",
    )
    shuffled = validate_poset(
        list("abcdefgh"),
        [
            ("a", x) for x in "bcdefgh"
        ] + [("b", "e"), ("b", "f"), ("c", "e"), ("c", "g"), ("d", "f"), ("d", "g"),
             ("e", "h"), ("f", "h"), ("g", "h")],
        "a",
    )
    assert kernels.find_isomorphism(cube.leq, shuffled.leq) is not None
    eight = chain(8)
    assert kernels.find_isomorphism(cube.leq, eight.leq) is None
    got = kernels.find_isomorphism(eight.leq, eight.leq)
    assert got is not None and np.array_equal(got, np.arange(8))
