"""Hot combinatorial kernels: closure, table/upset enumeration, iso search.

Each backtracking kernel is written once in nopython-friendly form and
compiled with numba when available.  Setting NUFIX_NUMBA=0 (or running
without numba installed) selects the interpreted fallback; both paths run
the same code and emit identical arrays in identical order, so results are
reproducible regardless of backend.  benchmarks/bench_kernels.py compares
the two paths.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("NUFIX_NUMBA", "").strip().lower()
_WANT_JIT = _env not in ("0", "off", "false", "no")

if _WANT_JIT:
    try:
        from numba import njit as _njit

        KERNEL_BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _njit = None
        KERNEL_BACKEND = "python"
else:
    _njit = None
    KERNEL_BACKEND = "python"


def _maybe_jit(fn):
    if KERNEL_BACKEND == "numba":
        return _njit(cache=True)(fn)
    return fn


# --------------------------------------------------------------------------
# transitive closure


def _closure_loops(rel):
    n = rel.shape[0]
    out = rel.copy()
    for i in range(n):
        out[i, i] = True
    for k in range(n):
        for i in range(n):
            if out[i, k]:
                for j in range(n):
                    if out[k, j]:
                        out[i, j] = True
    return out


_closure_jit = _maybe_jit(_closure_loops)


def _closure_numpy(rel):
    out = rel.copy()
    np.fill_diagonal(out, True)
    for k in range(out.shape[0]):
        out |= out[:, k : k + 1] & out[k : k + 1, :]
    return out


def transitive_closure(rel):
    """Reflexive-transitive closure of a boolean relation matrix."""
    rel = np.ascontiguousarray(rel, dtype=np.bool_)
    if KERNEL_BACKEND == "numba":
        return _closure_jit(rel)
    return _closure_numpy(rel)


# --------------------------------------------------------------------------
# monotone table enumeration


def _enum_monotone(leq_dom, leq_cod, order, forced, limit):
    n = leq_dom.shape[0]
    m = leq_cod.shape[0]
    out = np.empty((limit, n), dtype=np.int32)
    if n == 0:
        if limit > 0:
            return out[:1]
        return out[:0]
    if m == 0 or limit == 0:
        return out[:0]
    count = 0
    val = np.full(n, -1, dtype=np.int32)
    cand = np.full(n, -1, dtype=np.int32)
    pos = 0
    while pos >= 0:
        e = order[pos]
        nxt = -1
        c = cand[pos] + 1
        f = forced[e]
        if f >= 0:
            if c <= f:
                ok = True
                for q in range(pos):
                    d = order[q]
                    if leq_dom[d, e] and not leq_cod[val[d], f]:
                        ok = False
                        break
                if ok:
                    nxt = f
        else:
            while c < m:
                ok = True
                for q in range(pos):
                    d = order[q]
                    if leq_dom[d, e] and not leq_cod[val[d], c]:
                        ok = False
                        break
                if ok:
                    nxt = c
                    break
                c += 1
        if nxt < 0:
            cand[pos] = -1
            val[e] = -1
            pos -= 1
            continue
        cand[pos] = nxt
        val[e] = nxt
        if pos == n - 1:
            for t in range(n):
                out[count, t] = val[t]
            count += 1
            if count >= limit:
                break
        else:
            pos += 1
            cand[pos] = -1
    return out[:count]


_enum_monotone_jit = _maybe_jit(_enum_monotone)


def linear_extension(leq):
    """Element indices ordered so that x <= y implies x comes first."""
    below = leq.sum(axis=0)
    return np.argsort(below, kind="stable").astype(np.int32)


def enum_monotone_tables(leq_dom, leq_cod, limit, forced=None):
    """Up to `limit` monotone tables dom -> cod, deterministic order.

    `forced[i] >= 0` pins element i of the domain to that codomain index
    (used for bottom-strictness).  Tables come out int32 of shape (k, n).
    """
    leq_dom = np.ascontiguousarray(leq_dom, dtype=np.bool_)
    leq_cod = np.ascontiguousarray(leq_cod, dtype=np.bool_)
    n = leq_dom.shape[0]
    if forced is None:
        forced = np.full(n, -1, dtype=np.int32)
    else:
        forced = np.ascontiguousarray(forced, dtype=np.int32)
    order = linear_extension(leq_dom)
    fn = _enum_monotone_jit if KERNEL_BACKEND == "numba" else _enum_monotone
    return fn(leq_dom, leq_cod, order, forced, int(limit))


def monotone_ok(leq_dom, leq_cod, table):
    """Check that `table` is a monotone assignment dom -> cod."""
    table = np.asarray(table, dtype=np.int64)
    if table.shape[0] != leq_dom.shape[0]:
        return False
    if table.shape[0] == 0:
        return True
    if table.min() < 0 or table.max() >= leq_cod.shape[0]:
        return False
    return bool(leq_cod[table[:, None], table[None, :]][leq_dom].all())


def count_monotone_bruteforce(leq_dom, leq_cod, strict_pair=None):
    """Brute-force oracle: count monotone tables by filtering the full
    |cod|**|dom| grid with vectorised checks.  Independent of the
    backtracking enumerator; used by the law suites."""
    n = leq_dom.shape[0]
    m = leq_cod.shape[0]
    if n == 0:
        return 1
    if m == 0:
        return 0
    grids = np.indices((m,) * n).reshape(n, -1)
    keep = np.ones(grids.shape[1], dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            if leq_dom[i, j]:
                keep &= leq_cod[grids[i], grids[j]]
    if strict_pair is not None:
        bd, bc = strict_pair
        keep &= grids[bd] == bc
    return int(keep.sum())


# --------------------------------------------------------------------------
# upset enumeration


def _enum_upsets(leq, order, limit):
    n = leq.shape[0]
    out = np.zeros((limit, n), dtype=np.bool_)
    count = 0
    if n == 0:
        if limit > 0:
            count = 1
        return out[:count]
    if limit == 0:
        return out[:0]
    inc = np.zeros(n, dtype=np.bool_)
    choice = np.full(n, -1, dtype=np.int8)
    pos = 0
    while pos >= 0:
        if pos == n:
            for t in range(n):
                out[count, t] = inc[t]
            count += 1
            if count >= limit:
                break
            pos -= 1
            continue
        e = order[pos]
        ch = choice[pos]
        if ch == -1:
            inc[e] = False
            choice[pos] = 0
            pos += 1
            if pos < n:
                choice[pos] = -1
        elif ch == 0:
            ok = True
            for u in range(n):
                if u != e and leq[e, u] and not inc[u]:
                    ok = False
                    break
            if ok:
                inc[e] = True
                choice[pos] = 1
                pos += 1
                if pos < n:
                    choice[pos] = -1
            else:
                choice[pos] = -1
                pos -= 1
        else:
            inc[e] = False
            choice[pos] = -1
            pos -= 1
    return out[:count]


_enum_upsets_jit = _maybe_jit(_enum_upsets)


def enum_upsets(leq, limit):
    """Up to `limit` up-closed subsets as boolean masks, empty set first."""
    leq = np.ascontiguousarray(leq, dtype=np.bool_)
    above = (leq.sum(axis=1) - 1).astype(np.int64)
    order = np.argsort(above, kind="stable").astype(np.int32)
    fn = _enum_upsets_jit if KERNEL_BACKEND == "numba" else _enum_upsets
    return fn(leq, order, int(limit))


def count_upsets_bruteforce(leq):
    """Brute-force oracle: filter all 2**n subsets for up-closure."""
    n = leq.shape[0]
    count = 0
    strict = leq.copy()
    np.fill_diagonal(strict, False)
    for mask in range(1 << n):
        members = np.array([(mask >> i) & 1 for i in range(n)], dtype=np.bool_)
        if not (members[:, None] & strict & ~members[None, :]).any():
            count += 1
    return count


# --------------------------------------------------------------------------
# isomorphism search


def _iso_backtrack(leq_a, leq_b, order, cand_flat, cand_off):
    n = leq_a.shape[0]
    mapped = np.full(n, -1, dtype=np.int32)
    used = np.zeros(n, dtype=np.bool_)
    choice = np.full(n, -1, dtype=np.int32)
    pos = 0
    while True:
        if pos == n:
            return mapped
        i = order[pos]
        lo = cand_off[i]
        hi = cand_off[i + 1]
        nxt = -1
        t = lo + choice[pos] + 1
        while t < hi:
            j = cand_flat[t]
            if not used[j]:
                ok = True
                for q in range(pos):
                    a2 = order[q]
                    b2 = mapped[a2]
                    if leq_a[i, a2] != leq_b[j, b2] or leq_a[a2, i] != leq_b[b2, j]:
                        ok = False
                        break
                if ok:
                    nxt = t - lo
                    break
            t += 1
        if nxt < 0:
            choice[pos] = -1
            pos -= 1
            if pos < 0:
                return mapped[:0]
            i2 = order[pos]
            used[mapped[i2]] = False
            mapped[i2] = -1
        else:
            choice[pos] = nxt
            j = cand_flat[lo + nxt]
            mapped[i] = j
            used[j] = True
            pos += 1
            if pos < n:
                choice[pos] = -1


_iso_backtrack_jit = _maybe_jit(_iso_backtrack)

_MIX = 0x9E3779B97F4A7C15
_MASK = (1 << 63) - 1


def _mix(x):
    return ((x ^ (x >> 31)) * _MIX) & _MASK


def invariant_labels(leq):
    """Structure-only integer labels (degree + neighbourhood refinement).

    Iso-invariant by construction: equal posets get equal label multisets,
    and corresponding nodes of isomorphic posets get equal labels.  Used to
    prune the backtracking search; soundness never depends on them.
    """
    n = leq.shape[0]
    below = leq.sum(axis=0).astype(np.int64)
    above = leq.sum(axis=1).astype(np.int64)
    labels = [(int(below[i]) << 20) ^ int(above[i]) for i in range(n)]
    for _ in range(3):
        new = []
        for i in range(n):
            up = 0
            down = 0
            for j in range(n):
                if j == i:
                    continue
                if leq[i, j]:
                    up = (up + _mix(labels[j])) & _MASK
                if leq[j, i]:
                    down = (down + _mix(labels[j])) & _MASK
            new.append(_mix(labels[i] ^ _mix(up) ^ _mix(_mix(down))))
        labels = new
    return np.array(labels, dtype=np.int64)


def find_isomorphism(leq_a, leq_b):
    """Order-isomorphism a -> b as an index permutation, or None.

    Complete (pruning uses iso-invariant labels only) and sound (the final
    mapping is fully re-verified).
    """
    leq_a = np.ascontiguousarray(leq_a, dtype=np.bool_)
    leq_b = np.ascontiguousarray(leq_b, dtype=np.bool_)
    n = leq_a.shape[0]
    if leq_b.shape[0] != n:
        return None
    if n == 0:
        return np.zeros(0, dtype=np.int32)
    if np.array_equal(leq_a, leq_b):
        return np.arange(n, dtype=np.int32)
    la = invariant_labels(leq_a)
    lb = invariant_labels(leq_b)
    if sorted(la.tolist()) != sorted(lb.tolist()):
        return None
    buckets = {}
    for j in range(n):
        buckets.setdefault(int(lb[j]), []).append(j)
    cand_lists = []
    for i in range(n):
        c = buckets.get(int(la[i]), [])
        if not c:
            return None
        cand_lists.append(c)
    order = np.array(
        sorted(range(n), key=lambda i: (len(cand_lists[i]), i)), dtype=np.int32
    )
    cand_off = np.zeros(n + 1, dtype=np.int32)
    for i in range(n):
        cand_off[i + 1] = cand_off[i] + len(cand_lists[i])
    cand_flat = np.array(
        [j for c in cand_lists for j in c], dtype=np.int32
    )
    fn = _iso_backtrack_jit if KERNEL_BACKEND == "numba" else _iso_backtrack
    perm = fn(leq_a, leq_b, order, cand_flat, cand_off)
    if perm.shape[0] != n:
        return None
    if not np.array_equal(leq_b[perm][:, perm], leq_a):  # pragma: no cover
        raise AssertionError("iso search produced an unverified mapping")
    return perm


def warm_up():
    """Force JIT compilation of all kernels on a tiny input."""
    leq = np.array([[True, True], [False, True]])
    transitive_closure(np.array([[False, True], [False, False]]))
    enum_monotone_tables(leq, leq, 16)
    enum_upsets(leq, 16)
    find_isomorphism(leq, np.array([[True, False], [True, True]]))
