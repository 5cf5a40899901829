"""The inclusion of pointed strict structures into the plain world, its
left adjoint (freely adding a bottom), and the stagewise comparison of the
two final sequences for lazy-shaped families.

A lazy family is an upset-free expression under an outermost Lift whose
sums are separated: the same formula is an endofunctor both on pointed
posets with strict maps and on plain posets.  `solve_lifted` runs the
ep-chain sequence on the pointed side and the plain projection-only
sequence on the other, then checks stage by stage that the inclusion
carries one onto the other; that is the finite observable content of
"final invariants lift along the inclusion".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .engine import SeqStatus, terminal_sequence
from .errors import (
    ElementCapExceeded,
    InputError,
    NotCovariant,
    NotPointed,
)
from .functors import (
    Backend,
    FunctorInstance,
    LiftF,
    has_strict_nodes,
    has_upset_nodes,
    parse,
    pretty,
)
from .posets import (
    DEFAULT_ELEMENT_CAP,
    FinPoset,
    Iso,
    MonoMap,
    iso_check,
    lift,
)


def include(p):
    """Forget pointedness: the same order with no declared bottom."""
    p.require_pointed("include")
    return FinPoset(p.elements, p.leq, None)


def lift_left_adjoint(p):
    """Freely add a bottom; left adjoint to `include`."""
    return lift(p)


def transpose(f, p, q):
    """Strict map lift(P) -> Q to its adjunct P -> include(Q)."""
    inc = include(q)
    table = np.array(
        [f.table[f.dom.index(("lup", x))] for x in p.elements], dtype=np.int32
    )
    return MonoMap(p, inc, table)


def untranspose(g, p, q):
    """Monotone map P -> include(Q) to its strict adjunct lift(P) -> Q."""
    lp = lift(p)
    table = np.empty(len(lp), dtype=np.int32)
    table[0] = q.bottom_idx
    for i, x in enumerate(p.elements):
        table[lp.index(("lup", x))] = g.table[i]
    return MonoMap(lp, q, table, strict=True)


def adjunction_check(p, q, cap=64):
    """Verify the hom-set bijection strict(lift(P), Q) ~ mono(P, include(Q))
    by exhaustive enumeration of both sides and the explicit transposes."""
    q.require_pointed("adjunction_check")
    if len(p) > cap or len(q) > cap:
        from .errors import SizeCapExceeded

        raise SizeCapExceeded("adjunction_check is exhaustive; inputs are capped")
    lp = lift(p)
    inc = include(q)
    forced = np.full(len(lp), -1, dtype=np.int32)
    forced[lp.bottom_idx] = q.bottom_idx
    limit = max(1, len(q)) ** max(1, len(lp)) + 1
    strict_tables = kernels.enum_monotone_tables(lp.leq, q.leq, limit, forced)
    mono_limit = max(1, len(inc)) ** max(1, len(p)) + 1
    mono_tables = kernels.enum_monotone_tables(p.leq, inc.leq, mono_limit)
    if len(strict_tables) != len(mono_tables):
        return False
    seen = set()
    for row in strict_tables:
        f = MonoMap(lp, q, np.array(row, dtype=np.int32), strict=True)
        g = transpose(f, p, q)
        if untranspose(g, p, q) != f:
            return False
        seen.add(g.table.tobytes())
    if len(seen) != len(strict_tables):
        return False
    for row in mono_tables:
        g = MonoMap(p, inc, np.array(row, dtype=np.int32))
        f = untranspose(g, p, q)
        if transpose(f, p, q) != g:
            return False
    return True


# --------------------------------------------------------------------------
# the two-backend sequence comparison


@dataclass
class PlainSequence:
    """A final sequence in the plain backend: connecting projections only,
    built from the unique map F(1) -> 1 by the covariant map action."""

    inst: FunctorInstance
    stages: list
    projs: list
    status: SeqStatus


def plain_terminal_sequence(inst, inner_budget=8):
    from .posets import unit

    one = unit()
    # the plain backend sees the one-point poset as an ordinary object
    one = FinPoset(one.elements, one.leq, None)
    stages = [one]
    projs = []
    status = SeqStatus("truncated", reason="budget")
    for k in range(inner_budget):
        try:
            nxt = inst.on_object(stages[-1])
        except ElementCapExceeded:
            status = SeqStatus("truncated", reason="element-cap")
            break
        if k == 0:
            proj = MonoMap(nxt, stages[0], np.zeros(len(nxt), dtype=np.int32))
        else:
            proj = inst.on_map(projs[-1])
        stages.append(nxt)
        projs.append(proj)
        if _is_plain_iso(proj):
            status = SeqStatus("stabilized", at=k)
            break
    return PlainSequence(inst, stages, projs, status)


def _is_plain_iso(m):
    if len(m.dom) != len(m.cod) or not m.is_injective():
        return False
    inv = np.empty(len(m.dom), dtype=np.int32)
    inv[m.table] = np.arange(len(m.dom), dtype=np.int32)
    try:
        MonoMap(m.cod, m.dom, inv)
    except Exception:
        return False
    return True


@dataclass
class StageComparison:
    index: int
    size_pointed: int
    size_plain: int
    iso: Iso | None
    projections_agree: bool

    @property
    def ok(self):
        return self.iso is not None and self.projections_agree


@dataclass
class MediatorReport:
    expr_pointed: str
    expr_plain: str
    pointed_seq: object
    plain_seq: PlainSequence
    stages: list  # StageComparison per computed stage
    adjunction_sweep: list  # (|P|, |Q|, bool)
    status: str  # "agree" | "disagree"

    @property
    def ok(self):
        return self.status == "agree"


def solve_lifted(expr, v, w, constants=None, inner_budget=8,
                 element_cap=DEFAULT_ELEMENT_CAP, adjunction_cap=3):
    """Run the lazy-shaped family on both sides of the inclusion and
    compare the final sequences stagewise.

    The expression must be an outermost Lift over an upset-free body (the
    lazy shape); its sums are separated on both sides.  Each computed
    stage yields a verified iso between the included pointed stage and
    the plain stage, plus agreement of the connecting projections.
    """
    if isinstance(expr, str):
        expr = parse(expr, constants)
    if not isinstance(expr, LiftF):
        raise InputError("lazy families carry an outermost Lift")
    if has_upset_nodes(expr):
        raise NotCovariant("upset nodes have no plain-map action")
    if has_strict_nodes(expr):
        raise InputError("lazy families use the plain-object grammar (no strict nodes)")
    if not (v.is_pointed and w.is_pointed):
        raise NotPointed("solve_lifted expects pointed parameters")

    inst_h = FunctorInstance(
        expr, Backend.POINTED_STRICT, v, w, element_cap, sum_mode="separated"
    )
    seq_h = terminal_sequence(inst_h, inner_budget)
    inst_g = FunctorInstance(
        expr, Backend.PLAIN, include(v), include(w), element_cap
    )
    seq_g = plain_terminal_sequence(inst_g, inner_budget)

    comparisons = []
    depth = min(len(seq_h.stages), len(seq_g.stages))
    for k in range(depth):
        sh = include(seq_h.stages[k]) if seq_h.stages[k].is_pointed else seq_h.stages[k]
        sg = seq_g.stages[k]
        iso = iso_check(sh, sg)
        agree = True
        if k > 0:
            agree = np.array_equal(seq_h.eps[k - 1].p.table, seq_g.projs[k - 1].table)
        comparisons.append(
            StageComparison(k, len(seq_h.stages[k]), len(sg), iso, agree)
        )
    sweep = []
    from .posets import all_posets_upto, with_declared_bottom

    shapes = all_posets_upto(adjunction_cap)
    pointed = [q for q in map(with_declared_bottom, shapes) if q is not None]
    for p in shapes:
        for q in pointed:
            sweep.append((len(p), len(q), adjunction_check(p, q)))
    ok = all(c.ok for c in comparisons) and all(row[2] for row in sweep)
    text = pretty(expr)
    return MediatorReport(
        text, text, seq_h, seq_g, comparisons, sweep,
        "agree" if ok else "disagree",
    )
