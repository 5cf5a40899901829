"""Report serialization: JSON with a shared poset pool, DOT bundles, and
re-validating loaders.

Loading a report reconstructs every poset, ep-pair, and witness iso through
the same validating constructors used by the engine, so a tampered or
corrupted report fails loudly rather than round-tripping.
"""

from __future__ import annotations

import json

import numpy as np

from .engine import SeqStatus
from .errors import InputError
from .posets import (
    EpPair,
    Iso,
    MonoMap,
    poset_from_json,
    poset_to_json,
)


class _Pool:
    def __init__(self):
        self.posets = []
        self._index = {}

    def ref(self, p):
        idx = self._index.get(p)
        if idx is None:
            idx = len(self.posets)
            self.posets.append(p)
            self._index[p] = idx
        return idx

    def dump(self):
        return [poset_to_json(p) for p in self.posets]


def _status_json(status):
    return {"state": status.kind, "at": status.at, "reason": status.reason}


def _status_from_json(obj):
    return SeqStatus(obj["state"], at=obj.get("at"), reason=obj.get("reason"))


def _map_json(m, pool):
    return {
        "dom": pool.ref(m.dom),
        "cod": pool.ref(m.cod),
        "table": [int(t) for t in m.table],
        "strict": m.strict,
    }


def _map_from_json(obj, posets):
    return MonoMap(
        posets[obj["dom"]],
        posets[obj["cod"]],
        np.array(obj["table"], dtype=np.int32),
        strict=obj.get("strict", False),
    )


def _ep_json(ep, pool):
    return {"e": _map_json(ep.e, pool), "p": _map_json(ep.p, pool)}


def _ep_from_json(obj, posets):
    return EpPair(_map_from_json(obj["e"], posets), _map_from_json(obj["p"], posets))


def _iso_json(iso, pool):
    return {
        "forward": _map_json(iso.forward, pool),
        "backward": _map_json(iso.backward, pool),
    }


def _iso_from_json(obj, posets):
    return Iso(
        _map_from_json(obj["forward"], posets),
        _map_from_json(obj["backward"], posets),
    )


def _seq_json(seq, pool):
    return {
        "status": _status_json(seq.status),
        "stages": [pool.ref(s) for s in seq.stages],
        "sizes": [len(s) for s in seq.stages],
        "eps": [_ep_json(ep, pool) for ep in seq.eps],
    }


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# solution reports


def solution_report_json(rep):
    pool = _Pool()
    chain = rep.chain
    obj = {
        "kind": "solution-report",
        "expr": rep.expr_text,
        "backend": rep.backend.value,
        "budgets": {
            "inner": rep.inner_budget,
            "outer": rep.outer_budget,
            "element_cap": rep.element_cap,
        },
        "status": _status_json(chain.status),
        "exact": rep.exact,
        "params": [pool.ref(z) for z in chain.params],
        "rows": [_seq_json(seq, pool) for seq in chain.rows],
        "vertical_eps": [_ep_json(ep, pool) for ep in chain.vertical_eps],
        "z": pool.ref(rep.z) if rep.z is not None else None,
        "witness": _iso_json(rep.witness, pool) if rep.witness is not None else None,
        "final": None,
        "posets": None,
    }
    if rep.final is not None:
        obj["final"] = {
            "carrier": pool.ref(rep.final.carrier),
            "exact": rep.final.exact,
            "depth": rep.final.depth,
            "structure": _map_json(rep.final.structure, pool)
            if rep.final.structure is not None
            else None,
            "inverse": _map_json(rep.final.inverse, pool)
            if rep.final.inverse is not None
            else None,
        }
    obj["posets"] = pool.dump()
    return obj


def load_solution_report(obj):
    """Reconstruct and re-verify a solution report from its JSON form."""
    if obj.get("kind") != "solution-report":
        raise InputError("not a solution report")
    posets = [poset_from_json(p) for p in obj["posets"]]
    params = [posets[i] for i in obj["params"]]
    rows = []
    for row in obj["rows"]:
        stages = [posets[i] for i in row["stages"]]
        eps = [_ep_from_json(e, posets) for e in row["eps"]]
        if [len(s) for s in stages] != row["sizes"]:
            raise InputError("stage sizes disagree with the poset pool")
        for k, ep in enumerate(eps):
            if ep.dom != stages[k] or ep.cod != stages[k + 1]:
                raise InputError("ep endpoints disagree with the stages")
        rows.append((stages, eps, _status_from_json(row["status"])))
    vertical = [_ep_from_json(e, posets) for e in obj["vertical_eps"]]
    for k, ep in enumerate(vertical):
        if ep.dom != params[k] or ep.cod != params[k + 1]:
            raise InputError("vertical ep endpoints disagree with the parameters")
    witness = None
    if obj["witness"] is not None:
        witness = _iso_from_json(obj["witness"], posets)
    final = None
    if obj["final"] is not None:
        f = obj["final"]
        structure = _map_from_json(f["structure"], posets) if f["structure"] else None
        inverse = _map_from_json(f["inverse"], posets) if f["inverse"] else None
        if structure is not None and inverse is not None:
            # Lambek: the structure map is an isomorphism
            Iso(structure, inverse)
        final = {
            "carrier": posets[f["carrier"]],
            "structure": structure,
            "inverse": inverse,
            "exact": f["exact"],
            "depth": f["depth"],
        }
    if witness is not None and final is not None:
        if witness.dom != final["carrier"]:
            raise InputError("witness does not start at the final carrier")
    return {
        "status": _status_from_json(obj["status"]),
        "params": params,
        "rows": rows,
        "vertical_eps": vertical,
        "witness": witness,
        "final": final,
        "z": posets[obj["z"]] if obj["z"] is not None else None,
        "exact": obj["exact"],
    }


# --------------------------------------------------------------------------
# terminal-sequence reports


def terminal_report_json(seq, expr_text):
    pool = _Pool()
    obj = {
        "kind": "terminal-report",
        "expr": expr_text,
        "row": _seq_json(seq, pool),
        "posets": pool.dump(),
    }
    return obj


def load_terminal_report(obj):
    if obj.get("kind") != "terminal-report":
        raise InputError("not a terminal report")
    posets = [poset_from_json(p) for p in obj["posets"]]
    row = obj["row"]
    stages = [posets[i] for i in row["stages"]]
    eps = [_ep_from_json(e, posets) for e in row["eps"]]
    for k, ep in enumerate(eps):
        if ep.dom != stages[k] or ep.cod != stages[k + 1]:
            raise InputError("ep endpoints disagree with the stages")
    return {
        "status": _status_from_json(row["status"]),
        "stages": stages,
        "eps": eps,
    }


# --------------------------------------------------------------------------
# mediator reports


def mediator_report_json(rep):
    pool = _Pool()
    obj = {
        "kind": "mediator-report",
        "expr_pointed": rep.expr_pointed,
        "expr_plain": rep.expr_plain,
        "status": rep.status,
        "pointed": _seq_json(rep.pointed_seq, pool),
        "plain": {
            "status": _status_json(rep.plain_seq.status),
            "stages": [pool.ref(s) for s in rep.plain_seq.stages],
            "sizes": [len(s) for s in rep.plain_seq.stages],
            "projs": [_map_json(m, pool) for m in rep.plain_seq.projs],
        },
        "stage_comparisons": [
            {
                "index": c.index,
                "size_pointed": c.size_pointed,
                "size_plain": c.size_plain,
                "iso": _iso_json(c.iso, pool) if c.iso is not None else None,
                "projections_agree": c.projections_agree,
            }
            for c in rep.stages
        ],
        "adjunction_sweep": [
            {"p_size": a, "q_size": b, "ok": ok} for (a, b, ok) in rep.adjunction_sweep
        ],
        "posets": None,
    }
    obj["posets"] = pool.dump()
    return obj


def load_mediator_report(obj):
    if obj.get("kind") != "mediator-report":
        raise InputError("not a mediator report")
    posets = [poset_from_json(p) for p in obj["posets"]]
    pointed_stages = [posets[i] for i in obj["pointed"]["stages"]]
    pointed_eps = [_ep_from_json(e, posets) for e in obj["pointed"]["eps"]]
    plain_stages = [posets[i] for i in obj["plain"]["stages"]]
    plain_projs = [_map_from_json(m, posets) for m in obj["plain"]["projs"]]
    isos = []
    for c in obj["stage_comparisons"]:
        if c["iso"] is not None:
            isos.append(_iso_from_json(c["iso"], posets))
    return {
        "status": obj["status"],
        "pointed_stages": pointed_stages,
        "pointed_eps": pointed_eps,
        "plain_stages": plain_stages,
        "plain_projs": plain_projs,
        "stage_isos": isos,
    }


# --------------------------------------------------------------------------
# DOT bundles


def dot_bundle(obj):
    """Per-stage Hasse diagrams of a report: {filename: dot source}."""
    from .posets import poset_to_dot

    posets = [poset_from_json(p) for p in obj.get("posets", [])]
    out = {}

    def add(row_idx, refs):
        for col, ref in enumerate(refs):
            name = f"stage_{row_idx}_{col}"
            out[name + ".dot"] = poset_to_dot(posets[ref], name)

    kind = obj.get("kind")
    if kind == "solution-report":
        for r, row in enumerate(obj["rows"]):
            add(r, row["stages"])
    elif kind == "terminal-report":
        add(0, obj["row"]["stages"])
    elif kind == "mediator-report":
        add(0, obj["pointed"]["stages"])
        add(1, obj["plain"]["stages"])
    else:
        raise InputError(f"no DOT bundle for report kind {kind!r}")
    return out


def load_report(obj):
    kind = obj.get("kind")
    if kind == "solution-report":
        return load_solution_report(obj)
    if kind == "terminal-report":
        return load_terminal_report(obj)
    if kind == "mediator-report":
        return load_mediator_report(obj)
    raise InputError(f"unknown report kind {kind!r}")
