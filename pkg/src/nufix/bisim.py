"""Bisimulation games, relation lifting, and quotient coalgebras.

Value-passing systems are input/output machines over a finite value set:
each state either inputs a value (a total continuation table) or outputs
one.  Three equivalence notions live here:

* the plain value-passing game (`value_bisim`),
* the game up to a value equivalence (`dimmed_bisim`), and
* coalgebraic bisimulation by structural relation lifting (`coalg_bisim`).

The game engines are deliberately independent of the relation-lifting
code so that the coincidence between the two (on quotient instances) is a
genuine cross-check, not a tautology; `lemma1_check` runs that comparison
exhaustively at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import engine as _engine
from .errors import (
    InputError,
    InstanceMismatch,
    NotABisimulation,
    NotEquivalence,
    SizeCapExceeded,
    ValueSetMismatch,
)
from .functors import Backend, CoalgebraSpec, instantiate, lifted_related, parse
from .posets import discrete, tag_sort_key

VALUE_FAMILY = "(V -> Id) + W"


# --------------------------------------------------------------------------
# relations and equivalences


@dataclass(frozen=True)
class Relation:
    """A finite set of pairs between two carriers."""

    left: tuple
    right: tuple
    pairs: frozenset

    def __post_init__(self):
        for a, b in self.pairs:
            if a not in self.left or b not in self.right:
                raise InputError(f"pair ({a!r}, {b!r}) outside the carriers")

    def __contains__(self, pair):
        return pair in self.pairs

    def __len__(self):
        return len(self.pairs)

    @property
    def is_equivalence(self):
        if set(self.left) != set(self.right):
            return False
        xs = self.left
        if any((x, x) not in self.pairs for x in xs):
            return False
        if any((b, a) not in self.pairs for a, b in self.pairs):
            return False
        return all(
            (a, d) in self.pairs
            for a, b in self.pairs
            for c, d in self.pairs
            if b == c
        )

    def sorted_pairs(self):
        return sorted(self.pairs, key=lambda p: (tag_sort_key(p[0]), tag_sort_key(p[1])))

    def to_json(self):
        from .posets import tag_to_json

        return [[tag_to_json(a), tag_to_json(b)] for a, b in self.sorted_pairs()]


def relation_from_json(obj, left, right):
    from .posets import tag_from_json

    if not isinstance(obj, list):
        raise InputError("relation JSON must be a list of pairs")
    pairs = frozenset((tag_from_json(a), tag_from_json(b)) for a, b in obj)
    return Relation(tuple(left), tuple(right), pairs)


def identity_relation(carrier):
    carrier = tuple(carrier)
    return Relation(carrier, carrier, frozenset((x, x) for x in carrier))


@dataclass(frozen=True)
class Equivalence:
    """A partition; blocks are canonically sorted for determinism."""

    blocks: tuple

    def __post_init__(self):
        seen = set()
        for block in self.blocks:
            if not block:
                raise NotEquivalence("empty block")
            for x in block:
                if x in seen:
                    raise NotEquivalence(f"element {x!r} appears in two blocks")
                seen.add(x)

    @classmethod
    def from_blocks(cls, blocks):
        canon = tuple(
            sorted(
                (tuple(sorted(b, key=tag_sort_key)) for b in blocks),
                key=lambda b: tag_sort_key(b[0]),
            )
        )
        return cls(canon)

    @classmethod
    def identity(cls, carrier):
        return cls.from_blocks([[x] for x in carrier])

    @classmethod
    def total(cls, carrier):
        carrier = list(carrier)
        return cls.from_blocks([carrier] if carrier else [])

    @classmethod
    def from_pairs(cls, carrier, pairs):
        rel = Relation(tuple(carrier), tuple(carrier), frozenset(pairs))
        if not rel.is_equivalence:
            raise NotEquivalence("pair set is not an equivalence relation")
        blocks = []
        left = list(carrier)
        while left:
            x = left[0]
            block = [y for y in left if (x, y) in rel.pairs]
            blocks.append(block)
            left = [y for y in left if y not in block]
        return cls.from_blocks(blocks)

    def carrier(self):
        return tuple(x for block in self.blocks for x in block)

    def class_of(self, x):
        for block in self.blocks:
            if x in block:
                return block
        raise InputError(f"{x!r} not covered by the partition")

    def related(self, a, b):
        return b in self.class_of(a)

    def as_pairs(self):
        return frozenset(
            (a, b) for block in self.blocks for a in block for b in block
        )

    def class_tag(self, x):
        return ("cls", self.class_of(x))

    def class_tags(self):
        return [("cls", block) for block in self.blocks]

    def to_json(self):
        from .posets import tag_to_json

        return [[tag_to_json(x) for x in block] for block in self.blocks]


def equivalence_from_json(obj):
    if not isinstance(obj, list):
        raise InputError("equivalence JSON must be a list of blocks")
    return Equivalence.from_blocks([[_tag(x) for x in block] for block in obj])


def _tag(obj):
    from .posets import tag_from_json

    return tag_from_json(obj)


# --------------------------------------------------------------------------
# value-passing systems


INPUT = "input"
OUTPUT = "output"


class LtsSpec:
    """A value-passing system: states either input (total table over the
    value set) or output a value."""

    def __init__(self, values, states, behaviour):
        self.values = tuple(values)
        self.states = tuple(states)
        if len(set(self.values)) != len(self.values):
            raise InputError("duplicate values")
        if len(set(self.states)) != len(self.states):
            raise InputError("duplicate states")
        if set(behaviour) != set(self.states):
            raise InputError("behaviour must cover exactly the states")
        self.behaviour = {}
        vset = set(self.values)
        sset = set(self.states)
        for x, spec in behaviour.items():
            kind, payload = spec
            if kind == INPUT:
                if set(payload) != vset:
                    raise InputError(f"input table of {x!r} must be total over the values")
                if any(t not in sset for t in payload.values()):
                    raise InputError(f"input table of {x!r} leaves the state set")
                self.behaviour[x] = (INPUT, dict(payload))
            elif kind == OUTPUT:
                if payload not in vset:
                    raise InputError(f"output of {x!r} is not a value")
                self.behaviour[x] = (OUTPUT, payload)
            else:
                raise InputError(f"unknown behaviour kind {kind!r}")

    def kind(self, x):
        return self.behaviour[x][0]

    def cont(self, x, p):
        kind, payload = self.behaviour[x]
        if kind != INPUT:
            raise InputError(f"{x!r} is not an input state")
        return payload[p]

    def out(self, x):
        kind, payload = self.behaviour[x]
        if kind != OUTPUT:
            raise InputError(f"{x!r} is not an output state")
        return payload

    def to_json(self):
        from .posets import tag_to_json

        beh = {}
        for x in self.states:
            kind, payload = self.behaviour[x]
            if kind == INPUT:
                beh[str(x)] = {"input": {str(p): tag_to_json(payload[p]) for p in self.values}}
            else:
                beh[str(x)] = {"output": tag_to_json(payload)}
        return {
            "values": [tag_to_json(v) for v in self.values],
            "states": [tag_to_json(s) for s in self.states],
            "behaviour": beh,
        }


def lts_from_json(obj):
    if not isinstance(obj, dict) or not {"values", "states", "behaviour"} <= set(obj):
        raise InputError("lts JSON needs values, states, behaviour")
    values = [str(v) for v in obj["values"]]
    states = [str(s) for s in obj["states"]]
    behaviour = {}
    for x, spec in obj["behaviour"].items():
        if "input" in spec:
            behaviour[x] = (INPUT, {str(p): str(t) for p, t in spec["input"].items()})
        elif "output" in spec:
            behaviour[x] = (OUTPUT, str(spec["output"]))
        else:
            raise InputError(f"state {x!r} needs an 'input' or 'output' entry")
    return LtsSpec(values, states, behaviour)


def lts_instance(values, element_cap=None):
    """The value-passing instance F(P, P) over discrete posets."""
    v = discrete(sorted(values, key=tag_sort_key))
    kwargs = {} if element_cap is None else {"element_cap": element_cap}
    return instantiate(parse(VALUE_FAMILY), Backend.PLAIN, v, v, **kwargs)


def lts_to_coalgebra(lts, inst=None):
    """Encode a value-passing system as a coalgebra of F(P, P)."""
    inst = inst or lts_instance(lts.values)
    carrier = discrete(lts.states)
    order = inst.v.elements
    structure = {}
    for x in lts.states:
        kind, payload = lts.behaviour[x]
        if kind == INPUT:
            structure[x] = ("inl", ("table", tuple(payload[p] for p in order)))
        else:
            structure[x] = ("inr", payload)
    return CoalgebraSpec(inst, carrier, structure)


# --------------------------------------------------------------------------
# game engines (independent of relation lifting)


def _game_violation(lts1, lts2, pairs, related_values):
    """First pair violating the matching game, with the failing clause."""
    for x, y in sorted(pairs, key=lambda p: (tag_sort_key(p[0]), tag_sort_key(p[1]))):
        k1, k2 = lts1.kind(x), lts2.kind(y)
        if k1 != k2:
            return (x, y), "shape-match"
        if k1 == OUTPUT:
            if not related_values(lts1.out(x), lts2.out(y)):
                return (x, y), "output-match"
        else:
            for p in lts1.values:
                for q in lts2.values:
                    if related_values(p, q):
                        if (lts1.cont(x, p), lts2.cont(y, q)) not in pairs:
                            return (x, y), "input-match"
    return None


def _greatest_game_bisim(lts1, lts2, related_values):
    pairs = {(x, y) for x in lts1.states for y in lts2.states}
    while True:
        bad = _game_violation(lts1, lts2, pairs, related_values)
        if bad is None:
            return Relation(lts1.states, lts2.states, frozenset(pairs))
        pairs.discard(bad[0])


def value_bisim(lts1, lts2):
    """Greatest plain value-passing bisimulation between two systems."""
    if set(lts1.values) != set(lts2.values):
        raise ValueSetMismatch("the two systems exchange different value sets")
    return _greatest_game_bisim(lts1, lts2, lambda p, q: p == q)


def dimmed_bisim(lts1, lts2, approx):
    """Greatest bisimulation matching values only up to `approx`."""
    if set(lts1.values) != set(lts2.values):
        raise ValueSetMismatch("the two systems exchange different value sets")
    if set(approx.carrier()) != set(lts1.values):
        raise NotEquivalence("approx must partition the value set")
    return _greatest_game_bisim(lts1, lts2, approx.related)


def is_game_bisim(lts1, lts2, pairs, approx=None):
    """Is the given pair set a (dimmed) bisimulation?  Returns the first
    violation as ((x, y), clause) or None."""
    related = (lambda p, q: p == q) if approx is None else approx.related
    return _game_violation(lts1, lts2, set(pairs), related)


# --------------------------------------------------------------------------
# quotient construction


def quotient(lts, relation, approx):
    """The quotient coalgebra over the class-valued instance.

    `relation` must be an equivalence on the states and a `approx`-
    bisimulation; the structure map sends a state class to the class-
    indexed table (or output class) computed from any representative,
    and representative independence is re-verified.
    """
    if isinstance(relation, Equivalence):
        state_eq = relation
    else:
        if not relation.is_equivalence:
            raise NotABisimulation("state relation must be an equivalence")
        state_eq = Equivalence.from_pairs(lts.states, relation.pairs)
    if is_game_bisim(lts, lts, state_eq.as_pairs(), approx) is not None:
        raise NotABisimulation("state relation is not a bisimulation up to approx")
    class_values = approx.class_tags()
    vq = discrete(sorted(class_values, key=tag_sort_key))
    inst = instantiate(parse(VALUE_FAMILY), Backend.PLAIN, vq, vq)
    carrier = discrete(sorted(state_eq.class_tags(), key=tag_sort_key))
    structure = {}
    for block in state_eq.blocks:
        tag = ("cls", block)
        rows = set()
        for x in block:
            kind, payload = lts.behaviour[x]
            if kind == INPUT:
                table = tuple(
                    state_eq.class_tag(lts.cont(x, cls[1][0]))
                    for cls in vq.elements
                )
                rows.add(("inl", ("table", table)))
            else:
                rows.add(("inr", approx.class_tag(payload)))
        if len(rows) != 1:
            raise NotABisimulation(
                f"structure of class {block!r} depends on the representative"
            )
        structure[tag] = rows.pop()
    # representative independence inside input tables
    for block in state_eq.blocks:
        for x in block:
            if lts.kind(x) != INPUT:
                continue
            for cls in vq.elements:
                targets = {state_eq.class_tag(lts.cont(x, p)) for p in cls[1]}
                if len(targets) != 1:
                    raise NotABisimulation(
                        f"class table of {x!r} depends on the value representative"
                    )
    return CoalgebraSpec(inst, carrier, structure)


# --------------------------------------------------------------------------
# coalgebraic bisimulation via relation lifting


def coalg_bisim(coalg1, coalg2):
    """Greatest relation R with lifted-related structure values."""
    if not coalg1.inst.same_instance(coalg2.inst):
        raise InstanceMismatch("coalgebras live over different instances")
    inst = coalg1.inst
    xs = coalg1.carrier.elements
    ys = coalg2.carrier.elements
    pairs = {(x, y) for x in xs for y in ys}
    while True:
        drop = [
            (x, y)
            for (x, y) in pairs
            if not lifted_related(inst, pairs, coalg1.value(x), coalg2.value(y))
        ]
        if not drop:
            return Relation(xs, ys, frozenset(pairs))
        for pair in drop:
            pairs.discard(pair)


def is_lifting_bisim(coalg1, coalg2, pairs, param_rel=None):
    inst = coalg1.inst
    return all(
        lifted_related(inst, pairs, coalg1.value(x), coalg2.value(y), param_rel)
        for (x, y) in pairs
    )


def behavioural_equiv(coalg, final):
    """Kernel partition of the coinductive extension into the final
    coalgebra: two states are identified exactly when they denote the
    same abstract behaviour."""
    ext = _engine.coinductive_extension(coalg, final)
    groups = {}
    for x in coalg.carrier.elements:
        groups.setdefault(ext(x), []).append(x)
    return Equivalence.from_blocks(list(groups.values()))


# --------------------------------------------------------------------------
# the quotient-instance equivalence check


def all_relations(states):
    states = list(states)
    pairs = [(x, y) for x in states for y in states]
    for mask in range(1 << len(pairs)):
        yield frozenset(p for i, p in enumerate(pairs) if (mask >> i) & 1)


def lemma1_check(lts, approx, size_cap=(3, 2)):
    """Exhaustively compare the game predicate with the lifting predicate.

    For every relation R on the states: 'R is an approx-bisimulation'
    (game engine) must coincide with 'R is a lifting bisimulation of the
    quotient-parameterised instance' (structural lifting with approx at
    the parameter positions).  Equivalence relations among them are also
    pushed through the quotient constructor as a further cross-check.
    Returns (True, None) or (False, counterexample_pairs).
    """
    max_states, max_values = size_cap
    if len(lts.states) > max_states or len(lts.values) > max_values:
        raise SizeCapExceeded("lemma1_check is exhaustive; inputs are capped")
    coalg = lts_to_coalgebra(lts)
    param_rel = approx.as_pairs()
    for pairs in all_relations(lts.states):
        game = is_game_bisim(lts, lts, pairs, approx) is None
        lifted = is_lifting_bisim(coalg, coalg, pairs, param_rel)
        if game != lifted:
            return False, pairs
        rel = Relation(lts.states, lts.states, pairs)
        if rel.is_equivalence:
            try:
                quotient(lts, rel, approx)
                built = True
            except NotABisimulation:
                built = False
            if built != game:
                return False, pairs
    return True, None
