"""Typed gate-level DAG shared by every other module.

A circuit is one *view* of a design (AIG, MIG, XAG, XMG, or an intermediate
4-LUT network).  Inversions are explicit NOT nodes, never edge attributes, so
that downstream consumers can key behaviour purely on gate type.  Circuits are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import ArityMismatch, CycleDetected, IllegalGateForView


class GateType(enum.Enum):
    PI = "PI"
    CONST0 = "CONST0"
    CONST1 = "CONST1"
    NOT = "NOT"
    AND2 = "AND2"
    OR2 = "OR2"
    XOR2 = "XOR2"
    MAJ3 = "MAJ3"
    LUT4 = "LUT4"
    PO = "PO"


# Fixed arity per gate; LUT4 is (min, max).
ARITY = {
    GateType.PI: 0,
    GateType.CONST0: 0,
    GateType.CONST1: 0,
    GateType.NOT: 1,
    GateType.AND2: 2,
    GateType.OR2: 2,
    GateType.XOR2: 2,
    GateType.MAJ3: 3,
    GateType.PO: 1,
}
LUT_ARITY = (1, 4)


class ViewKind(enum.Enum):
    AIG = "AIG"
    MIG = "MIG"
    XAG = "XAG"
    XMG = "XMG"
    LUT = "LUT"

    @property
    def rank(self) -> int:
        return _VIEW_RANK[self]


_VIEW_RANK = {v: i for i, v in enumerate(ViewKind)}

_COMMON = {GateType.PI, GateType.CONST0, GateType.CONST1, GateType.PO, GateType.NOT}

# Logic gates permitted per view (PI/PO/CONST/NOT are always allowed).
VIEW_GATES = {
    ViewKind.AIG: _COMMON | {GateType.AND2},
    ViewKind.MIG: _COMMON | {GateType.MAJ3, GateType.AND2, GateType.OR2},
    ViewKind.XAG: _COMMON | {GateType.AND2, GateType.XOR2},
    ViewKind.XMG: _COMMON | {GateType.XOR2, GateType.MAJ3, GateType.AND2, GateType.OR2},
    ViewKind.LUT: _COMMON | {GateType.LUT4},
}


class Node(NamedTuple):
    gate: GateType
    fanins: tuple
    tt: Optional[int] = None  # 16-bit function, LUT4 only


@dataclass(frozen=True)
class Circuit:
    """Validated, topologically ordered, levelized circuit.

    Every fanin index precedes its fanout.  ``levels`` treats PO marker nodes
    as transparent: a PO sits at the level of its driver, and ``depth`` is the
    maximum PO level (pure logic depth).  ``build_circuit`` additionally sorts
    indices by (level, gates-before-POs, input order).
    """

    view: ViewKind
    nodes: tuple
    pis: tuple
    pos: tuple
    levels: tuple
    name: str = ""
    _fanouts: tuple = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def depth(self) -> int:
        return max((self.levels[p] for p in self.pos), default=0)

    @property
    def fanouts(self) -> tuple:
        if self._fanouts is None:
            fo = [[] for _ in self.nodes]
            for idx, node in enumerate(self.nodes):
                for f in node.fanins:
                    fo[f].append(idx)
            object.__setattr__(self, "_fanouts", tuple(tuple(x) for x in fo))
        return self._fanouts

    @property
    def dangling(self) -> tuple:
        """Non-PO nodes that drive nothing.  Permitted, but reported."""
        return tuple(
            i
            for i, node in enumerate(self.nodes)
            if node.gate is not GateType.PO and not self.fanouts[i]
        )

    def gate_counts(self) -> dict:
        counts: dict = {}
        for node in self.nodes:
            counts[node.gate] = counts.get(node.gate, 0) + 1
        return counts


def _check_node(view: ViewKind, gate: GateType, fanins: Sequence[int], tt, idx: int) -> None:
    if gate not in VIEW_GATES[view]:
        raise IllegalGateForView(f"node {idx}: {gate.value} not allowed in view {view.value}")
    if gate is GateType.LUT4:
        lo, hi = LUT_ARITY
        if not lo <= len(fanins) <= hi:
            raise ArityMismatch(f"node {idx}: LUT4 takes {lo}..{hi} fanins, got {len(fanins)}")
        if tt is None or not 0 <= tt < (1 << 16):
            raise ArityMismatch(f"node {idx}: LUT4 needs a 16-bit truth table")
    elif len(fanins) != ARITY[gate]:
        raise ArityMismatch(
            f"node {idx}: {gate.value} takes {ARITY[gate]} fanins, got {len(fanins)}"
        )


def build_circuit(
    view: ViewKind,
    gates: Iterable,
    pis: Sequence[int],
    pos: Sequence[int],
    name: str = "",
) -> Circuit:
    """Validate, topologically order, and levelize a raw gate list.

    ``gates`` holds (gate, fanins) or (gate, fanins, tt) entries indexed by
    position.  Reordering is stable: nodes on the same level keep their input
    order.  Raises CycleDetected / ArityMismatch / IllegalGateForView.
    """
    raw = []
    for entry in gates:
        gate, fanins = entry[0], tuple(entry[1])
        tt = entry[2] if len(entry) > 2 else None
        raw.append(Node(gate, fanins, tt))

    n = len(raw)
    for idx, node in enumerate(raw):
        _check_node(view, node.gate, node.fanins, node.tt, idx)
        for f in node.fanins:
            if not 0 <= f < n:
                raise ArityMismatch(f"node {idx}: fanin {f} out of range")
            if raw[f].gate is GateType.PO:
                raise IllegalGateForView(f"node {idx}: PO node {f} used as fanin")
    pis = tuple(pis)
    pos = tuple(pos)
    for p in pis:
        if not 0 <= p < n or raw[p].gate is not GateType.PI:
            raise ArityMismatch(f"pi list entry {p} is not a PI node")
    if sum(1 for node in raw if node.gate is GateType.PI) != len(pis):
        raise ArityMismatch("pi list does not cover all PI nodes")
    for p in pos:
        if not 0 <= p < n or raw[p].gate is not GateType.PO:
            raise ArityMismatch(f"po list entry {p} is not a PO node")
    if sum(1 for node in raw if node.gate is GateType.PO) != len(pos):
        raise ArityMismatch("po list does not cover all PO nodes")

    levels = _levelize_raw(raw)
    # Stable topological order: (level, gates before PO markers, input order).
    order = sorted(
        range(n), key=lambda i: (levels[i], raw[i].gate is GateType.PO, i)
    )
    remap = {old: new for new, old in enumerate(order)}
    nodes = tuple(
        Node(raw[i].gate, tuple(remap[f] for f in raw[i].fanins), raw[i].tt) for i in order
    )
    return Circuit(
        view=view,
        nodes=nodes,
        pis=tuple(remap[p] for p in pis),
        pos=tuple(remap[p] for p in pos),
        levels=tuple(levels[i] for i in order),
        name=name,
    )


def _levelize_raw(raw: Sequence[Node]) -> list:
    """Levels for an unordered node list; detects cycles by propagation count."""
    n = len(raw)
    levels = [None] * n
    indeg = [len(node.fanins) for node in raw]
    fanouts = [[] for _ in range(n)]
    for idx, node in enumerate(raw):
        for f in node.fanins:
            fanouts[f].append(idx)
    ready = [i for i in range(n) if indeg[i] == 0]
    seen = 0
    while ready:
        nxt = []
        for i in ready:
            node = raw[i]
            if node.fanins:
                base = max(levels[f] for f in node.fanins)
                levels[i] = base if node.gate is GateType.PO else base + 1
            else:
                levels[i] = 0
            seen += 1
            for o in fanouts[i]:
                indeg[o] -= 1
                if indeg[o] == 0:
                    nxt.append(o)
        ready = nxt
    if seen != n:
        stuck = [i for i in range(n) if levels[i] is None]
        raise CycleDetected(f"cycle through nodes {stuck[:8]}")
    return levels


def levelize(circuit: Circuit) -> tuple:
    """Recompute per-node levels by direct scan; returns (levels, depth).

    PIs and constants sit at level 0, gates at 1 + max fanin level, and PO
    markers at their driver's level.
    """
    levels = [0] * len(circuit.nodes)
    for idx, node in enumerate(circuit.nodes):
        if not node.fanins:
            levels[idx] = 0
        else:
            base = max(levels[f] for f in node.fanins)
            levels[idx] = base if node.gate is GateType.PO else base + 1
    depth = max((levels[p] for p in circuit.pos), default=0)
    return tuple(levels), depth


def fanin_cone(circuit: Circuit, node: int, depth_limit: Optional[int] = None) -> set:
    """Nodes reachable backward from ``node`` within ``depth_limit`` hops.

    Unbounded when ``depth_limit`` is None.  Always includes ``node``.
    """
    cone = {node}
    frontier = [node]
    hops = 0
    while frontier and (depth_limit is None or hops < depth_limit):
        nxt = []
        for i in frontier:
            for f in circuit.nodes[i].fanins:
                if f not in cone:
                    cone.add(f)
                    nxt.append(f)
        frontier = nxt
        hops += 1
    return cone


def const_value(circuit: Circuit, node: int) -> Optional[int]:
    """0/1 if ``node`` is a structural constant (CONST or NOT chain), else None."""
    flips = 0
    while circuit.nodes[node].gate is GateType.NOT:
        flips ^= 1
        node = circuit.nodes[node].fanins[0]
    gate = circuit.nodes[node].gate
    if gate is GateType.CONST0:
        return flips
    if gate is GateType.CONST1:
        return 1 - flips
    return None


def retype_degraded_maj(circuit: Circuit) -> Circuit:
    """Rewrite MAJ3 gates with a structural constant fanin as AND2/OR2.

    A constant-0 fanin degrades the gate to AND2 of the other two fanins, a
    constant-1 fanin to OR2.  Function is preserved, and node indices are kept
    stable so existing labels remain valid (levels are recomputed; dropping a
    constant fanin can only lower a node's level, never break topo order).
    """
    changed = False
    nodes = []
    for node in circuit.nodes:
        if node.gate is GateType.MAJ3:
            consts = [(const_value(circuit, f), f) for f in node.fanins]
            zero = next((f for v, f in consts if v == 0), None)
            one = next((f for v, f in consts if v == 1), None)
            if zero is not None:
                rest = list(node.fanins)
                rest.remove(zero)  # first occurrence only
                nodes.append(Node(GateType.AND2, tuple(rest)))
                changed = True
                continue
            if one is not None:
                rest = list(node.fanins)
                rest.remove(one)
                nodes.append(Node(GateType.OR2, tuple(rest)))
                changed = True
                continue
        nodes.append(node)
    if not changed:
        return circuit
    out = Circuit(
        view=circuit.view,
        nodes=tuple(nodes),
        pis=circuit.pis,
        pos=circuit.pos,
        levels=(),
        name=circuit.name,
    )
    levels, _ = levelize(out)
    object.__setattr__(out, "levels", levels)
    return out
