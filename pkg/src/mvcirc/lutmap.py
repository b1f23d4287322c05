"""Depth-oriented k-LUT technology mapping with priority cuts.

Each gate node keeps a small prioritized cut set (best-depth first, area-flow
tiebreak) plus its trivial cut.  The cover is extracted backwards from the
POs; every chosen cut becomes one LUT whose truth table is computed from the
covered cone.  Constants never become cut leaves: they fold into the tables.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .circuit import Circuit, GateType, ViewKind, build_circuit, const_value

# 16-bit truth tables of the four LUT input variables.
VAR_TT = (0xAAAA, 0xCCCC, 0xF0F0, 0xFF00)
_MASK16 = 0xFFFF


@dataclass(frozen=True)
class Cut:
    leaves: Tuple[int, ...]  # sorted node indices; () only for constant cones
    depth: int
    area: float


def _merge_leaves(parts: List[Tuple[int, ...]], k: int) -> Optional[Tuple[int, ...]]:
    merged: set = set()
    for p in parts:
        merged.update(p)
        if len(merged) > k:
            return None
    return tuple(sorted(merged))


def enumerate_cuts(circuit: Circuit, k: int = 4, cut_limit: int = 8):
    """Per-node prioritized cut sets and arrival depths.

    Returns (cuts, arrival) where cuts[n] is a list of Cut (the node's own
    trivial cut last) and arrival[n] the best achievable LUT depth at n.
    """
    n = len(circuit.nodes)
    cuts: List[List[Cut]] = [[] for _ in range(n)]
    arrival = [0] * n
    area_best = [0.0] * n
    fanout_est = [max(1, len(f)) for f in circuit.fanouts]

    for idx, node in enumerate(circuit.nodes):
        g = node.gate
        if g is GateType.PI:
            cuts[idx] = [Cut((idx,), 0, 0.0)]
            continue
        if g in (GateType.CONST0, GateType.CONST1):
            cuts[idx] = [Cut((), 0, 0.0)]
            continue
        if g is GateType.PO:
            continue
        if const_value(circuit, idx) is not None:
            # NOT chains over constants stay constant cones
            cuts[idx] = [Cut((), 0, 0.0)]
            continue
        cand: Dict[Tuple[int, ...], Cut] = {}
        sets = [cuts[f] for f in node.fanins]
        # cartesian product over fanin cut sets (≤ 9^3), pruned by leaf budget
        combos: List[List[Cut]] = [[]]
        for s in sets:
            combos = [c + [x] for c in combos for x in s]
        for combo in combos:
            leaves = _merge_leaves([c.leaves for c in combo], k)
            if leaves is None or not leaves:
                continue
            depth = 1 + max((arrival[l] for l in leaves), default=0)
            area = (1.0 + sum(area_best[l] for l in leaves)) / fanout_est[idx]
            prev = cand.get(leaves)
            if prev is None or (depth, area) < (prev.depth, prev.area):
                cand[leaves] = Cut(leaves, depth, area)
        ranked = sorted(cand.values(), key=lambda c: (c.depth, c.area, c.leaves))
        # drop dominated cuts (superset leaves with no better depth)
        kept: List[Cut] = []
        for c in ranked:
            if any(
                set(o.leaves) <= set(c.leaves) and o.depth <= c.depth for o in kept
            ):
                continue
            kept.append(c)
            if len(kept) >= cut_limit:
                break
        if not kept:  # all fanins constant: constant cone
            cuts[idx] = [Cut((), 0, 0.0)]
            continue
        arrival[idx] = kept[0].depth
        area_best[idx] = kept[0].area
        cuts[idx] = kept + [Cut((idx,), arrival[idx], area_best[idx])]
    return cuts, arrival


def cone_truth_table(circuit: Circuit, root: int, leaves: Tuple[int, ...]) -> int:
    """16-bit table of ``root`` as a function of ``leaves`` (≤ 4), by local
    evaluation of the covered cone."""
    tts: Dict[int, int] = {}
    for pos, leaf in enumerate(leaves):
        tts[leaf] = VAR_TT[pos]

    def eval_node(i: int) -> int:
        if i in tts:
            return tts[i]
        node = circuit.nodes[i]
        g = node.gate
        if g is GateType.CONST0:
            v = 0
        elif g is GateType.CONST1:
            v = _MASK16
        elif g is GateType.NOT:
            v = eval_node(node.fanins[0]) ^ _MASK16
        elif g is GateType.AND2:
            v = eval_node(node.fanins[0]) & eval_node(node.fanins[1])
        elif g is GateType.OR2:
            v = eval_node(node.fanins[0]) | eval_node(node.fanins[1])
        elif g is GateType.XOR2:
            v = eval_node(node.fanins[0]) ^ eval_node(node.fanins[1])
        elif g is GateType.MAJ3:
            a, b, c = (eval_node(f) for f in node.fanins)
            v = (a & b) | (b & c) | (a & c)
        elif g is GateType.LUT4:
            ins = [eval_node(f) for f in node.fanins]
            v = 0
            for m in range(1 << len(ins)):
                if (node.tt >> m) & 1:
                    term = _MASK16
                    for j, w in enumerate(ins):
                        term &= w if (m >> j) & 1 else (w ^ _MASK16)
                    v |= term
        else:
            raise ValueError(f"gate {g} inside a mapping cone")
        tts[i] = v
        return v

    tt = eval_node(root)
    if len(leaves) < 4:
        tt &= (1 << (1 << len(leaves))) - 1
    return tt


def lut_map(aig: Circuit, k: int = 4, cut_limit: int = 8) -> Circuit:
    """Cover an AIG with k-input LUTs, minimizing depth then area flow."""
    if aig.view is not ViewKind.AIG:
        raise ValueError(f"lut_map expects an AIG, got {aig.view.value}")
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * len(aig.nodes) + 100))
    try:
        return _lut_map_inner(aig, k, cut_limit)
    finally:
        sys.setrecursionlimit(old_limit)


def _lut_map_inner(aig: Circuit, k: int, cut_limit: int) -> Circuit:
    cuts, _ = enumerate_cuts(aig, k=k, cut_limit=cut_limit)

    best_cut: Dict[int, Cut] = {}
    const_cone: Dict[int, int] = {}  # value of nodes whose best cone is leafless
    needed: List[int] = []
    seen = set()

    def require(i: int) -> None:
        node = aig.nodes[i]
        if i in seen or node.gate is GateType.PI:
            return
        seen.add(i)
        cut = cuts[i][0]
        if not cut.leaves:  # constant cone (CONSTs, NOT chains, dead logic)
            const_cone[i] = cone_truth_table(aig, i, ()) & 1
            return
        best_cut[i] = cut
        needed.append(i)
        for leaf in cut.leaves:
            require(leaf)

    for p in aig.pos:
        require(aig.nodes[p].fanins[0])

    # Emit: PIs, one shared CONST0 (if needed), LUTs in topo order, POs.
    gates: List[tuple] = []
    new_idx: Dict[int, int] = {}
    for p in aig.pis:
        new_idx[p] = len(gates)
        gates.append((GateType.PI, ()))

    const0_idx: Optional[int] = None
    const1_idx: Optional[int] = None

    def get_const(v: int) -> int:
        nonlocal const0_idx, const1_idx
        if const0_idx is None:
            const0_idx = len(gates)
            gates.append((GateType.CONST0, ()))
        if v == 0:
            return const0_idx
        if const1_idx is None:
            const1_idx = len(gates)
            gates.append((GateType.NOT, (const0_idx,)))
        return const1_idx

    for i in sorted(needed):
        cut = best_cut[i]
        tt = cone_truth_table(aig, i, cut.leaves)
        new_idx[i] = len(gates)
        gates.append((GateType.LUT4, tuple(new_idx[l] for l in cut.leaves), tt))

    po_nodes = []
    for p in aig.pos:
        drv = aig.nodes[p].fanins[0]
        if drv in const_cone:
            d = get_const(const_cone[drv])
        else:
            d = new_idx[drv]
        po_nodes.append(len(gates))
        gates.append((GateType.PO, (d,)))

    pis = [new_idx[p] for p in aig.pis]
    return build_circuit(ViewKind.LUT, gates, pis, po_nodes, name=aig.name)
