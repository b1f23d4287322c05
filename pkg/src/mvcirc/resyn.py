"""LUT-network resynthesis into a target gate basis, plus view verification.

Each LUT is replaced in topological order by its NPN-class template in the
target view; structural hashing merges duplicate gates and collapses double
negations.  MAJ gates degraded by constant fanins are retyped afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .circuit import Circuit, GateType, ViewKind, build_circuit, retype_degraded_maj
from .errors import MissingTemplate
from .npn import Npn4Db, expand_tt, load_db, npn_canon, tt_support
from .lutmap import VAR_TT

_MASK16 = 0xFFFF
_SYMMETRIC = {GateType.AND2, GateType.OR2, GateType.XOR2, GateType.MAJ3}


class _Builder:
    """Accumulates target-view gates with structural hashing."""

    def __init__(self, view: ViewKind):
        self.view = view
        self.gates: List[tuple] = []
        self.strash: Dict[tuple, int] = {}
        self.const0: Optional[int] = None

    def new(self, gate: GateType, fanins: tuple = ()) -> int:
        self.gates.append((gate, fanins))
        return len(self.gates) - 1

    def mk_const(self, value: int) -> int:
        if self.const0 is None:
            self.const0 = self.new(GateType.CONST0)
        return self.mk_not(self.const0) if value else self.const0

    def mk_not(self, a: int) -> int:
        gate, fanins = self.gates[a][0], self.gates[a][1]
        if gate is GateType.NOT:  # collapse double negation
            return fanins[0]
        key = (GateType.NOT, (a,))
        if key not in self.strash:
            self.strash[key] = self.new(GateType.NOT, (a,))
        return self.strash[key]

    def mk_gate(self, gate: GateType, fanins: tuple) -> int:
        ins = tuple(sorted(fanins)) if gate in _SYMMETRIC else tuple(fanins)
        key = (gate, ins)
        if key not in self.strash:
            self.strash[key] = self.new(gate, ins)
        return self.strash[key]


def _instantiate(builder: _Builder, tpl_circuit: Circuit, inputs: List[int]) -> int:
    """Copy a template into the builder; inputs drive template PIs 0..3."""
    mapping: Dict[int, int] = {}
    out = None
    for idx, node in enumerate(tpl_circuit.nodes):
        g = node.gate
        if g is GateType.PI:
            mapping[idx] = inputs[tpl_circuit.pis.index(idx)]
        elif g is GateType.CONST0:
            mapping[idx] = builder.mk_const(0)
        elif g is GateType.CONST1:
            mapping[idx] = builder.mk_const(1)
        elif g is GateType.NOT:
            mapping[idx] = builder.mk_not(mapping[node.fanins[0]])
        elif g is GateType.PO:
            out = mapping[node.fanins[0]]
        else:
            mapping[idx] = builder.mk_gate(g, tuple(mapping[f] for f in node.fanins))
    return out


def _shannon(builder: _Builder, tt: int, signals: List[int]) -> int:
    """Decompose a 16-bit function into the builder's basis recursively.

    Fallback used when a canonical class is missing from the database.
    """
    support = tt_support(tt)
    if not support:
        return builder.mk_const(tt & 1)
    j = support[-1]
    var = VAR_TT[j]
    hi = expand_restrict(tt, j, 1)
    lo = expand_restrict(tt, j, 0)
    if hi == _MASK16 and lo == 0:
        return signals[j]
    if hi == 0 and lo == _MASK16:
        return builder.mk_not(signals[j])
    s = signals[j]
    f1 = _shannon(builder, hi, signals)
    f0 = _shannon(builder, lo, signals)
    a = builder.mk_gate(GateType.AND2, (s, f1))
    b = builder.mk_gate(GateType.AND2, (builder.mk_not(s), f0))
    if GateType.OR2 in _view_gateset(builder.view):
        return builder.mk_gate(GateType.OR2, (a, b))
    # AIG/XAG: OR via De Morgan
    return builder.mk_not(
        builder.mk_gate(GateType.AND2, (builder.mk_not(a), builder.mk_not(b)))
    )


def _view_gateset(view: ViewKind):
    from .circuit import VIEW_GATES

    return VIEW_GATES[view]


def expand_restrict(tt: int, j: int, value: int) -> int:
    """Cofactor of a 16-bit table with input j fixed, re-expanded over j."""
    var = VAR_TT[j]
    mask = var if value else (var ^ _MASK16)
    shift = 1 << j
    kept = tt & mask
    if value:
        return kept | (kept >> shift)
    return kept | (kept << shift) & _MASK16


def lut_resyn(
    luts: Circuit,
    target: ViewKind,
    db: Optional[Npn4Db] = None,
    allow_fallback: bool = True,
) -> Circuit:
    """Re-express a 4-LUT network in the target gate basis, function-preserving."""
    if luts.view is not ViewKind.LUT:
        raise ValueError(f"lut_resyn expects a LUT network, got {luts.view.value}")
    if target not in (ViewKind.AIG, ViewKind.MIG, ViewKind.XAG, ViewKind.XMG):
        raise ValueError(f"cannot resynthesize into view {target.value}")
    if db is None:
        db = load_db(target)

    builder = _Builder(target)
    mapping: Dict[int, int] = {}
    for idx, node in enumerate(luts.nodes):
        g = node.gate
        if g is GateType.PI:
            mapping[idx] = builder.new(GateType.PI)
        elif g is GateType.CONST0:
            mapping[idx] = builder.mk_const(0)
        elif g is GateType.CONST1:
            mapping[idx] = builder.mk_const(1)
        elif g is GateType.NOT:
            mapping[idx] = builder.mk_not(mapping[node.fanins[0]])
        elif g is GateType.LUT4:
            mapping[idx] = _resyn_lut(builder, db, node, mapping, allow_fallback)
        elif g is GateType.PO:
            continue
        else:
            raise ValueError(f"gate {g.value} inside a LUT network")

    gates = builder.gates
    po_nodes = []
    for p in luts.pos:
        drv = mapping[luts.nodes[p].fanins[0]]
        po_nodes.append(len(gates))
        gates.append((GateType.PO, (drv,)))
    pis = [mapping[p] for p in luts.pis]
    out = build_circuit(target, gates, pis, po_nodes, name=luts.name)
    if target in (ViewKind.MIG, ViewKind.XMG):
        out = retype_degraded_maj(out)
    return out


def _resyn_lut(
    builder: _Builder,
    db: Npn4Db,
    node,
    mapping: Dict[int, int],
    allow_fallback: bool,
) -> int:
    m = len(node.fanins)
    tt = expand_tt(node.tt, m)
    fanin_sigs = [mapping[f] for f in node.fanins]
    if tt == 0:
        return builder.mk_const(0)
    if tt == _MASK16:
        return builder.mk_const(1)
    canon, (perm, flips, oflip) = npn_canon(tt)
    try:
        tpl = db.lookup(canon)
    except MissingTemplate:
        if not allow_fallback:
            raise
        signals = [
            fanin_sigs[j] if j < m else builder.mk_const(0) for j in range(4)
        ]
        return _shannon(builder, tt, signals)
    # canon(x) = oflip ^ tt(y) with y_j = x_{perm[j]} ^ flip_j, so template
    # input perm[j] receives fanin j, negated when flip_j is set.
    inputs = [None] * 4
    for j in range(4):
        p = perm[j]
        if j < m:
            s = fanin_sigs[j]
            if (flips >> j) & 1:
                s = builder.mk_not(s)
            inputs[p] = s
        else:
            inputs[p] = builder.mk_const(0)
    out = _instantiate(builder, tpl.circuit, inputs)
    return builder.mk_not(out) if oflip else out


@dataclass
class VerifyReport:
    ok: bool
    method: str
    failing_pairs: List[tuple] = field(default_factory=list)  # (view, po_index)
    checked_views: List[ViewKind] = field(default_factory=list)

    def summary(self) -> str:
        if self.ok:
            views = ",".join(v.value for v in self.checked_views)
            return f"PASS ({self.method}) views={views}"
        fails = " ".join(f"{v.value}:po{i}" for v, i in self.failing_pairs)
        return f"FAIL ({self.method}) {fails}"


def verify_views(
    record_or_views,
    exhaustive_pi_limit: int = 12,
    conflict_budget: int = 100_000,
) -> VerifyReport:
    """Check every PO of every non-AIG view against the AIG reference.

    Uses exhaustive simulation when the PI count allows, SAT miters otherwise.
    """
    from .records import DatasetRecord

    if isinstance(record_or_views, DatasetRecord):
        views = record_or_views.views
    else:
        views = record_or_views
    if ViewKind.AIG not in views or len(views) < 2:
        raise ValueError("need an AIG plus at least one derived view")
    base = views[ViewKind.AIG]
    others = [(vk, c) for vk, c in sorted(views.items(), key=lambda kv: kv[0].rank) if vk is not ViewKind.AIG]

    if len(base.pis) <= exhaustive_pi_limit:
        from .simulation import simulate_exhaustive

        method = "exhaustive-sim"
        ref = simulate_exhaustive(base)
        failing = []
        for vk, circ in others:
            got = simulate_exhaustive(circ)
            for po_i in range(len(base.pos)):
                a = ref.words[base.pos[po_i]]
                b = got.words[circ.pos[po_i]]
                if not (a == b).all():
                    failing.append((vk, po_i))
        return VerifyReport(
            ok=not failing,
            method=method,
            failing_pairs=failing,
            checked_views=[vk for vk, _ in others],
        )

    from .sat import build_miter
    from .solver import SatStatus, solve

    method = "sat-miter"
    failing = []
    for vk, circ in others:
        for po_i in range(len(base.pos)):
            cnf = build_miter(base, base.pos[po_i], circ, circ.pos[po_i])
            res = solve(cnf, conflict_budget=conflict_budget)
            if res.status is not SatStatus.UNSAT:
                failing.append((vk, po_i))
    return VerifyReport(
        ok=not failing,
        method=method,
        failing_pairs=failing,
        checked_views=[vk for vk, _ in others],
    )
