"""Circuit-to-CNF encoding, miter construction, and DIMACS export.

Literals follow DIMACS conventions: variables are 1-based ints, negative means
complemented.  Only the transitive fanin of the requested roots is encoded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .circuit import Circuit, GateType, fanin_cone
from .errors import PiCountMismatch


@dataclass
class Cnf:
    n_vars: int = 0
    clauses: List[List[int]] = field(default_factory=list)
    var_map: Dict[tuple, int] = field(default_factory=dict)  # (tag, node) -> var

    def new_var(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def add(self, *lits: int) -> None:
        if not lits:
            raise ValueError("empty clause at construction")
        for lit in lits:
            if lit == 0 or abs(lit) > self.n_vars:
                raise ValueError(f"literal {lit} references an undeclared variable")
        self.clauses.append(list(lits))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        for cl in self.clauses:
            lines.append(" ".join(str(x) for x in cl) + " 0")
        return "\n".join(lines) + "\n"


def _encode_gate(cnf: Cnf, gate: GateType, o: int, ins: Sequence[int], tt: Optional[int]) -> None:
    if gate is GateType.AND2:
        a, b = ins
        cnf.add(-o, a)
        cnf.add(-o, b)
        cnf.add(o, -a, -b)
    elif gate is GateType.OR2:
        a, b = ins
        cnf.add(o, -a)
        cnf.add(o, -b)
        cnf.add(-o, a, b)
    elif gate is GateType.NOT:
        (a,) = ins
        cnf.add(o, a)
        cnf.add(-o, -a)
    elif gate is GateType.XOR2:
        a, b = ins
        cnf.add(-o, a, b)
        cnf.add(-o, -a, -b)
        cnf.add(o, -a, b)
        cnf.add(o, a, -b)
    elif gate is GateType.MAJ3:
        a, b, c = ins
        # o=1 forces at-least-two, o=0 forces at-most-one
        cnf.add(-o, a, b)
        cnf.add(-o, b, c)
        cnf.add(-o, a, c)
        cnf.add(o, -a, -b)
        cnf.add(o, -b, -c)
        cnf.add(o, -a, -c)
    elif gate is GateType.CONST0:
        cnf.add(-o)
    elif gate is GateType.CONST1:
        cnf.add(o)
    elif gate is GateType.LUT4:
        k = len(ins)
        for row in range(1 << k):
            lits = [(-ins[i] if (row >> i) & 1 else ins[i]) for i in range(k)]
            lits.append(o if (tt >> row) & 1 else -o)
            cnf.add(*lits)
    else:  # pragma: no cover
        raise ValueError(f"cannot encode gate {gate}")


def tseitin_encode(
    circuit: Circuit,
    roots: Sequence[int],
    cnf: Optional[Cnf] = None,
    tag: str = "a",
    pi_vars: Optional[Dict[int, int]] = None,
) -> Cnf:
    """Standard gate clauses for the transitive fanin of ``roots``.

    ``pi_vars`` maps PI position -> existing CNF variable so two circuits can
    share inputs; new PI variables are recorded there as they are created.
    PO markers alias their driver's variable.
    """
    if cnf is None:
        cnf = Cnf()
    cone = set()
    for r in roots:
        cone |= fanin_cone(circuit, r)
    pi_pos = {p: k for k, p in enumerate(circuit.pis)}
    for idx in sorted(cone):
        node = circuit.nodes[idx]
        key = (tag, idx)
        if key in cnf.var_map:
            continue
        if node.gate is GateType.PI:
            k = pi_pos[idx]
            if pi_vars is not None and k in pi_vars:
                cnf.var_map[key] = pi_vars[k]
            else:
                v = cnf.new_var()
                cnf.var_map[key] = v
                if pi_vars is not None:
                    pi_vars[k] = v
            continue
        if node.gate is GateType.PO:
            cnf.var_map[key] = cnf.var_map[(tag, node.fanins[0])]
            continue
        o = cnf.new_var()
        cnf.var_map[key] = o
        ins = [cnf.var_map[(tag, f)] for f in node.fanins]
        _encode_gate(cnf, node.gate, o, ins, node.tt)
    return cnf


def build_miter(
    circ_a: Circuit,
    node_a: int,
    circ_b: Circuit,
    node_b: int,
    assert_output: bool = True,
    complement: bool = False,
) -> Cnf:
    """CNF whose satisfying assignments witness node_a ≠ node_b.

    PIs are tied positionally.  The XOR output is asserted true (``a`` and
    ``b`` must differ), so UNSAT proves equivalence.  With ``complement`` the
    XNOR is asserted instead, so UNSAT proves a ≡ NOT b.
    """
    if len(circ_a.pis) != len(circ_b.pis):
        raise PiCountMismatch(
            f"{len(circ_a.pis)} PIs vs {len(circ_b.pis)} PIs"
        )
    cnf = Cnf()
    pi_vars: Dict[int, int] = {}
    tseitin_encode(circ_a, [node_a], cnf, tag="a", pi_vars=pi_vars)
    tseitin_encode(circ_b, [node_b], cnf, tag="b", pi_vars=pi_vars)
    add_miter_output(cnf, ("a", node_a), ("b", node_b), assert_output, complement)
    return cnf


def add_miter_output(
    cnf: Cnf,
    key_a: tuple,
    key_b: tuple,
    assert_output: bool = True,
    complement: bool = False,
) -> int:
    """XOR the two mapped signals; returns the XOR output variable."""
    a = cnf.var_map[key_a]
    b = cnf.var_map[key_b]
    o = cnf.new_var()
    cnf.add(-o, a, b)
    cnf.add(-o, -a, -b)
    cnf.add(o, -a, b)
    cnf.add(o, a, -b)
    cnf.var_map[("miter", key_a, key_b)] = o
    if assert_output:
        cnf.add(-o if complement else o)
    return o


def pigeonhole_cnf(pigeons: int, holes: int) -> Cnf:
    """PHP(p, h): unsatisfiable whenever p > h.  Used as a solver fixture."""
    cnf = Cnf()
    var = {}
    for p in range(pigeons):
        for h in range(holes):
            var[(p, h)] = cnf.new_var()
    for p in range(pigeons):
        cnf.add(*(var[(p, h)] for h in range(holes)))
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                cnf.add(-var[(p1, h)], -var[(p2, h)])
    return cnf
