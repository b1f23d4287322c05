"""AIGER reader/writer (combinational subset, ASCII `aag` and binary `aig`).

Complemented literals are materialized as explicit NOT nodes; literal 0 maps
to CONST0 and literal 1 to NOT(CONST0).  Latch sections are rejected.
"""

from __future__ import annotations

from typing import Optional

from .circuit import Circuit, GateType, ViewKind, build_circuit
from .errors import BadHeader, LatchesUnsupported, TruncatedFile


def _parse_header(line: bytes):
    parts = line.split()
    if len(parts) < 6 or parts[0] not in (b"aag", b"aig"):
        raise BadHeader(f"not an AIGER header: {line!r}")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError as e:
        raise BadHeader(str(e)) from None
    m, i, l, o, a = nums[:5]
    extras = nums[5:]
    if l != 0:
        raise LatchesUnsupported(f"{l} latches present; combinational subset only")
    if any(extras):
        raise BadHeader("bad/constraint/justice/fairness sections unsupported")
    if m < i + a:
        raise BadHeader(f"header M={m} < I+A={i + a}")
    return parts[0], m, i, o, a


class _LitMap:
    """Builds the explicit-NOT node list while resolving AIGER literals."""

    def __init__(self):
        self.gates = []  # (GateType, fanins)
        self.var_node = {}  # AIGER variable -> node index
        self.not_cache = {}  # node index -> NOT node index
        self.const0: Optional[int] = None

    def new_node(self, gate: GateType, fanins=()) -> int:
        self.gates.append((gate, tuple(fanins)))
        return len(self.gates) - 1

    def get_const0(self) -> int:
        if self.const0 is None:
            self.const0 = self.new_node(GateType.CONST0)
        return self.const0

    def invert(self, node: int) -> int:
        if node not in self.not_cache:
            self.not_cache[node] = self.new_node(GateType.NOT, (node,))
        return self.not_cache[node]

    def lit(self, literal: int) -> int:
        if literal == 0:
            return self.get_const0()
        if literal == 1:
            return self.invert(self.get_const0())
        var = literal >> 1
        if var not in self.var_node:
            raise BadHeader(f"literal {literal} references undefined variable {var}")
        node = self.var_node[var]
        return self.invert(node) if literal & 1 else node


def parse_aiger(data: bytes, name: str = "") -> Circuit:
    """Parse ASCII or binary AIGER bytes into an AIG-view circuit."""
    if isinstance(data, str):
        data = data.encode()
    nl = data.find(b"\n")
    if nl < 0:
        raise TruncatedFile("missing header line")
    fmt, m, n_in, n_out, n_and = _parse_header(data[:nl])
    body = data[nl + 1 :]

    lm = _LitMap()
    outputs = []
    if fmt == b"aag":
        lines = body.split(b"\n")
        pos = 0

        def next_line():
            nonlocal pos
            while pos < len(lines):
                ln = lines[pos].strip()
                pos += 1
                if ln:
                    return ln
            raise TruncatedFile("unexpected end of file")

        in_lits = []
        for _ in range(n_in):
            ln = next_line()
            try:
                lit = int(ln)
            except ValueError:
                raise TruncatedFile(f"bad input line {ln!r}") from None
            if lit & 1 or lit == 0:
                raise BadHeader(f"input literal {lit} must be a positive even literal")
            in_lits.append(lit)
        out_lits = []
        for _ in range(n_out):
            out_lits.append(int(next_line()))
        row_of = {}
        order = []
        for _ in range(n_and):
            parts = next_line().split()
            if len(parts) != 3:
                raise TruncatedFile(f"bad and line {parts!r}")
            lhs, rhs0, rhs1 = (int(p) for p in parts)
            if lhs & 1 or lhs == 0:
                raise BadHeader(f"bad and lhs literal {lhs}")
            if lhs >> 1 in row_of:
                raise BadHeader(f"variable {lhs >> 1} defined twice")
            row_of[lhs >> 1] = (rhs0, rhs1)
            order.append(lhs >> 1)

        for lit in in_lits:
            if lit >> 1 in row_of:
                raise BadHeader(f"variable {lit >> 1} defined as both input and gate")
            lm.var_node[lit >> 1] = lm.new_node(GateType.PI)

        # ASCII files need not be topologically sorted; resolve iteratively.
        for root in order:
            if root in lm.var_node:
                continue
            stack = [root]
            on_path = {root}
            while stack:
                var = stack[-1]
                if var in lm.var_node:
                    stack.pop()
                    on_path.discard(var)
                    continue
                rhs0, rhs1 = row_of[var]
                missing = sorted(
                    {
                        r >> 1
                        for r in (rhs0, rhs1)
                        if r > 1 and (r >> 1) not in lm.var_node
                    }
                )
                for dep in missing:
                    if dep not in row_of:
                        raise BadHeader(f"literal references undefined variable {dep}")
                    if dep in on_path:
                        raise BadHeader(f"cyclic definition through variable {dep}")
                if missing:
                    stack.extend(missing)
                    on_path.update(missing)
                    continue
                a = lm.lit(rhs0)
                b = lm.lit(rhs1)
                lm.var_node[var] = lm.new_node(GateType.AND2, (a, b))
                stack.pop()
                on_path.discard(var)
        outputs = out_lits
        tail = lines[pos:]
    else:
        # binary: inputs implicit (vars 1..I), outputs as ASCII lines, ANDs packed
        for var in range(1, n_in + 1):
            lm.var_node[var] = lm.new_node(GateType.PI)
        pos = 0
        for _ in range(n_out):
            nl2 = body.find(b"\n", pos)
            if nl2 < 0:
                raise TruncatedFile("missing output line")
            try:
                outputs.append(int(body[pos:nl2]))
            except ValueError:
                raise TruncatedFile("bad output line") from None
            pos = nl2 + 1
        buf = body
        for k in range(n_and):
            lhs = 2 * (n_in + k + 1)
            delta0, pos = _read_delta(buf, pos)
            delta1, pos = _read_delta(buf, pos)
            rhs0 = lhs - delta0
            rhs1 = rhs0 - delta1
            if rhs0 < 0 or rhs1 < 0:
                raise BadHeader(f"negative rhs literal in and {k}")
            a = lm.lit(rhs0)
            b = lm.lit(rhs1)
            lm.var_node[lhs >> 1] = lm.new_node(GateType.AND2, (a, b))
        tail = buf[pos:].split(b"\n")

    po_nodes = []
    for lit in outputs:
        drv = lm.lit(lit)
        po_nodes.append(lm.new_node(GateType.PO, (drv,)))
    pis = [i for i, (g, _) in enumerate(lm.gates) if g is GateType.PI]

    # symbols/comments survive only as name metadata
    meta = [t.decode("utf-8", "replace") for t in tail if t.strip()]
    full_name = name
    if meta:
        full_name = (name + "|" if name else "") + ";".join(meta)

    return build_circuit(ViewKind.AIG, lm.gates, pis, po_nodes, name=full_name)


def _read_delta(buf: bytes, pos: int):
    """LEB128-style delta used by binary AIGER."""
    val = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise TruncatedFile("truncated binary and section")
        byte = buf[pos]
        pos += 1
        val |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return val, pos
        shift += 7


def write_aiger(circuit: Circuit, binary: bool = False) -> bytes:
    """Encode an AIG-view circuit (gates ⊆ {AND2, NOT, CONST}) as AIGER bytes.

    NOT nodes fold back into complemented literals; CONST0 becomes literal 0.
    """
    if circuit.view is not ViewKind.AIG:
        raise BadHeader(f"write_aiger requires an AIG view, got {circuit.view.value}")

    def literal(idx: int) -> int:
        neg = 0
        node = circuit.nodes[idx]
        while node.gate is GateType.NOT:
            neg ^= 1
            idx = node.fanins[0]
            node = circuit.nodes[idx]
        if node.gate is GateType.CONST0:
            return neg
        if node.gate is GateType.CONST1:
            return 1 - neg
        return 2 * var_of[idx] + neg

    var_of = {}
    and_nodes = []
    for k, p in enumerate(circuit.pis):
        var_of[p] = k + 1
    for idx, node in enumerate(circuit.nodes):
        if node.gate is GateType.AND2:
            var_of[idx] = len(circuit.pis) + len(and_nodes) + 1
            and_nodes.append(idx)

    n_in, n_and = len(circuit.pis), len(and_nodes)
    m = n_in + n_and
    out_lits = [literal(circuit.nodes[p].fanins[0]) for p in circuit.pos]

    if not binary:
        lines = [f"aag {m} {n_in} 0 {len(circuit.pos)} {n_and}"]
        lines += [str(2 * var_of[p]) for p in circuit.pis]
        lines += [str(x) for x in out_lits]
        for idx in and_nodes:
            a, b = circuit.nodes[idx].fanins
            lines.append(f"{2 * var_of[idx]} {literal(a)} {literal(b)}")
        return ("\n".join(lines) + "\n").encode()

    head = f"aig {m} {n_in} 0 {len(circuit.pos)} {n_and}\n".encode()
    out = bytearray(head)
    for x in out_lits:
        out += f"{x}\n".encode()
    for idx in and_nodes:
        lhs = 2 * var_of[idx]
        a, b = (literal(f) for f in circuit.nodes[idx].fanins)
        rhs0, rhs1 = max(a, b), min(a, b)
        for delta in (lhs - rhs0, rhs0 - rhs1):
            while True:
                byte = delta & 0x7F
                delta >>= 7
                out.append(byte | (0x80 if delta else 0))
                if not delta:
                    break
    return bytes(out)
