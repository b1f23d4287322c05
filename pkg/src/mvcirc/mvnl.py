"""MVNL v1: a one-node-per-line text netlist for all circuit views.

Layout::

    MVNL v1 <view> <n_nodes> <n_pis> <n_pos>
    PIS: <idx> <idx> ...
    POS: <idx> <idx> ...
    <idx> <GATE> <fanin idx...> [tt=<4-hex-digit>] [# comment]

Round trip is identity: parse(write(c)) has the same indices, gates, and
fanins as c.
"""

from __future__ import annotations

from .circuit import Circuit, GateType, ViewKind
from .errors import ArityMismatch, BadToken, IllegalGateForView, IndexOutOfRange


def write_mvnl(circuit: Circuit) -> str:
    lines = [
        f"MVNL v1 {circuit.view.value} {len(circuit.nodes)} "
        f"{len(circuit.pis)} {len(circuit.pos)}"
    ]
    lines.append("PIS: " + " ".join(str(i) for i in circuit.pis))
    lines.append("POS: " + " ".join(str(i) for i in circuit.pos))
    for idx, node in enumerate(circuit.nodes):
        parts = [str(idx), node.gate.value] + [str(f) for f in node.fanins]
        if node.gate is GateType.LUT4:
            parts.append(f"tt={node.tt:04x}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_mvnl(text: str) -> Circuit:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise BadToken("empty MVNL input")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "MVNL" or head[1] != "v1":
        raise BadToken(f"bad MVNL header: {lines[0]!r}")
    try:
        view = ViewKind(head[2])
    except ValueError:
        raise BadToken(f"unknown view {head[2]!r}") from None
    try:
        n_nodes, n_pis, n_pos = (int(x) for x in head[3:6])
    except ValueError:
        raise BadToken(f"bad header counts: {lines[0]!r}") from None

    if len(lines) < 3 or not lines[1].startswith("PIS:") or not lines[2].startswith("POS:"):
        raise BadToken("expected PIS:/POS: lines after the header")

    def idx_list(line: str, tag: str):
        body = line[len(tag) :].split()
        try:
            ids = [int(x) for x in body]
        except ValueError:
            raise BadToken(f"bad index in {tag} line") from None
        for i in ids:
            if not 0 <= i < n_nodes:
                raise IndexOutOfRange(f"{tag} index {i} out of range 0..{n_nodes - 1}")
        return ids

    pis = idx_list(lines[1], "PIS:")
    pos = idx_list(lines[2], "POS:")

    gates = [None] * n_nodes
    for ln in lines[3:]:
        tokens = ln.split()
        try:
            idx = int(tokens[0])
        except ValueError:
            raise BadToken(f"bad node index in line {ln!r}") from None
        if not 0 <= idx < n_nodes:
            raise IndexOutOfRange(f"node index {idx} out of range")
        if gates[idx] is not None:
            raise BadToken(f"node {idx} defined twice")
        try:
            gate = GateType(tokens[1])
        except (ValueError, IndexError):
            raise BadToken(f"unknown gate in line {ln!r}") from None
        tt = None
        fanin_toks = tokens[2:]
        if fanin_toks and fanin_toks[-1].startswith("tt="):
            try:
                tt = int(fanin_toks[-1][3:], 16)
            except ValueError:
                raise BadToken(f"bad truth table in line {ln!r}") from None
            fanin_toks = fanin_toks[:-1]
        try:
            fanins = [int(x) for x in fanin_toks]
        except ValueError:
            raise BadToken(f"bad fanin in line {ln!r}") from None
        for f in fanins:
            if not 0 <= f < n_nodes:
                raise IndexOutOfRange(f"fanin {f} out of range in line {ln!r}")
        gates[idx] = (gate, fanins, tt)
    missing = [i for i, g in enumerate(gates) if g is None]
    if missing:
        raise BadToken(f"nodes never defined: {missing[:8]}")

    # Rebuild without re-sorting so indices survive the round trip exactly.
    # That requires the file itself to be topologically indexed.
    from .circuit import Node, _check_node, levelize

    for idx, (gate, fanins, tt) in enumerate(gates):
        try:
            _check_node(view, gate, fanins, tt, idx)
        except (ArityMismatch, IllegalGateForView) as e:
            raise BadToken(str(e)) from None
        for f in fanins:
            if f >= idx:
                raise BadToken(
                    f"node {idx}: fanin {f} does not precede it (file must be "
                    "topologically ordered)"
                )
            if gates[f][0] is GateType.PO:
                raise BadToken(f"node {idx}: PO node {f} used as fanin")
    for p in pis:
        if gates[p][0] is not GateType.PI:
            raise BadToken(f"PIS entry {p} is not a PI node")
    for p in pos:
        if gates[p][0] is not GateType.PO:
            raise BadToken(f"POS entry {p} is not a PO node")
    if sum(1 for g, _, _ in gates if g is GateType.PI) != len(pis):
        raise BadToken("PIS line does not cover all PI nodes")
    if sum(1 for g, _, _ in gates if g is GateType.PO) != len(pos):
        raise BadToken("POS line does not cover all PO nodes")

    circuit = Circuit(
        view=view,
        nodes=tuple(Node(g, tuple(f), tt) for g, f, tt in gates),
        pis=tuple(pis),
        pos=tuple(pos),
        levels=(),
    )
    levels, _ = levelize(circuit)
    object.__setattr__(circuit, "levels", levels)
    return circuit
