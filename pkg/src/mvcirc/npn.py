"""NPN canonicalization of 4-input functions and the resynthesis template DB.

Every 16-bit truth table maps to a canonical class representative under input
negation, input permutation, and output negation (222 classes).  The database
stores one gate-level template per class and target view; instantiating a
template applies the inverse transform (input NOTs, permutation, output NOT).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Tuple

import numpy as np

from .circuit import Circuit, GateType, ViewKind, build_circuit
from .errors import BadToken, MissingTemplate
from .lutmap import VAR_TT

N_NPN4_CLASSES = 222
_MASK16 = 0xFFFF


def expand_tt(tt: int, n_inputs: int) -> int:
    """Extend an n-input table to 4 vacuous inputs (16 bits)."""
    width = 1 << n_inputs
    tt &= (1 << width) - 1
    while width < 16:
        tt |= tt << width
        width *= 2
    return tt & _MASK16


def tt_support(tt: int) -> Tuple[int, ...]:
    """Input positions the 16-bit function actually depends on."""
    dep = []
    for j in range(4):
        shift = 1 << j
        pos = tt & VAR_TT[j]
        neg = tt & (VAR_TT[j] ^ _MASK16)
        if (pos >> shift) != neg:
            dep.append(j)
    return tuple(dep)


def _build_transforms():
    """All 768 (perm, flips, output-flip) transforms as gather tables.

    Transform τ maps f to g with g(x0..x3) = oflip ^ f(y0..y3), where
    y_j = x_{perm[j]} ^ flip_j.  gather[t][m] gives the index into f's table
    for output minterm m; oflips[t] the output inversion.
    """
    transforms = []
    gather = []
    oflips = []
    for perm in itertools.permutations(range(4)):
        for flips in range(16):
            for oflip in range(2):
                row = []
                for m in range(16):
                    my = 0
                    for j in range(4):
                        xv = (m >> perm[j]) & 1
                        yv = xv ^ ((flips >> j) & 1)
                        my |= yv << j
                    row.append(my)
                transforms.append((perm, flips, oflip))
                gather.append(row)
                oflips.append(oflip)
    return transforms, np.array(gather, dtype=np.int64), np.array(oflips, dtype=np.uint8)

TRANSFORMS, _GATHER, _OFLIPS = _build_transforms()
_POW2 = (np.uint32(1) << np.arange(16, dtype=np.uint32)).astype(np.int64)


def apply_transform(tt: int, transform: tuple) -> int:
    """Transformed table of g(x) = oflip ^ tt(y), y_j = x_{perm[j]} ^ flip_j."""
    perm, flips, oflip = transform
    out = 0
    for m in range(16):
        my = 0
        for j in range(4):
            yv = ((m >> perm[j]) & 1) ^ ((flips >> j) & 1)
            my |= yv << j
        bit = ((tt >> my) & 1) ^ oflip
        out |= bit << m
    return out


def npn_canon(tt: int) -> Tuple[int, tuple]:
    """(canonical representative, transform τ with apply_transform(tt, τ) = canon)."""
    bits = np.array([(tt >> m) & 1 for m in range(16)], dtype=np.int64)
    tables = bits[_GATHER]  # (768, 16)
    tables ^= _OFLIPS[:, None].astype(np.int64)
    packed = tables @ _POW2
    best = int(packed.argmin())
    return int(packed[best]), TRANSFORMS[best]


def enumerate_npn_classes() -> List[int]:
    """Canonical representatives of all 4-input NPN classes (sorted)."""
    canon_of = np.full(1 << 16, -1, dtype=np.int64)
    reps = []
    for tt in range(1 << 16):
        if canon_of[tt] >= 0:
            continue
        bits = np.array([(tt >> m) & 1 for m in range(16)], dtype=np.int64)
        tables = (bits[_GATHER] ^ _OFLIPS[:, None].astype(np.int64)) @ _POW2
        rep = int(tables.min())
        canon_of[tables] = rep
        reps.append(rep)
    return sorted(set(reps))


@dataclass
class Template:
    """Gate-level implementation of one canonical class in a target view.

    Nodes 0..3 are the four input PIs; the single PO closes the list.
    """

    canon: int
    circuit: Circuit

    @property
    def gate_count(self) -> int:
        skip = (GateType.PI, GateType.PO, GateType.CONST0, GateType.CONST1, GateType.NOT)
        return sum(1 for n in self.circuit.nodes if n.gate not in skip)


def template_tt(circuit: Circuit) -> int:
    """Exhaustive 4-input simulation of a template; returns its 16-bit table."""
    vals: List[int] = []
    for idx, node in enumerate(circuit.nodes):
        g = node.gate
        if g is GateType.PI:
            vals.append(VAR_TT[circuit.pis.index(idx)])
        elif g is GateType.CONST0:
            vals.append(0)
        elif g is GateType.CONST1:
            vals.append(_MASK16)
        elif g is GateType.NOT:
            vals.append(vals[node.fanins[0]] ^ _MASK16)
        elif g is GateType.AND2:
            vals.append(vals[node.fanins[0]] & vals[node.fanins[1]])
        elif g is GateType.OR2:
            vals.append(vals[node.fanins[0]] | vals[node.fanins[1]])
        elif g is GateType.XOR2:
            vals.append(vals[node.fanins[0]] ^ vals[node.fanins[1]])
        elif g is GateType.MAJ3:
            a, b, c = (vals[f] for f in node.fanins)
            vals.append((a & b) | (b & c) | (a & c))
        else:
            raise BadToken(f"gate {g.value} not allowed in a template")
    return vals[circuit.pos[0]]


class Npn4Db:
    """Canonical-class -> template map for one target view."""

    def __init__(self, view: ViewKind, templates: Dict[int, Template]):
        self.view = view
        self.templates = templates

    def lookup(self, canon: int) -> Template:
        t = self.templates.get(canon)
        if t is None:
            raise MissingTemplate(
                f"no {self.view.value} template for class {canon:04x}"
            )
        return t

    def self_check(self) -> None:
        """Verify every template reproduces its class function exactly."""
        if len(self.templates) != N_NPN4_CLASSES:
            raise MissingTemplate(
                f"{self.view.value} database holds {len(self.templates)} classes, "
                f"expected {N_NPN4_CLASSES}"
            )
        for canon, tpl in self.templates.items():
            got = template_tt(tpl.circuit)
            if got != canon:
                raise MissingTemplate(
                    f"{self.view.value} template for {canon:04x} computes {got:04x}"
                )


def dump_db(db: Npn4Db) -> str:
    lines = [f"NPN4DB v1 {db.view.value} {len(db.templates)}"]
    for canon in sorted(db.templates):
        circ = db.templates[canon].circuit
        lines.append(f"CLASS tt={canon:04x} nodes={len(circ.nodes)}")
        for idx, node in enumerate(circ.nodes):
            parts = [str(idx), node.gate.value] + [str(f) for f in node.fanins]
            lines.append(" ".join(parts))
        lines.append("END")
    return "\n".join(lines) + "\n"


def parse_db(text: str) -> Npn4Db:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise BadToken("empty template database")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "NPN4DB" or head[1] != "v1":
        raise BadToken(f"bad NPN4DB header: {lines[0]!r}")
    view = ViewKind(head[2])
    templates: Dict[int, Template] = {}
    i = 1
    while i < len(lines):
        hd = lines[i].split()
        if hd[0] != "CLASS" or not hd[1].startswith("tt="):
            raise BadToken(f"expected CLASS line, got {lines[i]!r}")
        canon = int(hd[1][3:], 16)
        i += 1
        gates = []
        while i < len(lines) and lines[i] != "END":
            toks = lines[i].split()
            if int(toks[0]) != len(gates):
                raise BadToken(f"non-sequential template node line {lines[i]!r}")
            gates.append((GateType(toks[1]), tuple(int(x) for x in toks[2:])))
            i += 1
        if i >= len(lines):
            raise BadToken("template without END line")
        i += 1
        po = [k for k, (g, _) in enumerate(gates) if g is GateType.PO]
        pis = [k for k, (g, _) in enumerate(gates) if g is GateType.PI]
        if len(po) != 1 or pis != [0, 1, 2, 3]:
            raise BadToken(f"template for {canon:04x} must have PIs 0..3 and one PO")
        circ = build_circuit(view, gates, pis, po)
        templates[canon] = Template(canon=canon, circuit=circ)
    return Npn4Db(view=view, templates=templates)


_DB_CACHE: Dict[ViewKind, Npn4Db] = {}


def load_db(view: ViewKind, path: Optional[str] = None) -> Npn4Db:
    """Load (and self-check) the packaged template database for a view."""
    if path is None and view in _DB_CACHE:
        return _DB_CACHE[view]
    if path is None:
        text = (
            resources.files("mvcirc.data")
            .joinpath(f"npn4_{view.value.lower()}.txt")
            .read_text()
        )
    else:
        with open(path) as fh:
            text = fh.read()
    db = parse_db(text)
    if db.view is not view:
        raise BadToken(f"database is for {db.view.value}, requested {view.value}")
    db.self_check()
    if path is None:
        _DB_CACHE[view] = db
    return db
