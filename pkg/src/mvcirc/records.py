"""Dataset records: one design's views, equivalence labels, and sim ground truth.

Records serialize one-per-line as JSON with sorted keys and floats rendered at
9 significant digits, so corpora stream line-by-line and byte-compare stably.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

from .circuit import Circuit, GateType, Node, ViewKind, levelize
from .errors import SchemaViolation

SCHEMA_VERSION = 1


@dataclass
class DatasetRecord:
    name: str
    views: Dict[ViewKind, Circuit]
    equiv_pairs: List[Tuple[ViewKind, int, ViewKind, int]] = field(default_factory=list)
    spp_truth: Dict[ViewKind, List[float]] = field(default_factory=dict)
    tt_fingerprints: Dict[ViewKind, List[int]] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def validate(self) -> None:
        if ViewKind.AIG not in self.views:
            raise SchemaViolation(f"record {self.name!r}: AIG view is required")
        base = self.views[ViewKind.AIG]
        for vk, circ in self.views.items():
            if len(circ.pis) != len(base.pis) or len(circ.pos) != len(base.pos):
                raise SchemaViolation(
                    f"record {self.name!r}: view {vk.value} PI/PO counts differ from AIG"
                )
        for va, na, vb, nb in self.equiv_pairs:
            for vk, idx in ((va, na), (vb, nb)):
                if vk not in self.views:
                    raise SchemaViolation(
                        f"record {self.name!r}: pair references missing view {vk.value}"
                    )
                if not 0 <= idx < len(self.views[vk].nodes):
                    raise SchemaViolation(
                        f"record {self.name!r}: pair node {idx} out of range in {vk.value}"
                    )
        for vk, probs in self.spp_truth.items():
            if vk not in self.views:
                raise SchemaViolation(
                    f"record {self.name!r}: spp_truth references missing view {vk.value}"
                )
            if len(probs) != len(self.views[vk].nodes):
                raise SchemaViolation(
                    f"record {self.name!r}: spp_truth length mismatch for {vk.value}"
                )
            if any(not 0.0 <= p <= 1.0 for p in probs):
                raise SchemaViolation(f"record {self.name!r}: spp value outside [0,1]")
        for vk, fps in self.tt_fingerprints.items():
            if vk not in self.views or len(fps) != len(self.views[vk].nodes):
                raise SchemaViolation(
                    f"record {self.name!r}: fingerprint table mismatch for {vk.value}"
                )


def _f9(x: float) -> float:
    """Round-trip a float through 9 significant digits."""
    return float(f"{x:.9g}")


def _circuit_to_obj(circ: Circuit) -> dict:
    nodes = []
    for node in circ.nodes:
        row = [node.gate.value, list(node.fanins)]
        if node.tt is not None:
            row.append(node.tt)
        nodes.append(row)
    return {
        "name": circ.name,
        "nodes": nodes,
        "pis": list(circ.pis),
        "pos": list(circ.pos),
        "view": circ.view.value,
    }


def _circuit_from_obj(obj: dict) -> Circuit:
    try:
        view = ViewKind(obj["view"])
        nodes = []
        for row in obj["nodes"]:
            gate = GateType(row[0])
            fanins = tuple(int(f) for f in row[1])
            tt = int(row[2]) if len(row) > 2 else None
            nodes.append(Node(gate, fanins, tt))
        circ = Circuit(
            view=view,
            nodes=tuple(nodes),
            pis=tuple(int(i) for i in obj["pis"]),
            pos=tuple(int(i) for i in obj["pos"]),
            levels=(),
            name=obj.get("name", ""),
        )
    except (KeyError, ValueError, TypeError) as e:
        raise SchemaViolation(f"bad circuit object: {e}") from None
    levels, _ = levelize(circ)
    object.__setattr__(circ, "levels", levels)
    return circ


def record_to_json(record: DatasetRecord) -> str:
    record.validate()
    obj = {
        "equiv_pairs": [
            [va.value, na, vb.value, nb] for va, na, vb, nb in record.equiv_pairs
        ],
        "meta": dict(sorted(record.meta.items())),
        "name": record.name,
        "schema": SCHEMA_VERSION,
        "spp_truth": {
            vk.value: [_f9(p) for p in probs]
            for vk, probs in sorted(record.spp_truth.items(), key=lambda kv: kv[0].value)
        },
        "tt_fingerprints": {
            vk.value: [int(f) for f in fps]
            for vk, fps in sorted(record.tt_fingerprints.items(), key=lambda kv: kv[0].value)
        },
        "views": {
            vk.value: _circuit_to_obj(c)
            for vk, c in sorted(record.views.items(), key=lambda kv: kv[0].value)
        },
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def record_from_json(line: str) -> DatasetRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise SchemaViolation(f"bad record line: {e}") from None
    if not isinstance(obj, dict) or obj.get("schema") != SCHEMA_VERSION:
        raise SchemaViolation("missing or unsupported record schema version")
    try:
        views = {ViewKind(k): _circuit_from_obj(v) for k, v in obj["views"].items()}
        pairs = [
            (ViewKind(va), int(na), ViewKind(vb), int(nb))
            for va, na, vb, nb in obj.get("equiv_pairs", [])
        ]
        spp = {
            ViewKind(k): [float(p) for p in v] for k, v in obj.get("spp_truth", {}).items()
        }
        fps = {
            ViewKind(k): [int(f) for f in v]
            for k, v in obj.get("tt_fingerprints", {}).items()
        }
        record = DatasetRecord(
            name=str(obj.get("name", "")),
            views=views,
            equiv_pairs=pairs,
            spp_truth=spp,
            tt_fingerprints=fps,
            meta=dict(obj.get("meta", {})),
        )
    except (KeyError, ValueError, TypeError) as e:
        raise SchemaViolation(f"bad record line: {e}") from None
    record.validate()
    return record


def write_records(records: Iterable[DatasetRecord], fh: TextIO) -> int:
    n = 0
    for rec in records:
        fh.write(record_to_json(rec) + "\n")
        n += 1
    return n


def read_records(fh: TextIO) -> List[DatasetRecord]:
    out = []
    for line in fh:
        line = line.strip()
        if line:
            out.append(record_from_json(line))
    return out
