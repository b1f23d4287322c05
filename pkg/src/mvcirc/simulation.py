"""Bit-parallel random simulation, signal probabilities, and truth tables.

Patterns are packed 64 per machine word.  PI stimuli come from a counter-based
generator keyed on (seed, pi_index, word_index), so two views of the same
design see identical stimuli no matter how their internal nodes are ordered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .circuit import Circuit, GateType
from .errors import LengthMismatch, SupportTooLarge

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# Exhaustive truth-table patterns for up to 6 variables in one 64-bit word.
_VAR_WORDS = [
    0xAAAAAAAAAAAAAAAA,
    0xCCCCCCCCCCCCCCCC,
    0xF0F0F0F0F0F0F0F0,
    0xFF00FF00FF00FF00,
    0xFFFF0000FFFF0000,
    0xFFFFFFFF00000000,
]


def _splitmix(x: np.ndarray) -> np.ndarray:
    x = (x + _GOLDEN).astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def pi_stimulus(seed: int, pi_index: int, n_words: int) -> np.ndarray:
    """Deterministic pattern words for one PI, independent of node ordering."""
    with np.errstate(over="ignore"):
        base = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ _splitmix(np.uint64(pi_index))
        ctr = np.arange(n_words, dtype=np.uint64)
        return _splitmix(_splitmix(ctr) ^ base)


@dataclass
class SimState:
    """Packed per-node pattern bits: shape (n_nodes, n_words) of uint64."""

    words: np.ndarray
    n_patterns: int
    seed: int
    exhaustive_pis: Optional[int] = None  # set when patterns enumerate 2^k inputs

    @property
    def n_words(self) -> int:
        return self.words.shape[1]


def _eval_lut(tt: int, fanin_words: Sequence[np.ndarray]) -> np.ndarray:
    """Bit-parallel LUT evaluation: OR of minterms present in the table."""
    k = len(fanin_words)
    out = np.zeros_like(fanin_words[0])
    for m in range(1 << k):
        if (tt >> m) & 1:
            term = np.full_like(out, np.uint64(0xFFFFFFFFFFFFFFFF))
            for i in range(k):
                w = fanin_words[i]
                term &= w if (m >> i) & 1 else ~w
            out |= term
    return out


def simulate(
    circuit: Circuit,
    n_patterns: int,
    seed: int,
    pi_words: Optional[np.ndarray] = None,
) -> SimState:
    """Simulate ``n_patterns`` (multiple of 64) random patterns.

    ``pi_words`` overrides the generated stimuli (used for exhaustive
    enumeration and witness replay); shape (n_pis, n_words).
    """
    if n_patterns % 64 != 0 or n_patterns <= 0:
        raise ValueError("n_patterns must be a positive multiple of 64")
    n_words = n_patterns // 64
    words = np.zeros((len(circuit.nodes), n_words), dtype=np.uint64)
    if pi_words is None:
        for k, p in enumerate(circuit.pis):
            words[p] = pi_stimulus(seed, k, n_words)
    else:
        for k, p in enumerate(circuit.pis):
            words[p] = pi_words[k]

    ones = np.uint64(0xFFFFFFFFFFFFFFFF)
    for idx, node in enumerate(circuit.nodes):
        g = node.gate
        if g is GateType.PI:
            continue
        if g is GateType.CONST0:
            continue  # already zero
        if g is GateType.CONST1:
            words[idx] = ones
        elif g is GateType.NOT:
            words[idx] = ~words[node.fanins[0]]
        elif g is GateType.AND2:
            words[idx] = words[node.fanins[0]] & words[node.fanins[1]]
        elif g is GateType.OR2:
            words[idx] = words[node.fanins[0]] | words[node.fanins[1]]
        elif g is GateType.XOR2:
            words[idx] = words[node.fanins[0]] ^ words[node.fanins[1]]
        elif g is GateType.MAJ3:
            a, b, c = (words[f] for f in node.fanins)
            words[idx] = (a & b) | (b & c) | (a & c)
        elif g is GateType.LUT4:
            words[idx] = _eval_lut(node.tt, [words[f] for f in node.fanins])
        elif g is GateType.PO:
            words[idx] = words[node.fanins[0]]
        else:  # pragma: no cover
            raise ValueError(f"unsimulatable gate {g}")
    return SimState(words=words, n_patterns=n_patterns, seed=seed)


def exhaustive_pi_words(n_pis: int, var_index=None) -> np.ndarray:
    """Stimuli enumerating all 2^n_pis assignments (full periods past 64).

    Pattern p assigns PI i the bit ((p mod 2^n) >> i) & 1, the standard truth
    table ordering.  For n < 6 the 64-slot word repeats whole periods, so
    probabilities and equality comparisons stay exact.
    """
    if var_index is None:
        var_index = list(range(n_pis))
    n_patterns = max(64, 1 << n_pis)
    n_words = n_patterns // 64
    out = np.zeros((len(var_index), n_words), dtype=np.uint64)
    for row, i in enumerate(var_index):
        if i < 6:
            out[row, :] = np.uint64(_VAR_WORDS[i])
        else:
            # word w covers patterns [64w, 64w+64); bit = (p >> i) & 1
            w = np.arange(n_words, dtype=np.uint64)
            bit = (w >> np.uint64(i - 6)) & np.uint64(1)
            out[row, :] = bit * np.uint64(0xFFFFFFFFFFFFFFFF)
    return out


def simulate_exhaustive(circuit: Circuit) -> SimState:
    """Simulate every input assignment (circuit must have ≤ 16 PIs)."""
    n = len(circuit.pis)
    if n > 16:
        raise SupportTooLarge(f"{n} PIs exceed the exhaustive limit of 16")
    pi_words = exhaustive_pi_words(n)
    n_patterns = max(64, 1 << n)
    state = simulate(circuit, n_patterns, seed=0, pi_words=pi_words)
    state.exhaustive_pis = n
    return state


def signal_probability(state: SimState) -> np.ndarray:
    """Per-node fraction of 1-bits over all simulated patterns."""
    counts = np.bitwise_count(state.words).sum(axis=1, dtype=np.float64)
    return counts / float(state.n_patterns)


@dataclass
class TruthTable:
    """Packed truth table over k support variables (2^k bits)."""

    words: np.ndarray
    n_vars: int

    @property
    def n_bits(self) -> int:
        return 1 << self.n_vars

    def bit(self, pos: int) -> int:
        return int((self.words[pos // 64] >> np.uint64(pos % 64)) & np.uint64(1))

    def bits_str(self) -> str:
        return "".join(str(self.bit(p)) for p in range(self.n_bits))

    def as_int(self) -> int:
        """Table as a python int (LSB = pattern 0); fine up to 16 vars."""
        val = 0
        for w_i in range(len(self.words)):
            val |= int(self.words[w_i]) << (64 * w_i)
        return val & ((1 << self.n_bits) - 1)


def node_support(circuit: Circuit, node: int) -> list:
    """PI indices (positions in circuit.pis) in the structural cone of ``node``."""
    from .circuit import fanin_cone

    cone = fanin_cone(circuit, node)
    pi_pos = {p: k for k, p in enumerate(circuit.pis)}
    return sorted(pi_pos[i] for i in cone if i in pi_pos)


def exhaustive_truth_table(circuit: Circuit, node: int) -> TruthTable:
    """Exact truth table of ``node`` over its support (≤ 16 PIs).

    Bit p is the node's value when the j-th support variable (in circuit.pis
    order) takes bit j of p.
    """
    support = node_support(circuit, node)
    k = len(support)
    if k > 16:
        raise SupportTooLarge(f"support of node {node} has {k} PIs (> 16)")
    n_patterns = max(64, 1 << k)
    n_words = n_patterns // 64
    # Assign enumeration patterns to support PIs; others are irrelevant (0).
    pi_words = np.zeros((len(circuit.pis), n_words), dtype=np.uint64)
    local = exhaustive_pi_words(k)
    for j, pi_pos in enumerate(support):
        pi_words[pi_pos] = local[j]
    state = simulate(circuit, n_patterns, seed=0, pi_words=pi_words)
    words = state.words[node].copy()
    if k < 6:  # keep only the first 2^k bits
        mask = np.uint64((1 << (1 << k)) - 1)
        words = words[:1] & mask
    return TruthTable(words=words, n_vars=k)


def truth_table_distance(a, b) -> float:
    """Normalized Hamming distance between two equal-length bit vectors.

    Accepts TruthTable instances or raw (words, n_bits) pairs.
    """
    if isinstance(a, TruthTable):
        a_words, a_bits = a.words, a.n_bits
    else:
        a_words, a_bits = a
    if isinstance(b, TruthTable):
        b_words, b_bits = b.words, b.n_bits
    else:
        b_words, b_bits = b
    if a_bits != b_bits:
        raise LengthMismatch(f"table lengths differ: {a_bits} vs {b_bits}")
    diff = a_words ^ b_words
    if a_bits < 64:
        diff = diff & np.uint64((1 << a_bits) - 1)
    return int(np.bitwise_count(diff).sum()) / a_bits


def _hash_words(words: np.ndarray) -> int:
    """Stable 64-bit FNV-1a over the raw pattern words."""
    h = np.uint64(0xCBF29CE484222325)
    prime = np.uint64(0x100000001B3)
    with np.errstate(over="ignore"):
        for w in words:
            h = (h ^ w) * prime
    return int(h)


def fingerprint(state: SimState, node: int) -> int:
    """Stable hash of a node's simulated pattern bits."""
    return _hash_words(state.words[node])


def canonical_fingerprint(state: SimState, node: int) -> tuple:
    """(hash of min(bits, ~bits), polarity) — complement-insensitive key.

    polarity is 0 when the raw bits are the canonical side, 1 when the
    complement is.
    """
    raw = state.words[node]
    comp = ~raw
    for a, b in zip(raw.tolist(), comp.tolist()):
        if a < b:
            return _hash_words(raw), 0
        if b < a:
            return _hash_words(comp), 1
    return _hash_words(raw), 0  # self-complementary is impossible; all-equal words
