"""Conflict-driven clause-learning SAT solver.

Complete CDCL with two-watched-literal propagation, first-UIP learning,
VSIDS-style activity decay, phase saving, and geometric restarts.  Unsat and
Sat answers are certain; ResourceOut is returned only when the conflict
budget runs out (it is a result, not an error).
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .sat import Cnf

_UNDEF, _TRUE, _FALSE = 0, 1, -1


class SatStatus(enum.Enum):
    UNSAT = "UNSAT"
    SAT = "SAT"
    RESOURCE_OUT = "RESOURCE_OUT"


@dataclass
class SatResult:
    status: SatStatus
    model: Optional[List[bool]] = None  # 1-based: model[v] for variable v
    conflicts: int = 0

    @property
    def is_sat(self) -> bool:
        return self.status is SatStatus.SAT

    @property
    def is_unsat(self) -> bool:
        return self.status is SatStatus.UNSAT


def _enc(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit << 1) | 1)


class Solver:
    """One CDCL instance over a fixed variable count; clauses may be added
    between solve() calls (assumption-based incremental use)."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.clauses: List[List[int]] = []
        self.watches: List[List[int]] = [[] for _ in range(2 * n_vars + 2)]
        self.assign = [_UNDEF] * (n_vars + 1)
        self.level = [0] * (n_vars + 1)
        self.reason: List[Optional[int]] = [None] * (n_vars + 1)
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.activity = [0.0] * (n_vars + 1)
        self.var_inc = 1.0
        self.phase = [False] * (n_vars + 1)
        self.order: List[tuple] = []  # lazy max-heap of (-activity, var)
        for v in range(1, n_vars + 1):
            heapq.heappush(self.order, (0.0, v))
        self.root_failed = False  # top-level contradiction among unit clauses
        self.n_conflicts = 0

    # -- assignment helpers ------------------------------------------------
    def value(self, lit: int) -> int:
        a = self.assign[abs(lit)]
        if a == _UNDEF:
            return _UNDEF
        return a if lit > 0 else -a

    def decision_level(self) -> int:
        return len(self.trail_lim)

    def enqueue(self, lit: int, reason: Optional[int]) -> None:
        v = abs(lit)
        self.assign[v] = _TRUE if lit > 0 else _FALSE
        self.level[v] = self.decision_level()
        self.reason[v] = reason
        self.phase[v] = lit > 0
        self.trail.append(lit)

    def cancel_until(self, lvl: int) -> None:
        if self.decision_level() <= lvl:
            return
        head = self.trail_lim[lvl]
        for lit in self.trail[head:]:
            v = abs(lit)
            self.assign[v] = _UNDEF
            self.reason[v] = None
            heapq.heappush(self.order, (-self.activity[v], v))
        del self.trail[head:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, len(self.trail))

    # -- clause management ---------------------------------------------------
    def add_clause(self, lits: Sequence[int]) -> None:
        """Add a problem clause (call only at decision level 0)."""
        seen = set()
        cl = []
        for lit in lits:
            if -lit in seen:
                return  # tautology
            if lit not in seen:
                seen.add(lit)
                cl.append(lit)
        fixed = [lit for lit in cl if self.value(lit) != _FALSE or self.level[abs(lit)] > 0]
        sat_already = any(self.value(lit) == _TRUE and self.level[abs(lit)] == 0 for lit in cl)
        if sat_already:
            return
        cl = fixed
        if not cl:
            self.root_failed = True
            return
        if len(cl) == 1:
            if self.value(cl[0]) == _FALSE:
                self.root_failed = True
            elif self.value(cl[0]) == _UNDEF:
                self.enqueue(cl[0], None)
            return
        self._attach(cl)

    def _attach(self, cl: List[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(cl)
        self.watches[_enc(-cl[0])].append(ci)
        self.watches[_enc(-cl[1])].append(ci)
        return ci

    # -- search --------------------------------------------------------------
    def propagate(self) -> Optional[int]:
        """Unit propagation; returns a conflicting clause index or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            watch_key = _enc(lit)  # clauses watching -lit, i.e. falsified watch
            ws = self.watches[watch_key]
            kept = []
            i = 0
            while i < len(ws):
                ci = ws[i]
                i += 1
                cl = self.clauses[ci]
                false_lit = -lit
                if cl[0] == false_lit:
                    cl[0], cl[1] = cl[1], cl[0]
                first = cl[0]
                if self.value(first) == _TRUE:
                    kept.append(ci)
                    continue
                moved = False
                for k in range(2, len(cl)):
                    if self.value(cl[k]) != _FALSE:
                        cl[1], cl[k] = cl[k], cl[1]
                        self.watches[_enc(-cl[1])].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if self.value(first) == _FALSE:
                    kept.extend(ws[i:])
                    self.watches[watch_key] = kept
                    self.qhead = len(self.trail)
                    return ci
                self.enqueue(first, ci)
            self.watches[watch_key] = kept
        return None

    def bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n_vars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heapq.heappush(self.order, (-self.activity[v], v))

    def analyze(self, confl: int):
        """First-UIP learning; returns (learnt clause, backtrack level)."""
        learnt = [0]  # slot for the asserting literal
        seen = [False] * (self.n_vars + 1)
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cl = self.clauses[confl]
        while True:
            for q in cl:
                # a reason clause carries its implied literal; skip it
                if p is not None and q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self.bump(v)
                    if self.level[v] >= self.decision_level():
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            v = abs(p)
            seen[v] = False
            counter -= 1
            idx -= 1
            if counter == 0:
                break
            cl = self.clauses[self.reason[v]]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        # second-highest decision level among the remaining literals
        max_i = 1
        for i in range(2, len(learnt)):
            if self.level[abs(learnt[i])] > self.level[abs(learnt[max_i])]:
                max_i = i
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _pick_branch(self) -> Optional[int]:
        while self.order:
            neg_act, v = heapq.heappop(self.order)
            if self.assign[v] == _UNDEF and -neg_act == self.activity[v]:
                return v
        for v in range(1, self.n_vars + 1):  # heap exhausted by staleness
            if self.assign[v] == _UNDEF:
                return v
        return None

    def solve(
        self,
        assumptions: Sequence[int] = (),
        conflict_budget: Optional[int] = None,
    ) -> SatResult:
        if self.root_failed:
            return SatResult(SatStatus.UNSAT, conflicts=self.n_conflicts)
        self.cancel_until(0)
        confl = self.propagate()
        if confl is not None:
            self.root_failed = True
            return SatResult(SatStatus.UNSAT, conflicts=self.n_conflicts)

        start_conflicts = self.n_conflicts
        restart_interval = 100
        next_restart = self.n_conflicts + restart_interval

        while True:
            confl = self.propagate()
            if confl is not None:
                self.n_conflicts += 1
                if self.decision_level() == 0:
                    self.root_failed = True
                    return SatResult(SatStatus.UNSAT, conflicts=self.n_conflicts)
                if (
                    conflict_budget is not None
                    and self.n_conflicts - start_conflicts >= conflict_budget
                ):
                    self.cancel_until(0)
                    return SatResult(SatStatus.RESOURCE_OUT, conflicts=self.n_conflicts)
                learnt, bt = self.analyze(confl)
                self.cancel_until(bt)
                if len(learnt) == 1:
                    if self.value(learnt[0]) == _FALSE:
                        self.root_failed = True
                        return SatResult(SatStatus.UNSAT, conflicts=self.n_conflicts)
                    if self.value(learnt[0]) == _UNDEF:
                        self.enqueue(learnt[0], None)
                else:
                    ci = self._attach(learnt)
                    self.enqueue(learnt[0], ci)
                self.var_inc /= 0.95
                continue

            if self.n_conflicts >= next_restart:
                restart_interval = int(restart_interval * 1.5)
                next_restart = self.n_conflicts + restart_interval
                self.cancel_until(0)
                continue

            lvl = self.decision_level()
            if lvl < len(assumptions):
                p = assumptions[lvl]
                val = self.value(p)
                if val == _FALSE:
                    self.cancel_until(0)
                    return SatResult(SatStatus.UNSAT, conflicts=self.n_conflicts)
                self.trail_lim.append(len(self.trail))
                if val == _UNDEF:
                    self.enqueue(p, None)
                continue

            v = self._pick_branch()
            if v is None:
                model = [False] * (self.n_vars + 1)
                for u in range(1, self.n_vars + 1):
                    model[u] = self.assign[u] == _TRUE
                self.cancel_until(0)
                return SatResult(SatStatus.SAT, model=model, conflicts=self.n_conflicts)
            self.trail_lim.append(len(self.trail))
            self.enqueue(v if self.phase[v] else -v, None)


def solve(
    cnf: Cnf,
    assumptions: Sequence[int] = (),
    conflict_budget: Optional[int] = None,
) -> SatResult:
    """One-shot solve of a Cnf."""
    s = Solver(cnf.n_vars)
    for cl in cnf.clauses:
        s.add_clause(cl)
    return s.solve(assumptions=assumptions, conflict_budget=conflict_budget)


def model_satisfies(cnf: Cnf, model: Sequence[bool]) -> bool:
    """Replay a model against every clause (independent of solver internals)."""
    for cl in cnf.clauses:
        if not any((model[abs(l)] if l > 0 else not model[abs(l)]) for l in cl):
            return False
    return True
