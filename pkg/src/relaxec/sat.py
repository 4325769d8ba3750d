"""Conflict-driven clause-learning SAT engine.

Literals use the DIMACS convention (non-zero signed ints).  Internally a
literal ``l`` over variable ``v`` is coded as ``2*v`` (positive) or
``2*v + 1`` (negative) so that negation is ``code ^ 1``.

Fixed engine parameters (kept constant so that decision/conflict counts are
comparable between runs):

* first-UIP learning with cheap self-subsumption minimization,
* two watched literals per clause,
* VSIDS with activity increment growth ``1 / 0.95`` per conflict,
* Luby restarts with unit ``RESTART_UNIT`` conflicts,
* phase saving, default phase False,
* learnt clause reduction when the learnt database exceeds a growing cap.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

RESTART_UNIT = 64
VAR_DECAY = 0.95


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class SatResult:
    status: Status
    model: Optional[list] = None  # model[v] -> bool, index 0 unused
    core: Optional[list] = None   # failed assumptions (subset) when UNSAT
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def unsat(self) -> bool:
        return self.status is Status.UNSAT

    def value(self, lit: int) -> bool:
        v = self.model[abs(lit)]
        return v if lit > 0 else not v


def _luby(i: int) -> int:
    # i >= 1
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class _VarHeap:
    """Binary max-heap of variables keyed by activity."""

    def __init__(self, activity):
        self.act = activity
        self.heap = []
        self.pos = [-1]

    def grow(self, n):
        while len(self.pos) <= n:
            self.pos.append(-1)

    def __contains__(self, v):
        return self.pos[v] >= 0

    def _up(self, i):
        heap, pos, act = self.heap, self.pos, self.act
        v = heap[i]
        a = act[v]
        while i > 0:
            parent = (i - 1) >> 1
            pv = heap[parent]
            if act[pv] > a or (act[pv] == a and pv < v):
                break
            heap[i] = pv
            pos[pv] = i
            i = parent
        heap[i] = v
        pos[v] = i

    def _down(self, i):
        heap, pos, act = self.heap, self.pos, self.act
        n = len(heap)
        v = heap[i]
        a = act[v]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            right = child + 1
            if right < n:
                cv, rv = heap[child], heap[right]
                if act[rv] > act[cv] or (act[rv] == act[cv] and rv < cv):
                    child = right
            cv = heap[child]
            if act[cv] < a or (act[cv] == a and cv > v):
                break
            heap[i] = cv
            pos[cv] = i
            i = child
        heap[i] = v
        pos[v] = i

    def push(self, v):
        if self.pos[v] >= 0:
            return
        self.heap.append(v)
        self.pos[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def bumped(self, v):
        if self.pos[v] >= 0:
            self._up(self.pos[v])

    def pop(self):
        heap, pos = self.heap, self.pos
        top = heap[0]
        last = heap.pop()
        pos[top] = -1
        if heap:
            heap[0] = last
            pos[last] = 0
            self._down(0)
        return top

    def __len__(self):
        return len(self.heap)


class Solver:
    """Incremental CDCL solver with an assumption interface.

    Clauses may be added between ``solve`` calls; the solver is always back
    at decision level 0 after ``solve`` returns.
    """

    def __init__(self, num_vars: int = 0, seed: int = 0,
                 conflict_limit: Optional[int] = None):
        self.nvars = 0
        self.lv = [0, 0]          # literal values by code: 1 true, -1 false, 0 unassigned
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.polarity = [False]
        self.watches = [[], []]
        self.order = _VarHeap(self.activity)
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.clauses: list = []
        self.learnts: list = []
        self.var_inc = 1.0
        self.ok = True
        self.seed = seed
        self.rng = random.Random(seed)
        self.conflict_limit = conflict_limit
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0,
                      "restarts": 0, "learnt": 0}
        self.max_learnts = 2000.0
        if num_vars:
            self.ensure_vars(num_vars)

    # ------------------------------------------------------------------ setup
    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.nvars += 1
            self.lv.extend((0, 0))
            self.level.append(0)
            self.reason.append(None)
            act = self.rng.random() * 1e-5 if self.seed else 0.0
            self.activity.append(act)
            self.polarity.append(False)
            self.watches.extend(([], []))
            self.order.grow(self.nvars)
            self.order.push(self.nvars)

    def new_var(self) -> int:
        self.ensure_vars(self.nvars + 1)
        return self.nvars

    @staticmethod
    def _code(lit: int) -> int:
        return (lit << 1) if lit > 0 else ((-lit) << 1) | 1

    @staticmethod
    def _lit(code: int) -> int:
        v = code >> 1
        return -v if code & 1 else v

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause at level 0.  Returns False once the formula is UNSAT."""
        if not self.ok:
            return False
        codes = set()
        top = 0
        for lit in lits:
            c = self._code(lit)
            if (c ^ 1) in codes:
                return True  # tautology
            codes.add(c)
            if abs(lit) > top:
                top = abs(lit)
        self.ensure_vars(top)
        lv = self.lv
        clause = []
        for c in codes:
            val = lv[c]
            if val == 1 and self.level[c >> 1] == 0:
                return True
            if val == -1 and self.level[c >> 1] == 0:
                continue
            clause.append(c)
        clause.sort()
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
                return False
            return True
        self.clauses.append(clause)
        self.watches[clause[0]].append(clause)
        self.watches[clause[1]].append(clause)
        return True

    def add_clauses(self, clauses: Iterable[Iterable[int]]) -> bool:
        for cl in clauses:
            if not self.add_clause(cl):
                return False
        return self.ok

    # ------------------------------------------------------------ internals
    def _enqueue(self, code: int, reason) -> None:
        v = code >> 1
        self.lv[code] = 1
        self.lv[code ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _propagate(self):
        lv = self.lv
        watches = self.watches
        trail = self.trail
        level = self.level
        reason = self.reason
        dl = len(self.trail_lim)
        confl = None
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            keep = []
            n = len(ws)
            i = 0
            while i < n:
                cl = ws[i]
                i += 1
                if cl[0] == false_lit:
                    cl[0] = cl[1]
                    cl[1] = false_lit
                first = cl[0]
                if lv[first] == 1:
                    keep.append(cl)
                    continue
                for k in range(2, len(cl)):
                    ck = cl[k]
                    if lv[ck] != -1:
                        cl[1] = ck
                        cl[k] = false_lit
                        watches[ck].append(cl)
                        break
                else:
                    keep.append(cl)
                    if lv[first] == -1:
                        confl = cl
                        keep.extend(ws[i:])
                        break
                    v = first >> 1
                    lv[first] = 1
                    lv[first ^ 1] = -1
                    level[v] = dl
                    reason[v] = cl
                    trail.append(first)
            watches[false_lit] = keep
            if confl is not None:
                break
        self.stats["propagations"] += props
        return confl

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lv = self.lv
        start = self.trail_lim[lvl]
        order = self.order
        polarity = self.polarity
        for idx in range(len(self.trail) - 1, start - 1, -1):
            c = self.trail[idx]
            v = c >> 1
            lv[c] = 0
            lv[c ^ 1] = 0
            self.reason[v] = None
            polarity[v] = not (c & 1)
            order.push(v)
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
        self.order.bumped(v)

    def _analyze(self, confl):
        level = self.level
        reason = self.reason
        trail = self.trail
        dl = len(self.trail_lim)
        seen = self._seen
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        cl = confl
        touched = []
        while True:
            start = 0 if p == -1 else 1
            for k in range(start, len(cl)):
                q = cl[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            cl = reason[p >> 1]
            seen[p >> 1] = 0
            counter -= 1
            if counter <= 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause (local minimization)
        if len(learnt) > 2:
            out = [learnt[0]]
            for q in learnt[1:]:
                r = reason[q >> 1]
                if r is None:
                    out.append(q)
                    continue
                for k in range(1, len(r)):
                    w = r[k] >> 1
                    if not seen[w] and level[w] > 0:
                        out.append(q)
                        break
            learnt = out
        for v in touched:
            seen[v] = 0
        if len(learnt) == 1:
            bt = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        return learnt, bt

    def _analyze_final(self, code: int) -> list:
        """Assumptions responsible for assumption literal ``code`` being false."""
        core = [self._lit(code)]
        if not self.trail_lim:
            return core
        seen = self._seen
        seen[code >> 1] = 1
        touched = [code >> 1]
        for idx in range(len(self.trail) - 1, self.trail_lim[0] - 1, -1):
            c = self.trail[idx]
            v = c >> 1
            if not seen[v]:
                continue
            r = self.reason[v]
            if r is None:
                if v != code >> 1:
                    core.append(self._lit(c))
            else:
                for k in range(1, len(r)):
                    w = r[k] >> 1
                    if self.level[w] > 0 and not seen[w]:
                        seen[w] = 1
                        touched.append(w)
        for v in touched:
            seen[v] = 0
        return core

    def _reduce_db(self) -> None:
        locked = set()
        for c in self.trail:
            r = self.reason[c >> 1]
            if r is not None:
                locked.add(id(r))
        self.learnts.sort(key=len)
        half = len(self.learnts) // 2
        keep = self.learnts[:half]
        for cl in self.learnts[half:]:
            if len(cl) <= 2 or id(cl) in locked:
                keep.append(cl)
        self.learnts = keep
        live = {id(cl) for cl in self.clauses}
        live.update(id(cl) for cl in keep)
        for i in range(len(self.watches)):
            ws = self.watches[i]
            if ws:
                self.watches[i] = [cl for cl in ws if id(cl) in live]

    # ---------------------------------------------------------------- solve
    def solve(self, assumptions: Sequence[int] = ()) -> SatResult:
        before = dict(self.stats)
        res = self._solve(list(assumptions))
        res.stats = {k: self.stats[k] - before[k] for k in self.stats}
        return res

    def _solve(self, assumptions: list) -> SatResult:
        if not self.ok:
            return SatResult(Status.UNSAT, core=[])
        for a in assumptions:
            self.ensure_vars(abs(a))
        self._seen = bytearray(self.nvars + 1)
        acodes = [self._code(a) for a in assumptions]
        lv = self.lv
        stats = self.stats
        conflicts_here = 0
        restart_idx = 1
        restart_budget = _luby(restart_idx) * RESTART_UNIT
        if self._propagate() is not None:
            self.ok = False
            return SatResult(Status.UNSAT, core=[])
        while True:
            confl = self._propagate()
            if confl is not None:
                stats["conflicts"] += 1
                conflicts_here += 1
                if not self.trail_lim:
                    self.ok = False
                    return SatResult(Status.UNSAT, core=[])
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    stats["learnt"] += 1
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= VAR_DECAY
                if self.conflict_limit is not None and conflicts_here >= self.conflict_limit:
                    self._cancel_until(0)
                    return SatResult(Status.UNKNOWN)
                restart_budget -= 1
                continue
            if restart_budget <= 0:
                stats["restarts"] += 1
                restart_idx += 1
                restart_budget = _luby(restart_idx) * RESTART_UNIT
                self._cancel_until(0)
                continue
            if len(self.learnts) - len(self.trail) >= self.max_learnts:
                self._reduce_db()
                self.max_learnts *= 1.1
            nxt = -1
            while len(self.trail_lim) < len(acodes):
                a = acodes[len(self.trail_lim)]
                val = lv[a]
                if val == 1:
                    self.trail_lim.append(len(self.trail))
                elif val == -1:
                    core = self._analyze_final(a)
                    self._cancel_until(0)
                    return SatResult(Status.UNSAT, core=core)
                else:
                    nxt = a
                    break
            if nxt < 0:
                order = self.order
                while len(order):
                    v = order.pop()
                    if lv[v << 1] == 0:
                        nxt = (v << 1) | (0 if self.polarity[v] else 1)
                        break
                if nxt < 0:
                    model = [False] * (self.nvars + 1)
                    for v in range(1, self.nvars + 1):
                        model[v] = lv[v << 1] == 1
                    self._cancel_until(0)
                    return SatResult(Status.SAT, model=model)
                stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, None)


def solve(f, assumptions: Sequence[int] = (), seed: int = 0,
          conflict_limit: Optional[int] = None) -> SatResult:
    """One-shot solve of a CnfFormula (or any iterable of clauses)."""
    clauses = getattr(f, "clauses", f)
    s = Solver(getattr(f, "num_vars", 0), seed=seed, conflict_limit=conflict_limit)
    s.add_clauses(clauses)
    return s.solve(assumptions)


def implies(f, clause: Iterable[int]) -> bool:
    """True iff ``f`` entails ``clause`` (f AND NOT clause is UNSAT)."""
    clauses = getattr(f, "clauses", f)
    s = Solver(getattr(f, "num_vars", 0))
    s.add_clauses(clauses)
    return s.solve([-lit for lit in clause]).unsat
