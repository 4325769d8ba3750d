"""Partial quantifier elimination.

Three engines share one contract, ``exists W [A & B] == Astar & exists W [B]``:

* ``pqe_oracle`` enumerates every point of V x W with numpy.
* ``pqe_solve`` branches and records D-sequents, adding resolvents only when
  they descend from A.
* ``pqe_sat`` is a SAT-based counterexample loop used on instances too large
  for branching.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np

from .cnf import Clause, CnfFormula, make_clause
from .sat import Solver


class Budget(RuntimeError):
    """A step or size limit was hit; no answer is claimed."""


class BoundExceeded(ValueError):
    pass


def _as_cnf(f) -> CnfFormula:
    if isinstance(f, CnfFormula):
        return f
    return CnfFormula(f)


@dataclass
class PqeProblem:
    A: CnfFormula
    B: CnfFormula
    W: FrozenSet[int]

    def __post_init__(self):
        self.A = _as_cnf(self.A)
        self.B = _as_cnf(self.B)
        self.W = frozenset(self.W)

    @property
    def V(self) -> List[int]:
        return sorted((self.A.vars() | self.B.vars()) - self.W)

    @property
    def num_vars(self) -> int:
        return max(self.A.num_vars, self.B.num_vars)


@dataclass
class PqeSolution:
    Astar: CnfFormula
    stats: Dict[str, int] = field(default_factory=dict)
    # for each Astar clause, indices of the A-clauses it was derived from
    ancestry: List[FrozenSet[int]] = field(default_factory=list)


# ------------------------------------------------------------------ oracle
def _point_bits(nbits: int, pos: int, n: int) -> np.ndarray:
    return ((np.arange(n, dtype=np.int64) >> pos) & 1).astype(bool)


def _eval_on_grid(clauses, pos: Dict[int, int], nbits: int) -> np.ndarray:
    n = 1 << nbits
    idx = np.arange(n, dtype=np.int64)
    out = np.ones(n, dtype=bool)
    for c in clauses:
        sat = np.zeros(n, dtype=bool)
        for l in c:
            bit = ((idx >> pos[abs(l)]) & 1).astype(bool)
            sat |= bit if l > 0 else ~bit
        out &= sat
    return out


def exists_tables(p: PqeProblem, V: Optional[Sequence[int]] = None):
    """Truth tables over V of exists W [A & B] and exists W [B].

    Point index bit ``len(V)-1-j`` carries ``V[j]`` (V[0] is the MSB).
    """
    V = list(p.V if V is None else V)
    W = sorted(p.W & (p.A.vars() | p.B.vars()))
    nv, nw = len(V), len(W)
    if nv > 20 or nv + nw > 24:
        raise BoundExceeded(f"|V|={nv}, |V+W|={nv + nw} beyond enumeration bound")
    pos = {w: i for i, w in enumerate(reversed(W))}
    for j, v in enumerate(V):
        pos[v] = nw + (nv - 1 - j)
    sb = _eval_on_grid(p.B.clauses, pos, nv + nw)
    sab = sb & _eval_on_grid(p.A.clauses, pos, nv + nw)
    shape = (1 << nv, 1 << nw)
    return sab.reshape(shape).any(axis=1), sb.reshape(shape).any(axis=1)


def _v_columns(nv: int) -> np.ndarray:
    idx = np.arange(1 << nv, dtype=np.int64)
    return np.stack([((idx >> (nv - 1 - j)) & 1).astype(bool) for j in range(nv)], axis=1) \
        if nv else np.zeros((1, 0), dtype=bool)


def blocking_clauses(zero: np.ndarray, V: Sequence[int]) -> List[Clause]:
    """Clauses false exactly on the points flagged in ``zero``.

    Each minterm clause is shrunk greedily while it stays true on every point
    outside ``zero``.
    """
    nv = len(V)
    cols = _v_columns(nv)
    allowed = ~zero
    covered = np.zeros_like(zero)
    out: List[Clause] = []
    for pt in np.flatnonzero(zero):
        if covered[pt]:
            continue
        bits = cols[pt]
        keep = list(range(nv))
        for j in range(nv):
            trial = [k for k in keep if k != j]
            cube = np.ones(len(zero), dtype=bool)
            for k in trial:
                cube &= cols[:, k] == bits[k]
            if not (cube & allowed).any():
                keep = trial
        cube = np.ones(len(zero), dtype=bool)
        for k in keep:
            cube &= cols[:, k] == bits[k]
        covered |= cube
        out.append(make_clause(-V[k] if bits[k] else V[k] for k in keep))
    return out


def pqe_oracle(p: PqeProblem) -> PqeSolution:
    """Reference PQE by enumeration; don't-care points are set to 1."""
    V = p.V
    eab, eb = exists_tables(p, V)
    zero = eb & ~eab
    cls = blocking_clauses(zero, V)
    Astar = CnfFormula(cls, num_vars=p.num_vars)
    return PqeSolution(Astar, {"points": int(len(zero)), "zeros": int(zero.sum())})


# ---------------------------------------------------------------- D-sequents
@dataclass(frozen=True)
class DSequent:
    """Targets are redundant in the quantified formula under ``condition``."""

    condition: Tuple[Tuple[int, bool], ...]
    target: FrozenSet[int]

    @classmethod
    def make(cls, condition: Dict[int, bool], target) -> "DSequent":
        if isinstance(target, int):
            target = frozenset([target])
        return cls(tuple(sorted(condition.items())), frozenset(target))

    def as_dict(self) -> Dict[int, bool]:
        return dict(self.condition)


class JoinError(ValueError):
    pass


def join_dsequents(d0: DSequent, d1: DSequent, y: int) -> DSequent:
    if d0.target != d1.target:
        raise JoinError("D-sequents have different targets")
    c0, c1 = d0.as_dict(), d1.as_dict()
    if c0.get(y) is not False or c1.get(y) is not True:
        raise JoinError(f"conditions must assign {y}=0 and {y}=1 respectively")
    for v in c0.keys() & c1.keys():
        if v != y and c0[v] != c1[v]:
            raise JoinError(f"conditions disagree on {v}")
    merged = {**c0, **c1}
    del merged[y]
    return DSequent.make(merged, d0.target)


# ----------------------------------------------------------- branching engine
class _Engine:
    def __init__(self, p: PqeProblem, max_steps: int):
        self.W = set(p.W)
        self.V = set(p.V)
        self.clauses: List[Clause] = []
        self.target: List[bool] = []
        self.anc: List[FrozenSet[int]] = []
        self.astar: List[Clause] = []
        self.astar_anc: List[FrozenSet[int]] = []
        for i, c in enumerate(p.A.clauses):
            if any(abs(l) in self.W for l in c):
                self._add(c, True, frozenset([i]))
            else:
                self._add(c, False, frozenset())
                self.astar.append(c)
                self.astar_anc.append(frozenset([i]))
        for c in p.B.clauses:
            self._add(c, False, frozenset())
        self.asg: Dict[int, bool] = {}
        self.max_steps = max_steps
        self.stats = {"branches": 0, "dsequents": 0, "resolvents": 0, "joins": 0,
                      "trivial": 0, "leaves": 0}
        self.targets = frozenset(i for i, t in enumerate(self.target) if t)

    def _add(self, c, is_target, anc):
        self.clauses.append(c)
        self.target.append(is_target)
        self.anc.append(anc)

    def _step(self):
        self.stats["branches"] += 1
        if self.stats["branches"] > self.max_steps:
            raise Budget(f"pqe_solve exceeded {self.max_steps} branches")

    def _val(self, l):
        v = self.asg.get(abs(l))
        if v is None:
            return None
        return v == (l > 0)

    def _status(self, c):
        """(satisfying var or None, unassigned literals)."""
        free = []
        for l in c:
            t = self._val(l)
            if t is True:
                return abs(l), None
            if t is None:
                free.append(l)
        return None, free

    # -- V-level: returns the set of variables of a valid condition
    def vnode(self) -> Set[int]:
        self._step()
        status = [self._status(c) for c in self.clauses]
        for i, (s, free) in enumerate(status):
            if s is None and not free and not self.target[i]:
                return {abs(l) for l in self.clauses[i]}
        cond: Set[int] = set()
        removed: Set[int] = set()
        live_targets = []
        for i in self.targets:
            s, free = status[i]
            if s is not None:
                cond.add(s)
                removed.add(i)
            else:
                live_targets.append(i)
        changed = True
        while changed and live_targets:
            changed = False
            for i in list(live_targets):
                why = self._trivially_redundant(i, status, removed)
                if why is not None:
                    cond |= why
                    removed.add(i)
                    live_targets.remove(i)
                    self.stats["trivial"] += 1
                    changed = True
        if not live_targets:
            self.stats["dsequents"] += 1
            return cond
        y = self._pick_v(status, removed)
        if y is None:
            return self._wroot()
        first = self._v_polarity(y, status)
        conds = {}
        for val in (first, not first):
            self.asg[y] = val
            try:
                d = self.vnode()
            finally:
                del self.asg[y]
            if y not in d:
                return d
            conds[val] = d
        self.stats["joins"] += 1
        base = {v: self.asg[v] for v in (conds[False] | conds[True]) - {y}}
        d0 = DSequent.make({**{v: base[v] for v in conds[False] - {y}}, y: False}, self.targets)
        d1 = DSequent.make({**{v: base[v] for v in conds[True] - {y}}, y: True}, self.targets)
        j = join_dsequents(d0, d1, y)
        self.stats["dsequents"] += 1
        return {v for v, _ in j.condition}

    def _trivially_redundant(self, i, status, removed) -> Optional[Set[int]]:
        _, cfree = status[i]
        cset = set(cfree)
        # (b) implied by a live non-target clause in this subspace
        for k, (s, free) in enumerate(status):
            if k == i or self.target[k] or s is not None:
                continue
            if free and set(free) <= cset:
                return {abs(l) for l in self.clauses[k] if self._val(l) is False}
        # (c) blocked on an unassigned quantified variable
        for l in cfree:
            if abs(l) not in self.W:
                continue
            why: Set[int] = set()
            blocked = True
            for k, d in enumerate(self.clauses):
                if k == i or k in removed or -l not in d:
                    continue
                s, free = status[k]
                if s is not None:
                    why.add(s)
                    continue
                if not any(-m in free for m in cfree if m != l):
                    blocked = False
                    break
            if blocked:
                return why
        return None

    def _pick_v(self, status, removed) -> Optional[int]:
        score: Dict[int, int] = {}
        for k, (s, free) in enumerate(status):
            if s is not None:
                continue
            w = 3 if self.target[k] and k not in removed else 1
            for l in free:
                if abs(l) in self.V:
                    score[abs(l)] = score.get(abs(l), 0) + w
        if not score:
            return None
        return max(sorted(score), key=lambda v: score[v])

    def _v_polarity(self, y, status) -> bool:
        pos = neg = 0
        for k, (s, free) in enumerate(status):
            if s is None and self.target[k]:
                pos += y in free
                neg += -y in free
        return neg > pos   # falsify more target literals first

    # -- W-level: plain DPLL with tree resolution
    def _wroot(self) -> Set[int]:
        r = self.wnode()
        if r[0] == "sat":
            self.stats["dsequents"] += 1
            return r[1]
        _, K, anc = r
        if anc:
            # kept as a non-target so later derivations from it count as noise
            self._add(K, False, frozenset())
            self.astar.append(K)
            self.astar_anc.append(anc)
        self.stats["dsequents"] += 1
        return {abs(l) for l in K}

    def wnode(self):
        self._step()
        unit = None
        best_false = None
        all_sat = True
        score: Dict[int, int] = {}
        for k, c in enumerate(self.clauses):
            s, free = self._status(c)
            if s is not None:
                continue
            all_sat = False
            if not free:
                if best_false is None or (self.anc[best_false] and not self.anc[k]):
                    best_false = k
                continue
            if len(free) == 1 and unit is None:
                unit = free[0]
            for l in free:
                score[abs(l)] = score.get(abs(l), 0) + 1
        if best_false is not None:
            self.stats["leaves"] += 1
            return ("unsat", self.clauses[best_false], self.anc[best_false])
        if all_sat:
            self.stats["leaves"] += 1
            cond = set()
            for c in self.clauses:
                if any(abs(l) in self.W and self._val(l) for l in c):
                    continue
                for l in c:
                    if self._val(l):
                        cond.add(abs(l))
                        break
            return ("sat", cond)
        if unit is not None:
            y, first = abs(unit), unit > 0
        else:
            y = max(sorted(score), key=lambda v: score[v])
            first = False
        if y not in self.W:
            raise AssertionError("unassigned free variable in quantified search")
        res = {}
        for val in (first, not first):
            self.asg[y] = val
            try:
                r = self.wnode()
            finally:
                del self.asg[y]
            if r[0] == "sat":
                return r
            if y not in {abs(l) for l in r[1]}:
                return r
            res[val] = r
        K = make_clause([l for l in res[False][1] if abs(l) != y] +
                        [l for l in res[True][1] if abs(l) != y])
        self.stats["resolvents"] += 1
        return ("unsat", K, res[False][2] | res[True][2])


def pqe_solve(p: PqeProblem, max_steps: int = 200000) -> PqeSolution:
    """Branching PQE built on D-sequents.

    V variables are branched on before W variables.  In a V-subspace the
    targets are removed by the trivial rules (satisfied, implied by a
    non-target clause, blocked on a quantified variable) or the subspace is
    handed to a DPLL search over W whose resolvents are added to Astar only
    when they descend from A.
    """
    eng = _Engine(p, max_steps)
    eng.vnode()
    uniq: Dict[Clause, FrozenSet[int]] = {}
    for c, a in zip(eng.astar, eng.astar_anc):
        uniq.setdefault(c, a)
    Astar = CnfFormula(num_vars=p.num_vars)
    Astar.clauses = list(uniq)
    stats = dict(eng.stats)
    stats["astar"] = len(Astar)
    return PqeSolution(Astar, stats, list(uniq.values()))


# ----------------------------------------------------------------- SAT-based
def _solver_for(clauses, nvars, extra=()):
    s = Solver(nvars)
    s.add_clauses(clauses)
    s.add_clauses(extra)
    return s


def good_cube(model, clauses, W) -> List[int]:
    """V-literals of ``model`` that keep every clause satisfied whatever the
    other free variables are, given the model's W part."""
    cube: Set[int] = set()
    for c in clauses:
        if any(abs(l) in W and model[abs(l)] == (l > 0) for l in c):
            continue
        if any(l in cube for l in c):
            continue
        for l in c:
            if model[abs(l)] == (l > 0):
                cube.add(l)
                break
    return sorted(cube, key=abs)


def shrink_core(s: Solver, lits: Sequence[int]) -> List[int]:
    """Deletion-based minimal failed assumption set (``lits`` must fail)."""
    core = list(lits)
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        r = s.solve(trial)
        if r.unsat:
            keep = set(r.core)
            core = [l for l in trial if l in keep]
        else:
            i += 1
    return core


class CegarPqe:
    """Counterexample loop for exists W [A & B] == H & exists W [B].

    ``check`` is the formula whose V-projection H must capture (A & B by
    default).  Candidates come from B & H minus known good cubes.
    """

    def __init__(self, A, B, W, check=None, nvars=None, max_iters=100000,
                 max_width: Optional[int] = None, seed_good: Optional[np.ndarray] = None,
                 drop_wide: bool = False):
        self.A = _as_cnf(A)
        self.B = _as_cnf(B)
        self.W = set(W)
        self.check_clauses = list(check.clauses if check is not None else
                                  self.A.clauses + self.B.clauses)
        self.nvars = nvars or max(self.A.num_vars, self.B.num_vars)
        self.V = sorted((self.A.vars() | self.B.vars() |
                         {abs(l) for c in self.check_clauses for l in c}) - self.W)
        self.cand = _solver_for(self.B.clauses, self.nvars)
        self.chk = _solver_for(self.check_clauses, self.nvars)
        self.H: List[Clause] = []
        self.max_iters = max_iters
        self.max_width = max_width
        self.vidx = {v: j for j, v in enumerate(self.V)}
        self.good: List[np.ndarray] = []
        if seed_good is not None:
            # (variables, matrix) of points known to satisfy ``check``
            gvars, gmat = seed_good
            col = {v: j for j, v in enumerate(gvars)}
            if all(v in col for v in self.V):
                gmat = np.asarray(gmat, dtype=bool)
                self.good.extend(gmat[:, [col[v] for v in self.V]])
        # drop_wide: a bad point with no clause of width <= max_width is only
        # skipped, leaving H weaker but still implied (approximate use)
        self.drop_wide = drop_wide
        self.stats = {"candidates": 0, "good": 0, "bad": 0, "sat_calls": 0,
                      "subset_hits": 0, "dropped": 0}

    def add_h(self, c: Clause):
        self.H.append(c)
        self.cand.add_clause(c)

    def next_clause(self) -> Optional[Clause]:
        """One Redund step: a new clause, or None when H is complete."""
        while True:
            self.stats["candidates"] += 1
            if self.stats["candidates"] > self.max_iters:
                raise Budget(f"CEGAR exceeded {self.max_iters} candidates")
            r = self.cand.solve()
            self.stats["sat_calls"] += 1
            if not r.sat:
                return None
            point = [v if r.model[v] else -v for v in self.V]
            rc = self.chk.solve(point)
            self.stats["sat_calls"] += 1
            if rc.sat:
                self.stats["good"] += 1
                cube = good_cube(rc.model, self.check_clauses, self.W)
                self.cand.add_clause([-l for l in cube])
                if self.max_width is not None:
                    self.good.append(np.array([rc.model[v] for v in self.V], dtype=bool))
                continue
            self.stats["bad"] += 1
            core = shrink_core(self.chk, [l for l in point if l in set(rc.core)])
            if self.max_width is not None and len(core) > self.max_width:
                alt = self._narrow(point)
                if alt is not None:
                    core = alt
                    self.stats["subset_hits"] += 1
                elif self.drop_wide:
                    self.stats["dropped"] += 1
                    self.cand.add_clause([-l for l in point])
                    continue
            c = make_clause(-l for l in core)
            self.add_h(c)
            return c

    def _narrow(self, point) -> Optional[List[int]]:
        """Search sub-cubes of ``point`` of size <= max_width that are bad."""
        G = np.array(self.good, dtype=bool) if self.good else np.zeros((0, len(self.V)), bool)
        n = len(point)
        js = [self.vidx[abs(l)] for l in point]
        # good points are stored in V order; line them up with the point's literals
        match = G[:, js] == np.array([l > 0 for l in point], dtype=bool)[None, :] if len(G) else None
        for size in range(1, self.max_width + 1):
            for combo in itertools.combinations(range(n), size):
                if match is not None and match[:, list(combo)].all(axis=1).any():
                    continue
                sub = [point[k] for k in combo]
                r = self.chk.solve(sub)
                self.stats["sat_calls"] += 1
                if r.unsat:
                    return sub
                self.good.append(np.array([r.model[v] for v in self.V], dtype=bool))
                row = self.good[-1][None, :] == np.array([l > 0 for l in point])[None, :]
                match = row if match is None else np.vstack([match, row])
        return None

    def run(self) -> List[Clause]:
        while self.next_clause() is not None:
            pass
        return self.H


def pqe_sat(p: PqeProblem, max_iters: int = 100000, max_width: Optional[int] = None,
            check=None) -> PqeSolution:
    eng = CegarPqe(p.A, p.B, p.W, check=check, nvars=p.num_vars, max_iters=max_iters,
                   max_width=max_width)
    H = eng.run()
    return PqeSolution(CnfFormula(H, num_vars=p.num_vars), dict(eng.stats, astar=len(H)))


def verify_pqe_solution(p: PqeProblem, s, max_iters: int = 100000) -> bool:
    """Check exists W [A & B] == Astar & exists W [B] with SAT calls."""
    Astar = s.Astar if isinstance(s, PqeSolution) else _as_cnf(s)
    AB = p.A.clauses + p.B.clauses
    nv = max(p.num_vars, Astar.num_vars)
    s_ab = _solver_for(AB, nv)
    for c in Astar.clauses:
        if not s_ab.solve([-l for l in c]).unsat:
            return False
    cand = _solver_for(p.B.clauses + Astar.clauses, nv)
    V = sorted((p.A.vars() | p.B.vars() | Astar.vars()) - p.W)
    for _ in range(max_iters):
        r = cand.solve()
        if not r.sat:
            return True
        point = [v if r.model[v] else -v for v in V]
        rc = s_ab.solve(point)
        if not rc.sat:
            return False
        cube = good_cube(rc.model, AB, p.W)
        cand.add_clause([-l for l in cube])
    raise Budget("verification did not converge")
