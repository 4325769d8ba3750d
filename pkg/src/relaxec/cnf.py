"""CNF formulas, Tseitin encoding, and the miter formulas G, G_rlx, alpha, beta."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .netlist import CutPlan, Netlist

Clause = Tuple[int, ...]


def make_clause(lits: Iterable[int]) -> Optional[Clause]:
    """Sorted, duplicate-free clause; None for a tautology."""
    s = set(lits)
    for lit in s:
        if lit == 0:
            raise ValueError("literal 0 is not allowed")
        if -lit in s:
            return None
    return tuple(sorted(s, key=abs))


class CnfFormula:
    """Clause list with a variable count and an optional name map."""

    def __init__(self, clauses: Iterable[Iterable[int]] = (), num_vars: int = 0,
                 names: Optional[Dict[str, int]] = None):
        self.clauses: List[Clause] = []
        self.num_vars = num_vars
        self.names: Dict[str, int] = dict(names or {})
        for c in clauses:
            self.add(c)

    def add(self, lits: Iterable[int]) -> Optional[Clause]:
        c = make_clause(lits)
        if c is None:
            return None
        self.clauses.append(c)
        if c:
            self.num_vars = max(self.num_vars, abs(c[-1]))
        return c

    def extend(self, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        for c in clauses:
            self.add(c)
        return self

    def __and__(self, other: "CnfFormula") -> "CnfFormula":
        out = CnfFormula(num_vars=max(self.num_vars, other.num_vars), names=self.names)
        out.names.update(other.names)
        out.clauses = self.clauses + other.clauses
        return out

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __repr__(self):
        return f"CnfFormula({len(self.clauses)} clauses, {self.num_vars} vars)"

    def copy(self) -> "CnfFormula":
        out = CnfFormula(num_vars=self.num_vars, names=self.names)
        out.clauses = list(self.clauses)
        return out

    def vars(self) -> set:
        return {abs(l) for c in self.clauses for l in c}

    def var_name(self, v: int) -> Optional[str]:
        for k, x in self.names.items():
            if x == v:
                return k
        return None

    def evaluate(self, assignment) -> bool:
        """``assignment`` maps var -> bool (dict or indexable)."""
        for c in self.clauses:
            if not any(assignment[abs(l)] == (l > 0) for l in c):
                return False
        return True

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)


def eval_cnf(clauses: Sequence[Clause], cols: Dict[int, np.ndarray], n: int) -> np.ndarray:
    """Evaluate clauses on ``n`` points; ``cols`` maps var -> bool array."""
    out = np.ones(n, dtype=bool)
    for c in clauses:
        sat = np.zeros(n, dtype=bool)
        for l in c:
            sat |= cols[abs(l)] if l > 0 else ~cols[abs(l)]
        out &= sat
    return out


class VarPool:
    """Monotone variable allocator remembering a name per variable."""

    def __init__(self, start: int = 0):
        self.top = start
        self.names: Dict[str, int] = {}

    def new(self, name: Optional[str] = None) -> int:
        self.top += 1
        if name is not None:
            self.names[name] = self.top
        return self.top


# ------------------------------------------------------------------ Tseitin
def gate_clauses(op: str, z: int, ins: Sequence[int]) -> List[Clause]:
    if op == "AND":
        a, b = ins
        return [(-z, a), (-z, b), (z, -a, -b)]
    if op == "NAND":
        a, b = ins
        return [(z, a), (z, b), (-z, -a, -b)]
    if op == "OR":
        a, b = ins
        return [(z, -a), (z, -b), (-z, a, b)]
    if op == "NOR":
        a, b = ins
        return [(-z, -a), (-z, -b), (z, a, b)]
    if op == "XOR":
        a, b = ins
        return [(-z, a, b), (-z, -a, -b), (z, -a, b), (z, a, -b)]
    if op == "XNOR":
        a, b = ins
        return [(z, a, b), (z, -a, -b), (-z, -a, b), (-z, a, -b)]
    if op == "BUF":
        (a,) = ins
        return [(-z, a), (z, -a)]
    if op == "NOT":
        (a,) = ins
        return [(z, a), (-z, -a)]
    if op == "CONST0":
        return [(-z,)]
    if op == "CONST1":
        return [(z,)]
    raise ValueError(op)


@dataclass
class Encoding:
    """Tseitin encoding of one netlist: formula plus per-gate clause groups."""

    formula: CnfFormula
    var: Dict[str, int]
    gate_clauses: Dict[str, List[Clause]]


def encode(n: Netlist, pool: VarPool, prefix: str = "",
           input_vars: Optional[Dict[str, int]] = None) -> Encoding:
    var: Dict[str, int] = {}
    for x in n.inputs:
        if input_vars is not None and x in input_vars:
            var[x] = input_vars[x]
        else:
            var[x] = pool.new(prefix + x)
    for g in n.gates:
        var[g.output] = pool.new(prefix + g.output)
    f = CnfFormula(num_vars=pool.top)
    groups: Dict[str, List[Clause]] = {}
    for g in n.gates:
        cls = []
        for c in gate_clauses(g.op, var[g.output], [var[i] for i in g.inputs]):
            added = f.add(c)
            if added is not None:
                cls.append(added)
        groups[g.output] = cls
    f.names = {prefix + k: v for k, v in var.items()}
    return Encoding(f, var, groups)


def tseitin_encode(n: Netlist, var_alloc: Optional[VarPool] = None, prefix: str = "") -> CnfFormula:
    """CNF whose models are exactly the consistent executions of ``n``."""
    return encode(n, var_alloc or VarPool(), prefix).formula


def eq_formula(X1: Sequence[int], X2: Sequence[int]) -> CnfFormula:
    if len(X1) != len(X2):
        raise ValueError(f"EQ needs equal-length blocks, got {len(X1)} and {len(X2)}")
    f = CnfFormula()
    for a, b in zip(X1, X2):
        f.add((-a, b))
        f.add((a, -b))
    return f


def neq_clauses(z1: int, z2: int) -> CnfFormula:
    return CnfFormula([(z1, z2), (-z1, -z2)])


# --------------------------------------------------------------------- miter
@dataclass
class VarRoles:
    X1: List[int]
    X2: List[int]
    Y1: List[int]
    Y2: List[int]
    z1: int
    z2: int
    role: Dict[int, str]
    var1: Dict[str, int]
    var2: Dict[str, int]
    plan: Optional[CutPlan] = None

    def cut_vars(self, i: int) -> Tuple[List[int], List[int]]:
        a, b = self.plan.cuts[i]
        return [self.var1[x] for x in a], [self.var2[x] for x in b]

    def cut_list(self, i: int) -> List[int]:
        a, b = self.cut_vars(i)
        return a + b


@dataclass
class MiterFormulas:
    f1: CnfFormula
    f2: CnfFormula
    eq: CnfFormula
    neq: CnfFormula
    enc1: Encoding = field(repr=False)
    enc2: Encoding = field(repr=False)
    num_vars: int = 0

    @property
    def G(self) -> CnfFormula:
        return self.eq & self.f1 & self.f2

    @property
    def G_rlx(self) -> CnfFormula:
        return self.f1 & self.f2

    @property
    def alpha(self) -> CnfFormula:
        return self.eq & self.f1 & self.f2 & self.neq

    def beta(self, H) -> CnfFormula:
        h = H if isinstance(H, CnfFormula) else CnfFormula(H)
        return h & self.f1 & self.f2 & self.neq

    def region(self, lo: int, hi: int, plan: CutPlan) -> CnfFormula:
        """Clauses of gates with level in (lo, hi] of both circuits."""
        f = CnfFormula(num_vars=self.num_vars)
        for enc, lvl in ((self.enc1, plan.level1), (self.enc2, plan.level2)):
            for net, cls in enc.gate_clauses.items():
                if lo < lvl[net] <= hi:
                    f.clauses.extend(cls)
        return f


def build_miter(n1: Netlist, n2: Netlist, plan: Optional[CutPlan] = None):
    """Encode N' and N'' over disjoint variables (N' first) plus EQ and neq."""
    if len(n1.outputs) != 1 or len(n2.outputs) != 1:
        raise ValueError("miter construction needs single-output netlists")
    if len(n1.inputs) != len(n2.inputs):
        raise ValueError("circuits must have the same number of inputs")
    pool = VarPool()
    e1 = encode(n1, pool, "1:")
    e2 = encode(n2, pool, "2:")
    X1 = [e1.var[x] for x in n1.inputs]
    X2 = [e2.var[x] for x in n2.inputs]
    eq = eq_formula(X1, X2)
    z1, z2 = e1.var[n1.outputs[0]], e2.var[n2.outputs[0]]
    neq = neq_clauses(z1, z2)
    for f in (e1.formula, e2.formula, eq, neq):
        f.num_vars = pool.top
    Y1 = [e1.var[g.output] for g in n1.gates if g.output != n1.outputs[0]]
    Y2 = [e2.var[g.output] for g in n2.gates if g.output != n2.outputs[0]]
    role = {}
    for vs, r in ((X1, "X'"), (X2, "X''"), (Y1, "Y'"), (Y2, "Y''"), ([z1], "z'"), ([z2], "z''")):
        for v in vs:
            role.setdefault(v, r)
    m = MiterFormulas(e1.formula, e2.formula, eq, neq, e1, e2, pool.top)
    roles = VarRoles(X1, X2, Y1, Y2, z1, z2, role, e1.var, e2.var, plan)
    return m, roles


# ------------------------------------------------------------------ DIMACS
def emit_dimacs(f: CnfFormula) -> str:
    out = []
    for name, v in sorted(f.names.items(), key=lambda kv: (kv[1], kv[0])):
        out.append(f"c var {v} {name}")
    out.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for c in f.clauses:
        out.append(" ".join(str(l) for l in c) + " 0")
    return "\n".join(out) + "\n"


class DimacsError(ValueError):
    pass


def parse_dimacs(text: str) -> CnfFormula:
    names = {}
    nv = nc = None
    seen = 0
    lits: List[int] = []
    f = CnfFormula()
    for no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            toks = line.split()
            if len(toks) == 4 and toks[1] == "var":
                names[toks[3]] = int(toks[2])
            continue
        if line.startswith("p"):
            toks = line.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise DimacsError(f"line {no}: bad header")
            try:
                nv, nc = int(toks[2]), int(toks[3])
            except ValueError:
                raise DimacsError(f"line {no}: bad header") from None
            continue
        if line.startswith("e") or line.startswith("a"):
            continue
        if nv is None:
            raise DimacsError(f"line {no}: clause before 'p cnf' header")
        for t in line.split():
            try:
                v = int(t)
            except ValueError:
                raise DimacsError(f"line {no}: bad literal {t!r}") from None
            if abs(v) > nv:
                raise DimacsError(f"line {no}: variable {abs(v)} exceeds header count {nv}")
            if v == 0:
                f.add(lits)
                lits = []
                seen += 1
            else:
                lits.append(v)
    if lits:
        f.add(lits)
        seen += 1
    if nv is None:
        raise DimacsError("missing 'p cnf' header")
    if seen != nc:
        raise DimacsError(f"header says {nc} clauses, found {seen}")
    f.num_vars = max(nv, f.num_vars)
    f.names = names
    return f


def emit_pqe(A: CnfFormula, B: CnfFormula, W: Iterable[int]) -> str:
    """Quantified-problem text: DIMACS with an A-block marker and an 'e' line."""
    nv = max(A.num_vars, B.num_vars)
    out = [f"c pqe A {len(A.clauses)}",
           f"p cnf {nv} {len(A.clauses) + len(B.clauses)}",
           "e " + " ".join(str(w) for w in sorted(W)) + " 0"]
    for c in A.clauses + B.clauses:
        out.append(" ".join(str(l) for l in c) + " 0")
    return "\n".join(out) + "\n"


def parse_pqe(text: str):
    """Inverse of ``emit_pqe``; returns (A, B, W)."""
    n_a = None
    W: List[int] = []
    for line in text.splitlines():
        toks = line.split()
        if len(toks) == 4 and toks[:3] == ["c", "pqe", "A"]:
            n_a = int(toks[3])
        elif toks and toks[0] == "e":
            W.extend(int(t) for t in toks[1:] if t != "0")
    if n_a is None:
        raise DimacsError("missing 'c pqe A <n>' marker")
    full = parse_dimacs(text)
    A = CnfFormula(num_vars=full.num_vars)
    B = CnfFormula(num_vars=full.num_vars)
    A.clauses = full.clauses[:n_a]
    B.clauses = full.clauses[n_a:]
    return A, B, set(W)


# ------------------------------------------------------------- pair context
@dataclass
class PairContext:
    """A bufferized pair of circuits with level cuts and its miter encoding."""

    n1: Netlist
    n2: Netlist
    plan: CutPlan
    m: MiterFormulas
    roles: VarRoles

    @property
    def k(self) -> int:
        return self.plan.levels

    def cut_vars(self, i: int) -> List[int]:
        return self.roles.cut_list(i)

    def F_M(self, i: int) -> CnfFormula:
        """Gates at levels 1..i of both circuits."""
        return self.m.region(0, i, self.plan)

    def F_slice(self, i: int) -> CnfFormula:
        """Gates between cut i-1 and cut i."""
        return self.m.region(i - 1, i, self.plan)

    def F_L(self, i: int) -> CnfFormula:
        """Gates above cut i."""
        return self.m.region(i, self.plan.levels, self.plan)

    def W(self, i: int) -> set:
        """Variables of M_i other than the cut: inputs and nets below level i."""
        cut = set(self.cut_vars(i))
        below = set(self.roles.X1) | set(self.roles.X2) | self.F_M(i).vars()
        return below - cut

    def cut_eq(self, i: int) -> CnfFormula:
        a, b = self.roles.cut_vars(i)
        f = eq_formula(a, b)
        f.num_vars = self.m.num_vars
        return f


def prepare_pair(n1: Netlist, n2: Netlist) -> PairContext:
    from .netlist import bufferize_pair, level_cuts
    b1, b2 = bufferize_pair(n1, n2)
    plan = level_cuts(b1, b2)
    m, roles = build_miter(b1, b2, plan)
    return PairContext(b1, b2, plan, m, roles)
