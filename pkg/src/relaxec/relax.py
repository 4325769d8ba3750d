"""Generalized relaxation: boundary formulas for arbitrary CNF splits,
interpolants as a special case, and replacing vs separating relaxations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Set, Tuple

from .cnf import CnfFormula, PairContext, prepare_pair
from .netlist import Netlist
from .pqe import CegarPqe, PqeProblem, pqe_sat, verify_pqe_solution
from .sat import implies, solve


class NotUnsat(ValueError):
    """A & B is satisfiable, so there is no interpolant."""


@dataclass
class RelaxSplit:
    S: CnfFormula
    E: CnfFormula
    X: Set[int]
    Z: Set[int]

    def __post_init__(self):
        self.X, self.Z = set(self.X), set(self.Z)
        if self.X & self.Z:
            raise ValueError("internal and external variables overlap")
        taken = set(self.E.clauses)
        missing = taken - set(self.S.clauses)
        if missing:
            raise ValueError(f"E has clauses not in S: {sorted(missing)[:3]}")

    @property
    def S_rlx(self) -> CnfFormula:
        out = CnfFormula(num_vars=self.S.num_vars)
        e = list(self.E.clauses)
        for c in self.S.clauses:
            if c in e:
                e.remove(c)
            else:
                out.clauses.append(c)
        return out


def relax_general(split: RelaxSplit, max_iters: int = 100000) -> CnfFormula:
    """H(Z) with exists X [E & S_rlx] == H & exists X [S_rlx]."""
    p = PqeProblem(split.E, split.S_rlx, split.X)
    return pqe_sat(p, max_iters=max_iters).Astar


def _shared(A: CnfFormula, B: CnfFormula, shared=None):
    """(Y, X, Z); Y defaults to the variables common to A and B."""
    va, vb = A.vars(), B.vars()
    Y = va & vb if shared is None else set(shared)
    return Y, va - Y, vb - Y - va


def _a_closed(A: CnfFormula, B: CnfFormula, max_iters: int, shared=None) -> CnfFormula:
    """H over the shared variables with A -> H and H true only on B-points
    that A can also produce."""
    Y, X, Z = _shared(A, B, shared)
    nv = max(A.num_vars, B.num_vars)
    eng = CegarPqe(A, B, X | Z, check=A, nvars=nv, max_iters=max_iters)
    return CnfFormula(eng.run(), num_vars=nv)


def extract_interpolant(A: CnfFormula, B: CnfFormula, max_iters: int = 100000,
                        shared=None) -> CnfFormula:
    """Interpolant for A -> not B built as a relaxation boundary formula.

    ``shared`` fixes the interpolant's variables; by default the variables
    occurring in both A and B.
    """
    nv = max(A.num_vars, B.num_vars)
    if solve(CnfFormula(A.clauses + B.clauses, num_vars=nv)).sat:
        raise NotUnsat("A & B is satisfiable")
    return _a_closed(A, B, max_iters, shared)


def broken_interpolant(A: CnfFormula, B: CnfFormula, max_iters: int = 100000,
                       shared=None) -> Tuple[CnfFormula, Optional[dict]]:
    """H with A -> H and the PQE relation; a witness when H & B is satisfiable.

    The witness holds the shared/B-side values and their extension to a model
    of A & B.
    """
    H = _a_closed(A, B, max_iters, shared)
    nv = max(A.num_vars, B.num_vars)
    r = solve(CnfFormula(H.clauses + B.clauses, num_vars=nv))
    if not r.sat:
        return H, None
    Y, X, Z = _shared(A, B, shared)
    y = {v: r.model[v] for v in sorted(Y)}
    ext = solve(A, [v if b else -v for v, b in y.items()])
    if not ext.sat:
        raise AssertionError("counterexample for H & B does not extend to A")
    w = {"y": {v: int(b) for v, b in y.items()},
         "z": {v: int(r.model[v]) for v in sorted(Z)},
         "x": {v: int(ext.model[v]) for v in sorted(X)}}
    return H, w


def extend_counterexample(A: CnfFormula, B: CnfFormula, y: Dict[int, int],
                          z: Dict[int, int]) -> Optional[Dict[int, int]]:
    """X-values completing (y, z) to a model of A & B, if any."""
    r = solve(A, [v if b else -v for v, b in y.items()])
    if not r.sat:
        return None
    _, X, _ = _shared(A, B, y.keys())
    return {v: int(r.model[v]) for v in sorted(X)}


# ------------------------------------------------------ replacing vs separating
@dataclass
class CutSplit:
    F_M: CnfFormula
    F_L: CnfFormula
    EQ: CnfFormula
    neq: CnfFormula
    cut: Tuple[int, ...]
    num_vars: int = 0
    cut_eq: Optional[CnfFormula] = None

    @classmethod
    def from_pair(cls, n1: Netlist, n2: Netlist, cut_i: int,
                  ctx: Optional[PairContext] = None) -> "CutSplit":
        ctx = ctx or prepare_pair(n1, n2)
        nv = ctx.m.num_vars
        return cls(ctx.F_M(cut_i), ctx.F_L(cut_i), ctx.m.eq, ctx.m.neq,
                   tuple(ctx.cut_vars(cut_i)), nv, ctx.cut_eq(cut_i))

    @property
    def alpha(self) -> CnfFormula:
        return CnfFormula(self.F_M.clauses + self.F_L.clauses + self.EQ.clauses +
                          self.neq.clauses, num_vars=self.num_vars)


@dataclass
class RelaxationReport:
    H_r: CnfFormula
    H_s: CnfFormula
    H_r_verified: bool
    H_s_verified: bool
    H_r_is_interpolant: bool
    cut_eq_boundary_from_below: Optional[bool] = None
    cut_eq_interpolant_with_F_L: Optional[bool] = None
    counterexample: Optional[dict] = field(default=None, repr=False)


def compare_relaxations(split: CutSplit, max_iters: int = 100000) -> RelaxationReport:
    nv = split.num_vars
    cut = set(split.cut)
    A_r = CnfFormula(split.EQ.clauses + split.F_M.clauses, num_vars=nv)
    B_r = CnfFormula(split.F_L.clauses + split.neq.clauses, num_vars=nv)
    H_r, cex = broken_interpolant(A_r, B_r, max_iters)
    W = (A_r.vars() | B_r.vars()) - cut
    r_ok = (all(implies(A_r, c) for c in H_r.clauses) and
            verify_pqe_solution(PqeProblem(A_r, B_r, W), H_r))
    H_r_int = not solve(CnfFormula(H_r.clauses + B_r.clauses, num_vars=nv)).sat

    B_s = CnfFormula(split.F_M.clauses + split.F_L.clauses + split.neq.clauses, num_vars=nv)
    p_s = PqeProblem(split.EQ, B_s, W)
    H_s = pqe_sat(p_s, max_iters=max_iters).Astar
    s_ok = verify_pqe_solution(p_s, H_s)

    rep = RelaxationReport(H_r, H_s, r_ok, s_ok, H_r_int, counterexample=cex)
    eqc = split.cut_eq
    if eqc is not None:
        W_below = split.F_M.vars() | split.EQ.vars()
        below = PqeProblem(split.EQ, split.F_M, W_below - cut)
        rep.cut_eq_boundary_from_below = verify_pqe_solution(below, eqc)
        rep.cut_eq_interpolant_with_F_L = not solve(
            CnfFormula(eqc.clauses + B_r.clauses, num_vars=nv)).sat
    return rep
