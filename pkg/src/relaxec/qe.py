"""Complete quantifier elimination by model enumeration with blocking clauses."""

from __future__ import annotations

from typing import Iterable, Optional

from .cnf import CnfFormula, PairContext, prepare_pair
from .netlist import Netlist
from .pqe import Budget, CegarPqe


def eliminate(f: CnfFormula, W: Iterable[int], max_iters: int = 200000) -> CnfFormula:
    """Formula over vars(f) minus W equivalent to exists W [f].

    Free points are enumerated; a point where f is satisfiable is widened to a
    cube and blocked, a point where it is not yields a minimized clause.
    Raises Budget instead of returning a partial answer.
    """
    eng = CegarPqe(f, CnfFormula(num_vars=f.num_vars), W, nvars=f.num_vars,
                   max_iters=max_iters)
    H = eng.run()
    out = CnfFormula(sorted(H, key=lambda c: (len(c), c)), num_vars=f.num_vars)
    out.names = {k: v for k, v in f.names.items() if v not in set(W)}
    return out


def cut_image(n1: Netlist, n2: Netlist, cut_i: int, ctx: Optional[PairContext] = None,
              max_iters: int = 200000) -> CnfFormula:
    """exists W_i [EQ & F_Mi]: the set of cut-i values reachable with equal inputs."""
    ctx = ctx or prepare_pair(n1, n2)
    if not 0 <= cut_i <= ctx.k:
        raise IndexError(f"cut index {cut_i} outside 0..{ctx.k}")
    f = ctx.m.eq & ctx.F_M(cut_i)
    f.num_vars = ctx.m.num_vars
    return eliminate(f, ctx.W(cut_i), max_iters=max_iters)


__all__ = ["Budget", "cut_image", "eliminate"]
