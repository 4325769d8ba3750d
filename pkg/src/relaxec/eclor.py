"""Equivalence checking by logic relaxation.

A chain of boundary formulas H_0 = EQ(X', X''), H_1, ..., H_k is built over
the level cuts of a bufferized pair; H_k over {z', z''} decides equivalence.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set

import numpy as np

from .cnf import Clause, CnfFormula, PairContext, VarPool, encode, prepare_pair
from .netlist import Netlist, all_input_patterns, cone, simulate
from .pqe import Budget, CegarPqe
from .sat import Solver, solve

SCHEMA_VERSION = 1


class Mode(enum.Enum):
    EXACT = "exact"
    APPROX = "approximate"


class Verdict(enum.Enum):
    EQUIVALENT = "Equivalent"
    INEQUIVALENT = "Inequivalent"
    CONSTANT_DEGENERATE = "ConstantDegenerate"
    UNKNOWN = "Unknown"


class BoundaryNotVerified(ValueError):
    pass


@dataclass
class ChainStep:
    cut: int
    H: CnfFormula
    W: Set[int]
    region: str                 # "F_M" (gates up to the cut) or "slice"
    iterations: int = 0
    seeded: int = 0
    dropped: int = 0
    closed: bool = False        # the counterexample loop ran to completion
    seconds: float = 0.0

    @property
    def width_max(self) -> int:
        return self.H.width


@dataclass
class BoundaryChain:
    ctx: PairContext = field(repr=False)
    mode: Mode
    H: List[CnfFormula] = field(default_factory=list)
    steps: List[ChainStep] = field(default_factory=list)
    complete: bool = False

    @property
    def cuts(self):
        return self.ctx.plan


@dataclass
class BoundaryCertificate:
    cut: int
    method: str
    detail: str = ""


@dataclass
class EcVerdict:
    status: Verdict
    output_boundary: Optional[CnfFormula] = None
    witness: Optional[dict] = None
    chain: Optional[BoundaryChain] = field(default=None, repr=False)
    timings: Dict[str, float] = field(default_factory=dict)
    alpha_sat: Optional[bool] = None
    note: str = ""

    def to_json(self, timings: bool = True) -> str:
        d = {"schema": SCHEMA_VERSION, "status": self.status.value, "note": self.note}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.output_boundary is not None:
            d["output_boundary"] = [list(c) for c in self.output_boundary.clauses]
        if self.chain is not None:
            d["mode"] = self.chain.mode.value
            d["chain"] = [{"cut": s.cut, "clauses": len(s.H), "width_max": s.width_max,
                           "terminated_after": s.iterations, "seeded": s.seeded}
                          for s in self.chain.steps]
        if self.alpha_sat is not None:
            d["alpha_sat"] = self.alpha_sat
        if timings:
            d["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return json.dumps(d, indent=2, sort_keys=True)


def _subsume(clauses: Sequence[Clause]) -> List[Clause]:
    out: List[Clause] = []
    sets = []
    for c in sorted(dict.fromkeys(clauses), key=len):
        s = set(c)
        if any(t <= s for t in sets):
            continue
        sets.append(s)
        out.append(c)
    order = {c: i for i, c in enumerate(clauses)}
    return sorted(out, key=lambda c: order[c])


# --------------------------------------------------------------- Redund step
def redund_check(H_prev, H_cur, F_Mi, W_i, max_iters: int = 100000) -> Optional[Clause]:
    """A clause over the cut that H_cur still misses, or None when H_prev is
    redundant in H_cur & exists W_i [H_prev & F_Mi]."""
    eng = CegarPqe(H_prev, F_Mi, W_i, max_iters=max_iters,
                   nvars=max(_nv(H_prev), _nv(F_Mi), _nv(H_cur)))
    for c in _clauses(H_cur):
        eng.add_h(c)
    return eng.next_clause()


def _clauses(f):
    return f.clauses if isinstance(f, CnfFormula) else list(f)


def _nv(f):
    return f.num_vars if isinstance(f, CnfFormula) else max((abs(l) for c in f for l in c), default=0)


# ----------------------------------------------------------------- relatives
def _relatives_seed(ctx: PairContext, i: int, H_prev: CnfFormula, H_known: Set[int],
                     max_cluster: int = 40) -> List[Clause]:
    """Short clauses tying each unconstrained N' cut gate to its N'' relatives."""
    r = ctx.roles
    enc1, enc2 = ctx.m.enc1, ctx.m.enc2
    cut1, cut2 = ctx.plan.cuts[i]
    drv1 = {g.output: g for g in ctx.n1.gates}
    drv2 = {g.output: g for g in ctx.n2.gates}
    in2: Dict[int, List[str]] = {}
    for net in cut2:
        g = drv2.get(net)
        if g is None:
            continue
        for x in g.inputs:
            in2.setdefault(r.var2[x], []).append(net)
    occurs: Dict[int, List[Clause]] = {}
    for c in H_prev.clauses:
        for l in c:
            occurs.setdefault(abs(l), []).append(c)
    out: List[Clause] = []
    for net in cut1:
        v = r.var1[net]
        if v in H_known:
            continue
        g = drv1.get(net)
        if g is None:
            continue
        ins1 = {r.var1[x] for x in g.inputs}
        rel: List[str] = []
        for a in ins1:
            for c in occurs.get(a, ()):
                for l in c:
                    for n2 in in2.get(abs(l), ()):
                        if n2 not in rel:
                            rel.append(n2)
        if not rel:
            continue
        ins = set(ins1)
        for n2 in rel:
            ins |= {r.var2[x] for x in drv2[n2].inputs}
        outs = {v} | {r.var2[n2] for n2 in rel}
        if len(ins) + len(outs) > max_cluster:
            continue
        A = CnfFormula([c for c in H_prev.clauses if {abs(l) for l in c} <= ins],
                       num_vars=ctx.m.num_vars)
        B = CnfFormula(enc1.gate_clauses[net] + [c for n2 in rel for c in enc2.gate_clauses[n2]],
                       num_vars=ctx.m.num_vars)
        W = (A.vars() | B.vars()) - outs
        # the cluster's don't-care points are resolved to 0: an exact
        # projection cannot admit cut points the gates could never produce
        AB = A & B
        eng = CegarPqe(AB, CnfFormula(num_vars=ctx.m.num_vars), W,
                       nvars=ctx.m.num_vars, max_width=3)
        out.extend(eng.run())
    return out


# -------------------------------------------------------------------- chain
def build_boundary_chain(n1: Netlist, n2: Netlist, mode="exact", relatives: bool = False,
                         max_width: Optional[int] = 3, max_iters: int = 200000,
                         ctx: Optional[PairContext] = None, upto: Optional[int] = None
                         ) -> BoundaryChain:
    """H_0..H_k; on Budget the partial chain is attached to the exception."""
    mode = Mode(mode)
    ctx = ctx or prepare_pair(n1, n2)
    chain = BoundaryChain(ctx, mode)
    H0 = ctx.m.eq.copy()
    H0.num_vars = ctx.m.num_vars
    chain.H.append(H0)
    last = ctx.k if upto is None else upto
    for i in range(1, last + 1):
        t0 = time.perf_counter()
        if mode is Mode.EXACT:
            B, W, region = ctx.F_M(i), ctx.W(i), "F_M"
        else:
            B = ctx.F_slice(i)
            W = (B.vars() | set(ctx.cut_vars(i - 1))) - set(ctx.cut_vars(i))
            region = "slice"
        eng = CegarPqe(chain.H[-1], B, W, nvars=ctx.m.num_vars, max_iters=max_iters,
                       max_width=max_width, seed_good=_sim_good(ctx, i),
                       drop_wide=mode is Mode.APPROX and max_width is not None)
        step = ChainStep(i, CnfFormula(num_vars=ctx.m.num_vars), set(W), region)
        if relatives:
            known = chain.H[-1].vars() & set(ctx.cut_vars(i))
            for c in _subsume(_relatives_seed(ctx, i, chain.H[-1], known)):
                eng.add_h(c)
                step.seeded += 1
        try:
            while eng.next_clause() is not None:
                step.iterations += 1
        except Budget as e:
            step.H.clauses = list(eng.H)
            chain.steps.append(step)
            e.chain = chain
            raise
        step.iterations += 1
        step.closed = True
        step.dropped = eng.stats["dropped"]
        step.H.clauses = _subsume(eng.H)
        step.H.names = {k: v for k, v in ctx.m.f1.names.items() if v in step.H.vars()}
        step.H.names.update({k: v for k, v in ctx.m.f2.names.items() if v in step.H.vars()})
        step.seconds = time.perf_counter() - t0
        chain.steps.append(step)
        chain.H.append(step.H)
    chain.complete = last == ctx.k
    return chain


def _sim_good(ctx: PairContext, i: int, samples: int = 256):
    """Cut points produced with equal inputs, from random simulation."""
    n_in = len(ctx.n1.inputs)
    rng = np.random.default_rng(i)
    if n_in <= 8:
        pats = all_input_patterns(n_in)
    else:
        pats = rng.integers(0, 2, size=(samples, n_in)).astype(bool)
    e1 = simulate(ctx.n1, {x: pats[:, j] for j, x in enumerate(ctx.n1.inputs)})
    e2 = simulate(ctx.n2, {x: pats[:, j] for j, x in enumerate(ctx.n2.inputs)})
    a, b = ctx.plan.cuts[i]
    cols = [e1[x] for x in a] + [e2[x] for x in b]
    return ctx.cut_vars(i), np.stack(cols, axis=1)


# ----------------------------------------------------------------- verdicts
def _eval_out(H: CnfFormula, z1: int, z2: int, b1: bool, b2: bool) -> bool:
    val = {z1: b1, z2: b2}
    for c in H.clauses:
        if not any(val.get(abs(l), None) == (l > 0) for l in c):
            if all(abs(l) in val for l in c):
                return False
    return True


def _inputs_of(model, ctx: PairContext) -> Dict[str, int]:
    return {x: int(model[ctx.roles.var1[x]]) for x in ctx.n1.inputs}


def realign(ctx: PairContext, fixed: Dict[int, bool]) -> Optional[dict]:
    """Extend a cut assignment to a model of G (equal inputs), if possible."""
    s = Solver(ctx.m.num_vars)
    s.add_clauses(ctx.m.G.clauses)
    r = s.solve([v if b else -v for v, b in sorted(fixed.items())])
    if not r.sat:
        return None
    return {"inputs": _inputs_of(r.model, ctx),
            "outputs": [int(r.model[ctx.roles.z1]), int(r.model[ctx.roles.z2])]}


def _decide(chain: BoundaryChain, exact: bool, crosscheck: bool, t0: float) -> EcVerdict:
    ctx = chain.ctx
    Hk = chain.H[-1]
    z1, z2 = ctx.roles.z1, ctx.roles.z2
    G_rlx = Solver(ctx.m.num_vars)
    G_rlx.add_clauses(ctx.m.G_rlx.clauses)
    open_pts = [(b1, b2) for b1, b2 in ((True, False), (False, True))
                if _eval_out(Hk, z1, z2, b1, b2)]
    timings = {"chain": time.perf_counter() - t0}
    verdict = None
    if not open_pts:
        verdict = EcVerdict(Verdict.EQUIVALENT, Hk, chain=chain)
    else:
        const = []
        for b1, b2 in open_pts:
            r = G_rlx.solve([z1 if b1 else -z1, z2 if b2 else -z2])
            if r.sat:
                if not exact:
                    verdict = EcVerdict(Verdict.UNKNOWN, Hk, chain=chain,
                                        note="approximate chain leaves an output point open")
                    break
                w = realign(ctx, {z1: b1, z2: b2})
                if w is None:
                    raise AssertionError("exact boundary formula admitted a spurious point")
                verdict = EcVerdict(Verdict.INEQUIVALENT, Hk, witness=w, chain=chain)
                break
            const.append(_constant_side(ctx, b1, b2))
        if verdict is None:
            verdict = EcVerdict(Verdict.CONSTANT_DEGENERATE, Hk, chain=chain,
                                witness={"constant": const}, note="; ".join(const))
    timings["total"] = time.perf_counter() - t0
    if crosscheck:
        verdict.alpha_sat = solve(ctx.m.alpha).sat
    verdict.timings = timings
    return verdict


def _constant_side(ctx: PairContext, b1: bool, b2: bool) -> str:
    z1 = ctx.roles.z1
    if not solve(ctx.m.f1, [z1 if b1 else -z1]).sat:
        return f"N1 cannot produce {int(b1)}"
    return f"N2 cannot produce {int(b2)}"


def ec_lor(n1: Netlist, n2: Netlist, mode="exact", crosscheck: bool = True,
           max_iters: int = 200000, max_width: Optional[int] = 3) -> EcVerdict:
    """Decide equivalence from the output boundary formula."""
    mode = Mode(mode)
    t0 = time.perf_counter()
    try:
        chain = build_boundary_chain(n1, n2, mode, max_iters=max_iters, max_width=max_width)
    except Budget as e:
        return EcVerdict(Verdict.UNKNOWN, chain=getattr(e, "chain", None), note=str(e),
                         timings={"total": time.perf_counter() - t0})
    return _decide(chain, mode is Mode.EXACT, crosscheck, t0)


def ec_lor_star(n1: Netlist, n2: Netlist, crosscheck: bool = True,
                max_iters: int = 200000, max_width: Optional[int] = 3) -> EcVerdict:
    """Approximate variant: slice-only steps with relatives pre-seeding."""
    t0 = time.perf_counter()
    try:
        chain = build_boundary_chain(n1, n2, Mode.APPROX, relatives=True,
                                     max_iters=max_iters, max_width=max_width)
    except Budget as e:
        return EcVerdict(Verdict.UNKNOWN, chain=getattr(e, "chain", None), note=str(e),
                         timings={"total": time.perf_counter() - t0})
    return _decide(chain, False, crosscheck, t0)


# ---------------------------------------------------- boundary validation
def _cut_sim(n: Netlist, nets: Sequence[str]) -> np.ndarray:
    pats = all_input_patterns(len(n.inputs))
    env = simulate(n, {x: pats[:, j] for j, x in enumerate(n.inputs)})
    if not nets:
        return np.zeros((len(pats), 0), dtype=bool)
    return np.stack([env[x] for x in nets], axis=1)


def validate_boundary(H: CnfFormula, cut_i: int, n1: Netlist, n2: Netlist,
                      ctx: Optional[PairContext] = None, max_inputs: int = 20,
                      max_product: int = 1 << 22) -> bool:
    """Check both boundary conditions by exhaustive simulation.

    (a) every cut point produced with equal inputs satisfies H;
    (b) every point produced with free inputs but not with equal ones falsifies H.
    """
    ctx = ctx or prepare_pair(n1, n2)
    if len(ctx.n1.inputs) + len(ctx.n2.inputs) > max_inputs:
        raise ValueError("circuits too large for exhaustive boundary validation")
    a, b = ctx.plan.cuts[cut_i]
    C1, C2 = _cut_sim(ctx.n1, a), _cut_sim(ctx.n2, b)
    U1, inv1 = np.unique(C1, axis=0, return_inverse=True)
    U2, inv2 = np.unique(C2, axis=0, return_inverse=True)
    inv1, inv2 = inv1.ravel(), inv2.ravel()
    if len(U1) * len(U2) > max_product:
        raise ValueError("cut image product too large for exhaustive validation")
    eqmask = np.zeros((len(U1), len(U2)), dtype=bool)
    eqmask[inv1, inv2] = True
    v1 = {ctx.roles.var1[x]: j for j, x in enumerate(a)}
    v2 = {ctx.roles.var2[x]: j for j, x in enumerate(b)}
    Hval = np.ones_like(eqmask)
    for c in H.clauses:
        sat = np.zeros_like(eqmask)
        for l in c:
            v = abs(l)
            if v in v1:
                col = U1[:, v1[v]][:, None]
            elif v in v2:
                col = U2[:, v2[v]][None, :]
            else:
                raise ValueError(f"variable {v} is not on cut {cut_i}")
            sat = sat | (col if l > 0 else ~col)
        Hval &= sat
    return bool(Hval[eqmask].all() and not Hval[~eqmask].any())


def _neq_vectors(pool: VarPool, A: Sequence[int], B: Sequence[int]) -> List[Clause]:
    ds, out = [], []
    for x, y in zip(A, B):
        d = pool.new()
        ds.append(d)
        out += [(-d, x, y), (-d, -x, -y)]
    out.append(tuple(ds))
    return out


def certify_boundary(H: CnfFormula, cut_i: int, n1: Netlist, n2: Netlist,
                     ctx: Optional[PairContext] = None, cegar_iters: int = 20000
                     ) -> Optional[BoundaryCertificate]:
    """SAT-based proof that H is a boundary formula for cut ``cut_i``.

    (a) is checked clause by clause.  For (b) an input assignment common to
    both circuits must exist for every free-input point allowed by H; we first
    try the witnesses x := x' and x := x'', then fall back to enumeration.
    """
    ctx = ctx or prepare_pair(n1, n2)
    FM = ctx.F_M(cut_i)
    G = Solver(ctx.m.num_vars)
    G.add_clauses(ctx.m.eq.clauses + FM.clauses)
    for c in H.clauses:
        if not G.solve([-l for l in c]).unsat:
            return None
    c1, c2 = ctx.roles.cut_vars(cut_i)
    for side in (1, 2):
        pool = VarPool(ctx.m.num_vars)
        if side == 1:
            # copy of N2's cone driven by N1's inputs
            sub = cone(ctx.n2, cut_i)
            enc = encode(sub, pool, "w:", {x: ctx.roles.var1[x1] for x, x1 in
                                            zip(ctx.n2.inputs, ctx.n1.inputs)})
            other, target = [enc.var[x] for x in ctx.plan.cuts[cut_i][1]], c2
        else:
            sub = cone(ctx.n1, cut_i)
            enc = encode(sub, pool, "w:", {x: ctx.roles.var2[x2] for x, x2 in
                                            zip(ctx.n1.inputs, ctx.n2.inputs)})
            other, target = [enc.var[x] for x in ctx.plan.cuts[cut_i][0]], c1
        s = Solver(pool.top)
        s.add_clauses(FM.clauses)
        s.add_clauses(H.clauses)
        s.add_clauses(enc.formula.clauses)
        s.ensure_vars(pool.top)
        extra = _neq_vectors(pool, other, target)
        s.ensure_vars(pool.top)
        s.add_clauses(extra)
        if s.solve().unsat:
            return BoundaryCertificate(cut_i, f"witness x:=x{side}")
    eng = CegarPqe(ctx.m.eq, FM, ctx.W(cut_i), nvars=ctx.m.num_vars, max_iters=cegar_iters)
    for c in H.clauses:
        eng.add_h(c)
    if eng.next_clause() is None:
        return BoundaryCertificate(cut_i, "enumeration")
    return None


def prove_inequivalence_via_beta(n1: Netlist, n2: Netlist, H_i: CnfFormula, cut_i: int,
                                 certificate: Optional[BoundaryCertificate] = None,
                                 ctx: Optional[PairContext] = None, seed: int = 0,
                                 stats: Optional[dict] = None) -> Optional[dict]:
    """Solve H_i & G_rlx & neq.  A model means the circuits differ."""
    if not certificate:
        raise BoundaryNotVerified(f"no boundary certificate for cut {cut_i}")
    ctx = ctx or prepare_pair(n1, n2)
    r = solve(ctx.m.beta(H_i), seed=seed)
    if stats is not None:
        stats.update(r.stats)
    if not r.sat:
        return None
    a, b = ctx.roles.cut_vars(cut_i)
    fixed = {v: r.model[v] for v in a + b}
    w = realign(ctx, fixed)
    if w is None:
        raise AssertionError("beta model does not extend; H is not a boundary formula")
    w["cut_point"] = [int(r.model[v]) for v in a + b]
    w["beta_inputs"] = {"N1": {x: int(r.model[ctx.roles.var1[x]]) for x in ctx.n1.inputs},
                        "N2": {x: int(r.model[ctx.roles.var2[x]]) for x in ctx.n2.inputs}}
    return w
