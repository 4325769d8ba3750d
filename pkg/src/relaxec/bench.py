"""Benchmark circuits and the desk-scale experiment harness."""

from __future__ import annotations

import csv
import io
import json
import math
import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .netlist import BINARY_OPS, Gate, Netlist, sweep, topo_levels


class NoGateAboveLevel(ValueError):
    pass


def _check_k(k: int):
    if not isinstance(k, int) or not 2 <= k <= 16:
        raise ValueError(f"k must be an integer in 2..16, got {k!r}")


class _Builder:
    def __init__(self, prefix: str = ""):
        self.gates: List[Gate] = []
        self.prefix = prefix
        self.n = 0

    def gate(self, op, *ins, name=None) -> str:
        if name is None:
            self.n += 1
            name = f"{self.prefix}n{self.n}"
        self.gates.append(Gate(name, op, tuple(ins)))
        return name


def _mlp_gates(bld: _Builder, a: Sequence[str], b: Sequence[str], bit: int) -> str:
    """Carry-save array multiplier followed by a ripple adder; returns ``bit``."""
    k = len(a)
    width = bit + 1
    pp = {}
    for i in range(k):
        for j in range(k):
            if i + j < width:
                pp[i, j] = bld.gate("AND", a[j], b[i], name=f"{bld.prefix}pp{i}_{j}")
    S: Dict[int, str] = {w: pp[0, w] for w in range(min(k, width))}
    C: Dict[int, str] = {}
    for i in range(1, k):
        S2: Dict[int, str] = {}
        C2: Dict[int, str] = {}
        for w in range(width):
            terms = [t for t in (S.get(w), pp.get((i, w - i)), C.get(w)) if t is not None]
            if len(terms) == 1:
                S2[w] = terms[0]
            elif len(terms) == 2:
                x, y = terms
                S2[w] = bld.gate("XOR", x, y)
                if w + 1 < width:
                    C2[w + 1] = bld.gate("AND", x, y)
            elif len(terms) == 3:
                x, y, z = terms
                t = bld.gate("XOR", x, y)
                S2[w] = bld.gate("XOR", t, z)
                if w + 1 < width:
                    C2[w + 1] = bld.gate("OR", bld.gate("AND", x, y), bld.gate("AND", t, z))
        S, C = S2, C2
    # ripple the remaining carries
    carry = None
    for w in range(width):
        terms = [t for t in (S.get(w), C.get(w), carry) if t is not None]
        carry = None
        if len(terms) == 1:
            s = terms[0]
        elif len(terms) == 2:
            x, y = terms
            s = bld.gate("XOR", x, y)
            if w + 1 < width:
                carry = bld.gate("AND", x, y)
        else:
            x, y, z = terms
            t = bld.gate("XOR", x, y)
            s = bld.gate("XOR", t, z)
            if w + 1 < width:
                carry = bld.gate("OR", bld.gate("AND", x, y), bld.gate("AND", t, z))
        S[w] = s
    return S[bit]


def gen_mlp(k: int, bit: Optional[int] = None) -> Netlist:
    """Single-output multiplier circuit computing bit ``bit`` (default k-1) of a*b."""
    _check_k(k)
    bit = k - 1 if bit is None else bit
    a = [f"a{j}" for j in range(k)]
    b = [f"b{j}" for j in range(k)]
    bld = _Builder()
    out = _mlp_gates(bld, a, b, bit)
    gates = bld.gates
    if out in a + b:
        gates = gates + [Gate("p", "BUF", (out,))]
        out = "p"
    return sweep(Netlist(a + b, [out], gates, f"mlp{k}"))


@dataclass
class SimilarityMap:
    """For each N1 net, the N2 nets that determine it."""

    S: Dict[str, Set[str]]

    @property
    def max_size(self) -> int:
        return max((len(v) for v in self.S.values()), default=0)


def gen_hgated_pair(k: int) -> Tuple[Netlist, Netlist, SimilarityMap]:
    """Equivalent pair with no internal equivalences.

    N1 gates every data input with ``h`` before the multiplier, so all of its
    internal nets are 0 when h=0.  N2 buffers the inputs (to keep the two
    multipliers on the same levels) and gates only the output.
    """
    _check_k(k)
    a = [f"a{j}" for j in range(k)]
    b = [f"b{j}" for j in range(k)]
    inputs = ["h"] + a + b
    b1 = _Builder()
    ga = [b1.gate("AND", "h", x, name=f"g_{x}") for x in a]
    gb = [b1.gate("AND", "h", x, name=f"g_{x}") for x in b]
    o1 = _mlp_gates(b1, ga, gb, k - 1)
    n1 = sweep(Netlist(inputs, [o1], b1.gates, f"hpair{k}_n1"))
    b2 = _Builder()
    ba = [b2.gate("BUF", x, name=f"g_{x}") for x in a]
    bb = [b2.gate("BUF", x, name=f"g_{x}") for x in b]
    o2 = _mlp_gates(b2, ba, bb, k - 1)
    y = b2.gate("AND", "h", o2, name="y")
    n2 = sweep(Netlist(inputs, [y], b2.gates, f"hpair{k}_n2"))
    S = {x: {x} for x in inputs}
    names2 = set(n2.nets)
    for g in n1.gates:
        S[g.output] = {"h", g.output} if g.output in names2 else {"h", "y"}
    return n1, n2, SimilarityMap(S)


def inject_bug(n: Netlist, min_level: int, seed: int, max_tries: int = 64) -> Netlist:
    """Replace the op of one binary gate above ``min_level`` by another binary op.

    The choice is a deterministic function of ``seed``; candidates that leave
    the function unchanged are skipped after a miter SAT check.
    """
    from .cnf import build_miter
    from .sat import solve

    lv = topo_levels(n)
    cands = [i for i, g in enumerate(n.gates) if lv[g.output] > min_level and g.op in BINARY_OPS]
    if not cands:
        raise NoGateAboveLevel(f"no binary gate above level {min_level} in {n.name}")
    rng = random.Random(seed)
    for _ in range(max_tries):
        i = rng.choice(cands)
        g = n.gates[i]
        op = rng.choice([o for o in BINARY_OPS if o != g.op])
        gates = list(n.gates)
        gates[i] = Gate(g.output, op, g.inputs)
        bug = Netlist(n.inputs, n.outputs, gates, f"{n.name}_bug{seed}")
        m, _ = build_miter(n, bug)
        if solve(m.alpha).sat:
            return bug
    raise NoGateAboveLevel(f"no observable mutation found above level {min_level}")


def random_netlist(n_inputs: int, n_gates: int, seed: int, max_depth: int = 5,
                   ops: Sequence[str] = ("AND", "OR", "XOR", "NAND", "NOR", "XNOR", "NOT", "BUF"),
                   name: str = "rnd") -> Netlist:
    """Random single-output circuit with depth at most ``max_depth``."""
    rng = random.Random(seed)
    inputs = [f"x{j}" for j in range(n_inputs)]
    level = {x: 0 for x in inputs}
    nets = list(inputs)
    gates: List[Gate] = []
    for j in range(n_gates):
        op = rng.choice(list(ops))
        pool = [x for x in nets if level[x] < max_depth]
        ar = 1 if op in ("NOT", "BUF") else 2
        ins = tuple(rng.choice(pool) for _ in range(ar))
        if ar == 2 and ins[0] == ins[1] and len(pool) > 1:
            ins = (ins[0], rng.choice([x for x in pool if x != ins[0]]))
        out = f"g{j}"
        gates.append(Gate(out, op, ins))
        level[out] = 1 + max(level[i] for i in ins)
        nets.append(out)
    return sweep(Netlist(inputs, [nets[-1]], gates, name))


def random_pair(n_inputs: int, n_gates: int, seed: int, max_depth: int = 5):
    """A random circuit and either a mutated copy or an independent circuit."""
    rng = random.Random(seed)
    n1 = random_netlist(n_inputs, n_gates, rng.randrange(1 << 30), max_depth, name="r1")
    kind = rng.choice(["same", "mutant", "other"])
    if kind == "same":
        return n1, n1.renamed("r2"), kind
    if kind == "mutant":
        gates = list(n1.gates)
        bins = [i for i, g in enumerate(gates) if g.op in BINARY_OPS]
        if bins:
            i = rng.choice(bins)
            g = gates[i]
            gates[i] = Gate(g.output, rng.choice([o for o in BINARY_OPS if o != g.op]), g.inputs)
        return n1, Netlist(n1.inputs, n1.outputs, gates, "r2"), kind
    return n1, random_netlist(n_inputs, n_gates, rng.randrange(1 << 30), max_depth, name="r2"), kind


# ---------------------------------------------------------------- harness
@dataclass
class ExperimentReport:
    name: str
    rows: List[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def header(self) -> List[str]:
        keys: List[str] = []
        for r in self.rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        return keys

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.header, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"name": self.name, "rows": self.rows, "summary": self.summary},
                          indent=2, sort_keys=True)


def _dump(out_dir, n: Netlist):
    if out_dir is None:
        return
    import os
    from .netlist import emit_blif
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, f"{n.name}.blif"), "w") as fh:
        fh.write(emit_blif(n))


def _table1(ks=(4, 5, 6), max_iters=200000, out_dir=None, validate=True) -> ExperimentReport:
    from .cnf import prepare_pair
    from .eclor import validate_boundary
    from .pqe import Budget, CegarPqe
    from .qe import cut_image
    rep = ExperimentReport("table1")
    for k in ks:
        m = gen_mlp(k)
        _dump(out_dir, m)
        ctx = prepare_pair(m, m)
        row = {"instance": f"mlp{k}x2", "k": k, "cut": 1, "cut_vars": len(ctx.cut_vars(1))}
        try:
            t = time.perf_counter()
            eng = CegarPqe(ctx.m.eq, ctx.F_M(1), ctx.W(1), nvars=ctx.m.num_vars,
                           max_iters=max_iters, max_width=3)
            H = eng.run()
            row["H_clauses"] = len(H)
            row["H_seconds"] = round(time.perf_counter() - t, 4)
            row["H_width"] = max((len(c) for c in H), default=0)
            t = time.perf_counter()
            R = cut_image(m, m, 1, ctx=ctx, max_iters=max_iters)
            row["R_clauses"] = len(R)
            row["R_seconds"] = round(time.perf_counter() - t, 4)
            row["ratio"] = round(len(R) / max(len(H), 1), 4)
            if validate:
                from .cnf import CnfFormula
                row["H_boundary"] = validate_boundary(CnfFormula(H), 1, m, m, ctx=ctx,
                                                      max_inputs=32)
            row["status"] = "ok"
        except Budget as e:
            row["status"] = f"budget: {e}"
        rep.rows.append(row)
    ok = [r for r in rep.rows if r["status"] == "ok"]
    rep.summary = {
        "rows": len(rep.rows), "ok": len(ok),
        "all_H_smaller": all(r["H_clauses"] < r["R_clauses"] for r in ok),
        "geomean_ratio": round(math.exp(statistics.fmean(math.log(r["ratio"]) for r in ok)), 4)
        if ok else None,
    }
    return rep


def _table2(ks=(2, 3, 4), max_iters=200000, out_dir=None) -> ExperimentReport:
    from .eclor import ec_lor_star
    rep = ExperimentReport("table2")
    for k in ks:
        n1, n2, S = gen_hgated_pair(k)
        _dump(out_dir, n1)
        _dump(out_dir, n2)
        t = time.perf_counter()
        v = ec_lor_star(n1, n2, max_iters=max_iters)
        steps = v.chain.steps if v.chain else []
        rep.rows.append({
            "instance": f"hpair{k}", "k": k, "inputs": len(n1.inputs),
            "gates": len(n1.gates) + len(n2.gates), "cuts": len(steps),
            "verdict": v.status.value, "alpha_sat": v.alpha_sat,
            "seconds": round(time.perf_counter() - t, 4),
            "clauses": sum(len(s.H) for s in steps),
            "width_max": max((s.width_max for s in steps), default=0),
            "max_S": S.max_size,
        })
    rep.summary = {
        "all_equivalent": all(r["verdict"] == "Equivalent" for r in rep.rows),
        "width_max": max((r["width_max"] for r in rep.rows), default=0),
        "verdicts_match_alpha": all((r["verdict"] == "Equivalent") == (r["alpha_sat"] is False)
                                    for r in rep.rows if r["verdict"] != "Unknown"),
    }
    return rep


def _table3(k=8, seeds=20, cut=3, conflict_limit=200000, out_dir=None) -> ExperimentReport:
    from .cnf import prepare_pair
    from .eclor import certify_boundary, prove_inequivalence_via_beta, validate_boundary
    from .sat import solve
    rep = ExperimentReport("table3")
    m = gen_mlp(k)
    _dump(out_dir, m)
    for s in range(seeds):
        bug = inject_bug(m, cut, s)
        _dump(out_dir, bug)
        ctx = prepare_pair(m, bug)
        H = ctx.cut_eq(cut)
        row = {"instance": bug.name, "seed": s, "cut": cut, "H_clauses": len(H)}
        if 2 * len(m.inputs) <= 16:
            ok = validate_boundary(H, cut, m, bug, ctx=ctx)
            cert = certify_boundary(H, cut, m, bug, ctx=ctx) if ok else None
            row["H_check"] = "exhaustive" if ok else "failed"
        else:
            cert = certify_boundary(H, cut, m, bug, ctx=ctx)
            row["H_check"] = cert.method if cert else "failed"
        t = time.perf_counter()
        ra = solve(ctx.m.alpha, conflict_limit=conflict_limit)
        row.update(alpha_status=ra.status.value, alpha_decisions=ra.stats["decisions"],
                   alpha_conflicts=ra.stats["conflicts"],
                   alpha_seconds=round(time.perf_counter() - t, 4))
        t = time.perf_counter()
        rb = solve(ctx.m.beta(H), conflict_limit=conflict_limit)
        row.update(beta_status=rb.status.value, beta_decisions=rb.stats["decisions"],
                   beta_conflicts=rb.stats["conflicts"],
                   beta_seconds=round(time.perf_counter() - t, 4))
        if cert is not None and rb.sat:
            w = prove_inequivalence_via_beta(m, bug, H, cut, cert, ctx=ctx)
            row["beta_extends"] = w is not None
        rep.rows.append(row)
    a_ok = [r for r in rep.rows if r["alpha_status"] != "UNKNOWN"]
    b_ok = [r for r in rep.rows if r["beta_status"] != "UNKNOWN"]
    rep.summary = {
        "instances": len(rep.rows),
        "alpha_solved": len(a_ok), "beta_solved": len(b_ok),
        "all_sat": all(r["alpha_status"] == "SAT" and r["beta_status"] == "SAT" for r in rep.rows),
        "all_H_certified": all(r["H_check"] != "failed" for r in rep.rows),
        "median_alpha_decisions": statistics.median(r["alpha_decisions"] for r in rep.rows),
        "median_beta_decisions": statistics.median(r["beta_decisions"] for r in rep.rows),
        "median_alpha_seconds": statistics.median(r["alpha_seconds"] for r in rep.rows),
        "median_beta_seconds": statistics.median(r["beta_seconds"] for r in rep.rows),
    }
    return rep


EXPERIMENTS = {"table1": _table1, "table2": _table2, "table3": _table3}


def run_experiment(name: str, **params) -> ExperimentReport:
    """Run one of ``table1``, ``table2``, ``table3`` with keyword parameters."""
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    return EXPERIMENTS[name](**params)
