"""Brute-force reference implementations used by the tests.

Nothing here calls the package's own evaluators or solvers: gates are
evaluated from a local table, formulas by plain enumeration.
"""

import itertools
import random

GATE_FN = {
    "AND": lambda a, b: a & b,
    "OR": lambda a, b: a | b,
    "XOR": lambda a, b: a ^ b,
    "NAND": lambda a, b: 1 - (a & b),
    "NOR": lambda a, b: 1 - (a | b),
    "XNOR": lambda a, b: 1 - (a ^ b),
    "NOT": lambda a: 1 - a,
    "BUF": lambda a: a,
    "CONST0": lambda: 0,
    "CONST1": lambda: 1,
}


def eval_netlist(n, assignment):
    """Values of every net for one input assignment {name: 0/1}."""
    val = dict(assignment)
    pending = list(n.gates)
    while pending:
        rest = []
        for g in pending:
            if all(i in val for i in g.inputs):
                val[g.output] = GATE_FN[g.op](*(val[i] for i in g.inputs))
            else:
                rest.append(g)
        if len(rest) == len(pending):
            raise ValueError("cycle or undefined net")
        pending = rest
    return val


def input_vectors(names):
    for bits in itertools.product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


def brute_equivalent(n1, n2):
    """None if equivalent, else a distinguishing input assignment."""
    for a in input_vectors(n1.inputs):
        v1, v2 = eval_netlist(n1, a), eval_netlist(n2, a)
        if [v1[o] for o in n1.outputs] != [v2[o] for o in n2.outputs]:
            return a
    return None


def clause_true(c, point):
    return any(point[abs(l)] == (l > 0) for l in c)


def cnf_true(clauses, point):
    return all(clause_true(c, point) for c in clauses)


def cnf_vars(clauses):
    return sorted({abs(l) for c in clauses for l in c})


def brute_sat(clauses):
    vs = cnf_vars(clauses)
    for bits in itertools.product((False, True), repeat=len(vs)):
        if cnf_true(clauses, dict(zip(vs, bits))):
            return True
    return False


def brute_project(clauses, V, W):
    """Set of V-points p (tuples) with some W-extension satisfying clauses."""
    V, W = list(V), list(W)
    out = set()
    for vb in itertools.product((False, True), repeat=len(V)):
        pt = dict(zip(V, vb))
        for wb in itertools.product((False, True), repeat=len(W)):
            pt.update(zip(W, wb))
            if cnf_true(clauses, pt):
                out.add(vb)
                break
    return out


def pqe_holds(A, B, W, Astar, V=None):
    """exists W [A & B] == A* & exists W [B], by enumeration.

    V defaults to the free variables of A & B.
    """
    W = sorted(set(W))
    V = sorted(set(cnf_vars(A) + cnf_vars(B)) - set(W)) if V is None else sorted(V)
    if set(cnf_vars(Astar)) - set(V):
        return False
    lhs = brute_project(list(A) + list(B), V, W)
    rhs_b = brute_project(list(B), V, W)
    for vb in itertools.product((False, True), repeat=len(V)):
        pt = dict(zip(V, vb))
        if (vb in lhs) != (vb in rhs_b and cnf_true(Astar, pt)):
            return False
    return True


def random_cnf(rng: random.Random, nvars, nclauses, width=(1, 3)):
    out = []
    for _ in range(nclauses):
        w = rng.randint(*width)
        vs = rng.sample(range(1, nvars + 1), min(w, nvars))
        out.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return out


def cut_images(ctx, i):
    """(producible with equal inputs, producible with relaxed inputs) as sets
    of points over ctx.cut_vars(i), found by simulating each side alone."""
    nets1, nets2 = ctx.plan.cuts[i]
    side1 = {}
    for a in input_vectors(ctx.n1.inputs):
        v = eval_netlist(ctx.n1, a)
        side1[tuple(a.values())] = tuple(v[x] for x in nets1)
    side2 = {}
    for a in input_vectors(ctx.n2.inputs):
        v = eval_netlist(ctx.n2, a)
        side2[tuple(a.values())] = tuple(v[x] for x in nets2)
    eq = {side1[x] + side2[x] for x in side1}
    rlx = {p + q for p in set(side1.values()) for q in set(side2.values())}
    return eq, rlx


def is_boundary(H, ctx, i):
    """Both boundary conditions: true on every equal-input cut point, false on
    every point that needs relaxed inputs."""
    cut = ctx.cut_vars(i)
    clauses = H.clauses if hasattr(H, "clauses") else H
    if set(cnf_vars(clauses)) - set(cut):
        return False
    eq, rlx = cut_images(ctx, i)
    for p in rlx:
        val = cnf_true(clauses, {v: bool(b) for v, b in zip(cut, p)})
        if val != (p in eq):
            return False
    return True


def truth_grid(clauses, variables):
    """Boolean vector over all 2^n assignments to ``variables`` (first var =
    most significant bit), true where every clause holds."""
    import numpy as np
    n = len(variables)
    idx = np.arange(1 << n)
    col = {v: ((idx >> (n - 1 - j)) & 1).astype(bool) for j, v in enumerate(variables)}
    out = np.ones(1 << n, dtype=bool)
    for c in clauses:
        sat = np.zeros(1 << n, dtype=bool)
        for l in c:
            sat |= col[abs(l)] if l > 0 else ~col[abs(l)]
        out &= sat
    return out


def agree_on_producible(B, W, H1, H2, V):
    """H1 and H2 take the same value on every V-point that some W-extension
    of B satisfies."""
    V, W = sorted(V), sorted(W)
    b = truth_grid(B, V + W).reshape(1 << len(V), 1 << len(W)).any(axis=1)
    return bool(((truth_grid(H1, V) == truth_grid(H2, V)) | ~b).all())
