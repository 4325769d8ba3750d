import random

from hypothesis import given, settings, strategies as st

from relaxec.cnf import CnfFormula
from relaxec.sat import Solver, Status, implies, solve

from oracles import brute_sat, cnf_true, random_cnf


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 9), st.integers(0, 40), st.integers(0, 10**6))
def test_agrees_with_enumeration(nv, nc, seed):
    cls = random_cnf(random.Random(seed), nv, nc)
    r = solve(CnfFormula(cls, num_vars=nv))
    assert r.sat == brute_sat(cls)
    if r.sat:
        assert cnf_true(cls, {v: r.model[v] for v in range(1, nv + 1)})


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 8), st.integers(1, 30), st.integers(0, 10**6))
def test_assumption_core(nv, nc, seed):
    rng = random.Random(seed)
    cls = random_cnf(rng, nv, nc)
    assum = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, nv + 1), nv // 2 + 1)]
    r = solve(CnfFormula(cls, num_vars=nv), assum)
    assert r.sat == brute_sat(cls + [(a,) for a in assum])
    if r.unsat and brute_sat(cls):
        assert set(r.core) <= set(assum)
        assert not brute_sat(cls + [(a,) for a in r.core])


def pigeonhole(n):
    var = lambda p, h: p * n + h + 1
    cls = [tuple(var(p, h) for h in range(n)) for p in range(n + 1)]
    for h in range(n):
        for p in range(n + 1):
            for q in range(p + 1, n + 1):
                cls.append((-var(p, h), -var(q, h)))
    return CnfFormula(cls)


def test_pigeonhole_unsat_and_budget():
    assert solve(pigeonhole(4)).status is Status.UNSAT
    assert solve(pigeonhole(8), conflict_limit=50).status is Status.UNKNOWN


def test_incremental_solver_keeps_learnts():
    s = Solver(3)
    s.add_clauses([(1, 2), (-1, 3)])
    assert s.solve([-3]).sat
    assert s.solve([-2, -3]).unsat
    s.add_clause((-2,))
    assert s.solve().sat
    assert s.solve().stats["decisions"] >= 0


def test_empty_clause_and_implies():
    assert solve(CnfFormula([()])).unsat
    assert implies(CnfFormula([(1,), (-1, 2)]), (2,))
    assert not implies(CnfFormula([(1, 2)]), (2,))
