import random

import pytest
from hypothesis import given, settings, strategies as st

from relaxec.cnf import CnfFormula
from relaxec.pqe import (Budget, BoundExceeded, DSequent, JoinError, PqeProblem,
                         join_dsequents, pqe_oracle, pqe_sat, pqe_solve, verify_pqe_solution)

from oracles import pqe_holds, random_cnf


def instance(seed, nv=None):
    rng = random.Random(seed)
    nv = nv or rng.randint(3, 10)
    A = random_cnf(rng, nv, rng.randint(1, 6), (1, 3))
    B = random_cnf(rng, nv, rng.randint(0, 12), (2, 3))
    W = set(rng.sample(range(1, nv + 1), rng.randint(1, nv - 1)))
    return PqeProblem(CnfFormula(A, num_vars=nv), CnfFormula(B, num_vars=nv), W)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**7))
def test_engines_satisfy_contract(seed):
    p = instance(seed)
    for sol in (pqe_oracle(p), pqe_solve(p), pqe_sat(p), pqe_sat(p, max_width=2)):
        assert pqe_holds(p.A.clauses, p.B.clauses, p.W, sol.Astar.clauses)
        assert verify_pqe_solution(p, sol)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**7))
def test_verify_rejects_dropped_clause(seed):
    p = instance(seed)
    sol = pqe_oracle(p)
    for j in range(len(sol.Astar.clauses)):
        broken = CnfFormula(sol.Astar.clauses[:j] + sol.Astar.clauses[j + 1:], num_vars=p.num_vars)
        ok = pqe_holds(p.A.clauses, p.B.clauses, p.W, broken.clauses)
        assert verify_pqe_solution(p, broken) == ok


def test_solve_ancestry_points_at_A():
    # x1 | w ;  -w | x2  with A = first clause, W = {w}
    p = PqeProblem(CnfFormula([(1, 3)]), CnfFormula([(-3, 2)]), {3})
    s = pqe_solve(p)
    assert [tuple(c) for c in s.Astar.clauses] == [(1, 2)]
    assert s.ancestry == [frozenset({0})]


def test_no_A_clause_with_W_gives_empty_or_A():
    p = PqeProblem(CnfFormula([(1, 2)]), CnfFormula([(3, 1)]), {3})
    assert pqe_holds([(1, 2)], [(3, 1)], {3}, pqe_solve(p).Astar.clauses)


def test_join_dsequents():
    d0 = DSequent.make({1: False, 2: True}, 7)
    d1 = DSequent.make({1: True, 2: True, 3: False}, 7)
    assert join_dsequents(d0, d1, 1) == DSequent.make({2: True, 3: False}, 7)
    with pytest.raises(JoinError):
        join_dsequents(d0, DSequent.make({1: True, 2: False}, 7), 1)
    with pytest.raises(JoinError):
        join_dsequents(d0, DSequent.make({1: True}, 8), 1)
    with pytest.raises(JoinError):
        join_dsequents(d1, d0, 1)


def test_oracle_bound():
    nv = 30
    p = PqeProblem(CnfFormula([tuple(range(1, 26))], num_vars=nv), CnfFormula([(26, 27)]), {26})
    with pytest.raises(BoundExceeded):
        pqe_oracle(p)


def test_budgets():
    p = instance(2)
    with pytest.raises(Budget):
        pqe_sat(p, max_iters=1)
    with pytest.raises(Budget):
        pqe_solve(p, max_steps=1)
