import random

import pytest
from hypothesis import given, settings, strategies as st

from relaxec.bench import gen_mlp, inject_bug
from relaxec.cnf import CnfFormula
from relaxec.relax import (CutSplit, NotUnsat, RelaxSplit, broken_interpolant, compare_relaxations,
                           extend_counterexample, extract_interpolant, relax_general)

from oracles import brute_sat, cnf_true, cnf_vars, pqe_holds, random_cnf


def split(seed):
    rng = random.Random(seed)
    nv = rng.randint(3, 9)
    A = random_cnf(rng, nv, rng.randint(2, 10))
    B = random_cnf(rng, nv, rng.randint(2, 10))
    return nv, A, B


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**7))
def test_interpolant_or_counterexample(seed):
    nv, A, B = split(seed)
    fa, fb = CnfFormula(A, num_vars=nv), CnfFormula(B, num_vars=nv)
    H, w = broken_interpolant(fa, fb)
    shared = set(cnf_vars(A)) & set(cnf_vars(B))
    assert set(cnf_vars(H.clauses)) <= shared
    # A implies every clause of H
    assert all(not brute_sat(A + [(-l,) for l in c]) for c in H.clauses)
    joint = brute_sat(A + B)
    if joint:
        assert w is not None
        pt = {**{v: bool(b) for v, b in w["y"].items()}, **{v: bool(b) for v, b in w["x"].items()},
              **{v: bool(b) for v, b in w["z"].items()}}
        assert cnf_true(A, pt)
        assert cnf_true(H.clauses, pt) and cnf_true(B, pt)
    else:
        assert w is None
        I = extract_interpolant(fa, fb)
        assert not brute_sat(I.clauses + B)


def test_extract_interpolant_trivial():
    assert extract_interpolant(CnfFormula([(1,)]), CnfFormula([(-1,)])).clauses == [(1,)]
    with pytest.raises(NotUnsat):
        extract_interpolant(CnfFormula([(1,)]), CnfFormula([(1, 2)]))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**7))
def test_relax_general_contract(seed):
    rng = random.Random(seed)
    nv = rng.randint(3, 8)
    S = random_cnf(rng, nv, rng.randint(2, 10))
    E = rng.sample(S, rng.randint(1, len(S)))
    X = set(rng.sample(range(1, nv + 1), rng.randint(1, nv - 1)))
    Z = set(range(1, nv + 1)) - X
    rs = RelaxSplit(CnfFormula(S, num_vars=nv), CnfFormula(E, num_vars=nv), X, Z)
    H = relax_general(rs)
    assert pqe_holds(E, rs.S_rlx.clauses, X, H.clauses)


def test_extend_counterexample():
    A = CnfFormula([(1, -3), (3, 2)])
    B = CnfFormula([(-2, 4)])
    assert extend_counterexample(A, B, {2: 0}, {4: 1}) == {1: 1, 3: 1}
    assert extend_counterexample(CnfFormula([(2,)]), B, {2: 0}, {}) is None


def test_split_validation():
    with pytest.raises(ValueError):
        RelaxSplit(CnfFormula([(1, 2)]), CnfFormula([(1, 3)]), {1}, {2, 3})
    with pytest.raises(ValueError):
        RelaxSplit(CnfFormula([(1, 2)]), CnfFormula([(1, 2)]), {1}, {1, 2})


def test_replacing_vs_separating():
    m = gen_mlp(3)
    same = compare_relaxations(CutSplit.from_pair(m, m, 2))
    assert same.H_r_verified and same.H_s_verified
    assert same.H_r_is_interpolant and same.cut_eq_boundary_from_below
    bug = compare_relaxations(CutSplit.from_pair(m, inject_bug(m, 2, 0), 2))
    assert bug.H_r_verified and not bug.H_r_is_interpolant
    assert bug.cut_eq_boundary_from_below and bug.cut_eq_interpolant_with_F_L is False
    assert bug.counterexample is not None
