import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from relaxec.bench import random_pair
from relaxec.cnf import (CnfFormula, DimacsError, build_miter, emit_dimacs, emit_pqe, make_clause,
                         parse_dimacs, parse_pqe, tseitin_encode)

from oracles import brute_sat, cnf_true, eval_netlist, input_vectors

FIX = Path(__file__).parent / "fixtures"


def test_make_clause():
    assert make_clause([2, -1, 2]) == (-1, 2)
    assert make_clause([1, -1]) is None


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.integers(1, 10), st.integers(0, 10**6))
def test_tseitin_consistent_with_gates(ni, ng, seed):
    n, _, _ = random_pair(ni, ng, seed)
    f = tseitin_encode(n)
    for a in input_vectors(n.inputs):
        val = eval_netlist(n, a)
        pt = {f.names[k]: bool(v) for k, v in val.items()}
        assert cnf_true(f.clauses, pt)
        # flipping the output breaks some clause
        z = f.names[n.outputs[0]]
        pt[z] = not pt[z]
        assert not cnf_true(f.clauses, pt)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 7), st.integers(0, 10**6))
def test_miter_sat_iff_different(ni, ng, seed):
    n1, n2, _ = random_pair(ni, ng, seed)
    m, _ = build_miter(n1, n2)
    differ = any(eval_netlist(n1, a)[n1.outputs[0]] != eval_netlist(n2, a)[n2.outputs[0]]
                 for a in input_vectors(n1.inputs))
    assert brute_sat(m.alpha.clauses) == differ


@pytest.mark.parametrize("name", ["tiny", "empty", "named"])
def test_dimacs_fixtures_byte_exact(name):
    text = (FIX / f"{name}.cnf").read_text()
    f = parse_dimacs(text)
    assert emit_dimacs(f) == text


def test_dimacs_exact_bytes():
    assert emit_dimacs(CnfFormula([(1, -2)], num_vars=2)) == "p cnf 2 1\n1 -2 0\n"
    assert emit_dimacs(CnfFormula()) == "p cnf 0 0\n"


@pytest.mark.parametrize("text", ["1 2 0\n", "p cnf 2 1\n1 3 0\n", "p cnf 2 2\n1 0\n",
                                  "p cnf x 1\n1 0\n"])
def test_dimacs_rejects(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_pqe_format_round_trip(seed):
    rng = random.Random(seed)
    A = CnfFormula([(1, -2), (3,)], num_vars=5)
    B = CnfFormula([(rng.choice([4, -4]), 5)], num_vars=5)
    W = {2, 4}
    A2, B2, W2 = parse_pqe(emit_pqe(A, B, W))
    assert A2.clauses == A.clauses and B2.clauses == B.clauses and W2 == W
