import pytest
from hypothesis import given, settings, strategies as st

from relaxec.bench import gen_mlp, random_netlist
from relaxec.netlist import (BlifSyntaxError, CombinationalCycle, Gate, MultiplyDriven, Netlist,
                             UndefinedNet, bufferize, bufferize_pair, emit_blif, level_cuts,
                             parse_blif, topo_levels, truth_table)

from oracles import eval_netlist, input_vectors

SMALL = """\
.model small
.inputs x1 x2 x3
.outputs z
.names x1 x2 g1
11 1
.names g1 x3 z
1- 1
-1 1
.end
"""


def outputs_of(n):
    return [tuple(eval_netlist(n, a)[o] for o in n.outputs) for a in input_vectors(n.inputs)]


def test_parse_small():
    n = parse_blif(SMALL)
    assert n.inputs == ("x1", "x2", "x3")
    assert [g.op for g in n.gates] == ["AND", "OR"]
    assert outputs_of(n) == [(0,), (1,), (0,), (1,), (0,), (1,), (1,), (1,)]


def test_truth_table_matches_reference():
    n = parse_blif(SMALL)
    assert [tuple(r) for r in truth_table(n).tolist()] == outputs_of(n)


@pytest.mark.parametrize("text, exc", [
    (".model m\n.inputs a\n.outputs z\n.names a z\n1 1\n.names a z\n0 1\n.end\n", MultiplyDriven),
    (".model m\n.inputs a\n.outputs z\n.names a q z\n11 1\n.end\n", UndefinedNet),
    (".model m\n.inputs a\n.outputs z\n.names a y z\n11 1\n.names z y\n1 1\n.end\n",
     CombinationalCycle),
    (".model m\n.inputs a\n.outputs z\n.latch a z\n.end\n", BlifSyntaxError),
])
def test_malformed_blif(text, exc):
    with pytest.raises(exc):
        parse_blif(text)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 14), st.integers(0, 10**6))
def test_blif_round_trip(ni, ng, seed):
    n = random_netlist(ni, ng, seed)
    back = parse_blif(emit_blif(n))
    assert back.inputs == n.inputs and back.outputs == n.outputs
    assert outputs_of(back) == outputs_of(n)
    assert emit_blif(back) == emit_blif(n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 14), st.integers(0, 10**6))
def test_bufferize_keeps_function_and_levels(ni, ng, seed):
    n = random_netlist(ni, ng, seed)
    b = bufferize(n)
    assert outputs_of(b) == outputs_of(n)
    lv = topo_levels(b)
    top = max(lv[o] for o in b.outputs)
    for g in b.gates:
        assert all(lv[i] == lv[g.output] - 1 for i in g.inputs)
    assert all(lv[o] == top for o in b.outputs)


def test_bufferize_names_chains():
    n = Netlist(["x1", "x2", "x3"], ["z"], [
        Gate("g1", "AND", ("x1", "x2")), Gate("g2", "OR", ("g1", "x2")),
        Gate("z", "XOR", ("g2", "x3"))])
    b = bufferize(n)
    added = sorted(g.output for g in b.gates if g.output not in n.nets)
    assert added == ["x2$buf1", "x3$buf1", "x3$buf2"]


def test_pair_cuts_are_disjoint_and_complete():
    n1, n2 = gen_mlp(3), bufferize(gen_mlp(3))
    b1, b2 = bufferize_pair(n1, n2)
    plan = level_cuts(b1, b2)
    lv1 = topo_levels(b1)
    for i, (c1, c2) in enumerate(plan.cuts):
        assert all(lv1[x] == i for x in c1)
        assert len(c1) == len(set(c1))
    assert set(plan.cuts[0][0]) == set(b1.inputs)
    assert set(plan.cuts[-1][0]) == set(b1.outputs)


def test_frozen_netlist():
    n = parse_blif(SMALL)
    with pytest.raises(Exception):
        n.name = "other"
