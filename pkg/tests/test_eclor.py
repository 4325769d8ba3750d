import json

import pytest
from hypothesis import given, settings, strategies as st

from relaxec.bench import gen_hgated_pair, gen_mlp, inject_bug, random_pair
from relaxec.cnf import CnfFormula, prepare_pair
from relaxec.eclor import (BoundaryNotVerified, Verdict, build_boundary_chain, certify_boundary,
                           ec_lor, ec_lor_star, prove_inequivalence_via_beta, validate_boundary)
from relaxec.netlist import parse_blif

from oracles import brute_equivalent, eval_netlist, is_boundary

AND = parse_blif(".model a\n.inputs x y\n.outputs z\n.names x y z\n11 1\n.end\n")
OR = parse_blif(".model o\n.inputs x y\n.outputs z\n.names x y z\n1- 1\n-1 1\n.end\n")


def test_and_self_check():
    assert ec_lor(AND, AND).status is Verdict.EQUIVALENT


def test_and_or_witness():
    v = ec_lor(AND, OR)
    assert v.status is Verdict.INEQUIVALENT
    a = v.witness["inputs"]
    assert eval_netlist(AND, a)["z"] != eval_netlist(OR, a)["z"]
    assert v.alpha_sat is True


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 9), st.integers(0, 10**6))
def test_exact_chain_is_boundary_and_verdict_sound(ni, ng, seed):
    n1, n2, _ = random_pair(ni, ng, seed)
    ctx = prepare_pair(n1, n2)
    chain = build_boundary_chain(n1, n2, "exact", ctx=ctx)
    for i, H in enumerate(chain.H):
        assert is_boundary(H, ctx, i)
        assert validate_boundary(H, i, n1, n2, ctx=ctx)
    v = ec_lor(n1, n2)
    cex = brute_equivalent(n1, n2)
    if cex is None:
        assert v.status in (Verdict.EQUIVALENT, Verdict.CONSTANT_DEGENERATE)
    else:
        assert v.status is Verdict.INEQUIVALENT
        a = v.witness["inputs"]
        assert eval_netlist(n1, a)[n1.outputs[0]] != eval_netlist(n2, a)[n2.outputs[0]]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 9), st.integers(0, 10**6))
def test_star_never_wrong(ni, ng, seed):
    n1, n2, _ = random_pair(ni, ng, seed)
    v = ec_lor_star(n1, n2)
    if v.status in (Verdict.EQUIVALENT, Verdict.CONSTANT_DEGENERATE):
        assert brute_equivalent(n1, n2) is None
    else:
        assert v.status is Verdict.UNKNOWN or brute_equivalent(n1, n2) is not None


@pytest.mark.parametrize("k", [2, 3])
def test_hgated_width(k):
    n1, n2, S = gen_hgated_pair(k)
    ctx = prepare_pair(n1, n2)
    chain = build_boundary_chain(n1, n2, "exact", ctx=ctx)
    assert all(len(c) <= S.max_size + 1 for H in chain.H[1:] for c in H.clauses)
    assert ec_lor(n1, n2).status is Verdict.EQUIVALENT


def test_validate_rejects_non_boundary():
    m = gen_mlp(2)
    ctx = prepare_pair(m, m)
    empty = CnfFormula(num_vars=ctx.m.num_vars)
    assert not validate_boundary(empty, 1, m, m, ctx=ctx)
    assert validate_boundary(ctx.cut_eq(1), 1, m, m, ctx=ctx)
    assert certify_boundary(empty, 1, m, m, ctx=ctx) is None
    assert certify_boundary(ctx.cut_eq(1), 1, m, m, ctx=ctx)


def test_beta_requires_certificate():
    m = gen_mlp(3)
    bug = inject_bug(m, 2, 0)
    ctx = prepare_pair(m, bug)
    H = ctx.cut_eq(2)
    with pytest.raises(BoundaryNotVerified):
        prove_inequivalence_via_beta(m, bug, H, 2, None, ctx=ctx)
    cert = certify_boundary(H, 2, m, bug, ctx=ctx)
    w = prove_inequivalence_via_beta(m, bug, H, 2, cert, ctx=ctx)
    a = w["inputs"]
    assert eval_netlist(m, a)[m.outputs[0]] != eval_netlist(bug, a)[bug.outputs[0]]


def test_constant_degenerate():
    assert parse_blif(".model c\n.inputs x\n.outputs z\n.names x z\n.end\n").gates[0].op == "CONST0"
    # both sides compute x & !x, so neither can ever output 1
    text = ".model c\n.inputs x\n.outputs z\n.names x nx\n0 1\n.names x nx z\n11 1\n.end\n"
    n = parse_blif(text)
    v = ec_lor(n, n)
    assert v.status in (Verdict.EQUIVALENT, Verdict.CONSTANT_DEGENERATE)
    if v.status is Verdict.CONSTANT_DEGENERATE:
        assert "cannot produce" in v.note
    assert v.alpha_sat is False


def test_json_is_deterministic():
    a = ec_lor(AND, OR).to_json(timings=False)
    b = ec_lor(AND, OR).to_json(timings=False)
    assert a == b
    assert json.loads(a)["schema"] == 1
