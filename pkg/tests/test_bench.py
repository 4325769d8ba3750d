import csv
import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from relaxec.bench import (NoGateAboveLevel, gen_hgated_pair, gen_mlp, inject_bug, random_netlist,
                           random_pair, run_experiment)
from relaxec.netlist import depth, topo_levels

from oracles import brute_equivalent, eval_netlist, input_vectors


def product_bit(n, k, bit):
    for a in input_vectors(n.inputs):
        x = sum(a[f"a{j}"] << j for j in range(k))
        y = sum(a[f"b{j}"] << j for j in range(k))
        yield eval_netlist(n, a)[n.outputs[0]], (x * y >> bit) & 1


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_mlp_computes_median_bit(k):
    assert all(got == want for got, want in product_bit(gen_mlp(k), k, k - 1))


@pytest.mark.parametrize("k,bit", [(3, 0), (3, 4), (4, 6)])
def test_mlp_other_bits(k, bit):
    assert all(got == want for got, want in product_bit(gen_mlp(k, bit=bit), k, bit))


@pytest.mark.parametrize("k", [2, 3])
def test_hgated_pair_equivalent(k):
    n1, n2, S = gen_hgated_pair(k)
    assert brute_equivalent(n1, n2) is None
    assert S.max_size == 2


@pytest.mark.parametrize("seed", range(5))
def test_bug_is_observable(seed):
    m = gen_mlp(3)
    bug = inject_bug(m, 2, seed)
    assert brute_equivalent(m, bug) is not None
    changed = [(g, h) for g, h in zip(m.gates, bug.gates) if g != h]
    assert len(changed) == 1 and topo_levels(m)[changed[0][0].output] > 2
    assert inject_bug(m, 2, seed) == bug


def test_bug_needs_gate_above_level():
    with pytest.raises(NoGateAboveLevel):
        inject_bug(gen_mlp(2), 50, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 12), st.integers(0, 10**6))
def test_random_netlist_depth(ni, ng, seed):
    assert depth(random_netlist(ni, ng, seed, max_depth=4)) <= 4
    n1, n2, kind = random_pair(ni, ng, seed)
    assert kind in ("same", "mutant", "other")
    if kind == "same":
        assert brute_equivalent(n1, n2) is None


def test_k_range():
    with pytest.raises(ValueError):
        gen_mlp(1)


def test_report_formats():
    rep = run_experiment("table2", ks=(2,))
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert rows[0]["verdict"] == "Equivalent"
    assert json.loads(rep.to_json())["summary"]["width_max"] <= 3
    with pytest.raises(ValueError):
        run_experiment("table9")
