import json
import math

import networkx as nx
import numpy as np
import pytest
from conftest import as_dicts, digraphs, graph_and_labels
from hypothesis import given
from hypothesis import strategies as st
from oracles import naive_modularity, naive_nmi

from retnet import (ContractViolation, Partition, UndefinedMeasureError, WeightedDigraph,
                    mixture_coefficient, modularity, newman_modularity, nmi)
from retnet.metrics import PartitionScore, score_partition


# -- modularity ----------------------------------------------------------------

def test_single_arc():
    g = WeightedDigraph.from_arcs([("a", "b", 1)])
    # 1/2 * (1 - 1*1/4)
    assert modularity(g, Partition.whole(2)) == 0.375
    assert modularity(g, Partition.singletons(2)) == 0.0


def test_two_disjoint_arcs():
    g = WeightedDigraph.from_arcs([("a", "b", 1), ("c", "d", 1)])
    p = Partition.from_labels([0, 0, 1, 1])
    assert modularity(g, p) == pytest.approx(0.4375, abs=1e-15)
    # merging both pairs adds nothing: no arc joins them
    assert modularity(g, Partition.whole(4)) == pytest.approx(0.4375, abs=1e-15)


def test_self_loop_counts_inside():
    g = WeightedDigraph.from_arcs([("a", "a", 2), ("a", "b", 2)])
    # d(a) = 6, d(b) = 2, W = 4; loop: 2 - 36/16
    assert modularity(g, Partition.singletons(2)) == pytest.approx((2 - 36 / 16) / 8, abs=1e-15)


def test_zero_weight_is_undefined():
    g = WeightedDigraph(["a", "b"], [], [], [])
    with pytest.raises(UndefinedMeasureError):
        modularity(g, Partition.whole(2))
    with pytest.raises(UndefinedMeasureError):
        newman_modularity(g, Partition.whole(2))


def test_size_mismatch():
    g = WeightedDigraph.from_arcs([("a", "b", 1)])
    with pytest.raises(ContractViolation):
        modularity(g, Partition.whole(3))


@given(graph_and_labels(max_n=16, loops=True))
def test_matches_naive_oracle(case):
    g, labels = case
    arcs, _ = as_dicts(g)
    expected = naive_modularity(arcs, dict(enumerate(labels)))
    assert modularity(g, Partition.from_labels(labels)) == pytest.approx(expected, abs=1e-12)


@given(graph_and_labels(max_n=64))
def test_matches_naive_oracle_larger(case):
    g, labels = case
    arcs, _ = as_dicts(g)
    expected = naive_modularity(arcs, dict(enumerate(labels)))
    assert modularity(g, Partition.from_labels(labels)) == pytest.approx(expected, abs=1e-12)


@given(digraphs(min_m=1))
def test_singletons_score_exactly_zero(g):
    assert modularity(g, Partition.singletons(g.n)) == 0.0


@given(graph_and_labels())
def test_bounded_by_one_half(case):
    g, labels = case
    q = modularity(g, Partition.from_labels(labels))
    assert -0.5 <= q < 0.5


@given(graph_and_labels(), st.randoms(use_true_random=False))
def test_invariant_under_relabeling_and_vertex_order(case, rnd):
    g, labels = case
    q = modularity(g, Partition.from_labels(labels))
    perm = list(range(max(labels) + 1))
    rnd.shuffle(perm)
    assert modularity(g, Partition.from_labels([perm[x] for x in labels])) == pytest.approx(q, abs=1e-12)
    order = list(range(g.n))
    rnd.shuffle(order)
    pos = {v: i for i, v in enumerate(order)}
    h = WeightedDigraph([g.ids[v] for v in order], [pos[t] for t in g.tails.tolist()],
                        [pos[x] for x in g.heads.tolist()], g.weights)
    q2 = modularity(h, Partition.from_labels([labels[v] for v in order]))
    assert q2 == pytest.approx(q, abs=1e-12)


@given(graph_and_labels(loops=True))
def test_newman_matches_networkx(case):
    g, labels = case
    und = nx.Graph()
    und.add_nodes_from(range(g.n))
    for (t, h), w in as_dicts(g)[0].items():
        prev = und.get_edge_data(t, h, {"weight": 0})["weight"]
        und.add_edge(t, h, weight=prev + w)
    comms = [set(np.flatnonzero(np.array(labels) == c).tolist()) for c in set(labels)]
    expected = nx.community.modularity(und, comms, weight="weight")
    assert newman_modularity(g, Partition.from_labels(labels)) == pytest.approx(expected, abs=1e-12)


# -- NMI -----------------------------------------------------------------------

labelings = st.integers(1, 40).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n),
                        st.lists(st.integers(0, 5), min_size=n, max_size=n)))


@given(labelings)
def test_nmi_matches_oracle(pair):
    a, b = pair
    got = nmi(Partition.from_labels(a), Partition.from_labels(b))
    assert got == pytest.approx(naive_nmi(a, b), abs=1e-12)
    assert 0.0 <= got <= 1.0


@given(labelings)
def test_nmi_symmetric(pair):
    a, b = (Partition.from_labels(x) for x in pair)
    assert nmi(a, b) == pytest.approx(nmi(b, a), abs=1e-15)


@given(st.lists(st.integers(0, 4), min_size=2, max_size=30))
def test_nmi_self_is_one(labels):
    p = Partition.from_labels(labels)
    assert nmi(p, p) == pytest.approx(1.0, abs=1e-12)


def test_nmi_hand_values():
    a = Partition.from_labels([0, 0, 1, 1])
    b = Partition.from_labels([0, 1, 0, 1])
    assert nmi(a, b) == 0.0
    c = Partition.from_labels([0, 0, 0, 1])
    # I = 1.5 ln 2 - 0.75 ln 3, H_a = ln 2, H_c = 2 ln 2 - 0.75 ln 3
    mi = 1.5 * math.log(2) - 0.75 * math.log(3)
    expected = 2 * mi / (math.log(2) + 2 * math.log(2) - 0.75 * math.log(3))
    assert nmi(a, c) == pytest.approx(expected, abs=1e-12)


def test_nmi_degenerate_conventions():
    whole = Partition.whole(5)
    assert nmi(whole, Partition.whole(5)) == 1.0
    assert nmi(whole, Partition.singletons(5)) == 0.0
    with pytest.raises(ContractViolation):
        nmi(whole, Partition.whole(4))


# -- mixture coefficient -------------------------------------------------------

def test_mixture_hand_case():
    g = WeightedDigraph.from_arcs([("a", "b", 5), ("b", "c", 1)])
    p = Partition.from_labels([0, 0, 1])
    assert mixture_coefficient(g, p) == 0.5
    assert mixture_coefficient(g, p, weighted=True) == pytest.approx(1 / 6)
    assert mixture_coefficient(g, Partition.whole(3)) == 0.0
    assert mixture_coefficient(g, Partition.singletons(3)) == 1.0


def test_mixture_needs_arcs():
    with pytest.raises(UndefinedMeasureError):
        mixture_coefficient(WeightedDigraph(["a"], [], [], []), Partition.whole(1))


def test_planted_mixture_tracks_generator():
    from retnet.synth import planted_partition
    values = []
    for mu in (0.3, 0.2, 0.1, 0.05, 0.0):
        g, truth = planted_partition(400, avg_out=10, mixture=mu, seed=1)
        values.append(mixture_coefficient(g, truth))
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] == 0.0


def test_score_json_layout():
    g = WeightedDigraph.from_arcs([("a", "b", 1)])
    s = score_partition(g, Partition.whole(2), "louvain", None)
    assert json.loads(s.to_json()) == {"algorithm": "louvain", "modularity": 0.375,
                                       "mixture": 0.0, "k": 1, "elapsed_seconds": None}
    t = PartitionScore("lp", 1 / 3, 0.1, 2, 0.5)
    assert json.loads(t.to_json())["modularity"] == 0.333333333333
