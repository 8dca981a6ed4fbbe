import numpy as np

from retnet import build_graph
from retnet.synth import generate_corpus, planted_partition, scale_free_digraph


def test_planted_partition_shape():
    g, truth = planted_partition(101, blocks=3, avg_out=6, mixture=0.2, seed=3)
    assert g.n == 101 and truth.k == 3
    assert sorted(truth.sizes().tolist()) == [33, 34, 34]
    assert g.total_weight == 101 * 6
    assert g.self_loop_count == 0
    assert g == planted_partition(101, blocks=3, avg_out=6, mixture=0.2, seed=3)[0]


def test_scale_free_is_heavy_tailed():
    g = scale_free_digraph(20000, seed=4)
    assert g.n == 20000 and g.self_loop_count == 0
    out = np.sort(g.out_degrees)[::-1]
    # the busiest vertex draws far more than the median one
    assert out[0] > 50 * max(1, np.median(out))


def test_corpus_is_reproducible():
    a, ca = generate_corpus(n_users=300, n_records=2000, seed=6)
    b, cb = generate_corpus(n_users=300, n_records=2000, seed=6)
    assert a == b and ca == cb
    assert len(a) == 2000
    assert all(r.timestamp is not None for r in a)
    ts = [r.timestamp for r in a]
    assert ts == sorted(ts)
    g, cascades = build_graph(a)
    assert g.total_weight == 2000 and cascades
