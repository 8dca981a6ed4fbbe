"""How good a partition is, and how close two partitions are."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ContractViolation, UndefinedMeasureError
from .graph import Partition, WeightedDigraph


@dataclass(frozen=True)
class PartitionScore:
    algorithm: str
    modularity: float
    mixture: float
    k: int
    elapsed_seconds: float | None = None

    def to_json(self) -> str:
        d = asdict(self)
        for key in ("modularity", "mixture", "elapsed_seconds"):
            if d[key] is not None:
                d[key] = float(f"{d[key]:.12g}")
        return json.dumps(d, indent=2, sort_keys=False) + "\n"


def arc_scores(graph: WeightedDigraph) -> np.ndarray:
    """Per-arc modularity contribution ``w(i,j) - d(i) d(j) / (4 * total_weight)``.

    ``d`` is the total (in + out) weighted degree.  Modularity is the sum of
    these terms over intra-community arcs divided by ``2 * total_weight``.
    """
    omega = graph.total_weight
    if omega == 0:
        raise UndefinedMeasureError("modularity is undefined for a graph with no arc weight")
    d = graph.total_degrees.astype(np.float64)
    return graph.weights - d[graph.tails] * d[graph.heads] / (4.0 * omega)


def modularity(graph: WeightedDigraph, partition: Partition) -> float:
    """Modularity of ``partition`` summed over the arcs inside each community.

    Self-loops are intra-community by definition and contribute.  For a graph
    without self-loops the singleton partition scores exactly 0.
    """
    partition.check(graph)
    scores = arc_scores(graph)
    labels = partition.labels
    inside = labels[graph.tails] == labels[graph.heads]
    if not inside.any():
        return 0.0
    return float(np.sum(scores[inside]) / (2.0 * graph.total_weight))


def newman_modularity(graph: WeightedDigraph, partition: Partition) -> float:
    """Classic modularity of the symmetrized graph.

    ``sum_c W_c / total_weight - (D_c / (2 * total_weight)) ** 2`` with ``W_c``
    the weight of arcs inside community ``c`` and ``D_c`` its summed total
    degree.  This is the objective the default Louvain run maximizes; values
    are comparable with other tools, unlike :func:`modularity`.
    """
    partition.check(graph)
    omega = graph.total_weight
    if omega == 0:
        raise UndefinedMeasureError("modularity is undefined for a graph with no arc weight")
    labels = partition.labels
    inside = labels[graph.tails] == labels[graph.heads]
    w_in = np.bincount(labels[graph.tails[inside]], weights=graph.weights[inside],
                       minlength=partition.k)
    d_c = np.bincount(labels, weights=graph.total_degrees, minlength=partition.k)
    return float(np.sum(w_in / omega - (d_c / (2.0 * omega)) ** 2))


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def mutual_information(p1: Partition, p2: Partition) -> float:
    if p1.n != p2.n:
        raise ContractViolation("partitions cover different vertex sets")
    n = p1.n
    if n == 0:
        raise UndefinedMeasureError("mutual information of empty partitions")
    # contingency table restricted to its nonzero cells
    cells, counts = np.unique(p1.labels * np.int64(p2.k) + p2.labels, return_counts=True)
    a = p1.sizes()[cells // p2.k].astype(np.float64)
    b = p2.sizes()[cells % p2.k].astype(np.float64)
    counts = counts.astype(np.float64)
    return float(np.sum(counts / n * np.log(counts * n / (a * b))))


def nmi(p1: Partition, p2: Partition) -> float:
    """Normalized mutual information ``2 I / (H1 + H2)``, natural log.

    Two monolithic partitions score 1; if exactly one is monolithic the score
    is 0.
    """
    if p1.n != p2.n:
        raise ContractViolation("partitions cover different vertex sets")
    n = p1.n
    h1 = _entropy(p1.sizes(), n)
    h2 = _entropy(p2.sizes(), n)
    if h1 == 0.0 and h2 == 0.0:
        return 1.0
    if h1 == 0.0 or h2 == 0.0:
        return 0.0
    value = 2.0 * mutual_information(p1, p2) / (h1 + h2)
    # clip rounding spill outside [0, 1]
    return min(1.0, max(0.0, value))


def mixture_coefficient(graph: WeightedDigraph, partition: Partition, weighted: bool = False) -> float:
    """Fraction of arcs whose endpoints lie in different communities.

    With ``weighted=True`` arc weights are used instead of arc counts.
    """
    partition.check(graph)
    if graph.m == 0:
        raise UndefinedMeasureError("mixture coefficient is undefined without arcs")
    labels = partition.labels
    crossing = labels[graph.tails] != labels[graph.heads]
    if weighted:
        return float(graph.weights[crossing].sum() / graph.total_weight)
    return float(np.count_nonzero(crossing) / graph.m)


def score_partition(graph, partition, algorithm="", elapsed_seconds=None) -> PartitionScore:
    return PartitionScore(
        algorithm=algorithm,
        modularity=modularity(graph, partition),
        mixture=mixture_coefficient(graph, partition) if graph.m else 0.0,
        k=partition.k,
        elapsed_seconds=elapsed_seconds,
    )
