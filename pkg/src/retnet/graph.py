"""Sparse weighted digraphs and their partitions.

A :class:`WeightedDigraph` is immutable.  Vertices are dense integer indices
``0..n-1`` interned from external string ids in first-seen order; arcs are
stored as three parallel ``int64`` arrays sorted by ``(tail, head)`` with no
duplicates.  Graphs are built through :class:`DigraphBuilder`, which
accumulates repeated interactions into a single arc weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, NotFoundError

INT64_MAX = np.iinfo(np.int64).max


@dataclass(frozen=True)
class DegreeSummary:
    d_in: int
    d_out: int
    d: int


class DigraphBuilder:
    """Single-writer accumulator of weighted interactions.

    >>> b = DigraphBuilder()
    >>> b.add_interaction("v", "u")
    >>> b.add_interaction("v", "u", 2)
    >>> b.build().weight("v", "u")
    3
    """

    def __init__(self):
        self._index: dict[str, int] = {}
        self._ids: list[str] = []
        self._arcs: dict[tuple[int, int], int] = {}
        self.total_weight = 0
        self.self_loops = 0

    def __len__(self):
        return len(self._ids)

    def intern(self, vid) -> int:
        vid = str(vid)
        idx = self._index.get(vid)
        if idx is None:
            idx = len(self._ids)
            self._index[vid] = idx
            self._ids.append(vid)
        return idx

    def add_vertex(self, vid) -> int:
        return self.intern(vid)

    def add_interaction(self, tail, head, count: int = 1) -> None:
        """Add ``count`` to the weight of arc ``(tail, head)``.

        Vertices are created on first sight.  ``tail == head`` is stored as a
        self-loop and counted in :attr:`self_loops`.
        """
        if count < 1:
            raise ContractViolation(f"interaction count must be >= 1, got {count}")
        t = self.intern(tail)
        h = self.intern(head)
        if t == h:
            self.self_loops += 1
        key = (t, h)
        w = self._arcs.get(key, 0) + count
        if w > INT64_MAX:
            raise OverflowError(f"weight of arc {tail!r}->{head!r} exceeds int64")
        self._arcs[key] = w
        self.total_weight += count

    def build(self) -> "WeightedDigraph":
        """Freeze the current state into an immutable graph (the builder stays usable)."""
        m = len(self._arcs)
        if m:
            keys = np.fromiter(
                (k for pair in self._arcs for k in pair), dtype=np.int64, count=2 * m
            ).reshape(m, 2)
            weights = np.fromiter(self._arcs.values(), dtype=np.int64, count=m)
        else:
            keys = np.empty((0, 2), dtype=np.int64)
            weights = np.empty(0, dtype=np.int64)
        return WeightedDigraph(list(self._ids), keys[:, 0], keys[:, 1], weights)


class WeightedDigraph:
    """Immutable weighted digraph ``G = (V, A, w)``.

    Parameters
    ----------
    ids : sequence of str
        External id of each vertex; position is the internal index.
    tails, heads, weights : array-like of int
        Arc endpoints and weights.  Duplicated ``(tail, head)`` pairs are
        merged by summing their weights.
    """

    __slots__ = ("ids", "n", "tails", "heads", "weights", "total_weight",
                 "_index", "_d_in", "_d_out")

    def __init__(self, ids: Sequence[str], tails, heads, weights):
        self.ids = tuple(str(i) for i in ids)
        self.n = len(self.ids)
        tails = np.asarray(tails, dtype=np.int64).ravel()
        heads = np.asarray(heads, dtype=np.int64).ravel()
        weights = np.asarray(weights, dtype=np.int64).ravel()
        if not (tails.size == heads.size == weights.size):
            raise ContractViolation("tails, heads and weights differ in length")
        if tails.size:
            if tails.min() < 0 or heads.min() < 0 or max(tails.max(), heads.max()) >= self.n:
                raise ContractViolation("arc endpoint outside the vertex set")
            if weights.min() < 1:
                raise ContractViolation("arc weights must be >= 1")
        tails, heads, weights = _merge_arcs(tails, heads, weights, self.n)
        for a in (tails, heads, weights):
            a.flags.writeable = False
        self.tails, self.heads, self.weights = tails, heads, weights
        self.total_weight = _checked_sum(weights)
        self._index = None
        self._d_in = None
        self._d_out = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_arcs(cls, arcs: Iterable[tuple], vertices: Iterable = ()) -> "WeightedDigraph":
        """Build from ``(tail, head[, weight])`` tuples of external ids."""
        b = DigraphBuilder()
        for v in vertices:
            b.add_vertex(v)
        for arc in arcs:
            if len(arc) == 2:
                b.add_interaction(arc[0], arc[1])
            else:
                b.add_interaction(arc[0], arc[1], int(arc[2]))
        return b.build()

    @classmethod
    def empty(cls) -> "WeightedDigraph":
        return cls([], [], [], [])

    # -- basic queries -------------------------------------------------------

    @property
    def m(self) -> int:
        return int(self.tails.size)

    def __repr__(self):
        return f"WeightedDigraph(n={self.n}, m={self.m}, total_weight={self.total_weight})"

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (
            self.ids == other.ids
            and np.array_equal(self.tails, other.tails)
            and np.array_equal(self.heads, other.heads)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def index(self, vid) -> int:
        """Internal index of an external id (ints are taken as indices)."""
        if isinstance(vid, (int, np.integer)) and not isinstance(vid, bool):
            if 0 <= vid < self.n:
                return int(vid)
            raise NotFoundError(f"vertex index {vid} not in graph")
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.ids)}
        try:
            return self._index[str(vid)]
        except KeyError:
            raise NotFoundError(f"vertex {vid!r} not in graph") from None

    def __contains__(self, vid):
        try:
            self.index(vid)
        except NotFoundError:
            return False
        return True

    def arcs(self):
        """Iterate ``(tail_id, head_id, weight)`` with external ids."""
        ids = self.ids
        for t, h, w in zip(self.tails.tolist(), self.heads.tolist(), self.weights.tolist()):
            yield ids[t], ids[h], w

    def arc_dict(self) -> dict[tuple[str, str], int]:
        return {(t, h): w for t, h, w in self.arcs()}

    def weight(self, tail, head) -> int:
        t, h = self.index(tail), self.index(head)
        lo = np.searchsorted(self.tails, t, side="left")
        hi = np.searchsorted(self.tails, t, side="right")
        j = lo + np.searchsorted(self.heads[lo:hi], h)
        if j < hi and self.heads[j] == h:
            return int(self.weights[j])
        return 0

    @property
    def self_loop_count(self) -> int:
        return int(np.count_nonzero(self.tails == self.heads))

    # -- degrees -----------------------------------------------------------

    @property
    def in_degrees(self) -> np.ndarray:
        if self._d_in is None:
            self._d_in = _weighted_count(self.heads, self.weights, self.n)
        return self._d_in

    @property
    def out_degrees(self) -> np.ndarray:
        if self._d_out is None:
            self._d_out = _weighted_count(self.tails, self.weights, self.n)
        return self._d_out

    @property
    def total_degrees(self) -> np.ndarray:
        return self.in_degrees + self.out_degrees

    def degrees(self, vid) -> DegreeSummary:
        i = self.index(vid)
        d_in = int(self.in_degrees[i])
        d_out = int(self.out_degrees[i])
        return DegreeSummary(d_in, d_out, d_in + d_out)

    # -- derived graphs ------------------------------------------------------

    def induced_subgraph(self, vs: Iterable) -> "WeightedDigraph":
        """Subgraph on ``vs`` keeping every arc with both endpoints inside.

        Vertices keep their relative order from this graph.
        """
        keep = np.zeros(self.n, dtype=bool)
        for v in vs:
            keep[self.index(v)] = True
        new_index = np.cumsum(keep) - 1
        mask = keep[self.tails] & keep[self.heads]
        ids = [v for v, k in zip(self.ids, keep.tolist()) if k]
        return WeightedDigraph(
            ids, new_index[self.tails[mask]], new_index[self.heads[mask]], self.weights[mask]
        )

    def collapse(self, partition: "Partition") -> "WeightedDigraph":
        """Supernode graph: one vertex per community, weights summed.

        Intra-community weight becomes a self-loop on the supernode; the total
        weight is preserved exactly.  Supernode ids are the community ids.
        """
        partition.check(self)
        labels = partition.labels
        return WeightedDigraph(
            [str(c) for c in range(partition.k)],
            labels[self.tails],
            labels[self.heads],
            self.weights,
        )


def _weighted_count(idx, weights, n):
    out = np.zeros(n, dtype=np.int64)
    np.add.at(out, idx, weights)
    return out


def _checked_sum(weights) -> int:
    if weights.size == 0:
        return 0
    if int(weights.max()) <= INT64_MAX // weights.size:
        return int(weights.sum())
    total = sum(int(w) for w in weights.tolist())
    if total > INT64_MAX:
        raise OverflowError("total arc weight exceeds int64")
    return total


def _merge_arcs(tails, heads, weights, n):
    if tails.size == 0:
        return tails.copy(), heads.copy(), weights.copy()
    order = np.lexsort((heads, tails))
    t, h, w = tails[order], heads[order], weights[order]
    first = np.ones(t.size, dtype=bool)
    first[1:] = (t[1:] != t[:-1]) | (h[1:] != h[:-1])
    if first.all():
        return t, h, w
    starts = np.flatnonzero(first)
    seg_max = np.maximum.reduceat(w, starts)
    seg_len = np.diff(np.append(starts, t.size))
    if np.any(seg_max > INT64_MAX // seg_len):
        raise OverflowError("merged arc weight exceeds int64")
    return t[starts], h[starts], np.add.reduceat(w, starts)


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of vertices ``0..n-1`` to communities ``0..k-1``.

    Every id in ``0..k-1`` must be used (no gaps).  Use :meth:`from_labels`
    to renumber arbitrary labels.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel().copy()
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        if labels.size:
            if labels.min() < 0 or labels.max() >= self.k:
                raise ContractViolation("community ids must lie in 0..k-1")
            if np.unique(labels).size != self.k:
                raise ContractViolation("community ids must be dense (no empty community)")
        elif self.k != 0:
            raise ContractViolation("empty partition must have k == 0")

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Renumber labels densely in order of first appearance."""
        labels = np.asarray(labels).ravel()
        if labels.size == 0:
            return cls(np.empty(0, dtype=np.int64), 0)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        return cls(rank[inverse.ravel()], int(first.size))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n, dtype=np.int64), n)

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls(np.zeros(n, dtype=np.int64), 1 if n else 0)

    @classmethod
    def from_mapping(cls, graph: WeightedDigraph, mapping: dict) -> "Partition":
        """Build from ``{external_id: community}``; every vertex must be covered."""
        labels = np.full(graph.n, -1, dtype=np.int64)
        for vid, c in mapping.items():
            labels[graph.index(vid)] = int(c)
        if graph.n and labels.min() < 0:
            missing = graph.ids[int(np.argmin(labels))]
            raise ContractViolation(f"vertex {missing!r} has no community")
        return cls.from_labels(labels)

    @property
    def n(self) -> int:
        return int(self.labels.size)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    __hash__ = None

    def __repr__(self):
        return f"Partition(n={self.n}, k={self.k})"

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def communities(self) -> list[np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(self.sizes())[:-1]
        return np.split(order, bounds)

    def canonical(self) -> "Partition":
        return Partition.from_labels(self.labels)

    def check(self, graph: WeightedDigraph) -> None:
        if self.n != graph.n:
            raise ContractViolation(
                f"partition covers {self.n} vertices but the graph has {graph.n}"
            )


def collapse(graph: WeightedDigraph, partition: Partition) -> WeightedDigraph:
    return graph.collapse(partition)


def induced_subgraph(graph: WeightedDigraph, vs) -> WeightedDigraph:
    return graph.induced_subgraph(vs)


def degrees(graph: WeightedDigraph, vid) -> DegreeSummary:
    return graph.degrees(vid)
