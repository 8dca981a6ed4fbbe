"""Statistics over cumulative snapshots of the interaction stream."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .community import DetectorConfig, detect
from .errors import ContractViolation, RetnetError
from .graph import WeightedDigraph
from .influence import AC, PC, StrataAssignment, assign_user_strata
from .ingest import InteractionRecord, snapshot_bounds, stream_snapshots

DEFAULT_STRIDE = 5000


class SnapshotError(RetnetError):
    def __init__(self, index, cause):
        self.index = index
        super().__init__(f"snapshot {index}: {cause}")


@dataclass(frozen=True)
class TierAverage:
    average: float
    size: int

    @property
    def empty(self) -> bool:
        return self.size == 0


@dataclass
class SnapshotStats:
    index: int
    records: int
    n: int
    m: int
    total_weight: int
    community_count: int
    avg_community_size: float
    new_tweets: int
    total_distinct_tweets: int
    duration_seconds: float | None
    avg_out_degree_by_pc: dict[str, TierAverage] = field(default_factory=dict)
    avg_in_degree_by_ac: dict[str, TierAverage] = field(default_factory=dict)


def tier_averages(degrees: np.ndarray, tiers: np.ndarray, names) -> dict[str, TierAverage]:
    sums = np.bincount(tiers, weights=degrees, minlength=4)
    counts = np.bincount(tiers, minlength=4)
    return {
        name: TierAverage(float(sums[i] / counts[i]) if counts[i] else 0.0, int(counts[i]))
        for i, name in enumerate(names)
    }


def category_degree_series(graphs: Sequence[WeightedDigraph], freeze: bool = False):
    """Average out-degree per PC tier and in-degree per AC tier for each snapshot.

    Strata are recomputed per snapshot unless ``freeze`` is set, in which case
    the final snapshot's membership is applied to every earlier snapshot
    (vertex indices are stable across cumulative snapshots).
    """
    if not graphs:
        raise ContractViolation("need at least one snapshot")
    frozen = assign_user_strata(graphs[-1]) if freeze else None
    series = []
    for g in graphs:
        strata = _strata_for(g, frozen)
        series.append((tier_averages(g.out_degrees, strata.user_pc, PC),
                       tier_averages(g.in_degrees, strata.user_ac, AC)))
    return series


def _strata_for(graph, frozen: StrataAssignment | None) -> StrataAssignment:
    if frozen is None:
        return assign_user_strata(graph)
    return StrataAssignment(user_pc=frozen.user_pc[:graph.n], user_ac=frozen.user_ac[:graph.n])


def _slice_duration(records: Sequence[InteractionRecord]) -> float | None:
    ts = [r.timestamp for r in records]
    if not ts or any(t is None for t in ts):
        return None
    return float(max(ts) - min(ts))


def snapshot_stats(records: Sequence[InteractionRecord], stride: int = DEFAULT_STRIDE,
                   algorithm: str = "louvain", cfg: DetectorConfig = DetectorConfig(),
                   threads: int = 1, freeze_strata: bool = False) -> list[SnapshotStats]:
    """Detect communities and collect counts on every cumulative snapshot.

    Snapshots are analysed independently (in parallel when ``threads > 1``);
    output order always follows the snapshot index.
    """
    records = list(records)
    bounds = snapshot_bounds(len(records), stride)
    if not bounds:
        raise ContractViolation("snapshot stream is empty")
    graphs = [g for g, _ in stream_snapshots(records, stride)]

    def run(i):
        try:
            return detect(graphs[i], algorithm, cfg)
        except RetnetError as exc:
            raise SnapshotError(i, exc) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partitions = list(pool.map(run, range(len(graphs))))
    else:
        partitions = [run(i) for i in range(len(graphs))]

    degree_series = category_degree_series(graphs, freeze=freeze_strata)
    seen: set[str] = set()
    out = []
    for i, ((start, stop), g, p) in enumerate(zip(bounds, graphs, partitions)):
        chunk = records[start:stop]
        before = len(seen)
        seen.update(r.tweet_id for r in chunk)
        pc_avg, ac_avg = degree_series[i]
        out.append(SnapshotStats(
            index=i,
            records=stop,
            n=g.n,
            m=g.m,
            total_weight=g.total_weight,
            community_count=p.k,
            avg_community_size=g.n / p.k,
            new_tweets=len(seen) - before,
            total_distinct_tweets=len(seen),
            duration_seconds=_slice_duration(chunk),
            avg_out_degree_by_pc=pc_avg,
            avg_in_degree_by_ac=ac_avg,
        ))
    return out
