"""User and tweet strata plus the influence measures built on them.

Popularity of a user is its weighted out-degree (interactions received) and
activity its weighted in-degree (interactions made).  Users and tweets are
ranked descending and cut into four tiers: the top 0.1%, the rest of the top
1%, the rest of the top 10%, and the remainder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ContractViolation, UndefinedMeasureError
from .graph import Partition, WeightedDigraph
from .ingest import TweetCascade

PC = ("PC1", "PC2", "PC3", "PCR")
AC = ("AC1", "AC2", "AC3", "ACR")
TC = ("TC1", "TC2", "TC3", "TCR")

# cumulative tier fractions, as per-mille of the population
_CUTOFFS_PER_MILLE = (1, 10, 100)

DEFAULT_VIRAL_THRESHOLD = 0.25


def tier_cutoffs(n: int) -> tuple[int, int, int]:
    """Cumulative sizes of the top three tiers: ``max(1, floor(q * n))`` capped at ``n``."""
    if n <= 0:
        return (0, 0, 0)
    return tuple(min(n, max(1, n * pm // 1000)) for pm in _CUTOFFS_PER_MILLE)


def tier_sizes(n: int) -> tuple[int, int, int, int]:
    c1, c2, c3 = tier_cutoffs(n)
    return (c1, c2 - c1, c3 - c2, n - c3)


def rank(primary, secondary, keys) -> np.ndarray:
    """Indices ordered by primary desc, secondary desc, then key ascending."""
    primary = np.asarray(primary)
    secondary = np.asarray(secondary)
    key_rank = np.empty(len(keys), dtype=np.int64)
    key_rank[np.argsort(np.asarray(keys, dtype=str), kind="stable")] = np.arange(len(keys))
    return np.lexsort((key_rank, -secondary, -primary))


def tiers_from_order(order: np.ndarray) -> np.ndarray:
    """Tier index 0..3 for every item given its rank order."""
    n = order.size
    c1, c2, c3 = tier_cutoffs(n)
    by_rank = np.full(n, 3, dtype=np.int8)
    by_rank[:c3] = 2
    by_rank[:c2] = 1
    by_rank[:c1] = 0
    out = np.empty(n, dtype=np.int8)
    out[order] = by_rank
    return out


@dataclass
class StrataAssignment:
    """Tier indices (0..3) per user (by vertex index) and per tweet id."""

    user_pc: np.ndarray | None = None
    user_ac: np.ndarray | None = None
    tweet_tc: dict[str, int] = field(default_factory=dict)

    def pc_label(self, v: int) -> str:
        return PC[self.user_pc[v]]

    def ac_label(self, v: int) -> str:
        return AC[self.user_ac[v]]

    def tc_label(self, tweet_id: str) -> str:
        return TC[self.tweet_tc[tweet_id]]


def assign_user_strata(graph: WeightedDigraph) -> StrataAssignment:
    """Rank users by popularity and, independently, by activity.

    Ties are broken by the other degree (higher first) and then by external id.
    """
    d_in, d_out = graph.in_degrees, graph.out_degrees
    pc = tiers_from_order(rank(d_out, d_in, graph.ids))
    ac = tiers_from_order(rank(d_in, d_out, graph.ids))
    return StrataAssignment(user_pc=pc, user_ac=ac)


def assign_tweet_strata(cascades: Mapping[str, TweetCascade]) -> dict[str, int]:
    """Tier index per tweet, ranked by total retweets then distinct retweeters."""
    ids = list(cascades)
    if not ids:
        return {}
    total = np.array([cascades[t].total_retweets for t in ids], dtype=np.int64)
    distinct = np.array([cascades[t].distinct_retweeters for t in ids], dtype=np.int64)
    tiers = tiers_from_order(rank(total, distinct, ids))
    return dict(zip(ids, tiers.tolist()))


def assign_strata(graph: WeightedDigraph, cascades: Mapping[str, TweetCascade]) -> StrataAssignment:
    strata = assign_user_strata(graph)
    strata.tweet_tc = assign_tweet_strata(cascades)
    return strata


def category_contributions(graph: WeightedDigraph, strata: StrataAssignment) -> dict[str, float]:
    """Share of the total weight received per PC tier and made per AC tier."""
    omega = graph.total_weight
    out = {}
    for names, tiers, deg in ((PC, strata.user_pc, graph.out_degrees),
                              (AC, strata.user_ac, graph.in_degrees)):
        sums = np.bincount(tiers, weights=deg, minlength=4)
        for name, s in zip(names, sums):
            out[name] = float(s / omega) if omega else 0.0
    return out


@dataclass(frozen=True)
class CommunityInfluence:
    community: int
    size: int
    popularity_total: int
    popularity_by_category: dict[str, int]
    user_share_by_category: dict[str, float]
    social_influence: float


def community_influence(graph: WeightedDigraph, partition: Partition,
                        strata: StrataAssignment) -> list[CommunityInfluence]:
    """Per-community popularity with its PC-tier breakdown and social influence.

    Social influence is the weight of arcs from members to non-members over the
    total out-weight of the members: the share of the interactions the
    community receives that are made from other communities.
    """
    partition.check(graph)
    k = partition.k
    labels = partition.labels
    d_out = graph.out_degrees
    pc = strata.user_pc.astype(np.int64)
    size = np.bincount(labels, minlength=k)
    pop = np.zeros(k, dtype=np.int64)
    np.add.at(pop, labels, d_out)
    pop_cat = np.zeros((k, 4), dtype=np.int64)
    np.add.at(pop_cat, (labels, pc), d_out)
    count_cat = np.zeros((k, 4), dtype=np.int64)
    np.add.at(count_cat, (labels, pc), 1)
    crossing = labels[graph.tails] != labels[graph.heads]
    external = np.zeros(k, dtype=np.int64)
    np.add.at(external, labels[graph.tails[crossing]], graph.weights[crossing])
    rows = []
    for c in range(k):
        influence = float(external[c] / pop[c]) if pop[c] else 0.0
        rows.append(CommunityInfluence(
            community=c,
            size=int(size[c]),
            popularity_total=int(pop[c]),
            popularity_by_category={PC[i]: int(pop_cat[c, i]) for i in range(4)},
            user_share_by_category={PC[i]: float(count_cat[c, i] / size[c]) for i in range(4)},
            social_influence=influence,
        ))
    return rows


def virality(cascade: TweetCascade, partition: Partition,
             graph: WeightedDigraph | None = None, weighting: str = "retweets") -> float:
    """Share of a tweet's retweet weight coming from outside its author's community.

    ``weighting="retweets"`` weights each retweeter by how often it retweeted
    this tweet; ``weighting="arc"`` uses the full arc weight between author and
    retweeter in ``graph`` (all interactions between the two users).
    """
    if not cascade.retweeters:
        raise UndefinedMeasureError(f"tweet {cascade.tweet_id!r} has no retweets")
    labels = partition.labels
    if not 0 <= cascade.author < labels.size:
        raise ContractViolation(f"author of {cascade.tweet_id!r} not covered by the partition")
    own = labels[cascade.author]
    if weighting == "retweets":
        weights = cascade.retweeters
    elif weighting == "arc":
        if graph is None:
            raise ContractViolation("arc weighting needs the graph")
        weights = {j: graph.weight(cascade.author, j) for j in cascade.retweeters}
    else:
        raise ContractViolation(f"unknown weighting {weighting!r}")
    total = 0
    outside = 0
    for j, w in weights.items():
        total += w
        if labels[j] != own:
            outside += w
    return outside / total


@dataclass(frozen=True)
class TweetVirality:
    tweet_id: str
    origin_community: int
    retweets: int
    virality: float | None
    is_viral: bool


@dataclass
class ViralityReport:
    threshold: float
    tweets: list[TweetVirality]
    viral_share_by_tc: dict[str, float] = field(default_factory=dict)
    counts_by_tc: dict[str, int] = field(default_factory=dict)


def classify_viral(cascades: Mapping[str, TweetCascade], partition: Partition,
                   tweet_tc: Mapping[str, int] | None = None,
                   threshold: float = DEFAULT_VIRAL_THRESHOLD,
                   graph: WeightedDigraph | None = None,
                   weighting: str = "retweets") -> ViralityReport:
    """Virality of every cascade; viral means strictly above ``threshold``.

    Tweets without retweets get ``virality=None`` and are not viral.  When
    ``tweet_tc`` is given the viral share of each tier is aggregated over the
    tweets with defined virality.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ContractViolation(f"threshold must lie in [0, 1], got {threshold}")
    rows = []
    for tid, cas in cascades.items():
        vir = virality(cas, partition, graph, weighting) if cas.retweeters else None
        rows.append(TweetVirality(
            tweet_id=tid,
            origin_community=int(partition.labels[cas.author]),
            retweets=cas.total_retweets,
            virality=vir,
            is_viral=vir is not None and vir > threshold,
        ))
    report = ViralityReport(threshold=threshold, tweets=rows)
    if tweet_tc is not None:
        viral = [0, 0, 0, 0]
        count = [0, 0, 0, 0]
        for row in rows:
            if row.virality is None:
                continue
            t = tweet_tc[row.tweet_id]
            count[t] += 1
            viral[t] += row.is_viral
        report.counts_by_tc = {TC[i]: count[i] for i in range(4)}
        report.viral_share_by_tc = {TC[i]: (viral[i] / count[i] if count[i] else 0.0)
                                    for i in range(4)}
    return report


def crosstab_tweets_by_users(cascades: Mapping[str, TweetCascade],
                             strata: StrataAssignment) -> np.ndarray:
    """Percentage of tweets of each TC tier (rows) posted by users of each PC tier (columns)."""
    table = np.zeros((4, 4), dtype=np.float64)
    for tid, cas in cascades.items():
        table[strata.tweet_tc[tid], strata.user_pc[cas.author]] += 1
    totals = table.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        pct = np.where(totals > 0, 100.0 * table / np.where(totals > 0, totals, 1), 0.0)
    return pct
