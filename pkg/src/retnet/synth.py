"""Synthetic graphs and record streams with known structure."""

from __future__ import annotations

import numpy as np

from .graph import Partition, WeightedDigraph
from .ingest import InteractionRecord
from .sentiment import Lexicon


def planted_partition(n: int, blocks: int = 2, avg_out: int = 10, mixture: float = 0.05,
                      seed: int = 0) -> tuple[WeightedDigraph, Partition]:
    """Digraph with ``blocks`` equal blocks.

    Every vertex sends ``avg_out`` unit interactions; each goes to a uniformly
    chosen vertex of another block with probability ``mixture`` and of its own
    block otherwise.  Repeated pairs merge into heavier arcs.
    """
    rng = np.random.default_rng(seed)
    truth = np.arange(n) * blocks // n
    starts = np.searchsorted(truth, np.arange(blocks))
    sizes = np.bincount(truth, minlength=blocks)
    tails = np.repeat(np.arange(n), avg_out)
    cross = rng.random(tails.size) < mixture
    own = truth[tails]
    other = (own + rng.integers(1, blocks, size=tails.size)) % blocks if blocks > 1 else own
    target_block = np.where(cross, other, own)
    heads = starts[target_block] + (rng.random(tails.size) * sizes[target_block]).astype(np.int64)
    # redraw self pairs inside the same block
    loops = heads == tails
    while loops.any():
        b = target_block[loops]
        heads[loops] = starts[b] + (rng.random(b.size) * sizes[b]).astype(np.int64)
        loops = heads == tails
    graph = WeightedDigraph([str(i) for i in range(n)], tails, heads, np.ones(tails.size))
    return graph, Partition(truth, blocks)


def scale_free_digraph(n: int, arcs_per_node: float = 1.8, repeat_rate: float = 0.02,
                       seed: int = 0) -> WeightedDigraph:
    """Preferential-attachment digraph shaped like a retweet network.

    Vertex ``i`` arrives and interacts with ``1 + Poisson(arcs_per_node - 1)``
    earlier vertices chosen with probability proportional to their popularity
    (out-degree) plus one, creating arcs ``(popular, i)``.  A fraction
    ``repeat_rate`` of interactions carry extra weight.
    """
    rng = np.random.default_rng(seed)
    extra = rng.poisson(max(arcs_per_node - 1.0, 0.0), size=n)
    total = int(n - 1 + extra[1:].sum())
    pool = np.empty(n + total, dtype=np.int64)
    tails = np.empty(total, dtype=np.int64)
    heads = np.empty(total, dtype=np.int64)
    pool[0] = 0
    size = 1
    k = 0
    u = rng.random(total)
    for i in range(1, n):
        cnt = 1 + int(extra[i])
        chosen = pool[(u[k:k + cnt] * size).astype(np.int64)]
        tails[k:k + cnt] = chosen
        heads[k:k + cnt] = i
        pool[size:size + cnt] = chosen
        size += cnt
        pool[size] = i
        size += 1
        k += cnt
    weights = 1 + (rng.random(total) < repeat_rate) * rng.geometric(0.5, size=total)
    return WeightedDigraph([str(i) for i in range(n)], tails, heads, weights)


_NEUTRAL = ("eleição", "turno", "segundo", "primeiro", "voto", "candidato", "debate",
            "brasil", "governo", "presidente", "urna", "campanha", "hoje", "agora")


def generate_corpus(n_users: int = 2000, n_records: int = 20000, seed: int = 0,
                    communities: int = 4, homophily: float = 0.9, mention_rate: float = 0.2,
                    new_tweet_rate: float = 0.15, burst: tuple[int, int] | None = None,
                    burst_new_tweet_rate: float = 0.02, mean_gap: float = 0.02,
                    spill_after: int | None = None, lexicon: Lexicon | None = None):
    """Interaction records with planted communities and rich-get-richer dynamics.

    Authors are drawn by preferential attachment on the popularity they have
    gathered.  A retweet of an existing tweet first picks an author in
    proportion to the retweets they already received and then one of that
    author's tweets in proportion to its own retweets.  Actors come from the author's community with
    probability ``homophily``.  Inside the record window ``burst`` the share of
    records about new tweets drops to ``burst_new_tweet_rate``.  Once a tweet
    holds ``spill_after`` retweets its further retweeters are drawn uniformly
    from all users, so popular tweets leak out of their community.

    Returns ``(records, community_of_user)``.
    """
    rng = np.random.default_rng(seed)
    community = rng.integers(0, communities, size=n_users)
    members = [np.flatnonzero(community == c) for c in range(communities)]
    lex = lexicon if lexicon is not None else Lexicon.default()
    vocab = list(_NEUTRAL) + sorted(lex.scores)
    vocab_p = np.array([3.0] * len(_NEUTRAL) + [1.0] * len(lex.scores))
    vocab_p /= vocab_p.sum()

    user_pool = list(range(n_users))  # popularity pool (one ticket per user + per interaction)
    tweet_author: list[int] = []
    tweet_rts: list[int] = []
    poster_pool: list[int] = []  # one ticket per tweet posted + per retweet received
    own_pool: dict[int, list[int]] = {}  # per author: one ticket per tweet + per retweet
    records = []
    ts = 1_500_000_000.0

    def text():
        words = rng.choice(len(vocab), size=int(rng.integers(4, 10)), p=vocab_p)
        return " ".join(vocab[w] for w in words)

    def actor_for(author):
        if rng.random() < homophily:
            m = members[community[author]]
            return int(m[rng.integers(m.size)])
        return int(rng.integers(n_users))

    for r in range(n_records):
        ts += rng.exponential(mean_gap)
        rate = new_tweet_rate
        if burst is not None and burst[0] <= r < burst[1]:
            rate = burst_new_tweet_rate
        if rng.random() < mention_rate:
            author = user_pool[rng.integers(len(user_pool))]
            actor = actor_for(author)
            kind = "mention" if rng.random() < 0.7 else "reply"
            tid = f"m{r}"
            records.append(InteractionRecord(tid, str(author), str(actor), kind, round(ts, 3), text()))
            user_pool.append(author)
            continue
        if not tweet_author or rng.random() < rate:
            author = user_pool[rng.integers(len(user_pool))]
            t = len(tweet_author)
            tweet_author.append(author)
            tweet_rts.append(0)
            poster_pool.append(author)
            own_pool.setdefault(author, []).append(t)
        else:
            author = poster_pool[rng.integers(len(poster_pool))]
            tickets = own_pool[author]
            t = tickets[rng.integers(len(tickets))]
        if spill_after is not None and tweet_rts[t] >= spill_after:
            actor = int(rng.integers(n_users))
        else:
            actor = actor_for(author)
        tweet_rts[t] += 1
        records.append(InteractionRecord(f"t{t}", str(author), str(actor), "retweet",
                                         round(ts, 3), None))
        poster_pool.append(author)
        own_pool[author].append(t)
        user_pool.append(author)
    # attach each original tweet's text to its first retweet record
    seen = set()
    for i, rec in enumerate(records):
        if rec.kind == "retweet" and rec.tweet_id not in seen:
            seen.add(rec.tweet_id)
            records[i] = InteractionRecord(rec.tweet_id, rec.author, rec.actor, rec.kind,
                                           rec.timestamp, text())
    return records, {str(u): int(community[u]) for u in range(n_users)}
