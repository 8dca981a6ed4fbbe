"""Interaction records -> weighted digraph + retweet cascades.

Records are JSON objects, one per line::

    {"tweet_id": "t1", "author": "v", "actor": "u", "kind": "retweet", "ts": 100, "text": "..."}

``author`` is the user who was retweeted, mentioned or replied to and
``actor`` the user who did it, so each record adds 1 to the weight of arc
``(author, actor)``.  For a retweet ``tweet_id`` names the original tweet and
``text`` its content; for a mention or reply they describe the actor's tweet.
A retweet of a retweet is credited to whatever ``author`` the record carries.
"""

from __future__ import annotations

import gzip
import io
import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import ContractViolation, ParseError, ValidationError
from .graph import DigraphBuilder, WeightedDigraph

KINDS = ("retweet", "mention", "reply")


@dataclass(frozen=True)
class InteractionRecord:
    tweet_id: str
    author: str
    actor: str
    kind: str
    timestamp: float | None = None
    text: str | None = None

    @property
    def poster(self) -> str:
        """User who wrote the tweet named by ``tweet_id``."""
        return self.author if self.kind == "retweet" else self.actor


@dataclass
class TweetCascade:
    """An original tweet and the retweets it received (by vertex index)."""

    tweet_id: str
    author: int
    retweeters: dict[int, int] = field(default_factory=dict)
    first_seen: float | None = None
    text: str | None = None

    @property
    def total_retweets(self) -> int:
        return sum(self.retweeters.values())

    @property
    def distinct_retweeters(self) -> int:
        return len(self.retweeters)

    @property
    def self_retweeted(self) -> bool:
        return self.author in self.retweeters


def parse_record(line: str, lineno: int | None = None) -> InteractionRecord:
    """Parse and validate one JSON line; unknown fields are ignored."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON ({exc.msg})", lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("record is not a JSON object", lineno)
    missing = [k for k in ("tweet_id", "author", "actor", "kind") if k not in obj]
    if missing:
        raise ParseError(f"missing field(s): {', '.join(missing)}", lineno)
    kind = obj["kind"]
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind!r}; allowed kinds are {', '.join(KINDS)}", lineno)
    tweet_id = obj["tweet_id"]
    if tweet_id is None or str(tweet_id) == "":
        raise ValidationError("tweet_id must be nonempty", lineno)
    for key in ("author", "actor"):
        if obj[key] is None or str(obj[key]) == "":
            raise ValidationError(f"{key} must be nonempty", lineno)
    ts = obj.get("ts")
    if ts is not None:
        if isinstance(ts, bool) or not isinstance(ts, (int, float)):
            raise ValidationError(f"ts must be a number of seconds, got {ts!r}", lineno)
    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise ValidationError("text must be a string", lineno)
    return InteractionRecord(str(tweet_id), str(obj["author"]), str(obj["actor"]), kind, ts, text)


def open_text(path) -> io.TextIOBase:
    """Open a UTF-8 text file, transparently gunzipping by magic bytes."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def iter_records(lines: Iterable[str]) -> Iterator[InteractionRecord]:
    """Parse an iterable of lines, skipping blank ones."""
    for lineno, line in enumerate(lines, start=1):
        if line.strip():
            yield parse_record(line, lineno)


def read_records(path: str | os.PathLike) -> list[InteractionRecord]:
    with open_text(path) as fh:
        return list(iter_records(fh))


def write_records(records: Iterable[InteractionRecord], path) -> None:
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wt", encoding="utf-8") as fh:
        for r in records:
            obj = {"tweet_id": r.tweet_id, "author": r.author, "actor": r.actor,
                   "kind": r.kind, "ts": r.timestamp}
            if r.text is not None:
                obj["text"] = r.text
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


class GraphAccumulator:
    """Incremental :func:`build_graph`; :meth:`snapshot` freezes the current prefix."""

    def __init__(self):
        self.builder = DigraphBuilder()
        self.cascades: dict[str, TweetCascade] = {}
        self.self_retweets = 0
        self.records = 0

    def add(self, rec: InteractionRecord) -> None:
        b = self.builder
        b.add_interaction(rec.author, rec.actor)
        self.records += 1
        if rec.kind != "retweet":
            return
        author = b.intern(rec.author)
        actor = b.intern(rec.actor)
        cas = self.cascades.get(rec.tweet_id)
        if cas is None:
            cas = TweetCascade(rec.tweet_id, author, {}, rec.timestamp, rec.text)
            self.cascades[rec.tweet_id] = cas
        else:
            if rec.timestamp is not None and (cas.first_seen is None or rec.timestamp < cas.first_seen):
                cas.first_seen = rec.timestamp
            if cas.text is None and rec.text is not None:
                cas.text = rec.text
        if actor == author:
            self.self_retweets += 1
        cas.retweeters[actor] = cas.retweeters.get(actor, 0) + 1

    def snapshot(self) -> tuple[WeightedDigraph, dict[str, TweetCascade]]:
        cascades = {
            k: TweetCascade(c.tweet_id, c.author, dict(c.retweeters), c.first_seen, c.text)
            for k, c in self.cascades.items()
        }
        return self.builder.build(), cascades

    @property
    def self_loops(self) -> int:
        return self.builder.self_loops


def build_graph(records: Iterable[InteractionRecord]):
    """Build the interaction digraph and the retweet cascades.

    Returns ``(graph, cascades)`` where ``cascades`` maps tweet id to
    :class:`TweetCascade`.  Mentions and replies only add arc weight.
    """
    acc = GraphAccumulator()
    for rec in records:
        acc.add(rec)
    return acc.snapshot()


def stream_snapshots(records: Sequence[InteractionRecord], stride: int):
    """Yield cumulative ``(graph, cascades)`` after every ``stride`` records.

    The last snapshot covers all records even when it is a partial slice.
    """
    if stride < 1:
        raise ContractViolation(f"stride must be >= 1, got {stride}")
    acc = GraphAccumulator()
    pending = 0
    for rec in records:
        acc.add(rec)
        pending += 1
        if pending == stride:
            yield acc.snapshot()
            pending = 0
    if pending:
        yield acc.snapshot()


def snapshot_bounds(total: int, stride: int) -> list[tuple[int, int]]:
    """``[start, stop)`` record slices of each snapshot."""
    if stride < 1:
        raise ContractViolation(f"stride must be >= 1, got {stride}")
    return [(s, min(s + stride, total)) for s in range(0, total, stride)]


def posted_texts(records: Iterable[InteractionRecord]) -> dict[str, tuple[str, str]]:
    """``tweet_id -> (poster external id, text)`` for the first text seen per tweet."""
    out: dict[str, tuple[str, str]] = {}
    for r in records:
        if r.text is not None and r.tweet_id not in out:
            out[r.tweet_id] = (r.poster, r.text)
    return out
