"""Lexicon-based sentiment of communities.

Words are counted per community (a tweet belongs to the community of the user
who posted it), rare words are dropped, and each community gets a
frequency-weighted sum of word scores plus the same sum normalised by the
covered frequency.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

import numpy as np

from .errors import ContractViolation, ParseError
from .graph import Partition, WeightedDigraph

_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_HANDLE = re.compile(r"@\w+")
_WORD = re.compile(r"\w+")

DEFAULT_MIN_COUNT = 10
DEFAULT_MIN_COMMUNITY_SIZE = 1000


def tokenize(text: str | None) -> list[str]:
    """Case-folded word tokens; URLs and @-handles removed, ``#tag`` kept as ``tag``."""
    if not text:
        return []
    text = _HANDLE.sub(" ", _URL.sub(" ", text)).replace("#", " ")
    return [w for w in _WORD.findall(text.casefold()) if len(w) >= 2]


@dataclass(frozen=True)
class Lexicon:
    scores: Mapping[str, float]

    def __post_init__(self):
        clean = {}
        for word, score in self.scores.items():
            word = word.strip().casefold()
            if not word:
                raise ContractViolation("lexicon words must be nonempty")
            score = float(score)
            if not -1.0 <= score <= 1.0:
                raise ContractViolation(f"score of {word!r} outside [-1, 1]: {score}")
            clean[word] = score
        object.__setattr__(self, "scores", clean)

    def __contains__(self, word):
        return word in self.scores

    def __len__(self):
        return len(self.scores)

    def get(self, word, default=None):
        return self.scores.get(word, default)

    @classmethod
    def from_tsv(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh)

    @classmethod
    def parse(cls, lines: Iterable[str]) -> "Lexicon":
        """Parse ``word<TAB>score`` lines; blank lines and ``#`` comments are skipped."""
        scores = {}
        for lineno, line in enumerate(lines, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected word<TAB>score", lineno)
            try:
                scores[parts[0]] = float(parts[1])
            except ValueError:
                raise ParseError(f"bad score {parts[1]!r}", lineno) from None
        return cls(scores)

    @classmethod
    def default(cls) -> "Lexicon":
        """Small bundled demo lexicon (Portuguese + English)."""
        text = resources.files("retnet").joinpath("data/demo_lexicon.tsv").read_text("utf-8")
        return cls.parse(text.splitlines())


def community_word_frequencies(posts: Iterable[tuple], graph: WeightedDigraph,
                               partition: Partition, min_count: int = DEFAULT_MIN_COUNT,
                               min_community_size: int = DEFAULT_MIN_COMMUNITY_SIZE
                               ) -> dict[int, Counter]:
    """Word counts per community with at least ``min_community_size`` members.

    ``posts`` yields ``(poster, text)`` where ``poster`` is an external id or
    vertex index.  Within each kept community only words used at least
    ``min_count`` times survive.
    """
    partition.check(graph)
    sizes = partition.sizes()
    counts: dict[int, Counter] = {}
    for poster, text in posts:
        c = int(partition.labels[graph.index(poster)])
        if sizes[c] < min_community_size:
            continue
        counts.setdefault(c, Counter()).update(tokenize(text))
    out = {}
    for c in sorted(counts):
        out[c] = Counter({w: n for w, n in counts[c].items() if n >= min_count})
    return out


@dataclass
class CommunitySentiment:
    community: int
    weighted_sum: float | None
    normalized_score: float | None
    coverage: float
    covered_frequency: int
    total_frequency: int
    word_freq: dict[str, int] = field(default_factory=dict)
    top_positive: list[tuple[str, float, int]] = field(default_factory=list)
    top_negative: list[tuple[str, float, int]] = field(default_factory=list)

    @property
    def scored(self) -> bool:
        return self.weighted_sum is not None


def community_sentiment(freqs: Mapping[int, Mapping[str, int]], lexicon: Lexicon,
                        top: int = 3) -> dict[int, CommunitySentiment]:
    """Frequency-weighted sentiment of each community.

    Words missing from the lexicon are skipped and lower the coverage.  With no
    covered word both scores are ``None``.  The top lists hold the ``top``
    largest positive and most negative ``score * freq`` contributions, ties by
    word.
    """
    out = {}
    for c, wf in freqs.items():
        covered = [(w, lexicon.get(w), n) for w, n in wf.items() if w in lexicon]
        total = int(sum(wf.values()))
        cov_freq = int(sum(n for _, _, n in covered))
        if cov_freq:
            contrib = np.array([s * n for _, s, n in covered])
            wsum = float(contrib.sum())
            norm = wsum / cov_freq
        else:
            wsum = norm = None
        pos = sorted((x for x in covered if x[1] * x[2] > 0), key=lambda x: (-x[1] * x[2], x[0]))
        neg = sorted((x for x in covered if x[1] * x[2] < 0), key=lambda x: (x[1] * x[2], x[0]))
        out[c] = CommunitySentiment(
            community=c,
            weighted_sum=wsum,
            normalized_score=norm,
            coverage=cov_freq / total if total else 0.0,
            covered_frequency=cov_freq,
            total_frequency=total,
            word_freq=dict(sorted(wf.items(), key=lambda kv: (-kv[1], kv[0]))),
            top_positive=pos[:top],
            top_negative=neg[:top],
        )
    return out
