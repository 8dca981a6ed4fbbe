from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from retnet import Lexicon, Partition, WeightedDigraph, community_sentiment, community_word_frequencies
from retnet.errors import ContractViolation, ParseError
from retnet.sentiment import tokenize

LEX = Lexicon({"good": 0.5, "bad": -0.75, "great": 0.75, "awful": -1.0, "ok": 0.0})


def test_tokenize():
    text = "Great news @bob! see https://x.co/abc #Eleição2022 a ÓTIMO dia"
    assert tokenize(text) == ["great", "news", "see", "eleição2022", "ótimo", "dia"]
    assert tokenize(None) == [] and tokenize("") == []


def test_hand_corpus():
    (r,) = community_sentiment({0: {"good": 3, "bad": 1}}, LEX).values()
    assert r.weighted_sum == pytest.approx(0.75, abs=1e-9)
    assert r.normalized_score == pytest.approx(0.1875, abs=1e-9)
    assert r.coverage == 1.0


def test_uncovered_words_lower_coverage_only():
    (r,) = community_sentiment({0: {"good": 3, "bad": 1, "urna": 4}}, LEX).values()
    assert r.weighted_sum == pytest.approx(0.75)
    assert r.normalized_score == pytest.approx(0.1875)
    assert r.coverage == 0.5


def test_no_covered_word_gives_none():
    (r,) = community_sentiment({3: {"urna": 10}}, LEX).values()
    assert r.weighted_sum is None and r.normalized_score is None
    assert r.coverage == 0.0 and not r.scored


def test_top_words_by_contribution():
    freqs = {0: {"good": 10, "great": 2, "bad": 4, "awful": 1, "ok": 50}}
    (r,) = community_sentiment(freqs, LEX, top=3).values()
    assert [w for w, _, _ in r.top_positive] == ["good", "great"]
    assert [w for w, _, _ in r.top_negative] == ["bad", "awful"]
    assert r.top_positive[0] == ("good", 0.5, 10)


@given(st.dictionaries(st.sampled_from(["good", "bad", "great", "awful", "ok", "urna"]),
                       st.integers(1, 50), min_size=1),
       st.integers(2, 7))
def test_scaling_frequencies_keeps_normalized_score(wf, factor):
    (a,) = community_sentiment({0: wf}, LEX).values()
    (b,) = community_sentiment({0: {w: n * factor for w, n in wf.items()}}, LEX).values()
    if a.normalized_score is None:
        assert b.normalized_score is None
    else:
        assert b.normalized_score == pytest.approx(a.normalized_score, abs=1e-12)
        assert b.weighted_sum == pytest.approx(factor * a.weighted_sum, abs=1e-9)
        assert -1.0 <= a.normalized_score <= 1.0


def test_word_frequencies_filters():
    g = WeightedDigraph.from_arcs([("a", "b", 1), ("c", "d", 1), ("e", "e", 1)])
    p = Partition.from_labels([0, 0, 1, 1, 2])
    posts = [("a", "good good bad"), ("b", "good urna"), ("c", "bad"), (4, "good good good")]
    freqs = community_word_frequencies(posts, g, p, min_count=2, min_community_size=2)
    assert freqs == {0: Counter({"good": 3}), 1: Counter()}


def test_lexicon_parsing(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("# header\nBom\t0.5\n\nruim\t-0.5\n", encoding="utf-8")
    lex = Lexicon.from_tsv(path)
    assert lex.get("bom") == 0.5 and "ruim" in lex and len(lex) == 2
    with pytest.raises(ParseError, match="line 2"):
        Lexicon.parse(["ok\t0", "broken"])
    with pytest.raises(ParseError, match="bad score"):
        Lexicon.parse(["ok\tyes"])
    with pytest.raises(ContractViolation):
        Lexicon({"x": 1.5})


def test_default_lexicon_loads():
    lex = Lexicon.default()
    assert len(lex) > 50
    assert all(-1 <= s <= 1 for s in lex.scores.values())
