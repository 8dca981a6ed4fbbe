"""``retnet`` command line.

Stages communicate only through files::

    retnet ingest   --input tweets.jsonl --out run/
    retnet detect   --graph-dir run/ --algo louvain --seed 7 --out run/
    retnet metrics  --graph-dir run/ --partition run/partition.csv
    retnet strata   --graph-dir run/ [--partition run/partition.csv] --out run/
    retnet virality --graph-dir run/ --partition run/partition.csv --out run/
    retnet snapshots --input tweets.jsonl --stride 5000 --out run/
    retnet sentiment --input tweets.jsonl --graph-dir run/ --partition run/partition.csv --out run/
    retnet export   --graph-dir run/ --partition run/partition.csv --format graphml --collapse --out g.graphml

Exit codes: 0 success, 2 usage, 3 input parse error, 4 contract violation.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import time
from pathlib import Path

import click

from . import io as rio
from .community import DETECTORS, DetectorConfig, detect, louvain
from .errors import ParseError, RetnetError
from .influence import (AC, PC, TC, assign_strata, category_contributions, classify_viral,
                        community_influence, crosstab_tweets_by_users)
from .ingest import build_graph, posted_texts, read_records
from .metrics import mixture_coefficient, modularity, newman_modularity, nmi, score_partition
from .sentiment import (DEFAULT_MIN_COMMUNITY_SIZE, DEFAULT_MIN_COUNT, Lexicon,
                        community_sentiment, community_word_frequencies)
from .temporal import DEFAULT_STRIDE, SnapshotError, snapshot_stats

log = logging.getLogger("retnet")

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CONTRACT = 4


def resolve_threads(value: int | None) -> int:
    if value is None:
        value = int(os.environ.get("RETNET_THREADS", "1") or 1)
    if value < 1:
        raise click.BadParameter("--threads must be >= 1")
    return value


def _fail(code: int, msg: str):
    click.echo(f"retnet: error: {msg}", err=True)
    sys.exit(code)


def _run(func):
    try:
        return func()
    except SnapshotError as exc:
        cause = exc.__cause__
        code = EXIT_PARSE if isinstance(cause, ParseError) else EXIT_CONTRACT
        _fail(code, str(exc))
    except ParseError as exc:
        _fail(EXIT_PARSE, str(exc))
    except (RetnetError, OverflowError) as exc:
        _fail(EXIT_CONTRACT, str(exc))


def _out_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_graph(graph_dir):
    d = Path(graph_dir)
    return rio.read_graph(d / "graph.csv", d / "vertices.csv" if (d / "vertices.csv").exists() else None)


def _load_cascades(graph_dir, graph):
    d = Path(graph_dir)
    if not (d / "cascades.csv").exists():
        return {}
    return rio.read_cascades(d / "cascades.csv", graph)


graph_dir_opt = click.option("--graph-dir", type=click.Path(exists=True, file_okay=False),
                             required=True, help="Directory written by `retnet ingest`.")
partition_opt = click.option("--partition", "partition_path", type=click.Path(exists=True, dir_okay=False),
                             help="Partition CSV written by `retnet detect`.")
out_opt = click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True,
                       help="Output directory.")
seed_opt = click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
algo_opt = click.option("--algo", type=click.Choice(sorted(DETECTORS)), default="louvain",
                        show_default=True)
threads_opt = click.option("--threads", type=int, default=None,
                           help="Worker cap (defaults to $RETNET_THREADS or 1).")


@click.group()
@click.option("-v", "--verbose", count=True)
def main(verbose):
    """Community and virality analysis of interaction networks built from archived tweets."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSON-lines records (optionally gzip-compressed).")
@out_opt
def ingest(input_path, out):
    """Build graph.csv, vertices.csv, cascades.csv and retweets.csv."""
    def go():
        records = read_records(input_path)
        graph, cascades = build_graph(records)
        d = _out_dir(out)
        rio.write_graph(graph, d / "graph.csv", d / "vertices.csv")
        rio.write_cascades(graph, cascades, d / "cascades.csv", d / "retweets.csv")
        loops = graph.self_loop_count
        click.echo(f"records={len(records)} n={graph.n} m={graph.m} total_weight={graph.total_weight} "
                   f"cascades={len(cascades)} self_loops={loops}")
        if loops:
            log.warning("%d self-interaction arc(s) stored as self-loops", loops)
    _run(go)


@main.command()
@graph_dir_opt
@algo_opt
@seed_opt
@click.option("--objective", type=click.Choice(["newman", "arcs"]), default="newman",
              show_default=True, help="Louvain objective.")
@click.option("--min-gain", type=click.FloatRange(min=0), default=1e-7, show_default=True)
@click.option("--max-iters", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--max-levels", type=click.IntRange(min=1), default=32, show_default=True)
@click.option("--no-timing", is_flag=True, help="Write elapsed_seconds as null (byte-stable output).")
@out_opt
def detect_cmd(graph_dir, algo, seed, objective, min_gain, max_iters, max_levels, no_timing, out):
    """Detect communities; writes partition.csv and score.json."""
    def go():
        graph = _load_graph(graph_dir)
        cfg = DetectorConfig(seed=seed, min_gain=min_gain, max_iters=max_iters, max_levels=max_levels)
        t0 = time.perf_counter()
        if algo == "louvain":
            part = louvain(graph, cfg, objective=objective)
        else:
            part = detect(graph, algo, cfg)
        elapsed = time.perf_counter() - t0
        d = _out_dir(out)
        rio.write_partition(graph, part, d / "partition.csv")
        score = score_partition(graph, part, algo, None if no_timing else elapsed)
        (d / "score.json").write_text(score.to_json(), encoding="utf-8")
        click.echo(score.to_json(), nl=False)
    _run(go)


main.add_command(detect_cmd, name="detect")


@main.command()
@graph_dir_opt
@click.option("--partition", "partition_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--truth", type=click.Path(exists=True, dir_okay=False),
              help="Reference partition CSV for NMI.")
@click.option("--weighted-mixture", is_flag=True, help="Weight crossing arcs by their weight.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write metrics JSON here as well.")
def metrics(graph_dir, partition_path, truth, weighted_mixture, out):
    """Quality measures of a partition, with NMI against --truth when given."""
    def go():
        graph = _load_graph(graph_dir)
        part = rio.read_partition(partition_path, graph)
        report = {
            "modularity": modularity(graph, part),
            "newman_modularity": newman_modularity(graph, part),
            "mixture": mixture_coefficient(graph, part, weighted=weighted_mixture),
            "k": part.k,
        }
        if truth:
            report["nmi"] = nmi(part, rio.read_partition(truth, graph))
        text = json.dumps({k: (float(rio.fmt(v)) if isinstance(v, float) else v)
                           for k, v in report.items()}, indent=2) + "\n"
        if out:
            Path(out).write_text(text, encoding="utf-8")
        click.echo(text, nl=False)
    _run(go)


def _write_strata(d, graph, cascades, strata, report=None):
    ids = graph.ids
    rio.write_csv(d / "user_strata.csv", ("user", "pc", "ac", "d_in", "d_out"), (
        (ids[v], PC[strata.user_pc[v]], AC[strata.user_ac[v]], int(graph.in_degrees[v]),
         int(graph.out_degrees[v])) for v in range(graph.n)
    ))
    vir = {t.tweet_id: t for t in report.tweets} if report is not None else {}
    rows = []
    for tid, cas in cascades.items():
        t = vir.get(tid)
        rows.append((tid, TC[strata.tweet_tc[tid]], cas.total_retweets,
                     t.virality if t else None, (t.is_viral if t and t.virality is not None else None)))
    rio.write_csv(d / "tweet_strata.csv", ("tweet", "tc", "retweets", "virality", "is_viral"), rows)
    if cascades:
        table = crosstab_tweets_by_users(cascades, strata)
        rio.write_csv(d / "crosstab_tweets_by_users.csv", ("tc",) + PC,
                      ((TC[i], *table[i].tolist()) for i in range(4)))
    contrib = category_contributions(graph, strata)
    rio.write_csv(d / "category_contributions.csv", ("category", "share"), contrib.items())


@main.command()
@graph_dir_opt
@partition_opt
@click.option("--threshold", type=click.FloatRange(0, 1), default=0.25, show_default=True)
@out_opt
def strata(graph_dir, partition_path, threshold, out):
    """Popularity/activity/tweet tiers; with --partition also community influence and virality."""
    def go():
        graph = _load_graph(graph_dir)
        cascades = _load_cascades(graph_dir, graph)
        st = assign_strata(graph, cascades)
        d = _out_dir(out)
        report = None
        if partition_path:
            part = rio.read_partition(partition_path, graph)
            report = classify_viral(cascades, part, st.tweet_tc, threshold)
            _write_influence(d, graph, part, st)
        _write_strata(d, graph, cascades, st, report)
    _run(go)


def _write_influence(d, graph, part, st):
    rows = community_influence(graph, part, st)
    header = ("community", "size", "popularity", "influence") + tuple(
        f"popularity_{c}" for c in PC) + tuple(f"share_{c}" for c in PC)
    rio.write_csv(d / "community_influence.csv", header, (
        (r.community, r.size, r.popularity_total, r.social_influence,
         *[r.popularity_by_category[c] for c in PC], *[r.user_share_by_category[c] for c in PC])
        for r in rows
    ))


@main.command()
@graph_dir_opt
@click.option("--partition", "partition_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--threshold", type=click.FloatRange(0, 1), default=0.25, show_default=True)
@click.option("--weighting", type=click.Choice(["retweets", "arc"]), default="retweets", show_default=True,
              help="Weight retweeters by their retweets of the tweet or by the full arc weight.")
@out_opt
def virality(graph_dir, partition_path, threshold, weighting, out):
    """Virality per tweet and viral share per tweet tier."""
    def go():
        graph = _load_graph(graph_dir)
        cascades = _load_cascades(graph_dir, graph)
        part = rio.read_partition(partition_path, graph)
        st = assign_strata(graph, cascades)
        report = classify_viral(cascades, part, st.tweet_tc, threshold, graph, weighting)
        d = _out_dir(out)
        rio.write_csv(d / "virality.csv",
                      ("tweet", "author", "community", "tc", "retweets", "virality", "is_viral"),
                      ((t.tweet_id, graph.ids[cascades[t.tweet_id].author], t.origin_community,
                        TC[st.tweet_tc[t.tweet_id]], t.retweets, t.virality, t.is_viral)
                       for t in report.tweets))
        rio.write_csv(d / "viral_by_tc.csv", ("tc", "tweets", "viral_share"),
                      ((c, report.counts_by_tc[c], report.viral_share_by_tc[c]) for c in TC))
        _write_strata(d, graph, cascades, st, report)
        for c in TC:
            click.echo(f"{c}: {report.counts_by_tc[c]} tweets, viral share {report.viral_share_by_tc[c]:.4f}")
    _run(go)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--stride", type=int, default=DEFAULT_STRIDE, show_default=True)
@algo_opt
@seed_opt
@click.option("--freeze-strata", is_flag=True, help="Use final-snapshot tier membership throughout.")
@threads_opt
@out_opt
def snapshots(input_path, stride, algo, seed, freeze_strata, threads, out):
    """Per-snapshot statistics (snapshots.csv) over cumulative record prefixes."""
    threads = resolve_threads(threads)

    def go():
        records = read_records(input_path)
        stats = snapshot_stats(records, stride, algo, DetectorConfig(seed=seed), threads, freeze_strata)
        d = _out_dir(out)
        header = ("index", "records", "n", "m", "total_weight", "community_count",
                  "avg_community_size", "new_tweets", "total_distinct_tweets", "duration_seconds")
        header += tuple(f"avg_out_{c}" for c in PC) + tuple(f"avg_in_{c}" for c in AC)
        header += tuple(f"empty_{c}" for c in PC + AC)
        rio.write_csv(d / "snapshots.csv", header, (
            (s.index, s.records, s.n, s.m, s.total_weight, s.community_count, s.avg_community_size,
             s.new_tweets, s.total_distinct_tweets, s.duration_seconds,
             *[s.avg_out_degree_by_pc[c].average for c in PC],
             *[s.avg_in_degree_by_ac[c].average for c in AC],
             *[s.avg_out_degree_by_pc[c].empty for c in PC],
             *[s.avg_in_degree_by_ac[c].empty for c in AC])
            for s in stats
        ))
        click.echo(f"{len(stats)} snapshots written to {d / 'snapshots.csv'}")
    _run(go)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True)
@graph_dir_opt
@click.option("--partition", "partition_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False),
              help="word<TAB>score file (default: bundled demo lexicon).")
@click.option("--min-count", type=click.IntRange(min=1), default=DEFAULT_MIN_COUNT, show_default=True)
@click.option("--min-community-size", type=click.IntRange(min=1), default=DEFAULT_MIN_COMMUNITY_SIZE,
              show_default=True)
@out_opt
def sentiment(input_path, graph_dir, partition_path, lexicon, min_count, min_community_size, out):
    """Score communities with a lexicon; top words and word counts are written too."""
    def go():
        graph = _load_graph(graph_dir)
        part = rio.read_partition(partition_path, graph)
        lex = Lexicon.from_tsv(lexicon) if lexicon else Lexicon.default()
        texts = posted_texts(read_records(input_path))
        freqs = community_word_frequencies(texts.values(), graph, part, min_count, min_community_size)
        report = community_sentiment(freqs, lex)
        sizes = part.sizes()
        d = _out_dir(out)
        rio.write_csv(d / "community_sentiment.csv",
                      ("community", "size", "weighted_sum", "normalized_score", "coverage"),
                      ((c, int(sizes[c]), r.weighted_sum, r.normalized_score, r.coverage)
                       for c, r in report.items()))
        rio.write_csv(d / "top_words.csv", ("community", "word", "score", "freq", "polarity"), (
            row for c, r in report.items() for row in
            [(c, w, s, n, "positive") for w, s, n in r.top_positive]
            + [(c, w, s, n, "negative") for w, s, n in r.top_negative]
        ))
        rio.write_csv(d / "word_freq.csv", ("community", "word", "freq"), (
            (c, w, n) for c, r in report.items() for w, n in r.word_freq.items()
        ))
        click.echo(f"{len(report)} communities scored")
    _run(go)


@main.command()
@graph_dir_opt
@partition_opt
@click.option("--format", "fmt_name", type=click.Choice(["graphml", "dot", "csv"]), required=True)
@click.option("--collapse", is_flag=True, help="Export the supernode graph of the partition.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Output file.")
def export(graph_dir, partition_path, fmt_name, collapse, out):
    """Export the graph or its supernode graph."""
    def go():
        graph = _load_graph(graph_dir)
        part = rio.read_partition(partition_path, graph) if partition_path else None
        if collapse and part is None:
            raise click.UsageError("--collapse requires --partition")
        written = rio.export_graph(graph, fmt_name, out, part, collapse)
        click.echo(f"wrote {written.n} vertices, {written.m} arcs to {out}")
    _run(go)


if __name__ == "__main__":  # pragma: no cover
    main()
