"""Readers and writers for the on-disk formats.

* ``graph.csv``    ``tail,head,weight`` with internal vertex indices
* ``vertices.csv`` ``internal_index,external_id``
* ``partition.csv`` ``vertex_external_id,community_id``
* ``cascades.csv`` ``tweet_id,author,total_retweets,distinct_retweeters,first_seen``
* ``retweets.csv`` ``tweet_id,retweeter,count`` (per-retweeter cascade detail)
* GraphML and DOT exports

All CSVs carry a header and floats are written with 12 significant digits.
"""

from __future__ import annotations

import csv
import os
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractViolation, ParseError
from .graph import Partition, WeightedDigraph
from .ingest import TweetCascade


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def read_csv(path, header: Sequence[str]) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in first] != list(header):
            raise ParseError(f"{path}: expected header {','.join(header)}, got {','.join(first)}", 1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: expected {len(header)} fields", lineno)
            rows.append(row)
        return rows


# -- graph ---------------------------------------------------------------------

EDGE_HEADER = ("tail", "head", "weight")
VERTEX_HEADER = ("internal_index", "external_id")


def write_graph(graph: WeightedDigraph, graph_path, vertices_path=None) -> None:
    write_csv(graph_path, EDGE_HEADER,
              zip(graph.tails.tolist(), graph.heads.tolist(), graph.weights.tolist()))
    if vertices_path is not None:
        write_csv(vertices_path, VERTEX_HEADER, enumerate(graph.ids))


def read_graph(graph_path, vertices_path=None) -> WeightedDigraph:
    """Read ``graph.csv`` (and the ``vertices.csv`` sidecar when present)."""
    if vertices_path is None:
        cand = Path(graph_path).with_name("vertices.csv")
        vertices_path = cand if cand.exists() else None
    edges = read_csv(graph_path, EDGE_HEADER)
    try:
        tails = np.array([int(r[0]) for r in edges], dtype=np.int64)
        heads = np.array([int(r[1]) for r in edges], dtype=np.int64)
        weights = np.array([int(r[2]) for r in edges], dtype=np.int64)
    except ValueError as exc:
        raise ParseError(f"{graph_path}: non-integer field ({exc})") from None
    if vertices_path is not None:
        vrows = read_csv(vertices_path, VERTEX_HEADER)
        ids = [None] * len(vrows)
        for r in vrows:
            i = int(r[0])
            if not 0 <= i < len(vrows) or ids[i] is not None:
                raise ParseError(f"{vertices_path}: bad or duplicate index {i}")
            ids[i] = r[1]
    else:
        n = int(max(tails.max(initial=-1), heads.max(initial=-1))) + 1
        ids = [str(i) for i in range(n)]
    return WeightedDigraph(ids, tails, heads, weights)


# -- partition -----------------------------------------------------------------

PARTITION_HEADER = ("vertex_external_id", "community_id")


def write_partition(graph: WeightedDigraph, partition: Partition, path) -> None:
    partition.check(graph)
    write_csv(path, PARTITION_HEADER, zip(graph.ids, partition.labels.tolist()))


def read_partition(path, graph: WeightedDigraph) -> Partition:
    rows = read_csv(path, PARTITION_HEADER)
    mapping = {}
    for vid, c in rows:
        if vid in mapping:
            raise ContractViolation(f"vertex {vid!r} assigned twice in {path}")
        mapping[vid] = int(c)
    if len(mapping) != graph.n:
        raise ContractViolation(f"{path} covers {len(mapping)} vertices, graph has {graph.n}")
    return Partition.from_mapping(graph, mapping)


# -- cascades ------------------------------------------------------------------

CASCADE_HEADER = ("tweet_id", "author", "total_retweets", "distinct_retweeters", "first_seen")
RETWEET_HEADER = ("tweet_id", "retweeter", "count")


def write_cascades(graph: WeightedDigraph, cascades: Mapping[str, TweetCascade],
                   path, retweets_path=None) -> None:
    ids = graph.ids
    write_csv(path, CASCADE_HEADER, (
        (c.tweet_id, ids[c.author], c.total_retweets, c.distinct_retweeters, c.first_seen)
        for c in cascades.values()
    ))
    if retweets_path is not None:
        write_csv(retweets_path, RETWEET_HEADER, (
            (c.tweet_id, ids[j], cnt)
            for c in cascades.values() for j, cnt in c.retweeters.items()
        ))


def read_cascades(path, graph: WeightedDigraph, retweets_path=None) -> dict[str, TweetCascade]:
    out = {}
    for tid, author, _total, _distinct, first_seen in read_csv(path, CASCADE_HEADER):
        ts = float(first_seen) if first_seen else None
        if ts is not None and ts.is_integer():
            ts = int(ts)
        out[tid] = TweetCascade(tid, graph.index(author), {}, ts)
    if retweets_path is None:
        cand = Path(path).with_name("retweets.csv")
        retweets_path = cand if cand.exists() else None
    if retweets_path is not None:
        for tid, who, cnt in read_csv(retweets_path, RETWEET_HEADER):
            out[tid].retweeters[graph.index(who)] = int(cnt)
    return out


# -- exports -------------------------------------------------------------------

_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def write_graphml(graph: WeightedDigraph, path, node_sizes=None) -> None:
    ET.register_namespace("", _GRAPHML_NS)
    root = ET.Element(f"{{{_GRAPHML_NS}}}graphml")
    ET.SubElement(root, f"{{{_GRAPHML_NS}}}key", id="weight", attrib={
        "for": "edge", "attr.name": "weight", "attr.type": "long"})
    if node_sizes is not None:
        ET.SubElement(root, f"{{{_GRAPHML_NS}}}key", id="size", attrib={
            "for": "node", "attr.name": "size", "attr.type": "long"})
    g = ET.SubElement(root, f"{{{_GRAPHML_NS}}}graph", id="G", edgedefault="directed")
    for i, vid in enumerate(graph.ids):
        node = ET.SubElement(g, f"{{{_GRAPHML_NS}}}node", id=vid)
        if node_sizes is not None:
            ET.SubElement(node, f"{{{_GRAPHML_NS}}}data", key="size").text = str(int(node_sizes[i]))
    for t, h, w in graph.arcs():
        e = ET.SubElement(g, f"{{{_GRAPHML_NS}}}edge", source=t, target=h)
        ET.SubElement(e, f"{{{_GRAPHML_NS}}}data", key="weight").text = str(w)
    ET.indent(root)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)


def read_graphml(path) -> WeightedDigraph:
    """Read a directed GraphML file with an integer ``weight`` edge attribute."""
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
    ns = {"g": _GRAPHML_NS}
    weight_key = None
    for key in root.findall("g:key", ns):
        if key.get("for") == "edge" and key.get("attr.name") == "weight":
            weight_key = key.get("id")
    graph_el = root.find("g:graph", ns)
    if graph_el is None:
        raise ParseError(f"{path}: no <graph> element")
    vertices = [node.get("id") for node in graph_el.findall("g:node", ns)]
    arcs = []
    for e in graph_el.findall("g:edge", ns):
        w = 1
        for d in e.findall("g:data", ns):
            if d.get("key") == weight_key:
                w = int(d.text)
        arcs.append((e.get("source"), e.get("target"), w))
    return WeightedDigraph.from_arcs(arcs, vertices=vertices)


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(graph: WeightedDigraph, path, node_sizes=None) -> None:
    lines = ["digraph G {"]
    for i, vid in enumerate(graph.ids):
        if node_sizes is not None:
            lines.append(f"  {_dot_id(vid)} [size={int(node_sizes[i])}];")
        else:
            lines.append(f"  {_dot_id(vid)};")
    for t, h, w in graph.arcs():
        lines.append(f"  {_dot_id(t)} -> {_dot_id(h)} [weight={w}];")
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def export_graph(graph: WeightedDigraph, fmt_name: str, path,
                 partition: Partition | None = None, collapse: bool = False) -> WeightedDigraph:
    """Write ``graph`` (or its supernode graph) in ``graphml``, ``dot`` or ``csv`` format.

    For ``csv`` the vertex map is written next to ``path`` as
    ``<stem>.vertices.csv`` and, when collapsing, community sizes as
    ``<stem>.sizes.csv``.  Returns the graph that was written.
    """
    sizes = None
    if collapse:
        if partition is None:
            raise ContractViolation("--collapse needs a partition")
        sizes = partition.sizes()
        graph = graph.collapse(partition)
    path = Path(path)
    if fmt_name == "graphml":
        write_graphml(graph, path, sizes)
    elif fmt_name == "dot":
        write_dot(graph, path, sizes)
    elif fmt_name == "csv":
        stem = path.with_suffix("")
        write_graph(graph, path, os.fspath(stem) + ".vertices.csv")
        if sizes is not None:
            write_csv(os.fspath(stem) + ".sizes.csv", ("community", "size"), enumerate(sizes.tolist()))
    else:
        raise ContractViolation(f"unknown export format {fmt_name!r}")
    return graph
