"""Reading, writing, and summarizing networks and similarity matrices.

Formats
-------
GEXF 1.2 (draft namespace)
    Static undirected graph, nodes sorted lexicographically, edges sorted
    by endpoints, provenance carried in ``meta/description``.  No
    timestamps are emitted, so writes are byte-deterministic.
edge list CSV
    ``source,target,weight`` rows sorted by endpoints, preceded by one
    single-field row per isolated node (sorted), so the node set survives
    the round trip.  Weights print via ``repr`` (shortest digits that
    round-trip exactly).
GSIM
    Binary container for a packed similarity matrix: magic ``GSIM``,
    little-endian u32 version (1), u8 mode tag (0 attribute / 1 actor),
    u32 label count, length-prefixed UTF-8 labels, then the packed upper
    triangle as little-endian float64.
stats
    Flat JSON summary of a network with a fixed key order.

Readers validate hard: unknown endpoints, self-loops, duplicate edges,
weights outside (0, 1], truncated binary payloads all raise
:class:`~socsem.errors.ParseError` / :class:`~socsem.errors.ValidationError`
with a location when one exists.
"""

from __future__ import annotations

import csv
import io
import json
import math
import struct
import xml.etree.ElementTree as ElementTree
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .packed import packed_length
from .semnet import SemanticNetwork, edge_key
from .simcore import MODES, SimilarityMatrix

__all__ = [
    "NetworkStats",
    "write_gexf",
    "write_edgelist",
    "read_network",
    "stats",
    "write_matrix",
    "read_matrix",
    "write_matrix_csv",
]

GEXF_NAMESPACE = "http://www.gexf.net/1.2draft"

_MATRIX_MAGIC = b"GSIM"
_MATRIX_VERSION = 1
_MODE_TAGS = {mode: tag for tag, mode in enumerate(MODES)}


def _open_bytes_sink(dest):
    if isinstance(dest, (str, Path)):
        return open(dest, "wb"), True
    return dest, False


def _open_bytes_source(source):
    if isinstance(source, (str, Path)):
        return open(source, "rb"), True
    return source, False


def _open_text_sink(dest):
    if isinstance(dest, (str, Path)):
        return open(dest, "w", encoding="utf-8", newline=""), True
    return dest, False


def _open_text_source(source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    return source, False


def _format_weight(weight: float) -> str:
    return repr(float(weight))


# ---------------------------------------------------------------------------
# GEXF


def write_gexf(network: SemanticNetwork, dest) -> None:
    """Write a network as GEXF 1.2; ``dest`` is a path or binary file."""
    root = ElementTree.Element("gexf", {"xmlns": GEXF_NAMESPACE, "version": "1.2"})
    meta = ElementTree.SubElement(root, "meta")
    ElementTree.SubElement(meta, "creator").text = "socsem"
    ElementTree.SubElement(meta, "description").text = network.provenance
    graph = ElementTree.SubElement(
        root, "graph", {"mode": "static", "defaultedgetype": "undirected"}
    )
    nodes = ElementTree.SubElement(graph, "nodes")
    for label in sorted(network.nodes):
        ElementTree.SubElement(nodes, "node", {"id": label, "label": label})
    edges = ElementTree.SubElement(graph, "edges")
    for index, (a, b) in enumerate(sorted(network.edges)):
        ElementTree.SubElement(
            edges,
            "edge",
            {
                "id": str(index),
                "source": a,
                "target": b,
                "weight": _format_weight(network.edges[(a, b)]),
            },
        )
    tree = ElementTree.ElementTree(root)
    ElementTree.indent(tree, space="  ")
    sink, owned = _open_bytes_sink(dest)
    try:
        tree.write(sink, encoding="UTF-8", xml_declaration=True)
        sink.write(b"\n")
    finally:
        if owned:
            sink.close()


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children_named(element, name: str):
    return [child for child in element if _local_name(child.tag) == name]


def _read_gexf(source) -> SemanticNetwork:
    stream, owned = _open_bytes_source(source)
    try:
        try:
            tree = ElementTree.parse(stream)
        except ElementTree.ParseError as exc:
            raise ParseError(f"not well-formed GEXF: {exc}") from exc
    finally:
        if owned:
            stream.close()
    root = tree.getroot()
    if _local_name(root.tag) != "gexf":
        raise ParseError(f"expected <gexf> root, found <{_local_name(root.tag)}>")
    provenance = ""
    for meta in _children_named(root, "meta"):
        for description in _children_named(meta, "description"):
            provenance = description.text or ""
    graphs = _children_named(root, "graph")
    if len(graphs) != 1:
        raise ParseError(f"expected exactly one <graph>, found {len(graphs)}")
    graph = graphs[0]

    labels: list[str] = []
    for nodes in _children_named(graph, "nodes"):
        for node in _children_named(nodes, "node"):
            node_id = node.get("id")
            if node_id is None:
                raise ParseError("node without id")
            labels.append(node.get("label", node_id))
    node_set = set(labels)
    if len(node_set) != len(labels):
        raise ParseError("duplicate node in GEXF")

    edges: dict[tuple[str, str], float] = {}
    for container in _children_named(graph, "edges"):
        for edge in _children_named(container, "edge"):
            source_id = edge.get("source")
            target_id = edge.get("target")
            if source_id is None or target_id is None:
                raise ParseError("edge without source/target")
            where = f"edge {source_id!r}--{target_id!r}"
            if source_id not in node_set or target_id not in node_set:
                raise ParseError(f"{where}: unknown endpoint")
            if source_id == target_id:
                raise ParseError(f"{where}: self-loop")
            raw_weight = edge.get("weight", "1")
            try:
                weight = float(raw_weight)
            except ValueError:
                raise ParseError(f"{where}: bad weight {raw_weight!r}") from None
            if not (math.isfinite(weight) and 0.0 < weight <= 1.0):
                raise ParseError(f"{where}: weight {raw_weight} outside (0, 1]")
            key = edge_key(source_id, target_id)
            if key in edges:
                raise ParseError(f"{where}: duplicate edge")
            edges[key] = weight
    return SemanticNetwork(tuple(labels), edges, provenance)


# ---------------------------------------------------------------------------
# Edge list CSV


def write_edgelist(network: SemanticNetwork, dest) -> None:
    """Write ``source,target,weight`` CSV; ``dest`` is a path or text file.

    Isolated nodes come first as single-field rows so the full node set
    round-trips; then the edges, both groups sorted.
    """
    connected: set[str] = set()
    for a, b in network.edges:
        connected.add(a)
        connected.add(b)
    sink, owned = _open_text_sink(dest)
    try:
        writer = csv.writer(sink, lineterminator="\n")
        for label in sorted(set(network.nodes) - connected):
            writer.writerow([label])
        for a, b in sorted(network.edges):
            writer.writerow([a, b, _format_weight(network.edges[(a, b)])])
    finally:
        if owned:
            sink.close()


def _read_edgelist(source) -> SemanticNetwork:
    stream, owned = _open_text_source(source)
    try:
        reader = csv.reader(stream)
        declared: list[str] = []
        declared_set: set[str] = set()
        edges: dict[tuple[str, str], float] = {}
        endpoints: list[str] = []
        seen_endpoints: set[str] = set()
        for row in reader:
            line = reader.line_num
            if len(row) == 1:
                label = row[0]
                if not label:
                    raise ParseError("empty node label", line=line)
                if label in declared_set:
                    raise ParseError(f"node {label!r} declared twice", line=line)
                declared.append(label)
                declared_set.add(label)
            elif len(row) == 3:
                a, b, raw_weight = row
                if not a or not b:
                    raise ParseError("empty endpoint label", line=line)
                if a == b:
                    raise ParseError(f"self-loop on {a!r}", line=line)
                try:
                    weight = float(raw_weight)
                except ValueError:
                    raise ParseError(f"bad weight {raw_weight!r}", line=line) from None
                if not (math.isfinite(weight) and 0.0 < weight <= 1.0):
                    raise ParseError(
                        f"weight {raw_weight} outside (0, 1]", line=line
                    )
                key = edge_key(a, b)
                if key in edges:
                    raise ParseError(f"duplicate edge {a!r}--{b!r}", line=line)
                edges[key] = weight
                for label in (a, b):
                    if label not in seen_endpoints:
                        seen_endpoints.add(label)
                        endpoints.append(label)
            else:
                raise ParseError(f"expected 1 or 3 fields, got {len(row)}", line=line)
    finally:
        if owned:
            stream.close()
    nodes = declared + [label for label in endpoints if label not in declared_set]
    return SemanticNetwork(tuple(nodes), edges, "")


def read_network(source, format: str) -> SemanticNetwork:
    """Read a network from ``source`` in ``format`` ("gexf" or "edgelist")."""
    if format == "gexf":
        return _read_gexf(source)
    if format == "edgelist":
        return _read_edgelist(source)
    raise ValidationError(f"unknown network format {format!r}")


# ---------------------------------------------------------------------------
# Network stats


@dataclass(frozen=True)
class NetworkStats:
    """Flat summary of a network; undefined values are ``None``."""

    node_count: int
    non_isolated_node_count: int
    edge_count: int
    density: float | None
    weight_min: float | None
    weight_max: float | None
    weight_mean: float | None

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "non_isolated_node_count": self.non_isolated_node_count,
            "edge_count": self.edge_count,
            "density": self.density,
            "weight_min": self.weight_min,
            "weight_max": self.weight_max,
            "weight_mean": self.weight_mean,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def stats(network: SemanticNetwork) -> NetworkStats:
    """Node/edge counts, density, and the weight range of a network.

    Density is ``None`` for networks with fewer than 2 nodes, the weight
    fields are ``None`` when there are no edges.
    """
    n = network.node_count
    connected: set[str] = set()
    for a, b in network.edges:
        connected.add(a)
        connected.add(b)
    weights = sorted(network.edges.values())
    return NetworkStats(
        node_count=n,
        non_isolated_node_count=len(connected),
        edge_count=network.edge_count,
        density=network.edge_count / (n * (n - 1) / 2) if n >= 2 else None,
        weight_min=weights[0] if weights else None,
        weight_max=weights[-1] if weights else None,
        weight_mean=sum(weights) / len(weights) if weights else None,
    )


# ---------------------------------------------------------------------------
# GSIM similarity matrix container


def write_matrix(matrix: SimilarityMatrix, dest) -> None:
    """Serialize a similarity matrix to the GSIM binary container.

    The payload is always little-endian float64, whatever the in-memory
    storage dtype; writing is byte-deterministic.
    """
    sink, owned = _open_bytes_sink(dest)
    try:
        sink.write(_MATRIX_MAGIC)
        sink.write(struct.pack("<IBI", _MATRIX_VERSION, _MODE_TAGS[matrix.mode], matrix.n))
        for label in matrix.labels:
            encoded = label.encode("utf-8")
            sink.write(struct.pack("<I", len(encoded)))
            sink.write(encoded)
        sink.write(np.ascontiguousarray(matrix.values, dtype="<f8").tobytes())
    finally:
        if owned:
            sink.close()


def read_matrix(source) -> SimilarityMatrix:
    """Read a GSIM container back into a similarity matrix."""
    stream, owned = _open_bytes_source(source)
    try:
        data = stream.read()
    finally:
        if owned:
            stream.close()

    def take(count: int, what: str) -> bytes:
        nonlocal offset
        if offset + count > len(data):
            raise ParseError(f"truncated GSIM data while reading {what}")
        chunk = data[offset : offset + count]
        offset += count
        return chunk

    offset = 0
    if take(4, "magic") != _MATRIX_MAGIC:
        raise ParseError("not a GSIM file (bad magic)")
    version, mode_tag, n = struct.unpack("<IBI", take(9, "header"))
    if version != _MATRIX_VERSION:
        raise ParseError(f"unsupported GSIM version {version}")
    modes_by_tag = {tag: mode for mode, tag in _MODE_TAGS.items()}
    if mode_tag not in modes_by_tag:
        raise ParseError(f"unknown GSIM mode tag {mode_tag}")
    if n == 0:
        raise ParseError("GSIM with zero labels")
    labels = []
    for i in range(n):
        (length,) = struct.unpack("<I", take(4, f"label {i} length"))
        try:
            labels.append(take(length, f"label {i}").decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise ParseError(f"label {i} is not valid UTF-8") from exc
    payload = take(8 * packed_length(n), "matrix payload")
    if offset != len(data):
        raise ParseError(f"{len(data) - offset} trailing bytes after GSIM payload")
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return SimilarityMatrix(values, tuple(labels), modes_by_tag[mode_tag])


def write_matrix_csv(matrix: SimilarityMatrix, dest) -> None:
    """Write the strict upper triangle as ``label_a,label_b,score`` CSV.

    Rows follow the matrix label order (by index pair), one per unordered
    label pair, diagonal omitted; scores print via ``repr``.
    """
    sink, owned = _open_text_sink(dest)
    try:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["label_a", "label_b", "score"])
        n = matrix.n
        pos = 0
        for i in range(n):
            for j in range(i + 1, n):
                writer.writerow(
                    [
                        matrix.labels[i],
                        matrix.labels[j],
                        _format_weight(matrix.values[pos + (j - i)]),
                    ]
                )
            pos += n - i
    finally:
        if owned:
            sink.close()
