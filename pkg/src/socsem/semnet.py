"""Semantic networks: thresholding a similarity matrix and reading it.

A similarity matrix becomes an undirected weighted graph by keeping every
off-diagonal entry at or above a cut ``tau`` in (0, 1).  Nodes are the
matrix labels (isolated ones included, so networks built from the same
vocabulary stay comparable); edge weights are the similarities, capped at
1.  On top of that graph live the small reports used to read it: density,
a degree ranking, and bridge nodes whose neighborhoods span several
clusters of a supplied partition.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError
from .simcore import SimilarityMatrix

__all__ = [
    "SemanticNetwork",
    "PartitionMap",
    "DegreeEntry",
    "BridgeEntry",
    "threshold_network",
    "density",
    "degree_report",
    "bridge_report",
    "read_partition",
    "write_partition",
]


def edge_key(a: str, b: str) -> tuple[str, str]:
    """Canonical (sorted) endpoint pair for an undirected edge."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True, eq=False)
class SemanticNetwork:
    """Undirected weighted graph over labelled nodes.

    Attributes
    ----------
    nodes : tuple of str
        Unique labels; order is whatever produced the network (exports
        sort, and equality ignores it).
    edges : dict
        Maps canonical label pairs ``(a, b)`` with ``a < b`` to weights in
        (0, 1].  A missing pair means weight 0.
    provenance : str
        Free-text note on where the network came from; not part of
        equality.
    """

    nodes: tuple[str, ...]
    edges: dict[tuple[str, str], float]
    provenance: str = ""

    def __post_init__(self):
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValidationError("duplicate node labels")
        if any(not n for n in self.nodes):
            raise ValidationError("empty node label")
        for (a, b), w in self.edges.items():
            if a >= b:
                raise ValidationError(
                    f"edge ({a!r}, {b!r}) endpoints must be strictly ordered"
                )
            if a not in node_set or b not in node_set:
                raise ValidationError(f"edge ({a!r}, {b!r}) references unknown node")
            if not (isinstance(w, float) and np.isfinite(w) and 0.0 < w <= 1.0):
                raise ValidationError(
                    f"edge ({a!r}, {b!r}) weight {w!r} outside (0, 1]"
                )

    def __eq__(self, other) -> bool:
        # Provenance and node order are bookkeeping, not identity.
        if not isinstance(other, SemanticNetwork):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and self.edges == other.edges

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_node(self, label: str) -> bool:
        return label in set(self.nodes)

    def weight(self, a: str, b: str) -> float:
        """Edge weight, 0.0 when the edge is absent."""
        return self.edges.get(edge_key(a, b), 0.0)

    def neighbors(self) -> dict[str, list[str]]:
        """Adjacency lists with neighbors sorted lexicographically."""
        adjacency: dict[str, list[str]] = {n: [] for n in self.nodes}
        for a, b in self.edges:
            adjacency[a].append(b)
            adjacency[b].append(a)
        for lst in adjacency.values():
            lst.sort()
        return adjacency


def threshold_network(matrix: SimilarityMatrix, tau: float) -> SemanticNetwork:
    """Keep every attribute pair whose similarity reaches ``tau``.

    ``tau`` must lie strictly inside (0, 1); the comparison is inclusive
    (an entry exactly equal to ``tau`` becomes an edge).  All labels stay
    as nodes even when isolated.  Weights above 1 from rounding slack are
    capped at 1 so they satisfy the network invariant.
    """
    if matrix.mode != "attribute":
        raise ValidationError("threshold_network expects an attribute-mode matrix")
    if not (0.0 < tau < 1.0):
        raise ValidationError(f"tau must be inside (0, 1), got {tau}")
    labels = matrix.labels
    n = matrix.n
    values = matrix.values
    edges: dict[tuple[str, str], float] = {}
    pos = 0
    for i in range(n):
        segment = values[pos + 1 : pos + n - i]
        for offset in np.flatnonzero(segment >= tau):
            j = i + 1 + int(offset)
            edges[edge_key(labels[i], labels[j])] = min(float(segment[offset]), 1.0)
        pos += n - i
    provenance = f"threshold tau={tau!r} over {n} attribute labels"
    return SemanticNetwork(labels, edges, provenance)


def density(network: SemanticNetwork) -> float:
    """Fraction of possible edges present; needs at least two nodes."""
    n = network.node_count
    if n < 2:
        raise ValidationError("density needs at least 2 nodes")
    return network.edge_count / (n * (n - 1) / 2)


@dataclass(frozen=True)
class DegreeEntry:
    label: str
    degree: int
    strength: float  # sum of incident edge weights


def degree_report(network: SemanticNetwork) -> tuple[DegreeEntry, ...]:
    """All nodes ranked by degree descending, ties lexicographic."""
    degrees = {n: 0 for n in network.nodes}
    strengths = {n: 0.0 for n in network.nodes}
    for (a, b), weight in network.edges.items():
        degrees[a] += 1
        degrees[b] += 1
        strengths[a] += weight
        strengths[b] += weight
    ranked = sorted(degrees.items(), key=lambda item: (-item[1], item[0]))
    return tuple(
        DegreeEntry(label, degree, strengths[label]) for label, degree in ranked
    )


@dataclass(frozen=True)
class PartitionMap:
    """Assignment of node labels to named clusters."""

    assignments: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for label, cluster in self.assignments.items():
            if not label or not cluster:
                raise ValidationError("empty label or cluster name in partition")

    def cluster_of(self, label: str) -> str | None:
        return self.assignments.get(label)


def read_partition(source: io.TextIOBase | str) -> PartitionMap:
    """Read a ``label,cluster`` CSV; a ``label,cluster`` header line is optional.

    Re-assigning a label to a different cluster is an error; repeating an
    assignment is collapsed.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    assignments: dict[str, str] = {}
    for row in reader:
        if reader.line_num == 1 and [f.strip().casefold() for f in row] == ["label", "cluster"]:
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line=reader.line_num)
        label, cluster = row[0].strip(), row[1].strip()
        if not label or not cluster:
            raise ParseError("empty label or cluster", line=reader.line_num)
        if assignments.get(label, cluster) != cluster:
            raise ParseError(
                f"label {label!r} assigned to both {assignments[label]!r} and {cluster!r}",
                line=reader.line_num,
            )
        assignments[label] = cluster
    return PartitionMap(assignments)


def write_partition(partition: PartitionMap, dest: io.TextIOBase) -> None:
    """Write assignments as ``label,cluster`` CSV with a header."""
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(["label", "cluster"])
    writer.writerows(sorted(partition.assignments.items()))


@dataclass(frozen=True)
class BridgeEntry:
    label: str
    clusters: tuple[str, ...]  # sorted cluster names seen among neighbors

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)


def bridge_report(
    network: SemanticNetwork, partition: PartitionMap
) -> tuple[BridgeEntry, ...]:
    """Nodes whose neighbors span at least two clusters.

    Sorted by number of spanned clusters descending, then label.  Every
    network node must be assigned in the partition; unassigned ones raise
    with the full sorted list of missing labels.
    """
    adjacency = network.neighbors()
    missing = sorted(
        label for label in network.nodes if partition.cluster_of(label) is None
    )
    if missing:
        raise ValidationError(
            "partition is missing assignments for: " + ", ".join(missing)
        )
    entries = []
    for label in network.nodes:
        spanned = {partition.assignments[nbr] for nbr in adjacency[label]}
        if len(spanned) >= 2:
            entries.append(BridgeEntry(label, tuple(sorted(spanned))))
    entries.sort(key=lambda e: (-e.cluster_count, e.label))
    return tuple(entries)
