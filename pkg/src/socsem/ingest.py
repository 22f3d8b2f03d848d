"""Ingestion of actor/attribute declarations into a binary incidence matrix.

The input is a delimited text file with one declaration per line::

    actor,attribute

Labels are whitespace-trimmed and case-folded, duplicate declarations are
collapsed, the vocabulary is cut to the ``k`` most frequent attributes
(frequency = number of distinct actors declaring the attribute), and the
resulting 0/1 matrix is cleaned of constant rows and columns, cascading,
so that every surviving row and column contains both a 0 and a 1.  Rows
follow first appearance of each actor; columns are ordered by column sum
descending, ties broken lexicographically.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDataError, ParseError, ValidationError

__all__ = [
    "BipartitePairs",
    "IncidenceMatrix",
    "DropRecord",
    "DropReport",
    "parse_pairs",
    "top_k_attributes",
    "build_incidence",
    "write_pairs",
]


@dataclass(frozen=True)
class BipartitePairs:
    """Deduplicated (actor, attribute) declarations in input order."""

    records: tuple[tuple[str, str], ...]
    source_name: str = "<pairs>"

    def __post_init__(self):
        for actor, attribute in self.records:
            if not actor or not attribute:
                raise ValidationError("empty actor or attribute label in records")
        if len(set(self.records)) != len(self.records):
            raise ValidationError("duplicate (actor, attribute) records")

    def __len__(self) -> int:
        return len(self.records)

    def actors(self) -> tuple[str, ...]:
        """Distinct actors in order of first appearance."""
        return tuple(dict.fromkeys(actor for actor, _ in self.records))

    def attribute_frequencies(self) -> dict[str, int]:
        """Distinct-actor count per attribute (records are unique pairs)."""
        return dict(Counter(attribute for _, attribute in self.records))


@dataclass(frozen=True)
class IncidenceMatrix:
    """Binary actor-by-attribute matrix with label vectors.

    Attributes
    ----------
    entries : numpy.ndarray
        uint8 array of shape (n_actors, n_attributes) containing 0/1.
    actor_labels, attribute_labels : tuple of str
        Row and column labels, unique within their axis.

    Every row and every column contains at least one 0 and one 1; this is
    what downstream centering relies on.
    """

    entries: np.ndarray
    actor_labels: tuple[str, ...]
    attribute_labels: tuple[str, ...]

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.uint8)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2:
            raise ValidationError("entries must be a 2-D array")
        if entries.shape != (len(self.actor_labels), len(self.attribute_labels)):
            raise ValidationError(
                f"entries shape {entries.shape} does not match "
                f"{len(self.actor_labels)} actors x {len(self.attribute_labels)} attributes"
            )
        if len(set(self.actor_labels)) != len(self.actor_labels):
            raise ValidationError("duplicate actor labels")
        if len(set(self.attribute_labels)) != len(self.attribute_labels):
            raise ValidationError("duplicate attribute labels")
        if entries.size == 0:
            raise ValidationError("empty incidence matrix")
        if entries.max() > 1:
            raise ValidationError("entries must be binary")
        row_sums = entries.sum(axis=1)
        col_sums = entries.sum(axis=0)
        if (row_sums == 0).any() or (row_sums == entries.shape[1]).any():
            raise ValidationError("constant row in incidence matrix")
        if (col_sums == 0).any() or (col_sums == entries.shape[0]).any():
            raise ValidationError("constant column in incidence matrix")
        entries.flags.writeable = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def to_pairs(self, source_name: str = "<incidence>") -> BipartitePairs:
        """Emit the matrix back as declarations, row-major.

        Rebuilding an incidence matrix from this pair list reproduces the
        matrix and both label orders exactly.
        """
        records = [
            (self.actor_labels[i], self.attribute_labels[j])
            for i, j in np.argwhere(self.entries)
        ]
        return BipartitePairs(tuple(records), source_name=source_name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IncidenceMatrix):
            return NotImplemented
        return (
            self.actor_labels == other.actor_labels
            and self.attribute_labels == other.attribute_labels
            and np.array_equal(self.entries, other.entries)
        )


@dataclass(frozen=True)
class DropRecord:
    """One row or column removed by the constant-line cascade."""

    axis: str  # "row" | "column"
    label: str
    reason: str  # "all-zeros" | "all-ones"

    def __str__(self) -> str:
        return f"dropped {self.axis} {self.label}: {self.reason}"


@dataclass(frozen=True)
class DropReport:
    """Cascade removals in the order they happened."""

    entries: tuple[DropRecord, ...] = field(default_factory=tuple)

    def to_text(self) -> str:
        """One line per removal; empty string when nothing was dropped."""
        if not self.entries:
            return ""
        return "\n".join(str(e) for e in self.entries) + "\n"


def _normalize_label(raw: str) -> str:
    return raw.strip().casefold()


def parse_pairs(
    source: io.TextIOBase | str,
    *,
    delimiter: str = ",",
    skip_header: bool = False,
    source_name: str | None = None,
) -> BipartitePairs:
    """Parse delimited actor/attribute declarations.

    Parameters
    ----------
    source : text file object or str
        UTF-8 text, one record per line with exactly two fields.
    delimiter : str
        Single-character field separator (comma by default, tab is the
        other common choice).
    skip_header : bool
        Discard the first line before parsing records.

    Labels are trimmed and case-folded; duplicate declarations collapse to
    the first occurrence.  Raises :class:`ParseError` naming the 1-based
    line number for malformed lines, and for inputs with no records at all.
    """
    if len(delimiter) != 1:
        raise ValidationError("delimiter must be a single character")
    if isinstance(source, str):
        source = io.StringIO(source)
    if source_name is None:
        source_name = getattr(source, "name", "<stream>")

    reader = csv.reader(source, delimiter=delimiter)
    records: dict[tuple[str, str], None] = {}
    for row in reader:
        if skip_header and reader.line_num == 1:
            continue
        if len(row) != 2:
            raise ParseError(
                f"expected 2 fields, got {len(row)}", line=reader.line_num
            )
        actor = _normalize_label(row[0])
        attribute = _normalize_label(row[1])
        if not actor or not attribute:
            raise ParseError(
                "empty actor or attribute after trimming", line=reader.line_num
            )
        records.setdefault((actor, attribute), None)
    if not records:
        raise ParseError(f"no records in {source_name}")
    return BipartitePairs(tuple(records), source_name=source_name)


def write_pairs(pairs: BipartitePairs, dest: io.TextIOBase, *, delimiter: str = ",") -> None:
    """Write declarations back out as delimited text (one per line)."""
    writer = csv.writer(dest, delimiter=delimiter, lineterminator="\n")
    writer.writerows(pairs.records)


def top_k_attributes(pairs: BipartitePairs, k: int) -> BipartitePairs:
    """Keep only declarations whose attribute is among the ``k`` most frequent.

    Frequency is the number of distinct actors declaring the attribute;
    ties at the cutoff break lexicographically.  ``k`` must be at least 1;
    a ``k`` beyond the vocabulary size keeps everything.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    frequencies = pairs.attribute_frequencies()
    ranked = sorted(frequencies.items(), key=lambda item: (-item[1], item[0]))
    keep = {attribute for attribute, _ in ranked[:k]}
    records = tuple(r for r in pairs.records if r[1] in keep)
    return BipartitePairs(records, source_name=pairs.source_name)


def build_incidence(pairs: BipartitePairs) -> tuple[IncidenceMatrix, DropReport]:
    """Assemble the binary incidence matrix and clean constant lines.

    Rows are actors in order of first appearance, columns are attributes by
    frequency descending (ties lexicographic).  All-zero and all-one rows
    and columns are removed, cascading until none remain; every removal is
    reported.  Surviving columns are re-ordered by their column sum inside
    the final matrix (descending, ties lexicographic), which keeps the
    ordering rule and bit-exact rebuildability from :meth:`IncidenceMatrix.to_pairs`
    consistent even after drops.

    Raises :class:`DegenerateDataError` when the cascade consumes everything.
    """
    if not pairs.records:
        raise ValidationError("pairs must be non-empty")

    actor_order = list(pairs.actors())
    frequencies = pairs.attribute_frequencies()
    attribute_order = sorted(frequencies, key=lambda a: (-frequencies[a], a))
    actor_index = {a: i for i, a in enumerate(actor_order)}
    attribute_index = {t: j for j, t in enumerate(attribute_order)}

    matrix = np.zeros((len(actor_order), len(attribute_order)), dtype=np.uint8)
    for actor, attribute in pairs.records:
        matrix[actor_index[actor], attribute_index[attribute]] = 1

    actors = list(actor_order)
    attributes = list(attribute_order)
    drops: list[DropRecord] = []

    def _drop_constant(axis: str) -> bool:
        nonlocal matrix, actors, attributes
        labels = actors if axis == "row" else attributes
        sums = matrix.sum(axis=1 if axis == "row" else 0, dtype=np.int64)
        full = matrix.shape[1] if axis == "row" else matrix.shape[0]
        keep = [i for i in range(len(labels)) if 0 < sums[i] < full]
        if len(keep) == len(labels):
            return False
        keep_set = set(keep)
        for i in range(len(labels)):
            if i not in keep_set:
                reason = "all-zeros" if sums[i] == 0 else "all-ones"
                drops.append(DropRecord(axis, labels[i], reason))
        if not keep:
            raise DegenerateDataError(
                "degenerate dataset: constant-line cascade removed every "
                + ("actor" if axis == "row" else "attribute")
            )
        if axis == "row":
            matrix = matrix[keep, :]
            actors = [labels[i] for i in keep]
        else:
            matrix = matrix[:, keep]
            attributes = [labels[i] for i in keep]
        return True

    while True:
        changed = _drop_constant("row")
        changed = _drop_constant("column") or changed
        if not changed:
            break

    # Final column order: sum desc, label asc (matches the initial
    # frequency order when nothing was dropped).
    col_sums = matrix.sum(axis=0)
    order = sorted(range(len(attributes)), key=lambda j: (-int(col_sums[j]), attributes[j]))
    matrix = matrix[:, order]
    attributes = [attributes[j] for j in order]

    incidence = IncidenceMatrix(matrix, tuple(actors), tuple(attributes))
    return incidence, DropReport(tuple(drops))
