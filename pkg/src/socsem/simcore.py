"""Population-aware similarity between attributes and between actors.

Plain Pearson correlation of two attribute columns treats every actor as
equally distinct.  Here the inner product is instead taken in the metric
of the *other* mode's similarity matrix, and the two matrices are refined
jointly: attributes are similar when similar actors declare them, actors
are similar when they declare similar attributes.  With a binary incidence
matrix ``M`` (actors x attributes), centered columns ``C`` and centered
rows ``R``, one refinement step is::

    S'[i, j] = (C^T A C)[i, j] / sqrt((C^T A C)[i, i] * (C^T A C)[j, j])
    A'[p, q] = (R S R^T)[p, q] / sqrt((R S R^T)[p, p] * (R S R^T)[q, q])

where ``S`` is the attribute-by-attribute similarity and ``A`` the
actor-by-actor one.  The fixed point is approached Jacobi style from
``S = A = I``; stopping is on the max absolute entry change of both
matrices.  Starting from the identities, the first step is exactly the
pair of Pearson correlation matrices, which is also the closed form for
a fully heterogeneous population (``A = I``).

Every iterate is symmetric with unit diagonal, entries in [-1, 1] up to a
1e-9 rounding slack, and positive semidefinite up to eigenvalue rounding:
both updates are Gram matrices of the columns of ``L^T C`` (resp. rows of
``R L``) for a factor ``L L^T`` of the metric, normalized to unit norms.

The actor matrix is quadratic in the population size, so it is stored as
a packed upper triangle (see :mod:`socsem.packed`) and the iteration works
on thin factors: the metric's PSD factor ``L`` comes from an eigendecomposition
with negative eigenvalues clipped at zero, and actor entries are formed in
fixed 512-row bands straight into the packed buffer.  The band schedule is
a constant, so results are bitwise identical for any ``workers`` value.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericError, UnknownLabelError, ValidationError
from .ingest import IncidenceMatrix
from .packed import (
    diagonal_indices,
    identity_packed,
    pack_dense,
    packed_index,
    packed_length,
    row_offset,
    unpack_packed,
)

__all__ = [
    "CenteredViews",
    "SimilarityMatrix",
    "ConvergenceReport",
    "FixedPointResult",
    "center",
    "pearson_attributes",
    "pearson_actors",
    "similarity_step",
    "run_fixed_point",
    "similarity_between",
]

MODES = ("attribute", "actor")

# Rows per band when materializing the actor matrix.  Part of the numeric
# contract: the schedule never depends on the worker count, so the same
# BLAS calls happen in every configuration and outputs are bitwise stable.
_BAND_ROWS = 512

# Tolerated overshoot of |entry| beyond 1.0 from float rounding.
RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class CenteredViews:
    """Row- and column-centered copies of one incidence matrix.

    Attributes
    ----------
    centered_rows : numpy.ndarray
        ``M`` minus its row means, shape (n_actors, n_attributes).
    centered_columns : numpy.ndarray
        ``M`` minus its column means, same shape.
    actor_labels, attribute_labels : tuple of str
        Carried through so similarity matrices can be labelled.

    Row sums of ``centered_rows`` and column sums of ``centered_columns``
    vanish to rounding; neither view contains a zero vector because the
    incidence matrix has no constant lines.
    """

    centered_rows: np.ndarray
    centered_columns: np.ndarray
    actor_labels: tuple[str, ...]
    attribute_labels: tuple[str, ...]

    def __post_init__(self):
        if self.centered_rows.shape != self.centered_columns.shape:
            raise ValidationError("centered views must share a shape")
        u, v = self.centered_rows.shape
        if (u, v) != (len(self.actor_labels), len(self.attribute_labels)):
            raise ValidationError("centered view shape does not match labels")
        if not np.abs(self.centered_rows).max(axis=1).all():
            raise ValidationError("zero vector among centered rows")
        if not np.abs(self.centered_columns).max(axis=0).all():
            raise ValidationError("zero vector among centered columns")

    @property
    def shape(self) -> tuple[int, int]:
        return self.centered_rows.shape


def center(matrix: IncidenceMatrix) -> CenteredViews:
    """Build the centered row and column views of an incidence matrix."""
    m = matrix.entries.astype(np.float64)
    rows = m - m.mean(axis=1, keepdims=True)
    columns = m - m.mean(axis=0, keepdims=True)
    return CenteredViews(rows, columns, matrix.actor_labels, matrix.attribute_labels)


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Symmetric similarity matrix in packed-triangle storage.

    Attributes
    ----------
    values : numpy.ndarray
        Upper triangle, row-major, length ``n*(n+1)/2``; float64 or float32.
    labels : tuple of str
        Axis labels, unique.
    mode : str
        ``"attribute"`` or ``"actor"``.

    The diagonal is exactly 1 and every entry lies in [-1, 1] within a
    1e-9 slack; construction rejects anything else.  Positive
    semidefiniteness (up to -1e-8 on the smallest eigenvalue) holds for
    matrices produced here but is only asserted in tests, where dense
    eigenvalues are affordable.
    """

    values: np.ndarray
    labels: tuple[str, ...]
    mode: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("duplicate labels")
        n = len(self.labels)
        if n == 0:
            raise ValidationError("similarity matrix needs at least one label")
        values = np.asarray(self.values)
        if values.dtype not in (np.float64, np.float32):
            raise ValidationError(f"unsupported dtype {values.dtype}")
        if values.shape != (packed_length(n),):
            raise ValidationError(
                f"packed length {values.shape} does not match {n} labels"
            )
        if not np.isfinite(values).all():
            raise ValidationError("non-finite similarity values")
        if (values[diagonal_indices(n)] != 1.0).any():
            raise ValidationError("diagonal must be exactly 1")
        worst = float(np.abs(values).max())
        if worst > 1.0 + RANGE_SLACK:
            raise ValidationError(f"entry magnitude {worst} exceeds 1 beyond slack")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    def is_identity(self) -> bool:
        return np.array_equal(self.values, identity_packed(self.n, self.values.dtype))

    @classmethod
    def identity(cls, labels: tuple[str, ...], mode: str, dtype=np.float64) -> SimilarityMatrix:
        return cls(identity_packed(len(labels), dtype), tuple(labels), mode)

    @classmethod
    def from_dense(cls, dense: np.ndarray, labels: tuple[str, ...], mode: str) -> SimilarityMatrix:
        dense = np.asarray(dense)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ValidationError(f"expected a square array, got shape {dense.shape}")
        if not np.array_equal(dense, dense.T):
            raise ValidationError("dense similarity matrix must be exactly symmetric")
        return cls(pack_dense(dense), tuple(labels), mode)

    def to_dense(self) -> np.ndarray:
        return unpack_packed(self.values, self.n)

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def between(self, label_a: str, label_b: str) -> float:
        i = self.index_of(label_a)
        j = self.index_of(label_b)
        return float(self.values[packed_index(i, j, self.n)])


def similarity_between(matrix: SimilarityMatrix, label_a: str, label_b: str) -> float:
    """Similarity of two labelled items; unknown labels raise."""
    return matrix.between(label_a, label_b)


@dataclass(frozen=True)
class ConvergenceReport:
    """What the fixed-point driver did.

    ``deltas`` maps each similarity mode (``"attribute"``, ``"actor"``) to
    the max absolute entry change of that matrix at each iteration;
    ``terminated_by`` is ``"tolerance"`` or ``"max_iterations"``.
    """

    iterations: int
    deltas: dict[str, tuple[float, ...]]
    terminated_by: str

    def __post_init__(self):
        if self.terminated_by not in ("tolerance", "max_iterations"):
            raise ValidationError(f"unexpected terminated_by {self.terminated_by!r}")
        if set(self.deltas) != {"attribute", "actor"}:
            raise ValidationError("deltas must trace exactly the attribute and actor matrices")
        if any(len(trace) != self.iterations for trace in self.deltas.values()):
            raise ValidationError("delta traces must have one entry per iteration")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "deltas": {mode: list(trace) for mode, trace in self.deltas.items()},
            "terminated_by": self.terminated_by,
        }


class FixedPointResult(NamedTuple):
    attribute_similarity: SimilarityMatrix
    actor_similarity: SimilarityMatrix
    report: ConvergenceReport


def _check_positive(diag: np.ndarray, labels: tuple[str, ...], what: str) -> None:
    bad = np.flatnonzero(diag <= 0)
    if bad.size:
        i = int(bad[0])
        raise NumericError(
            f"non-positive quadratic form for {what} {labels[i]!r} (index {i})"
        )


def _normalized_from_gram(
    gram: np.ndarray, labels: tuple[str, ...], what: str
) -> np.ndarray:
    """Scale a Gram matrix to unit diagonal, exactly symmetric."""
    diag = np.diagonal(gram).copy()
    _check_positive(diag, labels, what)
    scale = np.sqrt(diag)
    out = gram / np.outer(scale, scale)
    upper = np.triu_indices(out.shape[0], 1)
    out[(upper[1], upper[0])] = out[upper]  # mirror to kill gemm asymmetry
    np.fill_diagonal(out, 1.0)
    return out


def _column_pearson_dense(c: np.ndarray, labels: tuple[str, ...]) -> np.ndarray:
    gram = c.T @ c
    return _normalized_from_gram(gram, labels, "attribute")


def _banded_normalized_gram(
    left: np.ndarray,
    right: np.ndarray,
    scale: np.ndarray,
    out: np.ndarray,
    *,
    compare_old: bool,
    workers: int = 1,
) -> float:
    """Write ``normalize(left @ right^T)`` into the packed buffer ``out``.

    ``scale`` holds sqrt of the diagonal quadratic forms.  The upper
    triangle is produced in fixed bands of ``_BAND_ROWS`` rows; each band
    is one GEMM followed by a staircase copy into ``out``.  When
    ``compare_old`` is true, ``out`` is expected to hold the previous
    iterate and the max absolute change is returned (the write is in
    place, so no second full-size buffer exists).
    """
    n = left.shape[0]
    bands = [(i0, min(i0 + _BAND_ROWS, n)) for i0 in range(0, n, _BAND_ROWS)]

    def run_band(limits: tuple[int, int]) -> float:
        i0, i1 = limits
        block = left[i0:i1] @ right[i0:].T
        block /= scale[i0:i1, None]
        block /= scale[None, i0:]
        deltas = np.zeros(i1 - i0)
        pos = row_offset(i0, n)
        for local, i in enumerate(range(i0, i1)):
            row = block[local, i - i0 :]
            row[0] = 1.0
            segment = out[pos : pos + n - i]
            if compare_old:
                deltas[local] = np.abs(row - segment).max()
            segment[:] = row
            pos += n - i
        return float(deltas.max()) if compare_old else 0.0

    if workers <= 1 or len(bands) == 1:
        results = [run_band(b) for b in bands]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_band, bands))
    return float(np.max(np.asarray(results))) if compare_old else 0.0


def _actor_pearson_packed(
    r: np.ndarray, labels: tuple[str, ...], *, workers: int = 1, dtype=np.float64
) -> np.ndarray:
    diag = np.einsum("uv,uv->u", r, r)
    _check_positive(diag, labels, "actor")
    out = np.empty(packed_length(r.shape[0]), dtype=dtype)
    _banded_normalized_gram(r, r, np.sqrt(diag), out, compare_old=False, workers=workers)
    return out


def pearson_attributes(views: CenteredViews) -> SimilarityMatrix:
    """Plain Pearson correlation between attribute columns."""
    dense = _column_pearson_dense(views.centered_columns, views.attribute_labels)
    return SimilarityMatrix(pack_dense(dense), views.attribute_labels, "attribute")


def pearson_actors(views: CenteredViews, *, workers: int = 1) -> SimilarityMatrix:
    """Plain Pearson correlation between actor rows."""
    packed = _actor_pearson_packed(views.centered_rows, views.actor_labels, workers=workers)
    return SimilarityMatrix(packed, views.actor_labels, "actor")


def _require_consistent(
    views: CenteredViews, attribute_sim: SimilarityMatrix, actor_sim: SimilarityMatrix
) -> None:
    if attribute_sim.mode != "attribute":
        raise ValidationError("first similarity argument must be attribute-mode")
    if actor_sim.mode != "actor":
        raise ValidationError("second similarity argument must be actor-mode")
    if attribute_sim.labels != views.attribute_labels:
        raise ValidationError("attribute similarity labels do not match the views")
    if actor_sim.labels != views.actor_labels:
        raise ValidationError("actor similarity labels do not match the views")


def similarity_step(
    views: CenteredViews,
    attribute_sim: SimilarityMatrix,
    actor_sim: SimilarityMatrix,
    *,
    workers: int = 1,
) -> tuple[SimilarityMatrix, SimilarityMatrix]:
    """One joint refinement step (both updates read the incoming pair).

    The next attribute matrix weights column inner products by the current
    actor similarity; the next actor matrix weights row inner products by
    the current attribute similarity.  Passing two identities yields the
    Pearson pair, bit for bit.

    Note: materializes the dense actor metric when ``actor_sim`` is not
    the identity, which costs ``O(n_actors^2)`` memory; the fixed-point
    driver avoids that via factored updates and is what to use for large
    populations.
    """
    _require_consistent(views, attribute_sim, actor_sim)
    c = views.centered_columns
    r = views.centered_rows

    if actor_sim.is_identity():
        weighted = c
    else:
        weighted = unpack_packed(actor_sim.values, actor_sim.n).astype(np.float64) @ c
    gram = c.T @ weighted
    attr_dense = _normalized_from_gram(gram, views.attribute_labels, "attribute")
    attribute_next = SimilarityMatrix(
        pack_dense(attr_dense), views.attribute_labels, "attribute"
    )

    if attribute_sim.is_identity():
        t = r
    else:
        t = r @ unpack_packed(attribute_sim.values, attribute_sim.n).astype(np.float64)
    diag = np.einsum("uv,uv->u", t, r)
    _check_positive(diag, views.actor_labels, "actor")
    out = np.empty(packed_length(r.shape[0]), dtype=actor_sim.values.dtype)
    _banded_normalized_gram(t, r, np.sqrt(diag), out, compare_old=False, workers=workers)
    actor_next = SimilarityMatrix(out, views.actor_labels, "actor")
    return attribute_next, actor_next


def _thin_factor(sym: np.ndarray) -> np.ndarray:
    """PSD factor ``L`` with ``L L^T`` equal to ``sym`` up to clipped noise.

    Eigenvalues below zero (rounding noise of magnitude ~1e-15) are
    clipped so the factor is real.
    """
    values, vectors = np.linalg.eigh(sym)
    np.clip(values, 0.0, None, out=values)
    return vectors * np.sqrt(values)


def run_fixed_point(
    views: CenteredViews,
    tolerance: float = 1e-6,
    max_iterations: int = 100,
    *,
    workers: int = 1,
    actor_dtype=np.float64,
) -> FixedPointResult:
    """Iterate both similarity updates from the identities until they settle.

    Parameters
    ----------
    views : CenteredViews
    tolerance : float
        Stop once the max absolute entry change of *both* matrices in one
        iteration falls below this.
    max_iterations : int
        Hard cap; ``terminated_by`` in the report says which fired.
    workers : int
        Threads for the banded actor-matrix assembly.  Any value produces
        bitwise identical results; >1 only helps when BLAS has cores to
        spare.
    actor_dtype : numpy dtype
        ``numpy.float64`` (default) or ``numpy.float32`` to halve the
        memory of the stored actor matrix.  Arithmetic stays in float64
        either way; only the packed actor buffer is narrowed.

    Returns
    -------
    FixedPointResult
        ``(attribute_similarity, actor_similarity, report)``.

    With ``max_iterations=1`` the result equals
    ``similarity_step(views, I, I)`` bitwise.
    """
    if not (tolerance > 0.0):
        raise ValidationError(f"tolerance must be positive, got {tolerance}")
    if max_iterations < 1:
        raise ValidationError(f"max_iterations must be >= 1, got {max_iterations}")
    if actor_dtype not in (np.float64, np.float32):
        raise ValidationError(f"unsupported actor dtype {actor_dtype}")

    c = views.centered_columns
    r = views.centered_rows
    n_actors, n_attributes = views.shape

    attr_dense = np.eye(n_attributes)
    actor_packed = identity_packed(n_actors, dtype=actor_dtype)
    actor_factor: np.ndarray | None = None  # F with F F^T = current actor sim
    attribute_deltas: list[float] = []
    actor_deltas: list[float] = []
    terminated_by = "max_iterations"

    for _ in range(max_iterations):
        # Attribute update in the metric of the previous actor iterate.
        h = c if actor_factor is None else actor_factor.T @ c
        gram = h.T @ h
        attr_next = _normalized_from_gram(gram, views.attribute_labels, "attribute")
        attribute_deltas.append(float(np.abs(attr_next - attr_dense).max()))

        # Actor update in the metric of the previous attribute iterate.
        t = r if actor_factor is None else r @ _thin_factor(attr_dense)
        diag = np.einsum("uv,uv->u", t, t)
        _check_positive(diag, views.actor_labels, "actor")
        scale = np.sqrt(diag)
        actor_deltas.append(
            _banded_normalized_gram(
                t, t, scale, actor_packed, compare_old=True, workers=workers
            )
        )

        actor_factor = t / scale[:, None]
        attr_dense = attr_next

        if attribute_deltas[-1] < tolerance and actor_deltas[-1] < tolerance:
            terminated_by = "tolerance"
            break

    report = ConvergenceReport(
        iterations=len(attribute_deltas),
        deltas={"attribute": tuple(attribute_deltas), "actor": tuple(actor_deltas)},
        terminated_by=terminated_by,
    )
    attribute_sim = SimilarityMatrix(
        pack_dense(attr_dense), views.attribute_labels, "attribute"
    )
    actor_sim = SimilarityMatrix(actor_packed, views.actor_labels, "actor")
    return FixedPointResult(attribute_sim, actor_sim, report)
