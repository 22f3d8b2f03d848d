"""Independent scalar-loop reference for the similarity recursion.

Everything here is pure Python floats and explicit quadruple loops, with
no code shared with the package: attribute similarity is the normalized
quadratic form of centered columns in the actor metric, actor similarity
the normalized quadratic form of centered rows in the attribute metric,
iterated Jacobi style from identity metrics.  Both triangles are computed
independently (no symmetry shortcut), exactly as the formulas read.

Deliberately slow; keep it at toy sizes.
"""

from __future__ import annotations


def centered_columns(matrix: list[list[float]]) -> list[list[float]]:
    rows = len(matrix)
    cols = len(matrix[0])
    means = [sum(matrix[p][i] for p in range(rows)) / rows for i in range(cols)]
    return [[matrix[p][i] - means[i] for i in range(cols)] for p in range(rows)]


def centered_rows(matrix: list[list[float]]) -> list[list[float]]:
    cols = len(matrix[0])
    return [
        [value - sum(row) / cols for value in row]
        for row in matrix
    ]


def identity(n: int) -> list[list[float]]:
    return [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]


def attribute_update(
    c: list[list[float]], actor_sim: list[list[float]]
) -> list[list[float]]:
    """next_attr[i][j] = (c_i^T A c_j) / sqrt((c_i^T A c_i)(c_j^T A c_j))."""
    rows = len(c)
    cols = len(c[0])

    def form(i: int, j: int) -> float:
        total = 0.0
        for p in range(rows):
            for q in range(rows):
                total += c[p][i] * actor_sim[p][q] * c[q][j]
        return total

    diagonal = [form(i, i) for i in range(cols)]
    out = [[0.0] * cols for _ in range(cols)]
    for i in range(cols):
        for j in range(cols):
            out[i][j] = form(i, j) / (diagonal[i] * diagonal[j]) ** 0.5
    return out


def actor_update(
    r: list[list[float]], attribute_sim: list[list[float]]
) -> list[list[float]]:
    """next_actor[p][q] = (r_p S r_q^T) / sqrt((r_p S r_p^T)(r_q S r_q^T))."""
    rows = len(r)
    cols = len(r[0])

    def form(p: int, q: int) -> float:
        total = 0.0
        for i in range(cols):
            for j in range(cols):
                total += r[p][i] * attribute_sim[i][j] * r[q][j]
        return total

    diagonal = [form(p, p) for p in range(rows)]
    out = [[0.0] * rows for _ in range(rows)]
    for p in range(rows):
        for q in range(rows):
            out[p][q] = form(p, q) / (diagonal[p] * diagonal[q]) ** 0.5
    return out


def step(
    matrix: list[list[float]],
    attribute_sim: list[list[float]],
    actor_sim: list[list[float]],
) -> tuple[list[list[float]], list[list[float]]]:
    """One Jacobi step: both updates read the incoming pair."""
    c = centered_columns(matrix)
    r = centered_rows(matrix)
    return attribute_update(c, actor_sim), actor_update(r, attribute_sim)


def max_abs_change(a: list[list[float]], b: list[list[float]]) -> float:
    return max(
        abs(a[i][j] - b[i][j]) for i in range(len(a)) for j in range(len(a[0]))
    )


def fixed_point(
    matrix: list[list[float]],
    tolerance: float = 1e-6,
    max_iterations: int = 100,
) -> tuple[list[list[float]], list[list[float]], list[tuple[float, float]], str]:
    """Iterate from identities; returns (attribute, actor, deltas, reason)."""
    attribute_sim = identity(len(matrix[0]))
    actor_sim = identity(len(matrix))
    deltas: list[tuple[float, float]] = []
    for _ in range(max_iterations):
        attribute_next, actor_next = step(matrix, attribute_sim, actor_sim)
        deltas.append(
            (
                max_abs_change(attribute_next, attribute_sim),
                max_abs_change(actor_next, actor_sim),
            )
        )
        attribute_sim, actor_sim = attribute_next, actor_next
        if deltas[-1][0] < tolerance and deltas[-1][1] < tolerance:
            return attribute_sim, actor_sim, deltas, "tolerance"
    return attribute_sim, actor_sim, deltas, "max_iterations"
