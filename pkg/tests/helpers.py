"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from socsem import IncidenceMatrix, SemanticNetwork
from socsem.semnet import edge_key


def random_binary_matrix(
    rng: np.random.Generator, n_rows: int, n_cols: int, density: float
) -> np.ndarray:
    """Seeded 0/1 matrix with no constant rows or columns (resamples)."""
    while True:
        matrix = (rng.random((n_rows, n_cols)) < density).astype(np.uint8)
        row_sums = matrix.sum(axis=1)
        col_sums = matrix.sum(axis=0)
        if (
            (row_sums > 0).all()
            and (row_sums < n_cols).all()
            and (col_sums > 0).all()
            and (col_sums < n_rows).all()
        ):
            return matrix


def incidence_from_array(matrix: np.ndarray) -> IncidenceMatrix:
    """Wrap a binary array with generated labels."""
    n_rows, n_cols = matrix.shape
    return IncidenceMatrix(
        matrix,
        tuple(f"u{i:03d}" for i in range(n_rows)),
        tuple(f"t{j:03d}" for j in range(n_cols)),
    )


def random_incidence(
    rng: np.random.Generator, n_rows: int, n_cols: int, density: float
) -> IncidenceMatrix:
    return incidence_from_array(random_binary_matrix(rng, n_rows, n_cols, density))


def random_network(
    rng: np.random.Generator,
    n_nodes: int | None = None,
    edge_probability: float = 0.3,
    allow_isolated: bool = True,
) -> SemanticNetwork:
    """Seeded random weighted network with weights in (0, 1]."""
    if n_nodes is None:
        n_nodes = int(rng.integers(0, 12))
    labels = [f"n{i:02d}" for i in range(n_nodes)]
    if not allow_isolated and n_nodes < 2:
        n_nodes = 2
    edges: dict[tuple[str, str], float] = {}
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < edge_probability:
                weight = float(rng.uniform(0.05, 1.0))
                edges[edge_key(labels[i], labels[j])] = min(weight, 1.0)
    return SemanticNetwork(tuple(labels), edges, provenance=f"random({n_nodes} nodes)")


def union_find_components(network: SemanticNetwork) -> dict[str, int]:
    """Connected-component id per node (ids are arbitrary but consistent)."""
    parent = {node: node for node in network.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in network.edges:
        root_a, root_b = find(a), find(b)
        if root_a != root_b:
            parent[root_a] = root_b
    roots = {node: find(node) for node in network.nodes}
    numbering = {root: i for i, root in enumerate(dict.fromkeys(roots.values()))}
    return {node: numbering[root] for node, root in roots.items()}
