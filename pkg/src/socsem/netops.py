"""Set-style operations on weighted networks.

Edge weights are read as membership grades in (0, 1], absence as 0.  The
intersection of two networks keeps an edge only when both have it, at the
smaller of the two grades; the difference keeps an edge of the first at
``min(weight_a, 1 - weight_b)``, so an edge strongly present in the second
network is strongly suppressed.  Grades of exactly 0 are dropped rather
than stored, which keeps "absent" and "weight 0" one and the same thing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .semnet import SemanticNetwork

__all__ = ["NetworkAlignment", "align", "intersect", "subtract"]


@dataclass(frozen=True)
class NetworkAlignment:
    """Exact label-match comparison of two node sets."""

    shared_nodes: tuple[str, ...]
    only_a: tuple[str, ...]
    only_b: tuple[str, ...]


def align(a: SemanticNetwork, b: SemanticNetwork) -> NetworkAlignment:
    """Partition the two node sets by exact label equality (sorted output)."""
    set_a, set_b = set(a.nodes), set(b.nodes)
    return NetworkAlignment(
        shared_nodes=tuple(sorted(set_a & set_b)),
        only_a=tuple(sorted(set_a - set_b)),
        only_b=tuple(sorted(set_b - set_a)),
    )


def _describe(network: SemanticNetwork) -> str:
    return network.provenance or f"network({network.node_count} nodes)"


def intersect(a: SemanticNetwork, b: SemanticNetwork) -> SemanticNetwork:
    """Edges present in both networks, at the smaller weight.

    Nodes are the shared labels.  Commutative up to node order.
    """
    shared = align(a, b).shared_nodes
    edges = {
        key: min(weight, b.edges[key])
        for key, weight in a.edges.items()
        if key in b.edges
    }
    provenance = f"intersection of [{_describe(a)}] and [{_describe(b)}]"
    return SemanticNetwork(shared, edges, provenance)


def subtract(a: SemanticNetwork, b: SemanticNetwork) -> SemanticNetwork:
    """What remains of ``a`` once ``b`` is discounted.

    Keeps ``a``'s node set.  An edge of ``a`` also present in ``b`` with
    weight ``beta`` survives at ``min(alpha, 1 - beta)``; edges absent
    from ``b`` keep their weight.  Results of exactly 0 are dropped.
    """
    edges: dict[tuple[str, str], float] = {}
    for key, alpha in a.edges.items():
        beta = b.edges.get(key)
        weight = alpha if beta is None else min(alpha, 1.0 - beta)
        if weight > 0.0:
            edges[key] = weight
    provenance = f"difference of [{_describe(a)}] minus [{_describe(b)}]"
    return SemanticNetwork(a.nodes, edges, provenance)
