"""Sensor placement for failure detection and isolation.

A sensor at vertex p reacts to the failure of an edge at derivative order k
exactly when the edge tail sits at distance k and the edge head at distance
k-1 from p (relation order k); order 0 means the sensor never reacts within
the observed orders.  Detection placement covers every edge with at least
one reacting sensor; isolation placement additionally makes every edge's
per-sensor order fingerprint unique.  Both are built greedily on the
corresponding deficit counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import INFINITY, Digraph, Edge, distances_from

__all__ = [
    "PlacementResult",
    "coverage_deficit",
    "default_max_order",
    "greedy_detection_placement",
    "greedy_isolation_placement",
    "indicator_set",
    "relation_matrix",
    "relation_order",
    "resolution_deficit",
]


@dataclass(frozen=True)
class PlacementResult:
    """Sensors chosen by a greedy placement run.

    ``deficits`` records the objective value before any sensor and after
    each addition.  For isolation runs, sensors appended to restore full
    coverage keep the resolution deficit at its final value of 0.
    """

    mode: str
    sensors: tuple[int, ...]
    deficits: tuple[int, ...]


def default_max_order(g: Digraph) -> int:
    """Default cap on observed derivative orders: one less than the network
    size (the worst-case diameter), but at least 1."""
    return max(1, g.n - 1)


def relation_order(g: Digraph, p: int, e: Edge | tuple[int, int], z: int) -> int:
    """Order k in 1..z at which sensor p reacts to the failure of e, else 0."""
    e = Edge(*e)
    if e not in g.edges:
        raise ValueError(f"edge {tuple(e)} not in digraph")
    if not (1 <= p <= g.n):
        raise IndexError(f"vertex {p} out of range 1..{g.n}")
    if z < 1:
        raise ValueError("max order must be at least 1")
    d_tail = distances_from(g, e.tail)[p - 1]
    if d_tail is INFINITY or not (1 <= d_tail <= z):
        return 0
    d_head = distances_from(g, e.head)[p - 1]
    return int(d_tail) if d_head == d_tail - 1 else 0


def _relation_table(g: Digraph, z: int) -> tuple[tuple[Edge, ...], list[list[int]]]:
    """Orders for all (vertex, edge) pairs: table[p-1][j] for edge j in
    canonical order."""
    if z < 1:
        raise ValueError("max order must be at least 1")
    edges = g.canonical_edges()
    dist = [distances_from(g, src) for src in g.vertices]
    table = [[0] * len(edges) for _ in range(g.n)]
    for j, (tail, head) in enumerate(edges):
        d_tail = dist[tail - 1]
        d_head = dist[head - 1]
        for p in g.vertices:
            dt = d_tail[p - 1]
            if dt is not INFINITY and 1 <= dt <= z and d_head[p - 1] == dt - 1:
                table[p - 1][j] = int(dt)
    return edges, table


def relation_matrix(g: Digraph, z: int) -> np.ndarray:
    """n-by-|E| matrix of relation orders, edges in canonical order."""
    _, table = _relation_table(g, z)
    return np.asarray(table, dtype=np.int64).reshape(g.n, len(g.edges))


def indicator_set(g: Digraph, sensors: Iterable[int], e: Edge | tuple[int, int], z: int) -> frozenset[tuple[int, int]]:
    """Fingerprint of edge e w.r.t. the sensor set: one (order, sensor) pair
    per sensor."""
    return frozenset(
        (relation_order(g, p, e, z), p) for p in _check_sensors(g, sensors)
    )


def _check_sensors(g: Digraph, sensors: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(set(int(p) for p in sensors)))
    for p in out:
        if not (1 <= p <= g.n):
            raise IndexError(f"vertex {p} out of range 1..{g.n}")
    return out


def coverage_deficit(g: Digraph, sensors: Iterable[int], z: int) -> int:
    """Number of edges no sensor reacts to within the first z orders."""
    sens = _check_sensors(g, sensors)
    _, table = _relation_table(g, z)
    return _coverage_from_table(table, sens, len(g.edges))


def _coverage_from_table(table: list[list[int]], sensors: tuple[int, ...], n_edges: int) -> int:
    return sum(
        1
        for j in range(n_edges)
        if all(table[p - 1][j] == 0 for p in sensors)
    )


def resolution_deficit(g: Digraph, sensors: Iterable[int], z: int) -> int:
    """Number of edges whose fingerprint collides with another edge's."""
    sens = _check_sensors(g, sensors)
    _, table = _relation_table(g, z)
    return _resolution_from_table(table, sens, len(g.edges))


def _resolution_from_table(table: list[list[int]], sensors: tuple[int, ...], n_edges: int) -> int:
    groups: dict[tuple[int, ...], int] = {}
    for j in range(n_edges):
        sig = tuple(table[p - 1][j] for p in sensors)
        groups[sig] = groups.get(sig, 0) + 1
    return sum(count for count in groups.values() if count >= 2)


def _greedy(g, table, n_edges, objective):
    """Shared greedy loop: add the vertex with the smallest marginal
    objective; ties go to the lowest index.  Stops at zero deficit or when
    every vertex has been taken."""
    chosen: list[int] = []
    current = objective(table, (), n_edges)
    deficits = [current]
    remaining = list(g.vertices)
    while current != 0 and remaining:
        best_v = None
        best_val = None
        for v in remaining:
            val = objective(table, tuple(sorted(chosen + [v])), n_edges)
            if best_val is None or val < best_val:
                best_val = val
                best_v = v
        chosen.append(best_v)
        remaining.remove(best_v)
        current = best_val
        deficits.append(current)
    return chosen, current, deficits


def greedy_detection_placement(g: Digraph, z: int | None = None) -> PlacementResult:
    """Smallest-greedy sensor set covering every edge.

    Always succeeds: the head of every edge reacts at order 1, so the full
    vertex set has zero coverage deficit.
    """
    z = default_max_order(g) if z is None else z
    _, table = _relation_table(g, z)
    chosen, _, deficits = _greedy(g, table, len(g.edges), _coverage_from_table)
    return PlacementResult(
        mode="detection", sensors=tuple(sorted(chosen)), deficits=tuple(deficits)
    )


def greedy_isolation_placement(g: Digraph, z: int | None = None) -> PlacementResult | None:
    """Greedy sensor set giving every edge a unique fingerprint, or None
    when no sensor set at all can isolate (the full vertex set still has
    collisions).

    A zero resolution deficit does not by itself imply coverage: a single
    edge invisible to every chosen sensor has a unique all-zeros
    fingerprint.  Such a set is topped up with covering sensors before it
    is returned, so the result always solves detection too.
    """
    z = default_max_order(g) if z is None else z
    _, table = _relation_table(g, z)
    n_edges = len(g.edges)
    chosen, current, deficits = _greedy(g, table, n_edges, _resolution_from_table)
    if current != 0:
        return None
    # Coverage top-up (greedy on the coverage deficit).
    remaining = [v for v in g.vertices if v not in chosen]
    cov = _coverage_from_table(table, tuple(sorted(chosen)), n_edges)
    while cov != 0:
        best_v = None
        best_val = None
        for v in remaining:
            val = _coverage_from_table(table, tuple(sorted(chosen + [v])), n_edges)
            if best_val is None or val < best_val:
                best_val = val
                best_v = v
        chosen.append(best_v)
        remaining.remove(best_v)
        cov = best_val
        deficits.append(
            _resolution_from_table(table, tuple(sorted(chosen)), n_edges)
        )
    return PlacementResult(
        mode="isolation", sensors=tuple(sorted(chosen)), deficits=tuple(deficits)
    )
