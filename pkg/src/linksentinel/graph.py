"""Directed graphs with 1-based vertex indices and the combinatorial
primitives the failure monitor is built on: adjacency, in-degree Laplacian,
shortest directed distances, exact walk counting, and a walk-enumeration
oracle for checking weighted walk sums against matrix powers.

All values are immutable after construction and every operation is a pure
function, so graphs can be shared freely between threads.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "INFINITY",
    "MAX_ENUMERATION_LENGTH",
    "Digraph",
    "Edge",
    "ParseError",
    "Walk",
    "adjacency",
    "cycle_digraph",
    "distance",
    "distances_from",
    "enumerate_walks",
    "in_degree",
    "integer_matrix_power",
    "laplacian",
    "load_digraph",
    "parse_edge_list",
    "random_digraph",
    "remove_edge",
    "star_digraph",
    "walk_count",
    "walk_weight_sum",
    "with_self_loops",
]

INFINITY = math.inf

# Walk enumeration is exponential in the length; cap it hard.
MAX_ENUMERATION_LENGTH = 12


class ParseError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


class Edge(NamedTuple):
    """Directed edge from ``tail`` to ``head``."""

    tail: int
    head: int


class Walk(NamedTuple):
    """A chained sequence of directed edges.

    ``edges`` may be empty, which represents the trivial length-0 walk from a
    vertex to itself; that convention is what makes the length-0 walk count
    equal 1 on the diagonal.
    """

    start: int
    end: int
    edges: tuple[Edge, ...]

    @property
    def length(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Digraph:
    """Immutable digraph on vertices ``1..n`` with no parallel edges.

    Self-loops are representable (they are needed when walk weights are read
    off a Laplacian), but the consensus dynamics reject them at simulation
    time.
    """

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"vertex count must be positive, got {self.n}")
        listed = [Edge(int(t), int(h)) for t, h in self.edges]
        if len(listed) != len(set(listed)):
            raise ValueError("duplicate edges are not allowed")
        for e in listed:
            if not (1 <= e.tail <= self.n and 1 <= e.head <= self.n):
                raise ValueError(f"edge {tuple(e)} out of range 1..{self.n}")
        object.__setattr__(self, "edges", frozenset(listed))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def canonical_edges(self) -> tuple[Edge, ...]:
        """Edges sorted by (tail, head); fixes column order everywhere."""
        return tuple(sorted(self.edges))

    def successors(self, v: int) -> tuple[int, ...]:
        _check_vertex(self, v)
        return tuple(sorted(h for t, h in self.edges if t == v))

    def has_self_loops(self) -> bool:
        return any(t == h for t, h in self.edges)


def _check_vertex(g: Digraph, v: int) -> None:
    if not (1 <= v <= g.n):
        raise IndexError(f"vertex {v} out of range 1..{g.n}")


def adjacency(g: Digraph) -> np.ndarray:
    """Adjacency matrix with A[head-1, tail-1] = 1 for each edge."""
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for t, h in g.edges:
        a[h - 1, t - 1] = 1
    return a


def in_degree(g: Digraph, v: int) -> int:
    """Number of incoming edges at ``v``, self-loops excluded."""
    _check_vertex(g, v)
    return sum(1 for t, h in g.edges if h == v and t != v)


def laplacian(g: Digraph) -> np.ndarray:
    """In-degree Laplacian: in-degrees on the diagonal minus adjacency."""
    lap = -adjacency(g)
    for v in g.vertices:
        lap[v - 1, v - 1] += in_degree(g, v)
    return lap


def distances_from(g: Digraph, src: int) -> list[int | float]:
    """Directed distances from ``src`` to every vertex (index v-1), BFS."""
    _check_vertex(g, src)
    succ: list[list[int]] = [[] for _ in range(g.n + 1)]
    for t, h in g.edges:
        succ[t].append(h)
    dist: list[int | float] = [INFINITY] * g.n
    dist[src - 1] = 0
    queue = [src]
    while queue:
        nxt = []
        for u in queue:
            for w in succ[u]:
                if dist[w - 1] is INFINITY:
                    dist[w - 1] = dist[u - 1] + 1
                    nxt.append(w)
        queue = nxt
    return dist


def distance(g: Digraph, tail: int, head: int) -> int | float:
    """Length of the shortest directed walk, 0 on the diagonal, inf if none."""
    _check_vertex(g, head)
    return distances_from(g, tail)[head - 1]


def integer_matrix_power(m: Iterable[Iterable[int]], k: int) -> list[list[int]]:
    """k-th power of a square matrix in exact Python-int arithmetic."""
    rows = [[int(x) for x in row] for row in m]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    if k < 0:
        raise ValueError("exponent must be nonnegative")
    result = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    base = rows
    while k:
        if k & 1:
            result = _int_matmul(result, base)
        k >>= 1
        if k:
            base = _int_matmul(base, base)
    return result


def _int_matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n = len(a)
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def walk_count(g: Digraph, tau: int, nu: int, k: int) -> int:
    """Number of directed tau-to-nu walks of length ``k``, exact.

    Length 0 counts the trivial walk: 1 when tau == nu, else 0.
    """
    _check_vertex(g, tau)
    _check_vertex(g, nu)
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    # Column tau of A^k via repeated exact matrix-vector products.
    vec = [0] * g.n
    vec[tau - 1] = 1
    rows = adjacency(g).tolist()
    for _ in range(k):
        vec = [sum(r[j] * vec[j] for j in range(g.n) if vec[j]) for r in rows]
    return vec[nu - 1]


def enumerate_walks(g: Digraph, tau: int, nu: int, k: int) -> set[Walk]:
    """All tau-to-nu walks of length exactly ``k``, by exhaustive DFS."""
    _check_vertex(g, tau)
    _check_vertex(g, nu)
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    if k > MAX_ENUMERATION_LENGTH:
        raise ValueError(
            f"walk length {k} exceeds enumeration cap {MAX_ENUMERATION_LENGTH}"
        )
    if k == 0:
        return {Walk(tau, tau, ())} if tau == nu else set()
    succ: list[list[int]] = [[] for _ in range(g.n + 1)]
    for t, h in g.edges:
        succ[t].append(h)
    walks: set[Walk] = set()

    def extend(prefix: tuple[Edge, ...], at: int) -> None:
        if len(prefix) == k:
            if at == nu:
                walks.add(Walk(tau, nu, prefix))
            return
        for h in succ[at]:
            extend(prefix + (Edge(at, h),), h)

    extend((), tau)
    return walks


def walk_weight_sum(walks: Iterable[Walk], weights) -> int | float:
    """Sum over walks of the product of edge weights.

    The weight of edge (tail, head) is read at weights[head-1][tail-1], the
    in-weighting convention: that entry may be nonzero only when the edge
    exists.  A walk with no edges has weight 1; an empty walk set sums to 0.
    The sum equals the (end, start) entry of the k-th power of the weight
    matrix when the walks are all walks of one length between two vertices.
    """
    w = np.asarray(weights).tolist()
    total: int | float = 0
    for walk in walks:
        prod: int | float = 1
        for t, h in walk.edges:
            prod *= w[h - 1][t - 1]
        total += prod
    return total


def remove_edge(g: Digraph, e: Edge | tuple[int, int]) -> Digraph:
    """New digraph with ``e`` removed; raises if the edge is absent."""
    e = Edge(*e)
    if e not in g.edges:
        raise ValueError(f"edge {tuple(e)} not in digraph")
    return Digraph(g.n, g.edges - {e})


def with_self_loops(g: Digraph) -> Digraph:
    """Copy of ``g`` with a self-loop added on every vertex."""
    loops = {Edge(v, v) for v in g.vertices}
    return Digraph(g.n, g.edges | loops)


def cycle_digraph(n: int) -> Digraph:
    """Directed n-cycle 1 -> 2 -> ... -> n -> 1."""
    if n < 2:
        raise ValueError("cycle needs at least 2 vertices")
    edges = [Edge(i, i + 1) for i in range(1, n)] + [Edge(n, 1)]
    return Digraph(n, frozenset(edges))


def star_digraph(n: int, hub: int | None = None) -> Digraph:
    """In-star: every other vertex points at the hub (default: vertex n)."""
    if n < 2:
        raise ValueError("star needs at least 2 vertices")
    hub = n if hub is None else hub
    edges = [Edge(v, hub) for v in range(1, n + 1) if v != hub]
    return Digraph(n, frozenset(edges))


def random_digraph(n: int, p: float, seed: int | random.Random) -> Digraph:
    """Random digraph: each ordered pair (no self-loops) kept with prob p."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    edges = [
        Edge(t, h)
        for t in range(1, n + 1)
        for h in range(1, n + 1)
        if t != h and rng.random() < p
    ]
    return Digraph(n, frozenset(edges))


def parse_edge_list(text: str) -> Digraph:
    """Parse the edge-list format: an ``n <count>`` directive, then one
    ``<tail> <head>`` pair per line.  ``#`` starts a comment; duplicate edge
    lines are an error.
    """
    n: int | None = None
    edges: list[Edge] = []
    seen: set[Edge] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if n is not None:
                raise ParseError(f"line {lineno}: repeated 'n' directive")
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(f"line {lineno}: expected 'n <count>'")
            n = int(parts[1])
            continue
        if n is None:
            raise ParseError(f"line {lineno}: 'n <count>' must come first")
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<tail> <head>'")
        try:
            e = Edge(int(parts[0]), int(parts[1]))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if e in seen:
            raise ParseError(f"line {lineno}: duplicate edge {tuple(e)}")
        if not (1 <= e.tail <= n and 1 <= e.head <= n):
            raise ParseError(f"line {lineno}: edge {tuple(e)} out of range 1..{n}")
        seen.add(e)
        edges.append(e)
    if n is None:
        raise ParseError("missing 'n <count>' directive")
    return Digraph(n, frozenset(edges))


def load_digraph(path) -> Digraph:
    """Read a digraph from an edge-list file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())
