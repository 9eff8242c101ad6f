"""Predicting the derivative discontinuity an observer sees when one edge is
removed.

The first affected derivative order at observer p for a removed edge equals
the directed distance from the edge tail to p, and the discontinuity there
equals the number of (order-1)-step walks from the edge head to p times the
state gap across the edge.  ``derivative_gap`` recomputes the same quantity
from matrix powers of the two Laplacians, giving an independent route that
``check_prediction`` compares against the closed form, exactly, in integer
or rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graph import (
    INFINITY,
    Digraph,
    Edge,
    distance,
    distances_from,
    laplacian,
    remove_edge,
    walk_count,
)

__all__ = [
    "JumpPrediction",
    "PredictionCheck",
    "check_all_predictions",
    "check_prediction",
    "derivative_gap",
    "predict_jump",
]


@dataclass(frozen=True)
class JumpPrediction:
    """First derivative order that reacts at ``observer`` when ``edge`` is
    removed, and the size of the discontinuity there.

    ``order`` is the distance from the edge tail to the observer: ``inf``
    means the observer can never react; 0 means the observer sits on the
    tail itself, which reacts only beyond the characterized orders and is
    treated as unobservable.  A finite order with ``magnitude`` 0 is a
    cancellation: the edge head is farther than order-1 from the observer,
    or the endpoint states coincide.
    """

    edge: Edge
    observer: int
    order: int | float
    magnitude: int | float | Fraction | None

    @property
    def observable(self) -> bool:
        return (
            self.order not in (0, INFINITY)
            and self.magnitude is not None
            and self.magnitude != 0
        )


@dataclass(frozen=True)
class PredictionCheck:
    """Outcome of checking the closed form against matrix-power gaps."""

    prediction: JumpPrediction
    passed: bool
    failed_order: int | None = None
    expected: int | float | Fraction | None = None
    actual: int | float | Fraction | None = None


def _neg_laplacian_rows(g: Digraph) -> list[list[int]]:
    return (-laplacian(g)).tolist()


def _apply(rows: list[list[int]], vec: list) -> list:
    # Plain Python products keep ints and Fractions exact.
    return [sum(r[j] * vec[j] for j in range(len(vec)) if r[j]) for r in rows]


def _check_state(g: Digraph, x0: Sequence) -> list:
    if len(x0) != g.n:
        raise ValueError(f"x0 has length {len(x0)}, expected {g.n}")
    return list(x0)


def derivative_gap(g1: Digraph, e: Edge | tuple[int, int], p: int, k: int, x0: Sequence):
    """k-th derivative of observer p's response, healthy minus edge-removed,
    both evaluated at the same state ``x0``.

    Exact when x0 entries are ints or Fractions.
    """
    e = Edge(*e)
    if not (1 <= p <= g1.n):
        raise IndexError(f"vertex {p} out of range 1..{g1.n}")
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    g2 = remove_edge(g1, e)
    x0 = _check_state(g1, x0)
    v1 = list(x0)
    v2 = list(x0)
    rows1 = _neg_laplacian_rows(g1)
    rows2 = _neg_laplacian_rows(g2)
    for _ in range(k):
        v1 = _apply(rows1, v1)
        v2 = _apply(rows2, v2)
    return v1[p - 1] - v2[p - 1]


def predict_jump(g1: Digraph, e: Edge | tuple[int, int], p: int, x0: Sequence) -> JumpPrediction:
    """Closed-form first jump order and magnitude for (edge, observer)."""
    e = Edge(*e)
    if e not in g1.edges:
        raise ValueError(f"edge {tuple(e)} not in digraph")
    if not (1 <= p <= g1.n):
        raise IndexError(f"vertex {p} out of range 1..{g1.n}")
    x0 = _check_state(g1, x0)
    order = distance(g1, e.tail, p)
    if order is INFINITY or order == 0:
        return JumpPrediction(edge=e, observer=p, order=order, magnitude=None)
    count = walk_count(g1, e.head, p, order - 1)
    magnitude = count * (x0[e.tail - 1] - x0[e.head - 1])
    return JumpPrediction(edge=e, observer=p, order=order, magnitude=magnitude)


def check_prediction(g1: Digraph, e: Edge | tuple[int, int], p: int, x0: Sequence) -> PredictionCheck:
    """Verify, exactly, that matrix-power gaps vanish below the predicted
    order and equal the predicted magnitude at it.

    Unreachable observers (order inf) pass vacuously; an observer on the
    edge tail (order 0) is only required to have a zero order-0 gap.
    """
    prediction = predict_jump(g1, e, p, x0)
    order = prediction.order
    if order is INFINITY:
        return PredictionCheck(prediction=prediction, passed=True)
    last = int(order)
    for k in range(last):
        gap = derivative_gap(g1, e, p, k, x0)
        if gap != 0:
            return PredictionCheck(
                prediction=prediction,
                passed=False,
                failed_order=k,
                expected=0,
                actual=gap,
            )
    gap = derivative_gap(g1, e, p, last, x0)
    expected = 0 if order == 0 else prediction.magnitude
    if gap != expected:
        return PredictionCheck(
            prediction=prediction,
            passed=False,
            failed_order=last,
            expected=expected,
            actual=gap,
        )
    return PredictionCheck(prediction=prediction, passed=True)


def check_all_predictions(
    g1: Digraph,
    x0: Sequence,
    observers: Sequence[int] | None = None,
    max_order: int | None = None,
) -> list[PredictionCheck]:
    """Run :func:`check_prediction` over every (edge, observer) pair.

    Shares the Laplacian power sequences across observers, so sweeping a
    whole graph costs little more than sweeping its edges.  ``max_order``
    caps the checked derivative orders: pairs whose reacting order exceeds
    the cap are only required to have zero gaps up to it.
    """
    x0 = _check_state(g1, x0)
    obs = list(observers) if observers is not None else list(g1.vertices)
    for p in obs:
        if not (1 <= p <= g1.n):
            raise IndexError(f"vertex {p} out of range 1..{g1.n}")
    if max_order is not None and max_order < 1:
        raise ValueError("max_order must be at least 1")
    rows1 = _neg_laplacian_rows(g1)
    checks: list[PredictionCheck] = []
    for e in g1.canonical_edges():
        dist_tail = distances_from(g1, e.tail)
        finite = [p for p in obs if dist_tail[p - 1] is not INFINITY]
        deepest = max((int(dist_tail[p - 1]) for p in finite), default=-1)
        if max_order is not None:
            deepest = min(deepest, max_order)
        # Power sequences v^(k) = (-L)^k x0 for both topologies, shared.
        g2 = remove_edge(g1, e)
        rows2 = _neg_laplacian_rows(g2)
        seq1 = [list(x0)]
        seq2 = [list(x0)]
        for _ in range(deepest):
            seq1.append(_apply(rows1, seq1[-1]))
            seq2.append(_apply(rows2, seq2[-1]))
        dist_head = distances_from(g1, e.head)
        for p in obs:
            order = dist_tail[p - 1]
            if order is INFINITY:
                checks.append(
                    PredictionCheck(
                        prediction=JumpPrediction(e, p, INFINITY, None),
                        passed=True,
                    )
                )
                continue
            order = int(order)
            if order == 0:
                prediction = JumpPrediction(e, p, 0, None)
                magnitude = 0
            else:
                count = (
                    walk_count(g1, e.head, p, order - 1)
                    if dist_head[p - 1] is not INFINITY
                    else 0
                )
                magnitude = count * (x0[e.tail - 1] - x0[e.head - 1])
                prediction = JumpPrediction(e, p, order, magnitude)
            check = PredictionCheck(prediction=prediction, passed=True)
            last = order if max_order is None else min(order, max_order)
            for k in range(last + 1):
                gap = seq1[k][p - 1] - seq2[k][p - 1]
                expected = magnitude if k == order else 0
                if gap != expected:
                    check = PredictionCheck(
                        prediction=prediction,
                        passed=False,
                        failed_order=k,
                        expected=expected,
                        actual=gap,
                    )
                    break
            checks.append(check)
    return checks
