"""Exact simulation of the linear agreement protocol x' = -L x, with an
optional single-link failure switching the generator at a failure instant.

Samples are produced directly from matrix exponentials (one squaring chain
per grid point), so traces are smooth to machine precision; the downstream
jump estimators depend on that.
"""

from __future__ import annotations

import io
import random
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .graph import Digraph, Edge, laplacian, remove_edge

__all__ = [
    "AdmissibilityError",
    "Scenario",
    "Trace",
    "analytic_derivative",
    "propagate",
    "random_distinct_state",
    "read_trace_csv",
    "simulate",
    "trace_to_csv",
    "write_trace_csv",
]

DEFAULT_DT = 1e-2

# Endpoint states closer than this at the failure instant make the failure
# unobservable at every order; simulating such a scenario is an error.
ADMISSIBILITY_TOL = 1e-12


class AdmissibilityError(ValueError):
    """Failure injected while head and tail states coincide."""


@dataclass(frozen=True)
class Scenario:
    """A simulation run: topology, initial state, grid, optional failure.

    ``t_end`` defaults to twice the failure time when a failure is
    configured.  The graph must be self-loop free.
    """

    graph: Digraph
    x0: tuple[float, ...]
    t_end: float | None = None
    dt: float = DEFAULT_DT
    t_f: float | None = None
    failed_edge: Edge | None = None

    def __post_init__(self) -> None:
        if self.graph.has_self_loops():
            raise ValueError("consensus network must be self-loop free")
        x0 = tuple(float(v) for v in self.x0)
        if len(x0) != self.graph.n:
            raise ValueError(
                f"x0 has length {len(x0)}, expected {self.graph.n}"
            )
        object.__setattr__(self, "x0", x0)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if (self.t_f is None) != (self.failed_edge is None):
            raise ValueError("t_f and failed_edge must be given together")
        if self.failed_edge is not None:
            edge = Edge(*self.failed_edge)
            if edge not in self.graph.edges:
                raise ValueError(f"failed edge {tuple(edge)} not in graph")
            object.__setattr__(self, "failed_edge", edge)
            if self.t_f <= 0:
                raise ValueError("t_f must be positive")
        t_end = self.t_end
        if t_end is None:
            if self.t_f is None:
                raise ValueError("t_end is required when no failure is set")
            t_end = 2.0 * self.t_f
        if t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.t_f is not None and not self.t_f < t_end:
            raise ValueError("t_f must lie before t_end")
        object.__setattr__(self, "t_end", float(t_end))


@dataclass(frozen=True)
class Trace:
    """Sampled trajectory of all agents; ``t_fail`` marks the switch instant.

    ``states[i]`` is the state vector at ``times[i]``.  The sample at the
    failure instant carries the (continuous) switching state shared by both
    segments.  Arrays are never mutated after construction.
    """

    times: np.ndarray
    states: np.ndarray
    t_fail: float | None = None

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def sample_index(self, t: float, tol: float = 1e-9) -> int:
        """Index of the sample closest to ``t``; errors if none is near."""
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > max(tol, 1e-6 * np.ptp(self.times)):
            raise ValueError(f"no sample near t={t}")
        return idx

    def for_sensor(self, v: int) -> np.ndarray:
        if not (1 <= v <= self.n):
            raise IndexError(f"vertex {v} out of range 1..{self.n}")
        return self.states[:, v - 1]


def propagate(l, x, t: float) -> np.ndarray:
    """State of x' = -l x after time ``t``, via the matrix exponential."""
    lap = np.asarray(l, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError("generator must be a square matrix")
    vec = np.asarray(x, dtype=float)
    if vec.shape != (lap.shape[0],):
        raise ValueError(
            f"state has shape {vec.shape}, expected ({lap.shape[0]},)"
        )
    if t < 0:
        raise ValueError("time must be nonnegative")
    if t == 0:
        return vec.copy()
    return expm(-lap * t) @ vec


def _grid(t_end: float, dt: float, t_f: float | None) -> tuple[np.ndarray, int | None]:
    """Sample instants i*dt up to t_end, with t_f snapped or inserted.

    Returns the times and the index of the failure sample (None if no
    failure).
    """
    steps = int(np.floor(t_end / dt + 1e-9))
    times = [i * dt for i in range(steps + 1)]
    fail_idx = None
    if t_f is not None:
        j = int(round(t_f / dt))
        if 0 <= j <= steps and abs(j * dt - t_f) <= 1e-9 * max(1.0, abs(t_f)):
            fail_idx = j
        else:
            times.append(t_f)
            times.sort()
            fail_idx = times.index(t_f)
    return np.asarray(times, dtype=float), fail_idx


def simulate(scenario: Scenario) -> Trace:
    """Sample the scenario on its grid, switching generators at the failure.

    Each sample is computed as an exact matrix-exponential power from the
    segment start, so no integration error accumulates along the trace.
    """
    g = scenario.graph
    x0 = np.asarray(scenario.x0, dtype=float)
    lap1 = laplacian(g).astype(float)
    times, fail_idx = _grid(scenario.t_end, scenario.dt, scenario.t_f)

    if fail_idx is None:
        states = _sample_segment(lap1, x0, times)
        return Trace(times=times, states=states, t_fail=None)

    t_f = float(times[fail_idx])
    pre = _sample_segment(lap1, x0, times[: fail_idx + 1])
    x_at_fail = pre[-1]

    edge = scenario.failed_edge
    gap = x_at_fail[edge.tail - 1] - x_at_fail[edge.head - 1]
    if abs(gap) <= ADMISSIBILITY_TOL:
        raise AdmissibilityError(
            f"states at edge {tuple(edge)} coincide at t_f={t_f}: "
            f"the failure would be silent at every derivative order"
        )

    lap2 = laplacian(remove_edge(g, edge)).astype(float)
    post = _sample_segment(lap2, x_at_fail, times[fail_idx + 1 :] - t_f)
    states = np.vstack([pre, post]) if len(post) else pre
    return Trace(times=times, states=states, t_fail=t_f)


def _sample_segment(lap: np.ndarray, x_start: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """States at the given time offsets from ``x_start`` under x' = -lap x.

    Offsets that are integer multiples of a common step are served from
    powers of one exponential; stragglers get their own exponential.
    """
    if len(offsets) == 0:
        return np.zeros((0, len(x_start)))
    out = np.empty((len(offsets), len(x_start)))
    base = None
    step = None
    for i, t in enumerate(offsets):
        if t == 0.0:
            out[i] = x_start
            continue
        if step is None:
            # First nonzero offset fixes the step for the power fast path.
            step = float(offsets[1] - offsets[0]) if len(offsets) > 1 else float(t)
            if step <= 0:
                step = float(t)
            base = expm(-lap * step)
        k = t / step
        kr = int(round(k))
        if kr >= 1 and abs(k - kr) <= 1e-9:
            out[i] = np.linalg.matrix_power(base, kr) @ x_start
        else:
            out[i] = expm(-lap * float(t)) @ x_start
    return out


def analytic_derivative(g: Digraph, x, p: int, k: int) -> float:
    """Exact k-th time derivative of agent p's response at state ``x``."""
    if g.has_self_loops():
        raise ValueError("consensus network must be self-loop free")
    if not (1 <= p <= g.n):
        raise IndexError(f"vertex {p} out of range 1..{g.n}")
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    vec = np.asarray(x, dtype=float)
    if vec.shape != (g.n,):
        raise ValueError(f"state has shape {vec.shape}, expected ({g.n},)")
    gen = -laplacian(g).astype(float)
    for _ in range(k):
        vec = gen @ vec
    return float(vec[p - 1])


def random_distinct_state(n: int, seed: int) -> list[int]:
    """Deterministic pseudorandom initial state with pairwise distinct
    integer entries."""
    rng = random.Random(seed)
    return rng.sample(range(-5 * n, 5 * n + 1), n)


def write_trace_csv(trace: Trace, fh) -> None:
    """Write ``t,x1,...,xn`` rows at full double precision."""
    header = "t," + ",".join(f"x{i}" for i in range(1, trace.n + 1))
    fh.write(header + "\n")
    for t, row in zip(trace.times, trace.states):
        fh.write(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")


def trace_to_csv(trace: Trace, path=None) -> str | None:
    """Write the trace to ``path``, or return the CSV text if path is None."""
    if path is None:
        buf = io.StringIO()
        write_trace_csv(trace, buf)
        return buf.getvalue()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_trace_csv(trace, fh)
    return None


def read_trace_csv(path_or_fh, t_fail: float | None = None) -> Trace:
    """Read a trace written by :func:`write_trace_csv`."""
    if hasattr(path_or_fh, "read"):
        text = path_or_fh.read()
    else:
        with open(path_or_fh, "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("t,"):
        raise ValueError("not a trace CSV: missing 't,x1,...' header")
    data = np.array(
        [[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float
    )
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError("trace CSV has no state columns")
    return Trace(times=data[:, 0], states=data[:, 1:], t_fail=t_fail)
