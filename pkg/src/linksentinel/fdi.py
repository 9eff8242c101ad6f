"""Online monitor: estimate one-sided derivative jumps at sensor nodes from
sampled traces, binarize them against per-order thresholds, and decide
whether a link failed and which one.

The reported jump is the left limit minus the right limit of the k-th
derivative at the candidate instant, which equals the healthy-minus-failed
derivative gap predicted from the topology, evaluated at the state reached
when the edge fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dynamics import Trace
from .graph import Digraph, Edge
from .placement import default_max_order, indicator_set

__all__ = [
    "AMBIGUOUS",
    "DEFAULT_ABS_FLOOR",
    "DEFAULT_REL_SCALE",
    "FdiReport",
    "JumpObservation",
    "analyze_trace",
    "derivative_estimates",
    "derivative_scale",
    "detect",
    "estimate_jumps",
    "fd_weights",
    "isolate",
    "scan_candidate",
]

# Significance rule: |jump| > max(abs floor,
#                                 rel * largest k-th derivative estimate
#                                       anywhere on the sensor's trace,
#                                 guard * local noise floor).
# The local floor is the largest jump statistic in a band around the
# candidate, excluding the stencil-width straddle zone: on a smooth stretch
# it measures the estimator's own truncation and roundoff error, which
# scales with the (k+3)-rd derivative and so cannot be bounded by any
# single multiple of the k-th derivative scale.
DEFAULT_ABS_FLOOR = 1e-6
DEFAULT_REL_SCALE = 1e-4
NOISE_GUARD = 4.0
# Band half-length, in stencil spans, feeding the local noise floor.
FLOOR_BAND_SPANS = 5


class _Ambiguous:
    """Singleton verdict: jumps were seen but match no edge's fingerprint."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AMBIGUOUS"


AMBIGUOUS = _Ambiguous()


@dataclass(frozen=True)
class JumpObservation:
    """One-sided derivative limits of one sensor at one order."""

    sensor: int
    order: int
    left_estimate: float
    right_estimate: float
    jump: float
    threshold: float
    significant: bool


@dataclass(frozen=True)
class FdiReport:
    """Monitor verdict: detection flag, isolated edge (or None, or
    AMBIGUOUS), and the per-sensor jump evidence behind it."""

    detected: bool
    isolated_edge: Edge | None | _Ambiguous
    evidence: tuple[JumpObservation, ...]
    t_star: float


def fd_weights(offsets, k: int) -> np.ndarray:
    """Finite-difference weights for the k-th derivative at offset 0.

    ``offsets`` are the sample locations relative to the evaluation point;
    they need not be uniformly spaced.  Fornberg's recursion.
    """
    x = np.asarray(offsets, dtype=float)
    m = len(x)
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    if m < k + 1:
        raise ValueError(f"need at least {k + 1} samples for order {k}")
    c = np.zeros((m, k + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0]
    for i in range(1, m):
        mn = min(i, k)
        c2 = 1.0
        c5 = c4
        c4 = x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for v in range(mn, 0, -1):
                    c[i, v] = c1 * (v * c[i - 1, v - 1] - c5 * c[i - 1, v]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for v in range(mn, 0, -1):
                c[j, v] = (c4 * c[j, v] - v * c[j, v - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, k]


def _default_width(k: int) -> int:
    # k+3 points give third-order accuracy for the k-th derivative.
    return k + 3


def _stride(trace: Trace, h: float | None) -> int:
    if h is None:
        return 1
    spacing = float(np.median(np.diff(trace.times)))
    ratio = h / spacing
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > 1e-6:
        raise ValueError(f"h={h} is not a multiple of the trace spacing {spacing}")
    return stride


def _one_sided(trace, sensor, idx, k, width, stride, side):
    """k-th derivative estimate at sample ``idx`` from one side, including
    the shared sample at idx itself."""
    samples = trace.for_sensor(sensor)
    if side == "left":
        sel = range(idx - stride * (width - 1), idx + 1, stride)
    else:
        sel = range(idx, idx + stride * (width - 1) + 1, stride)
    sel = list(sel)
    if sel[0] < 0 or sel[-1] >= len(samples):
        raise ValueError(
            f"insufficient samples on the {side} of t={trace.times[idx]:g} "
            f"for a width-{width} stencil"
        )
    offsets = trace.times[sel] - trace.times[idx]
    return float(fd_weights(offsets, k) @ samples[sel])


def derivative_estimates(trace: Trace, sensor: int, k: int, width: int | None = None, stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Right-facing k-th derivative estimates at every sample where the
    stencil fits; returns (times, estimates)."""
    width = _default_width(k) if width is None else width
    samples = trace.for_sensor(sensor)
    times = trace.times
    span = stride * (width - 1)
    if len(samples) <= span:
        raise ValueError("trace too short for the requested stencil")
    diffs = np.diff(times)
    uniform = np.allclose(diffs, diffs[0], rtol=0, atol=1e-12 * max(1.0, times[-1]))
    if uniform and stride == 1:
        w = fd_weights(times[: width] - times[0], k)
        est = np.correlate(samples, w, mode="valid")
        return times[: len(est)], est
    out_t = []
    out_v = []
    for i in range(len(samples) - span):
        sel = list(range(i, i + span + 1, stride))
        w = fd_weights(times[sel] - times[i], k)
        out_t.append(times[i])
        out_v.append(float(w @ samples[sel]))
    return np.asarray(out_t), np.asarray(out_v)


def derivative_scale(trace: Trace, sensor: int, k: int, width: int | None = None, stride: int = 1) -> float:
    """Largest k-th derivative magnitude seen anywhere on the trace."""
    _, est = derivative_estimates(trace, sensor, k, width=width, stride=stride)
    return float(np.max(np.abs(est)))


def _jump_stat_profile(trace: Trace, sensor: int, k: int, width: int, stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """|left - right| jump statistic at every candidate sample.

    Candidate i needs a full stencil on each side; returns (sample indices,
    statistics).  Works on the stride-decimated lattice through the anchor
    when subsampling.
    """
    samples = trace.for_sensor(sensor)
    times = trace.times
    span = (width - 1) * stride
    if len(samples) <= 2 * span:
        return np.array([], dtype=int), np.array([])
    diffs = np.diff(times)
    uniform = np.allclose(diffs, diffs[0], rtol=0, atol=1e-12 * max(1.0, times[-1]))
    if uniform:
        dec_t = times[::stride]
        dec_x = samples[::stride]
        w_right = fd_weights(dec_t[:width] - dec_t[0], k)
        w_left = fd_weights(dec_t[:width] - dec_t[width - 1], k)
        right = np.correlate(dec_x, w_right, mode="valid")
        left = np.correlate(dec_x, w_left, mode="valid")
        m = width - 1
        stats = np.abs(left[: len(dec_x) - 2 * m] - right[m:])
        idx = np.arange(m, len(dec_x) - m) * stride
        return idx, stats
    idx = []
    stats = []
    for i in range(span, len(samples) - span):
        left = _one_sided(trace, sensor, i, k, width, stride, "left")
        right = _one_sided(trace, sensor, i, k, width, stride, "right")
        idx.append(i)
        stats.append(abs(left - right))
    return np.asarray(idx, dtype=int), np.asarray(stats)


def _local_floor(idx: np.ndarray, stats: np.ndarray, at: int, span: int) -> float:
    """Largest jump statistic near the candidate but outside its straddle
    zone; zero when no such neighbours exist."""
    if len(stats) == 0:
        return 0.0
    offsets = np.abs(idx - at)
    band = (offsets > span) & (offsets <= (FLOOR_BAND_SPANS + 1) * span)
    if not band.any():
        return 0.0
    return float(np.max(stats[band]))


def estimate_jumps(
    trace: Trace,
    sensor: int,
    t_star: float,
    z: int,
    h: float | None = None,
    stencil_width: int | None = None,
    abs_floor: float = DEFAULT_ABS_FLOOR,
    rel: float = DEFAULT_REL_SCALE,
) -> list[JumpObservation]:
    """One-sided jump estimates at ``t_star`` for orders 1..z.

    ``jump`` is left minus right.  The significance threshold for order k
    combines the absolute floor, the sensor's trace-wide k-th derivative
    scale, and a guarded local noise floor taken from the same jump
    statistic on the smooth stretches around the candidate.
    """
    if z < 1:
        raise ValueError("max order must be at least 1")
    idx = trace.sample_index(t_star)
    if idx == 0 or idx == len(trace.times) - 1:
        raise ValueError("t_star must be strictly inside the trace")
    stride = _stride(trace, h)
    out = []
    for k in range(1, z + 1):
        width = _default_width(k) if stencil_width is None else stencil_width
        left = _one_sided(trace, sensor, idx, k, width, stride, "left")
        right = _one_sided(trace, sensor, idx, k, width, stride, "right")
        jump = left - right
        scale = derivative_scale(trace, sensor, k, width=width, stride=stride)
        profile_idx, profile = _jump_stat_profile(trace, sensor, k, width, stride)
        floor = _local_floor(profile_idx, profile, idx, (width - 1) * stride)
        threshold = max(abs_floor, rel * scale, NOISE_GUARD * floor)
        out.append(
            JumpObservation(
                sensor=sensor,
                order=k,
                left_estimate=left,
                right_estimate=right,
                jump=jump,
                threshold=threshold,
                significant=abs(jump) > threshold,
            )
        )
    return out


def _gather(g, sensors, trace, t_star, z, **kwargs) -> list[JumpObservation]:
    sens = sorted(set(int(p) for p in sensors))
    for p in sens:
        if not (1 <= p <= g.n):
            raise IndexError(f"vertex {p} out of range 1..{g.n}")
        if p > trace.n:
            raise ValueError(f"trace has no samples for sensor {p}")
    obs: list[JumpObservation] = []
    for p in sens:
        obs.extend(estimate_jumps(trace, p, t_star, z, **kwargs))
    return obs


def _signature(observations: Iterable[JumpObservation]) -> frozenset[tuple[int, int]]:
    """Lowest significant order per sensor (0 when a sensor saw nothing).

    Only the lowest order enters: the instant the state's slope breaks, all
    higher-order estimates react too, so they carry no extra information.
    """
    lowest: dict[int, int] = {}
    for ob in observations:
        lowest.setdefault(ob.sensor, 0)
        if ob.significant and (lowest[ob.sensor] == 0 or ob.order < lowest[ob.sensor]):
            lowest[ob.sensor] = ob.order
    return frozenset((order, sensor) for sensor, order in lowest.items())


def detect(g: Digraph, sensors, trace: Trace, t_star: float, z: int | None = None, **kwargs) -> bool:
    """True when any sensor shows a significant jump at any order up to z."""
    z = default_max_order(g) if z is None else z
    obs = _gather(g, sensors, trace, t_star, z, **kwargs)
    return any(ob.significant for ob in obs)


def isolate(g: Digraph, sensors, trace: Trace, t_star: float, z: int | None = None, **kwargs):
    """Edge whose fingerprint matches the observed jump signature.

    Returns None when no sensor saw anything, and AMBIGUOUS when jumps were
    seen but the signature matches no edge (or more than one, which cannot
    happen for a sensor set with zero resolution deficit).
    """
    z = default_max_order(g) if z is None else z
    obs = _gather(g, sensors, trace, t_star, z, **kwargs)
    return _isolate_from_observations(g, sensors, obs, z)


def _isolate_from_observations(g, sensors, obs, z):
    if not any(ob.significant for ob in obs):
        return None
    signature = _signature(obs)
    matches = [
        e
        for e in g.canonical_edges()
        if indicator_set(g, sensors, e, z) == signature
    ]
    if len(matches) == 1:
        return matches[0]
    return AMBIGUOUS


def analyze_trace(g: Digraph, sensors, trace: Trace, t_star: float, z: int | None = None, **kwargs) -> FdiReport:
    """Full verdict for one candidate instant: detection, isolation, and the
    evidence both were decided on."""
    z = default_max_order(g) if z is None else z
    obs = _gather(g, sensors, trace, t_star, z, **kwargs)
    detected = any(ob.significant for ob in obs)
    edge = _isolate_from_observations(g, sensors, obs, z)
    return FdiReport(
        detected=detected,
        isolated_edge=edge,
        evidence=tuple(obs),
        t_star=float(trace.times[trace.sample_index(t_star)]),
    )


def scan_candidate(
    trace: Trace,
    sensors,
    z: int,
    stencil_width: int | None = None,
    abs_floor: float = DEFAULT_ABS_FLOOR,
    rel: float = DEFAULT_REL_SCALE,
) -> float | None:
    """Scan every interior instant and return the one with the strongest
    significant jump, or None when the trace looks smooth everywhere.

    Convenience for when the failure instant is not known.  Orders are
    scanned lowest first and the first order with any significant jump
    decides, because a discontinuity also pollutes the estimates of all
    higher orders around it.  The returned instant is exact when the lowest
    reacting order is 1 and within a stencil width otherwise.
    """
    if z < 1:
        raise ValueError("max order must be at least 1")
    times = trace.times
    diffs = np.diff(times)
    if not np.allclose(diffs, diffs[0], rtol=0, atol=1e-12 * max(1.0, times[-1])):
        raise ValueError("scan requires a uniformly sampled trace")
    sens = sorted(set(int(p) for p in sensors))
    for k in range(1, z + 1):
        width = _default_width(k) if stencil_width is None else stencil_width
        span = width - 1
        best_ratio = 1.0
        best_t = None
        for p in sens:
            idx, stats = _jump_stat_profile(trace, p, k, width)
            if len(stats) == 0:
                continue
            scale = derivative_scale(trace, p, k, width=width)
            floors = _sliding_floor(stats, span)
            thresholds = np.maximum(
                max(abs_floor, rel * scale), NOISE_GUARD * floors
            )
            ratios = stats / thresholds
            i = int(np.argmax(ratios))
            if ratios[i] > best_ratio:
                best_ratio = ratios[i]
                best_t = float(times[idx[i]])
        if best_t is not None:
            return best_t
    return None


def _sliding_floor(stats: np.ndarray, span: int) -> np.ndarray:
    """Per-candidate local noise floor: largest statistic in the bands
    [i-B, i-span) and (i+span, i+B] with B spanning a few stencils; zero
    where no band values exist."""
    n = len(stats)
    band = FLOOR_BAND_SPANS * span
    if n == 0:
        return stats.copy()
    pad = np.full(band + span, -np.inf)
    padded = np.concatenate([pad, stats, pad])
    windows = np.lib.stride_tricks.sliding_window_view(padded, band)
    winmax = windows.max(axis=1)
    # stats[i] sits at padded position i + band + span; the left band is
    # padded[i : i + band], the right band starts span + 1 past the
    # candidate.
    left = winmax[np.arange(n)]
    right = winmax[np.arange(n) + band + 2 * span + 1]
    out = np.maximum(left, right)
    out[~np.isfinite(out)] = 0.0
    return out
