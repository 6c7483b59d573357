"""Send-on-delta (level-crossing) encoding and the preprocessing that
precedes it: amplitude normalization and cubic-spline upsampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .core import SpikeTrain, UniformSignal
from .errors import DegenerateInputError, InvalidInputError, InvalidParameterError

__all__ = [
    "SodConfig",
    "TIME_QUANTUM",
    "normalize",
    "upsample_cubic",
    "sod_encode",
    "sod_levels",
    "sod_reconstruct",
]

#: Offset separating several unit spikes emitted at the same sample (1 ns).
TIME_QUANTUM = 1e-9


@dataclass(frozen=True)
class SodConfig:
    theta_sod: float = 0.05

    def __post_init__(self):
        if not self.theta_sod > 0:
            raise InvalidParameterError(
                f"theta_sod must be positive, got {self.theta_sod}"
            )


def normalize(x: UniformSignal) -> UniformSignal:
    """Scale ``x`` by ``1/max|x|`` (no offset removal)."""
    if not len(x):
        raise InvalidInputError("cannot normalize an empty signal")
    peak = np.max(np.abs(x.samples))
    if peak == 0:
        raise DegenerateInputError("cannot normalize an all-zero signal")
    return x.with_samples(x.samples / peak)


def upsample_cubic(x: UniformSignal, factor: int) -> UniformSignal:
    """Natural cubic spline through the samples of ``x`` on a grid ``factor``
    times finer. The output keeps every original sample exactly."""
    if int(factor) != factor or factor < 1:
        raise InvalidParameterError(f"factor must be a positive integer, got {factor}")
    factor = int(factor)
    if factor == 1:
        return x
    n = len(x)
    if n < 4:
        raise InvalidInputError(f"need at least 4 samples for a cubic fit, got {n}")
    # spline in sample-index units keeps knots exact and avoids t0 round-off
    knots = np.arange(n, dtype=float)
    spline = CubicSpline(knots, x.samples, bc_type="natural")
    fine = np.arange((n - 1) * factor + 1) / factor
    y = spline(fine)
    y[::factor] = x.samples
    return UniformSignal(x.t0, x.dt / factor, y)


def _next_crossing(x, start, ref, theta):
    """First index >= start with |x - ref| >= theta, or len(x) if none."""
    n = x.size
    block = 64
    i = start
    while i < n:
        seg = x[i:i + block]
        d = seg - ref
        hit = (d >= theta) | (d <= -theta)
        if hit.any():
            return i + int(np.argmax(hit))
        i += block
        block = min(block * 2, 1 << 16)
    return n


def sod_levels(x: UniformSignal, cfg: SodConfig):
    """Run the reference-level recursion.

    Returns ``(indices, signs, final_level)`` where each emitted unit spike
    is described by its sample index and sign and the reference after
    processing the whole signal is ``x[0] + final_level * theta_sod``.
    """
    s = x.samples
    if not len(s):
        return np.empty(0, dtype=np.int64), np.empty(0), 0
    theta = cfg.theta_sod
    x0 = float(s[0])
    level = 0
    idx, signs = [], []
    i = 1
    while True:
        ref = x0 + level * theta
        i = _next_crossing(s, i, ref, theta)
        if i >= s.size:
            break
        xi = float(s[i])
        # same difference as the block scan, so both agree under rounding
        while xi - (x0 + level * theta) >= theta:
            level += 1
            idx.append(i)
            signs.append(1.0)
        while xi - (x0 + level * theta) <= -theta:
            level -= 1
            idx.append(i)
            signs.append(-1.0)
        i += 1
    return np.asarray(idx, dtype=np.int64), np.asarray(signs), level


def sod_encode(x: UniformSignal, cfg: SodConfig) -> SpikeTrain:
    """Send-on-delta spikes of amplitude +-1.

    The reference starts at the first sample and moves in steps of
    ``theta_sod``; after every sample it is strictly less than ``theta_sod``
    away from the signal. Several crossings at one sample are emitted
    ``TIME_QUANTUM`` apart.
    """
    idx, signs, _ = sod_levels(x, cfg)
    if not idx.size:
        return SpikeTrain()
    # rank of each spike within its sample
    first = np.searchsorted(idx, idx, side="left")
    rank = np.arange(idx.size) - first
    if rank.max() * TIME_QUANTUM >= x.dt:
        raise InvalidInputError("too many crossings per sample for the time quantum")
    times = x.t0 + x.dt * idx + rank * TIME_QUANTUM
    return SpikeTrain(times, signs)


def sod_reconstruct(train: SpikeTrain, cfg: SodConfig, r0: float,
                    grid: UniformSignal) -> UniformSignal:
    """Staircase decoder: ``r0 + theta_sod * (signed spike count up to t)``.

    ``grid`` supplies the output time base; its sample values are ignored.
    Spikes sharing a sample (sub-quantum offsets) are all counted there.
    """
    amps = train.amplitudes
    if amps.size and not np.all(np.abs(amps) == 1):
        raise InvalidInputError("send-on-delta spikes must have amplitude +-1")
    tol = TIME_QUANTUM * 1e3 if grid.dt > TIME_QUANTUM * 1e3 else 0.0
    counts = np.concatenate([[0], np.cumsum(amps)]).astype(np.int64)
    seen = np.searchsorted(train.times, grid.times + tol, side="right")
    return grid.with_samples(r0 + counts[seen] * cfg.theta_sod)
