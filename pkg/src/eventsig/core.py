"""Signal and spike-train value types, leaky aggregation and the metrics
built on it (weighted Alexiewicz norm, Weyl discrepancy).

All containers are immutable once constructed. Arrays stored on them are
flagged read-only so they can be shared freely between callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

__all__ = [
    "Spike",
    "SpikeTrain",
    "UniformSignal",
    "HybridSignal",
    "oplus",
    "trunc_quantize",
    "quantize_count",
    "alexiewicz_norm",
    "alexiewicz_distance",
    "hybrid_alexiewicz_norm",
    "weyl_discrepancy",
    "err_trajectory",
    "zoh_weight",
    "grid_index",
]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


class Spike(NamedTuple):
    t: float
    amplitude: float


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    """Time-sorted weighted Dirac pulses.

    Construction sorts by time, merges coincident events by summing their
    amplitudes and drops events whose (merged) amplitude is exactly zero, so
    the stored times are always strictly increasing.
    """

    times: np.ndarray = field(default_factory=lambda: np.empty(0))
    amplitudes: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        a = np.asarray(self.amplitudes, dtype=float).ravel()
        if t.shape != a.shape:
            raise InvalidInputError(
                f"times and amplitudes differ in length ({t.size} vs {a.size})"
            )
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a))):
            raise InvalidInputError("spike times and amplitudes must be finite")
        if t.size and t.min() < 0:
            raise InvalidInputError("spike times must be non-negative")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            order = np.argsort(t, kind="stable")
            t, a = t[order], a[order]
            t, inverse = np.unique(t, return_inverse=True)
            a = np.bincount(inverse, weights=a, minlength=t.size)
        keep = a != 0
        if not keep.all():
            t, a = t[keep], a[keep]
        object.__setattr__(self, "times", _frozen(t))
        object.__setattr__(self, "amplitudes", _frozen(a))

    @classmethod
    def from_spikes(cls, spikes: Iterable[tuple[float, float]]) -> "SpikeTrain":
        """Build from ``(t, amplitude)`` pairs."""
        pairs = list(spikes)
        if not pairs:
            return cls()
        t, a = zip(*pairs)
        return cls(t, a)

    def __len__(self):
        return int(self.times.size)

    def __iter__(self) -> Iterator[Spike]:
        for t, a in zip(self.times.tolist(), self.amplitudes.tolist()):
            yield Spike(t, a)

    def __getitem__(self, i) -> Spike:
        return Spike(float(self.times[i]), float(self.amplitudes[i]))

    def __eq__(self, other):
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(
            self.amplitudes, other.amplitudes
        )

    def __repr__(self):
        body = ", ".join(f"({a:g}, t={t:g})" for t, a in list(self)[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"SpikeTrain[{len(self)}]({body}{more})"

    def negated(self) -> "SpikeTrain":
        return SpikeTrain(self.times, -self.amplitudes)

    def merge(self, other: "SpikeTrain") -> "SpikeTrain":
        """Superposition of two trains (coincident amplitudes add)."""
        return SpikeTrain(
            np.concatenate([self.times, other.times]),
            np.concatenate([self.amplitudes, other.amplitudes]),
        )


@dataclass(frozen=True, eq=False)
class UniformSignal:
    """Samples ``samples[i]`` taken at ``t0 + i * dt``."""

    t0: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "samples", _frozen(np.ravel(self.samples)))

    @classmethod
    def from_rate(cls, samples, fs: float, t0: float = 0.0) -> "UniformSignal":
        return cls(t0, 1.0 / fs, samples)

    def __len__(self):
        return int(self.samples.size)

    def __eq__(self, other):
        if not isinstance(other, UniformSignal):
            return NotImplemented
        return (
            self.t0 == other.t0
            and self.dt == other.dt
            and np.array_equal(self.samples, other.samples)
        )

    @property
    def fs(self) -> float:
        return 1.0 / self.dt

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (len(self) - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    def with_samples(self, samples) -> "UniformSignal":
        return UniformSignal(self.t0, self.dt, samples)


@dataclass(frozen=True, eq=False)
class HybridSignal:
    """A sampled signal with weighted Dirac pulses superimposed on it."""

    base: UniformSignal
    diracs: SpikeTrain = field(default_factory=SpikeTrain)

    def __post_init__(self):
        if len(self.diracs):
            slack = 1e-9 * self.base.dt
            lo, hi = self.base.t0 - slack, self.base.t_end + slack
            if self.diracs.times[0] < lo or self.diracs.times[-1] > hi:
                raise InvalidInputError(
                    f"Dirac times must lie in [{self.base.t0}, {self.base.t_end}]"
                )

    @classmethod
    def diracs_only(cls, diracs: SpikeTrain, dt: float, t_end: float | None = None,
                    t0: float = 0.0) -> "HybridSignal":
        """Zero base signal on a grid wide enough to hold ``diracs``."""
        last = diracs.times[-1] if len(diracs) else t0
        t_end = last if t_end is None else max(t_end, last)
        n = int(math.ceil((t_end - t0) / dt - 1e-9)) + 1
        return cls(UniformSignal(t0, dt, np.zeros(n)), diracs)

    def dirac_grid(self) -> np.ndarray:
        """Dirac weights binned onto the base grid (nearest sample)."""
        out = np.zeros(len(self.base))
        if len(self.diracs):
            idx = grid_index(self.diracs.times, self.base)
            np.add.at(out, idx, self.diracs.amplitudes)
        return out


def grid_index(times, grid: UniformSignal) -> np.ndarray:
    """Nearest sample index of ``times`` on ``grid`` (clipped to the span)."""
    idx = np.rint((np.asarray(times, dtype=float) - grid.t0) / grid.dt).astype(np.int64)
    return np.clip(idx, 0, len(grid) - 1)


def zoh_weight(alpha: float, dt: float) -> float:
    """Leak-weighted integral of a unit constant over one sample period.

    Equals ``(1 - exp(-alpha*dt)) / alpha`` and tends to ``dt`` as alpha -> 0.
    """
    if alpha == 0:
        return dt
    return -math.expm1(-alpha * dt) / alpha


def oplus(a: float, b: float, gap: float, alpha: float) -> float:
    """Leaky aggregation: decay ``a`` over ``gap`` seconds and add ``b``."""
    return math.exp(-alpha * gap) * a + b


def quantize_count(z: float, theta: float) -> int:
    """Signed integer ``n`` with ``n*theta`` the truncation of ``z``.

    The float quotient ``z/theta`` can land one ulp on the wrong side of an
    integer, so the count is corrected against the products ``n*theta``:
    the result always satisfies ``|n|*theta <= |z| < (|n|+1)*theta``.
    """
    if not theta > 0:
        raise InvalidParameterError(f"theta must be positive, got {theta}")
    mag = abs(z)
    n = int(mag / theta)
    if n * theta > mag:
        n -= 1
    elif (n + 1) * theta <= mag:
        n += 1
    return n if z >= 0 else -n


def trunc_quantize(z: float, theta: float) -> float:
    """Round ``z`` toward zero onto the lattice ``theta * Z``."""
    return quantize_count(z, theta) * theta


def _check_alpha(alpha):
    if not alpha >= 0:
        raise InvalidParameterError(f"alpha must be >= 0, got {alpha}")


def _leaky_prefix(times, amps, alpha):
    """Running leaky sums at each event time."""
    if alpha == 0:
        return np.cumsum(amps)
    t = times.tolist()
    a = amps.tolist()
    out = [0.0] * len(a)
    acc = 0.0
    prev = t[0] if t else 0.0
    for i, (ti, ai) in enumerate(zip(t, a)):
        acc = math.exp(-alpha * (ti - prev)) * acc + ai
        out[i] = acc
        prev = ti
    return np.asarray(out)


def alexiewicz_norm(train: SpikeTrain, alpha: float) -> float:
    """Weighted Alexiewicz norm of a Dirac train.

    Between events the leaky integral only decays, so the supremum over all
    horizons is attained at an event time.
    """
    _check_alpha(alpha)
    if not len(train):
        return 0.0
    return float(np.max(np.abs(_leaky_prefix(train.times, train.amplitudes, alpha))))


def alexiewicz_distance(a: SpikeTrain, b: SpikeTrain, alpha: float) -> float:
    return alexiewicz_norm(a.merge(b.negated()), alpha)


def weyl_discrepancy(amplitudes: Sequence[float]) -> float:
    """Largest ``|sum|`` over contiguous runs, via prefix-sum extremes."""
    best_hi = best_lo = acc = 0.0
    for x in amplitudes:
        acc += x
        if acc > best_hi:
            best_hi = acc
        elif acc < best_lo:
            best_lo = acc
    return float(best_hi - best_lo)


def _hybrid_steps(f: HybridSignal, alpha: float) -> np.ndarray:
    """Per-step input increments (base signal and Diracs) on f's grid."""
    w = zoh_weight(alpha, f.base.dt)
    inc = f.base.samples * w
    # the first sample opens the integration interval and carries no area
    inc[0] = 0.0
    return inc + f.dirac_grid()


def _leaky_scan(inc: np.ndarray, decay: float) -> np.ndarray:
    out = np.empty(inc.size)
    acc = 0.0
    for i, x in enumerate(inc.tolist()):
        acc = decay * acc + x
        out[i] = acc
    return out


def err_trajectory(f: HybridSignal, train: SpikeTrain, alpha: float) -> UniformSignal:
    """Leaky running integral of ``train - f`` evaluated on f's sample grid.

    Train events are binned to the nearest sample, matching the grid the
    LIF simulator fires on.
    """
    _check_alpha(alpha)
    base = f.base
    if len(train):
        slack = 1e-9 * base.dt
        if train.times[0] < base.t0 - slack or train.times[-1] > base.t_end + slack:
            raise InvalidInputError("spike train extends beyond the signal's span")
    inc = -_hybrid_steps(f, alpha)
    if len(train):
        np.add.at(inc, grid_index(train.times, base), train.amplitudes)
    return base.with_samples(_leaky_scan(inc, math.exp(-alpha * base.dt)))


def hybrid_alexiewicz_norm(f: HybridSignal, alpha: float) -> float:
    """Alexiewicz norm of a hybrid signal, sampled on its grid.

    This is a lower bound of the continuous-time supremum at grid resolution.
    """
    return float(np.max(np.abs(err_trajectory(f, SpikeTrain(), alpha).samples)))
