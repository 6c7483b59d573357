"""Leaky integrate-and-fire encoding of hybrid signals and spike trains."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    HybridSignal,
    SpikeTrain,
    _hybrid_steps,
    grid_index,
    quantize_count,
)
from .errors import InvalidInputError, InvalidParameterError

__all__ = [
    "ResetMode",
    "LifConfig",
    "lif_encode",
    "lif_encode_train",
    "collapse_to_spikes",
]


class ResetMode(enum.Enum):
    TO_ZERO = "zero"
    BY_SUBTRACTION = "subtract"
    TO_MOD = "mod"


@dataclass(frozen=True)
class LifConfig:
    theta: float = 1.0
    alpha: float = 0.0
    t_r: float = 0.0
    reset: ResetMode = ResetMode.TO_MOD

    def __post_init__(self):
        if not self.theta > 0:
            raise InvalidParameterError(f"theta must be positive, got {self.theta}")
        if not self.alpha >= 0:
            raise InvalidParameterError(f"alpha must be >= 0, got {self.alpha}")
        if not self.t_r >= 0:
            raise InvalidParameterError(f"t_r must be >= 0, got {self.t_r}")
        if not isinstance(self.reset, ResetMode):
            object.__setattr__(self, "reset", ResetMode(self.reset))


def _fire(u, theta, reset):
    """Apply one threshold test; returns (emitted amplitude or 0.0, new potential)."""
    if reset is ResetMode.TO_MOD:
        n = quantize_count(u, theta)
        if n == 0:
            return 0.0, u
        amp = n * theta
        return amp, u - amp
    if abs(u) < theta:
        return 0.0, u
    amp = theta if u > 0 else -theta
    if reset is ResetMode.TO_ZERO:
        return amp, 0.0
    return amp, u - amp


def lif_encode(f: HybridSignal, cfg: LifConfig, full_output=False):
    """Simulate a LIF neuron on the sample grid of ``f``.

    Each step the potential decays by ``exp(-alpha*dt)``, picks up the
    leak-weighted area of the held sample plus any Dirac weight binned to the
    step, and is then tested against ``theta``. Triggering is suppressed for
    ``t_r`` seconds after a spike while integration continues.

    With ``full_output=True`` returns ``(train, residual_potential)``.
    """
    base = f.base
    if not np.all(np.isfinite(base.samples)):
        raise InvalidInputError("signal samples must be finite")
    if len(f.diracs) and f.diracs.times[0] <= base.t0:
        raise InvalidInputError("Dirac pulses must occur strictly after the start time")
    inc = _hybrid_steps(f, cfg.alpha).tolist()
    decay = math.exp(-cfg.alpha * base.dt)
    refractory_steps = math.ceil(cfg.t_r / base.dt - 1e-9) if cfg.t_r > 0 else 0
    theta, reset = cfg.theta, cfg.reset

    idx, amps = [], []
    u = 0.0
    last = None
    for i, x in enumerate(inc):
        u = decay * u + x
        if last is not None and i - last < refractory_steps:
            continue
        amp, u = _fire(u, theta, reset)
        if amp:
            idx.append(i)
            amps.append(amp)
            last = i
    train = SpikeTrain(base.t0 + base.dt * np.asarray(idx, dtype=float), amps)
    return (train, u) if full_output else train


def lif_encode_train(eta: SpikeTrain, cfg: LifConfig, full_output=False):
    """Event-driven LIF on a pure Dirac train.

    The residuum is only updated at input events, where it is aggregated with
    the incoming weight and tested against the threshold. For ``t_r = 0`` this
    is the ``dt -> 0`` limit of :func:`lif_encode` on the same Diracs.
    """
    theta, alpha, t_r, reset = cfg.theta, cfg.alpha, cfg.t_r, cfg.reset
    out_t, out_a = [], []
    delta = 0.0
    prev = None
    last_fire = -math.inf
    for t, s in zip(eta.times.tolist(), eta.amplitudes.tolist()):
        if prev is not None and alpha:
            delta *= math.exp(-alpha * (t - prev))
        delta += s
        prev = t
        if t - last_fire < t_r:
            continue
        amp, delta = _fire(delta, theta, reset)
        if amp:
            out_t.append(t)
            out_a.append(amp)
            last_fire = t
    train = SpikeTrain(out_t, out_a)
    return (train, delta) if full_output else train


def collapse_to_spikes(f: HybridSignal, cfg: LifConfig) -> SpikeTrain:
    """Dirac surrogate of ``f`` concentrated on its own LIF firing times.

    Each output amplitude is the leak-weighted integral of ``f`` over the
    half-open interval since the previous firing, so the surrogate drives
    the neuron to the same firing times with the same amplitudes. Whatever
    accumulates after the last firing is placed on the final sample.
    """
    fired = lif_encode(f, cfg)
    base = f.base
    inc = _hybrid_steps(f, cfg.alpha).tolist()
    decay = math.exp(-cfg.alpha * base.dt)
    stops = set(grid_index(fired.times, base).tolist())
    stops.add(len(base) - 1)
    out_t, out_a = [], []
    acc = 0.0
    for i, x in enumerate(inc):
        acc = decay * acc + x
        if i in stops:
            out_t.append(base.t0 + base.dt * i)
            out_a.append(acc)
            acc = 0.0
    return SpikeTrain(out_t, out_a)
