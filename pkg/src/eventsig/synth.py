"""Seeded generators for spike trains, Dirac-superimposed waves and a
clean toy ECG with known R-peak times."""

from __future__ import annotations

import math

import numpy as np

from .core import HybridSignal, SpikeTrain, UniformSignal
from .errors import InvalidParameterError

__all__ = ["gen_random_train", "gen_wave_with_diracs", "gen_synthetic_ecg"]


def gen_random_train(n: int, amp_range=(-1.0, 1.0), mean_gap: float = 1.0,
                     seed=None) -> SpikeTrain:
    """``n`` spikes with i.i.d. uniform amplitudes on ``amp_range`` (zero
    rejected) and exponential inter-spike gaps of mean ``mean_gap``.

    The first spike sits one gap after t = 0, so every time is positive.
    ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    lo, hi = amp_range
    if not lo < hi:
        raise InvalidParameterError(f"empty amplitude range [{lo}, {hi}]")
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    if not mean_gap > 0:
        raise InvalidParameterError("mean_gap must be positive")
    rng = np.random.default_rng(seed)
    amps = rng.uniform(lo, hi, n)
    gaps = rng.exponential(mean_gap, n)
    # zero draws would violate the spike invariants; redraw them
    while True:
        bad = (amps == 0) | (gaps == 0)
        if not bad.any():
            break
        k = int(bad.sum())
        amps[bad] = rng.uniform(lo, hi, k)
        gaps[bad] = rng.exponential(mean_gap, k)
    return SpikeTrain(np.cumsum(gaps), amps)


def gen_wave_with_diracs(seed, duration: float, dt: float = 0.01,
                         n_diracs: int | None = None) -> HybridSignal:
    """Sum of 2-4 random sinusoids with 3-10 Dirac pulses placed on grid
    points strictly after ``t0 = 0``."""
    if not duration > 0:
        raise InvalidParameterError("duration must be positive")
    rng = np.random.default_rng(seed)
    n = int(round(duration / dt)) + 1
    t = dt * np.arange(n)
    wave = np.zeros(n)
    for _ in range(rng.integers(2, 5)):
        amp = rng.uniform(0.2, 1.5)
        freq = rng.uniform(0.1, 2.0)
        phase = rng.uniform(0, 2 * math.pi)
        wave += amp * np.sin(2 * math.pi * freq * t + phase)
    k = int(rng.integers(3, 11)) if n_diracs is None else n_diracs
    k = min(k, n - 1)
    idx = np.sort(rng.choice(np.arange(1, n), size=k, replace=False))
    weights = rng.uniform(0.5, 3.0, k) * rng.choice([-1.0, 1.0], k)
    return HybridSignal(UniformSignal(0.0, dt, wave), SpikeTrain(idx * dt, weights))


# (offset from R in s, width in s, amplitude in mV) of each Gaussian bump
_TEMPLATE = (
    (-0.200, 0.025, 0.15),   # P
    (-0.030, 0.008, -0.12),  # Q
    (0.000, 0.010, 1.20),    # R
    (0.030, 0.009, -0.25),   # S
    (0.280, 0.050, 0.30),    # T
)


def gen_synthetic_ecg(heart_rate_bpm: float = 60.0, duration: float = 10.0,
                      fs: float = 360.0):
    """Periodic P-QRS-T waveform built from Gaussian bumps.

    R peaks sit at ``RR/2 + k*RR`` for every ``k`` with the peak inside the
    record. Returns ``(signal, r_times)``.
    """
    if not 30 <= heart_rate_bpm <= 220:
        raise InvalidParameterError("heart rate must lie in [30, 220] bpm")
    if not duration > 0:
        raise InvalidParameterError("duration must be positive")
    rr = 60.0 / heart_rate_bpm
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    r_times = np.arange(0.5 * rr, n / fs, rr)
    # morphology scales mildly with rate so fast rhythms keep T before next P
    scale = min(1.0, rr / 0.8) ** 0.5
    x = np.zeros(n)
    for r in r_times:
        for offset, width, amp in _TEMPLATE:
            center = r + (offset * scale if abs(offset) > 0.1 else offset)
            w = width * (scale if abs(offset) > 0.1 else 1.0)
            lo = max(0, int((center - 5 * w) * fs))
            hi = min(n, int((center + 5 * w) * fs) + 2)
            seg = t[lo:hi]
            x[lo:hi] += amp * np.exp(-0.5 * ((seg - center) / w) ** 2)
    return UniformSignal(0.0, 1.0 / fs, x), r_times
