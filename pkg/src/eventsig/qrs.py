"""QRS-complex detectors.

Two detectors share the :class:`Detection` output type:

* :func:`detect_qrs_discrepancy` works purely on a send-on-delta spike
  train: a local Weyl discrepancy per spike, smoothed and compared against
  trailing moving statistics.
* :func:`pan_tompkins` is the classic sample-domain baseline.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import signal as sps

from .core import SpikeTrain, UniformSignal
from .errors import InvalidInputError, InvalidParameterError
from .sod import SodConfig, normalize, sod_encode, upsample_cubic

__all__ = [
    "Detection",
    "DiscrepancyDetectorConfig",
    "PanTompkinsConfig",
    "local_discrepancy_signal",
    "moving_average",
    "moving_max",
    "detect_qrs_discrepancy",
    "ecg_to_spikes",
    "pan_tompkins",
]


class Detection(NamedTuple):
    t: float
    score: float = 0.0


@dataclass(frozen=True)
class DiscrepancyDetectorConfig:
    window_disc: float = 0.018
    window_prefilter: float = 0.1
    window_stats: float = 2.0
    level_fraction: float = 0.6

    def __post_init__(self):
        for name in ("window_disc", "window_prefilter", "window_stats"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")
        if not 0 < self.level_fraction < 1:
            raise InvalidParameterError("level_fraction must lie in (0, 1)")


def local_discrepancy_signal(train: SpikeTrain, window_disc: float):
    """Weyl discrepancy of the spikes in ``[t_k - window_disc, t_k]`` for each
    spike ``k``.

    Uses the prefix sums ``P``: a window covering spikes ``j..k`` has
    discrepancy ``max(P[j..k+1]) - min(P[j..k+1])``, tracked with two
    monotone deques. Returns ``(times, values)``.
    """
    t = train.times.tolist()
    a = train.amplitudes.tolist()
    n = len(t)
    prefix = [0.0] * (n + 1)
    for i, x in enumerate(a):
        prefix[i + 1] = prefix[i] + x
    out = [0.0] * n
    hi = deque()
    lo = deque()
    j = 0
    pushed = 0  # next prefix index to enter the deques
    for k in range(n):
        while t[j] < t[k] - window_disc:
            j += 1
        while pushed <= k + 1:
            v = prefix[pushed]
            while hi and prefix[hi[-1]] <= v:
                hi.pop()
            hi.append(pushed)
            while lo and prefix[lo[-1]] >= v:
                lo.pop()
            lo.append(pushed)
            pushed += 1
        while hi[0] < j:
            hi.popleft()
        while lo[0] < j:
            lo.popleft()
        out[k] = prefix[hi[0]] - prefix[lo[0]]
    return train.times.copy(), np.asarray(out)


def moving_average(times, values, window: float) -> np.ndarray:
    """Mean of the entries with time in ``(t - window, t]``, per entry.

    The running window sum is Neumaier-compensated, so values leaving the
    window do not leave rounding residue behind on long records.
    """
    t = np.asarray(times, dtype=float).tolist()
    v = np.asarray(values, dtype=float).tolist()
    out = [0.0] * len(v)
    acc = comp = 0.0
    j = 0
    for k, x in enumerate(v):
        s = acc + x
        comp += (acc - s) + x if abs(acc) >= abs(x) else (x - s) + acc
        acc = s
        while t[j] <= t[k] - window:
            y = -v[j]
            s = acc + y
            comp += (acc - s) + y if abs(acc) >= abs(y) else (y - s) + acc
            acc = s
            j += 1
        out[k] = (acc + comp) / (k - j + 1)
    return np.asarray(out)


def moving_max(times, values, window: float) -> np.ndarray:
    """Maximum of the entries with time in ``(t - window, t]``, per entry."""
    t = np.asarray(times, dtype=float).tolist()
    v = np.asarray(values, dtype=float).tolist()
    out = [0.0] * len(v)
    dq = deque()
    for k, x in enumerate(v):
        while dq and v[dq[-1]] <= x:
            dq.pop()
        dq.append(k)
        while t[dq[0]] <= t[k] - window:
            dq.popleft()
        out[k] = v[dq[0]]
    return np.asarray(out)


def detect_qrs_discrepancy(train: SpikeTrain, cfg: DiscrepancyDetectorConfig = None):
    """Detect QRS complexes from a send-on-delta spike train.

    A complex starts when the pre-filtered discrepancy exceeds
    ``level_fraction`` of its trailing maximum and ends at the first later
    spike where it drops below its trailing mean; the detection is placed
    halfway between the two. Only trailing windows are used.
    """
    cfg = cfg or DiscrepancyDetectorConfig()
    if not len(train):
        return []
    times, disc = local_discrepancy_signal(train, cfg.window_disc)
    pre = moving_average(times, disc, cfg.window_prefilter)
    level = moving_max(times, pre, cfg.window_stats)
    mean = moving_average(times, pre, cfg.window_stats)

    dets = []
    start = None
    peak = 0.0
    for t, p, m, mu in zip(times.tolist(), pre.tolist(), level.tolist(), mean.tolist()):
        if start is None:
            if p > cfg.level_fraction * m:
                start, peak = t, p
        elif p < mu:
            dets.append(Detection(0.5 * (start + t), peak))
            start = None
        else:
            peak = max(peak, p)
    return dets


def ecg_to_spikes(x: UniformSignal, theta_sod: float = 0.05, upsample: int = 10,
                  normalized: bool = True) -> SpikeTrain:
    """Normalize, spline-upsample and send-on-delta encode an ECG channel."""
    if normalized:
        x = normalize(x)
    if upsample > 1:
        x = upsample_cubic(x, upsample)
    return sod_encode(x, SodConfig(theta_sod))


@dataclass(frozen=True)
class PanTompkinsConfig:
    band: tuple[float, float] = (5.0, 15.0)
    # scipy order per band edge; the band-pass has twice as many poles
    filter_order: int = 2
    integration_window: float = 0.150
    refractory: float = 0.200
    t_wave_window: float = 0.360
    searchback_factor: float = 1.66
    learning_time: float = 2.0


def _bandpass(cfg, fs):
    b, a = sps.butter(cfg.filter_order, cfg.band, btype="bandpass", fs=fs)
    _, gd = sps.group_delay((b, a), w=[0.5 * sum(cfg.band)], fs=fs)
    return b, a, float(gd[0])


def _rr_mean(rr):
    return sum(rr) / len(rr) if rr else None


def pan_tompkins(x: UniformSignal, cfg: PanTompkinsConfig = None):
    """Pan-Tompkins QRS detection.

    Causal 5-15 Hz Butterworth band-pass, five-point derivative, squaring
    and 150 ms moving-window integration, followed by the adaptive
    signal/noise peak thresholds on both the integrated and the band-passed
    signal, T-wave rejection and RR-based search-back. Detections are placed
    on the band-passed peak shifted back by the filter's group delay.
    """
    cfg = cfg or PanTompkinsConfig()
    fs = x.fs
    n = len(x)
    n_learn = int(round(cfg.learning_time * fs))
    if n < n_learn:
        raise InvalidInputError(
            f"need at least {cfg.learning_time:g} s of signal, got {n / fs:.3f} s"
        )
    if not np.all(np.isfinite(x.samples)):
        raise InvalidInputError("signal samples must be finite")

    b, a, delay = _bandpass(cfg, fs)
    bp = sps.lfilter(b, a, x.samples)
    deriv = sps.lfilter(np.array([2.0, 1.0, 0.0, -1.0, -2.0]) * (fs / 8.0), [1.0], bp)
    sq = deriv * deriv
    n_int = max(1, int(round(cfg.integration_window * fs)))
    mwi = sps.lfilter(np.ones(n_int) / n_int, [1.0], sq)
    abs_bp = np.abs(bp)

    # local maxima of the integrated signal (flat tops count once, at the left)
    peaks = np.flatnonzero(
        (mwi[1:-1] > mwi[:-2]) & (mwi[1:-1] >= mwi[2:])
    ) + 1

    spki = mwi[:n_learn].max() / 3.0
    npki = mwi[:n_learn].mean() / 2.0
    spkf = abs_bp[:n_learn].max() / 3.0
    npkf = abs_bp[:n_learn].mean() / 2.0

    refractory = int(round(cfg.refractory * fs))
    t_wave = int(round(cfg.t_wave_window * fs))
    shift = int(round(delay))

    rr_recent = deque(maxlen=8)
    rr_regular = deque(maxlen=8)
    qrs = []  # (location on band-passed signal, integrated peak)
    last_loc = None
    last_slope = None
    candidates = []  # noise peaks since the last accepted QRS
    irregular = False

    def thresholds():
        thi = npki + 0.25 * (spki - npki)
        thf = npkf + 0.25 * (spkf - npkf)
        if irregular:
            thi, thf = 0.5 * thi, 0.5 * thf
        return thi, thf

    def accept(loc, pk_i, pk_f, slope, weight):
        nonlocal spki, spkf, last_loc, last_slope, irregular
        if last_loc is not None:
            rr = loc - last_loc
            rr_recent.append(rr)
            avg2 = _rr_mean(rr_regular) or _rr_mean(rr_recent)
            if 0.92 * avg2 <= rr <= 1.16 * avg2 or not rr_regular:
                rr_regular.append(rr)
                irregular = False
            else:
                irregular = True
        spki = weight * pk_i + (1 - weight) * spki
        spkf = weight * pk_f + (1 - weight) * spkf
        qrs.append((loc, pk_i))
        last_loc = loc
        last_slope = slope
        candidates.clear()

    for i in peaks.tolist():
        lo = max(0, i - n_int)
        seg = abs_bp[lo:i + 1]
        loc = lo + int(np.argmax(seg))
        pk_f = float(seg.max())
        pk_i = float(mwi[i])
        slope = float(np.abs(deriv[lo:i + 1]).max())

        # search-back for a missed beat before handling this peak
        avg2 = _rr_mean(rr_regular) or _rr_mean(rr_recent)
        if last_loc is not None and avg2 and loc - last_loc > cfg.searchback_factor * avg2:
            thi, thf = thresholds()
            best = None
            for c in candidates:
                c_loc, c_i, c_f, c_slope = c
                if c_loc - last_loc < refractory or c_i <= 0.5 * thi or c_f <= 0.5 * thf:
                    continue
                if best is None or c_i > best[1]:
                    best = c
            if best is not None:
                accept(*best, weight=0.25)

        if last_loc is not None and loc - last_loc < refractory:
            continue
        thi, thf = thresholds()
        if pk_i > thi and pk_f > thf:
            if (last_loc is not None and loc - last_loc < t_wave
                    and last_slope is not None and slope < 0.5 * last_slope):
                npki = 0.125 * pk_i + 0.875 * npki
                npkf = 0.125 * pk_f + 0.875 * npkf
                continue
            accept(loc, pk_i, pk_f, slope, weight=0.125)
        else:
            npki = 0.125 * pk_i + 0.875 * npki
            npkf = 0.125 * pk_f + 0.875 * npkf
            candidates.append((loc, pk_i, pk_f, slope))

    dets = []
    for loc, score in qrs:
        k = min(max(loc - shift, 0), n - 1)
        dets.append(Detection(x.t0 + k * x.dt, score))
    return dets
