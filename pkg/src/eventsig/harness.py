"""Detection scoring and the LIF quantization-error experiment."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import alexiewicz_distance
from .errors import InvalidInputError
from .lif import LifConfig, ResetMode, lif_encode_train
from .synth import gen_random_train

__all__ = [
    "MatchResult",
    "match_detections",
    "tpr_ppv",
    "ErrorSample",
    "ExperimentGrid",
    "quantization_experiment",
    "BoxStats",
    "box_stats",
    "summarize",
]


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fn_: int
    fp: int

    @property
    def p(self) -> int:
        return self.tp + self.fn_

    @property
    def pp(self) -> int:
        return self.tp + self.fp

    def __add__(self, other: "MatchResult") -> "MatchResult":
        return MatchResult(self.tp + other.tp, self.fn_ + other.fn_, self.fp + other.fp)


def match_detections(dets, beats, tol: float = 0.150) -> MatchResult:
    """Greedy one-to-one matching of detections to reference beats.

    All (detection, beat) pairs within ``tol`` are taken in order of
    increasing distance and kept when neither side is used yet. Ties are
    broken by the pair's midpoint, which keeps the outcome symmetric under
    swapping the two inputs.
    """
    d = np.sort(np.asarray([getattr(x, "t", x) for x in dets], dtype=float))
    b = np.sort(np.asarray([getattr(x, "t", x) for x in beats], dtype=float))
    pairs = []
    lo = 0
    for i, td in enumerate(d.tolist()):
        while lo < b.size and b[lo] < td - tol:
            lo += 1
        j = lo
        while j < b.size and b[j] <= td + tol:
            tb = float(b[j])
            pairs.append((abs(td - tb), td + tb, i, j))
            j += 1
    pairs.sort(key=lambda p: (p[0], p[1]))
    used_d, used_b = set(), set()
    for _, _, i, j in pairs:
        if i not in used_d and j not in used_b:
            used_d.add(i)
            used_b.add(j)
    tp = len(used_d)
    return MatchResult(tp=tp, fn_=int(b.size) - tp, fp=int(d.size) - tp)


def tpr_ppv(m: MatchResult):
    """``(TP/P, TP/PP)``; a ratio with a zero denominator is ``None`` (N/A)."""
    tpr = m.tp / m.p if m.p else None
    ppv = m.tp / m.pp if m.pp else None
    return tpr, ppv


class ErrorSample(NamedTuple):
    reset: ResetMode
    alpha: float
    n_spikes: int
    amp_scale: float
    error: float
    seed: int
    run: int = 0


@dataclass(frozen=True)
class ExperimentGrid:
    resets: Sequence[ResetMode] = tuple(ResetMode)
    alphas: Sequence[float] = (1.0, 0.1)
    spike_counts: Sequence[int] = (10, 100, 1000)
    amp_scales: Sequence[float] = (1.0, 1.5)

    def cells(self):
        """Input-generating cells; every reset mode sees the same trains."""
        return list(itertools.product(self.alphas, self.spike_counts, self.amp_scales))


def _run_seed(root: int, cell: int, run: int) -> int:
    return int(np.random.SeedSequence([root, cell, run]).generate_state(1, np.uint64)[0])


def _run_cell(args):
    cell_index, (alpha, n, scale), resets, runs, root, theta, mean_gap = args
    out = []
    cfgs = [LifConfig(theta=theta, alpha=alpha, t_r=0.0, reset=r) for r in resets]
    for run in range(runs):
        seed = _run_seed(root, cell_index, run)
        eta = gen_random_train(n, (-scale * theta, scale * theta), mean_gap, seed)
        for cfg in cfgs:
            err = alexiewicz_distance(eta, lif_encode_train(eta, cfg), alpha)
            out.append(ErrorSample(cfg.reset, alpha, n, scale, err, seed, run))
    return out


def quantization_experiment(grid: ExperimentGrid, runs: int = 100, seed: int = 0,
                            theta: float = 1.0, mean_gap: float = 1.0,
                            workers: int = 1):
    """Quantization error of LIF (``t_r = 0``) on random Dirac trains.

    For each grid cell and run a random train with amplitudes uniform on
    ``[-amp_scale*theta, amp_scale*theta]`` is encoded under each reset mode
    and the Alexiewicz distance between input and output is recorded. Run
    seeds derive from ``(seed, cell index, run)`` only, so results do not
    depend on ``workers``.
    """
    if runs < 1:
        raise InvalidInputError("runs must be >= 1")
    resets = tuple(ResetMode(r) for r in grid.resets)
    jobs = [
        (k, cell, resets, runs, seed, theta, mean_gap)
        for k, cell in enumerate(grid.cells())
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_run_cell, jobs))
    else:
        chunks = [_run_cell(j) for j in jobs]
    return [s for chunk in chunks for s in chunk]


class BoxStats(NamedTuple):
    min: float
    q1: float
    median: float
    q3: float
    max: float


def box_stats(samples) -> BoxStats:
    """Five-number summary; quartiles interpolate linearly between order statistics."""
    x = np.asarray(samples, dtype=float)
    if not x.size:
        raise InvalidInputError("box_stats needs at least one value")
    q = np.percentile(x, [0, 25, 50, 75, 100], method="linear")
    return BoxStats(*map(float, q))


def summarize(samples):
    """Box statistics of the error per ``(reset, alpha, n_spikes, amp_scale)``."""
    groups = {}
    for s in samples:
        groups.setdefault((s.reset, s.alpha, s.n_spikes, s.amp_scale), []).append(s.error)
    return {key: box_stats(v) for key, v in groups.items()}

