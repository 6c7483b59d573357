"""Command-line entry point (``eventsig``).

Exit codes: 0 success, 1 usage error, 2 data or parse error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .core import HybridSignal, alexiewicz_norm, weyl_discrepancy
from .errors import InvalidInputError, InvalidParameterError, ParseError
from .harness import (
    ExperimentGrid,
    match_detections,
    quantization_experiment,
    summarize,
    tpr_ppv,
)
from .lif import LifConfig, ResetMode, lif_encode, lif_encode_train
from .qrs import detect_qrs_discrepancy, ecg_to_spikes, pan_tompkins
from .sod import SodConfig, normalize, sod_encode, upsample_cubic
from .wfdb import load_record

log = logging.getLogger("eventsig")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _fmt(v):
    return "N/A" if v is None else f"{100 * v:.2f}%"


def cmd_sod(args):
    x = io.read_signal_csv(args.input)
    if args.normalize:
        x = normalize(x)
    if args.upsample > 1:
        x = upsample_cubic(x, args.upsample)
    train = sod_encode(x, SodConfig(args.theta))
    io.write_spikes_csv(args.out, train)
    print(f"spikes: {len(train)}  samples: {len(x)}")


def cmd_lif(args):
    cfg = LifConfig(theta=args.theta, alpha=args.alpha, t_r=args.tr,
                    reset=ResetMode(args.reset))
    if io.csv_kind(args.input) == "spikes":
        out = lif_encode_train(io.read_spikes_csv(args.input), cfg)
    else:
        out = lif_encode(HybridSignal(io.read_signal_csv(args.input)), cfg)
    io.write_spikes_csv(args.out, out)
    print(f"spikes: {len(out)}")


def cmd_norm(args):
    train = io.read_spikes_csv(args.input)
    if args.kind == "alexiewicz":
        value = alexiewicz_norm(train, args.alpha)
    else:
        value = weyl_discrepancy(train.amplitudes.tolist())
    print(repr(value))


def _parse_resets(text):
    if text == "all":
        return tuple(ResetMode)
    try:
        return tuple(ResetMode(v.strip()) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--reset must be 'all' or a list of zero,subtract,mod; got {text!r}")


def cmd_quantize_bench(args):
    grid = ExperimentGrid(
        resets=_parse_resets(args.reset),
        alphas=tuple(args.alpha),
        spike_counts=tuple(args.spikes),
        amp_scales=tuple(args.amp_scale),
    )
    t0 = time.perf_counter()
    samples = quantization_experiment(grid, runs=args.runs, seed=args.seed,
                                      theta=args.theta, workers=args.workers)
    log.info("%d samples in %.2f s", len(samples), time.perf_counter() - t0)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["reset", "alpha", "n_spikes", "amp_scale", "run", "seed", "error"])
            for s in samples:
                w.writerow([s.reset.value, s.alpha, s.n_spikes, s.amp_scale,
                            s.run, s.seed, repr(s.error)])
    if args.summary or not args.out:
        w = csv.writer(sys.stdout)
        w.writerow(["reset", "alpha", "n_spikes", "amp_scale",
                    "min", "q1", "median", "q3", "max", "frac_ge_theta"])
        frac = {}
        for s in samples:
            key = (s.reset, s.alpha, s.n_spikes, s.amp_scale)
            hit, tot = frac.get(key, (0, 0))
            frac[key] = (hit + (s.error >= args.theta), tot + 1)
        for key, b in summarize(samples).items():
            hit, tot = frac[key]
            w.writerow([key[0].value, key[1], key[2], key[3],
                        *(f"{v:.6f}" for v in b), f"{hit / tot:.3f}"])


def _detect(record, channel, method, theta_sod, upsample):
    x = record.channels[channel]
    if method == "pantompkins":
        return pan_tompkins(x), len(x)
    train = ecg_to_spikes(x, theta_sod=theta_sod, upsample=upsample)
    return detect_qrs_discrepancy(train), len(train)


def _channel(record, channel):
    if channel >= record.header.n_channels:
        raise InvalidInputError(
            f"record {record.header.record_name} has {record.header.n_channels} channel(s)"
        )
    return channel


def cmd_qrs(args):
    rec = load_record(args.record_dir, args.record)
    ch = _channel(rec, args.channel)
    dets, count = _detect(rec, ch, args.method, args.theta_sod, args.upsample)
    m = match_detections(dets, rec.beats, args.tol)
    tpr, ppv = tpr_ppv(m)
    if args.out:
        io.write_detections_csv(args.out, dets)
    unit = "samples" if args.method == "pantompkins" else "spikes"
    print(f"record {args.record} channel {ch} method {args.method}")
    print(f"TP={m.tp} FN={m.fn_} FP={m.fp} P={m.p} PP={m.pp}")
    print(f"TPR={_fmt(tpr)} PPV={_fmt(ppv)} {unit}={count}")


def _records(record_dir):
    d = Path(record_dir)
    names = sorted(p.stem for p in d.glob("*.hea") if (d / f"{p.stem}.atr").exists())
    if not names:
        raise InvalidInputError(f"no annotated WFDB records found in {d}")
    return names


def cmd_qrs_all(args):
    names = _records(args.record_dir)
    w = csv.writer(sys.stdout)
    w.writerow(["record", "channel", "tp", "fn", "fp", "tpr", "ppv", "n_events"])
    totals = {}
    for name in names:
        rec = load_record(args.record_dir, name)
        for ch in range(min(2, rec.header.n_channels)):
            dets, count = _detect(rec, ch, args.method, args.theta_sod, args.upsample)
            m = match_detections(dets, rec.beats, args.tol)
            tpr, ppv = tpr_ppv(m)
            w.writerow([name, f"L{ch + 1}", m.tp, m.fn_, m.fp,
                        "" if tpr is None else f"{tpr:.4f}",
                        "" if ppv is None else f"{ppv:.4f}", count])
            agg, counts = totals.get(ch, (None, []))
            totals[ch] = (m if agg is None else agg + m, counts + [count])
            sys.stdout.flush()
    for ch, (m, counts) in sorted(totals.items()):
        tpr, ppv = tpr_ppv(m)
        w.writerow(["ALL", f"L{ch + 1}", m.tp, m.fn_, m.fp,
                    "" if tpr is None else f"{tpr:.4f}",
                    "" if ppv is None else f"{ppv:.4f}", f"{np.mean(counts):.1f}"])


def build_parser():
    p = _Parser(prog="eventsig", description="Event-based signal encoding and QRS detection.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sod", help="send-on-delta encode a t,value signal CSV")
    s.add_argument("--input", required=True)
    s.add_argument("--theta", type=float, default=0.05)
    s.add_argument("--upsample", type=int, default=1)
    s.add_argument("--normalize", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sod)

    s = sub.add_parser("lif", help="LIF-encode a spike or signal CSV")
    s.add_argument("--input", required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--tr", type=float, default=0.0)
    s.add_argument("--reset", choices=[m.value for m in ResetMode], default="mod")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_lif)

    s = sub.add_parser("norm", help="print a norm of a spike train")
    s.add_argument("--kind", choices=["alexiewicz", "discrepancy"], required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("quantize-bench", help="LIF quantization-error experiment")
    s.add_argument("--runs", type=int, default=100)
    s.add_argument("--spikes", type=_ints, default=[10, 100, 1000])
    s.add_argument("--amp-scale", type=_floats, default=[1.0, 1.5])
    s.add_argument("--alpha", type=_floats, default=[1.0, 0.1])
    s.add_argument("--reset", default="all")
    s.add_argument("--theta", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.add_argument("--summary", action="store_true")
    s.set_defaults(func=cmd_quantize_bench)

    helps = {"qrs": "QRS detection on one WFDB record",
             "qrs-all": "QRS detection over a directory of WFDB records (CSV table)"}
    for name, fn in (("qrs", cmd_qrs), ("qrs-all", cmd_qrs_all)):
        s = sub.add_parser(name, help=helps[name])
        s.add_argument("--record-dir", required=True)
        if name == "qrs":
            s.add_argument("--record", required=True)
            s.add_argument("--channel", type=int, choices=[0, 1], default=0)
            s.add_argument("--out")
        s.add_argument("--method", choices=["pantompkins", "discrepancy"], required=True)
        s.add_argument("--tol", type=float, default=0.150)
        s.add_argument("--theta-sod", type=float, default=0.05)
        s.add_argument("--upsample", type=int, default=10)
        s.set_defaults(func=fn)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (UsageError, InvalidParameterError) as exc:
        print(f"eventsig: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, InvalidInputError, OSError, ValueError) as exc:
        print(f"eventsig: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
