"""Minimal WFDB reader/writer: ``.hea`` headers, format-212 signal files and
MIT annotation (``.atr``) files.

Readers take bytes/text and return values; file access lives in
:func:`load_record` only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .core import UniformSignal
from .errors import ParseError, UnsupportedFormatError

__all__ = [
    "ChannelSpec",
    "RecordHeader",
    "Annotation",
    "AnnotatedRecord",
    "BEAT_CODES",
    "DEFAULT_GAIN",
    "read_wfdb_header",
    "write_wfdb_header",
    "read_wfdb_212",
    "decode_212",
    "encode_212",
    "read_wfdb_annotations",
    "write_wfdb_annotations",
    "beat_annotations",
    "load_record",
]

DEFAULT_GAIN = 200.0

# MIT-BIH beat annotation codes used as ground truth positives
BEAT_CODES = frozenset([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 16, 25, 34, 38])

_SKIP, _NUM, _SUB, _CHN, _AUX = 59, 60, 61, 62, 63


@dataclass(frozen=True)
class ChannelSpec:
    file_name: str
    fmt: int
    gain: float = DEFAULT_GAIN
    baseline: int = 0
    adc_zero: int = 0
    initial_value: int | None = None
    description: str = ""


@dataclass(frozen=True)
class RecordHeader:
    record_name: str
    n_channels: int
    sample_rate: float
    n_samples: int
    channels: tuple[ChannelSpec, ...] = field(default_factory=tuple)


class Annotation(NamedTuple):
    t: float
    code: int
    sample: int = 0


@dataclass(frozen=True)
class AnnotatedRecord:
    header: RecordHeader
    channels: tuple[UniformSignal, ...]
    beats: tuple[Annotation, ...]


_GAIN_RE = re.compile(r"^([-+0-9.eE]+)(?:\((-?\d+)\))?(?:/(\S*))?$")


def _leading_int(token, line_no, what):
    m = re.match(r"^(\d+)", token)
    if not m:
        raise ParseError(f"bad {what} {token!r}", line_no)
    return int(m.group(1))


def read_wfdb_header(data) -> RecordHeader:
    """Parse a WFDB header. ``data`` may be ``bytes`` or ``str``.

    Only the record line and the per-signal lines are interpreted; trailing
    fields that are not needed are ignored. A missing or zero gain means
    200 adu/mV; a missing baseline falls back to the ADC zero.
    """
    text = data.decode("latin-1") if isinstance(data, (bytes, bytearray)) else data
    lines = [
        (i, ln.strip())
        for i, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty header")
    line_no, rec = lines[0]
    parts = rec.split()
    if len(parts) < 2:
        raise ParseError("record line needs a name and a channel count", line_no)
    name = parts[0].split("/")[0]
    try:
        n_channels = int(parts[1])
        fs = float(re.split(r"[/(]", parts[2])[0]) if len(parts) > 2 else 250.0
        n_samples = int(parts[3]) if len(parts) > 3 else 0
    except ValueError as exc:
        raise ParseError(f"bad record line: {exc}", line_no) from None
    if n_channels < 1:
        raise ParseError("record declares no signals", line_no)
    if not fs > 0:
        raise ParseError("sampling frequency must be positive", line_no)

    sig_lines = lines[1:1 + n_channels]
    if len(sig_lines) < n_channels:
        raise ParseError(
            f"expected {n_channels} signal lines, found {len(sig_lines)}",
            lines[-1][0],
        )
    channels = []
    for line_no, ln in sig_lines:
        f = ln.split(None, 8)
        if len(f) < 2:
            raise ParseError("signal line needs a file name and a format", line_no)
        fmt = _leading_int(f[1], line_no, "format")
        if fmt != 212:
            raise UnsupportedFormatError(f"format {fmt} is not supported (only 212)", line_no)
        gain, baseline = DEFAULT_GAIN, None
        if len(f) > 2:
            m = _GAIN_RE.match(f[2])
            if not m:
                raise ParseError(f"bad gain field {f[2]!r}", line_no)
            gain = float(m.group(1)) or DEFAULT_GAIN
            if m.group(2) is not None:
                baseline = int(m.group(2))
        try:
            adc_zero = int(f[4]) if len(f) > 4 else 0
            init = int(f[5]) if len(f) > 5 else None
        except ValueError as exc:
            raise ParseError(f"bad signal line: {exc}", line_no) from None
        channels.append(ChannelSpec(
            file_name=f[0],
            fmt=fmt,
            gain=gain,
            baseline=adc_zero if baseline is None else baseline,
            adc_zero=adc_zero,
            initial_value=init,
            description=f[8] if len(f) > 8 else "",
        ))
    return RecordHeader(name, n_channels, fs, n_samples, tuple(channels))


def write_wfdb_header(header: RecordHeader) -> str:
    fs = f"{header.sample_rate:g}"
    out = [f"{header.record_name} {header.n_channels} {fs} {header.n_samples}"]
    for ch in header.channels:
        init = 0 if ch.initial_value is None else ch.initial_value
        out.append(
            f"{ch.file_name} {ch.fmt} {ch.gain:g}({ch.baseline})/mV 11 "
            f"{ch.adc_zero} {init} 0 0 {ch.description}".rstrip()
        )
    return "\n".join(out) + "\n"


def decode_212(data, n_values: int | None = None) -> np.ndarray:
    """Unpack format-212 bytes into signed 12-bit integers (interleaved)."""
    raw = np.frombuffer(bytes(data), dtype=np.uint8)
    n_groups = raw.size // 3
    tail = raw.size - 3 * n_groups
    if n_values is None:
        n_values = 2 * n_groups + (1 if tail >= 2 else 0)
    need = 3 * (n_values // 2) + (2 if n_values % 2 else 0)
    if raw.size < need:
        raise ParseError(
            f"format-212 data truncated: expected {need} bytes, got {raw.size}"
        )
    padded = np.zeros(3 * ((n_values + 1) // 2), dtype=np.uint16)
    padded[:need] = raw[:need]
    g = padded.reshape(-1, 3)
    first = g[:, 0] | ((g[:, 1] & 0x0F) << 8)
    second = g[:, 2] | ((g[:, 1] & 0xF0) << 4)
    vals = np.empty(2 * g.shape[0], dtype=np.int16)
    vals[0::2] = first
    vals[1::2] = second
    vals = vals[:n_values].astype(np.int32)
    vals[vals >= 2048] -= 4096
    return vals


def encode_212(values) -> bytes:
    """Pack signed 12-bit integers into format-212 bytes."""
    v = np.asarray(values, dtype=np.int64)
    if v.size and (v.min() < -2048 or v.max() > 2047):
        raise ValueError("format 212 holds values in [-2048, 2047]")
    odd = v.size % 2
    u = (np.concatenate([v, [0]]) if odd else v) & 0xFFF
    a, b = u[0::2], u[1::2]
    out = np.empty((a.size, 3), dtype=np.uint8)
    out[:, 0] = a & 0xFF
    out[:, 1] = ((a >> 8) & 0x0F) | (((b >> 8) & 0x0F) << 4)
    out[:, 2] = b & 0xFF
    flat = out.ravel()
    return flat[:-1].tobytes() if odd else flat.tobytes()


def read_wfdb_212(data, header: RecordHeader):
    """Decode a format-212 signal file into one physical-unit signal per channel."""
    nch = header.n_channels
    for ch in header.channels:
        if ch.fmt != 212:
            raise UnsupportedFormatError(f"format {ch.fmt} is not supported (only 212)")
    n = header.n_samples
    if n:
        vals = decode_212(data, n * nch)
    else:
        vals = decode_212(data)
        n = vals.size // nch
        vals = vals[:n * nch]
    frame = vals.reshape(n, nch)
    return [
        UniformSignal(0.0, 1.0 / header.sample_rate,
                      (frame[:, k] - ch.baseline) / ch.gain)
        for k, ch in enumerate(header.channels)
    ]


def read_wfdb_annotations(data, sample_rate: float):
    """Decode an MIT-format annotation stream into :class:`Annotation` items.

    Each 16-bit little-endian word holds the type in its top 6 bits and a
    sample increment in the low 10 bits. SKIP words are followed by a 32-bit
    jump (high half first); NUM/SUB/CHN/AUX words modify the previous
    annotation and are skipped here. A zero word ends the stream.
    """
    raw = bytes(data)
    n_words = len(raw) // 2
    words = np.frombuffer(raw[:2 * n_words], dtype="<u2").tolist()
    out = []
    sample = 0
    i = 0
    while True:
        if i >= n_words:
            raise ParseError(f"annotation stream ended without terminator at byte {2 * i}")
        w = words[i]
        code, inc = w >> 10, w & 0x3FF
        i += 1
        if w == 0:
            break
        if code == _SKIP:
            if i + 2 > n_words:
                raise ParseError(f"truncated SKIP at byte {2 * (i - 1)}")
            jump = (words[i] << 16) | words[i + 1]
            if jump >= 1 << 31:
                jump -= 1 << 32
            sample += jump
            i += 2
        elif code == _AUX:
            i += (inc + 1) // 2
        elif code in (_NUM, _SUB, _CHN):
            pass
        else:
            sample += inc
            out.append(Annotation(sample / sample_rate, code, sample))
    return out


def write_wfdb_annotations(annotations) -> bytes:
    """Encode ``(sample, code)`` pairs as an MIT annotation stream."""
    words = []
    prev = 0
    for sample, code in annotations:
        if not 0 < code < _SKIP:
            raise ValueError(f"annotation code {code} cannot be written")
        delta = int(sample) - prev
        if delta < 0:
            raise ValueError("annotation samples must be non-decreasing")
        if delta > 0x3FF:
            words += [_SKIP << 10, (delta >> 16) & 0xFFFF, delta & 0xFFFF]
            delta = 0
        words.append((code << 10) | delta)
        prev = int(sample)
    words.append(0)
    return np.asarray(words, dtype="<u2").tobytes()


def beat_annotations(annotations):
    return [a for a in annotations if a.code in BEAT_CODES]


def load_record(record_dir, name: str) -> AnnotatedRecord:
    """Read ``<name>.hea``, its signal file and ``<name>.atr`` from a directory."""
    d = Path(record_dir)
    header = read_wfdb_header((d / f"{name}.hea").read_bytes())
    files = {ch.file_name for ch in header.channels}
    if len(files) != 1:
        raise UnsupportedFormatError("signals split across several files are not supported")
    channels = read_wfdb_212((d / files.pop()).read_bytes(), header)
    anns = read_wfdb_annotations((d / f"{name}.atr").read_bytes(), header.sample_rate)
    return AnnotatedRecord(header, tuple(channels), tuple(beat_annotations(anns)))
