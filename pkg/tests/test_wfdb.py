import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eventsig.core import SpikeTrain, UniformSignal
from eventsig.errors import ParseError, UnsupportedFormatError
from eventsig.qrs import Detection
from eventsig.io import (
    csv_kind,
    read_signal_csv,
    read_spikes_csv,
    write_detections_csv,
    write_signal_csv,
    write_spikes_csv,
)
from eventsig.wfdb import (
    BEAT_CODES,
    ChannelSpec,
    RecordHeader,
    beat_annotations,
    decode_212,
    encode_212,
    load_record,
    read_wfdb_212,
    read_wfdb_annotations,
    read_wfdb_header,
    write_wfdb_annotations,
    write_wfdb_header,
)

HEADER_100 = """100 2 360 650000
100.dat 212 200 11 1024 995 -22131 0 MLII
100.dat 212 200 11 1024 1011 20052 0 V5
# 69 M 1085 1629 x1
"""


def words(*ws):
    return struct.pack(f"<{len(ws)}H", *ws)


class TestHeader:
    def test_record_line(self):
        h = read_wfdb_header(HEADER_100.encode())
        assert (h.record_name, h.n_channels, h.sample_rate, h.n_samples) == ("100", 2, 360.0, 650000)
        assert [c.description for c in h.channels] == ["MLII", "V5"]
        assert h.channels[0].gain == 200.0
        # no explicit baseline: falls back to the ADC zero
        assert h.channels[0].baseline == 1024
        assert h.channels[1].initial_value == 1011

    def test_gain_with_baseline_and_units(self):
        h = read_wfdb_header("r 1 360 10\nr.dat 212 100(-5)/mV 12 0\n")
        assert h.channels[0].gain == 100.0
        assert h.channels[0].baseline == -5

    def test_gain_absent(self):
        h = read_wfdb_header("r 1 360 10\nr.dat 212\n")
        assert h.channels[0].gain == 200.0

    def test_zero_gain_means_default(self):
        assert read_wfdb_header("r 1 360\nr.dat 212 0\n").channels[0].gain == 200.0

    def test_missing_signal_lines(self):
        with pytest.raises(ParseError) as exc:
            read_wfdb_header("100 2 360 650000\n100.dat 212 200\n")
        assert exc.value.line == 2

    def test_bad_record_line(self):
        with pytest.raises(ParseError) as exc:
            read_wfdb_header("100 two 360\n")
        assert exc.value.line == 1

    def test_unsupported_format(self):
        with pytest.raises(UnsupportedFormatError) as exc:
            read_wfdb_header("r 1 360 10\n# comment\nr.dat 16 200\n")
        assert exc.value.line == 3

    def test_write_read_round_trip(self):
        h = read_wfdb_header(HEADER_100)
        assert read_wfdb_header(write_wfdb_header(h)) == h


class TestFormat212:
    def test_bit_layout(self):
        assert decode_212(bytes([0x01, 0x00, 0x00])).tolist() == [1, 0]

    def test_sign_extension(self):
        assert decode_212(bytes([0xFF, 0x0F, 0x00])).tolist() == [-1, 0]

    def test_second_sample_high_nibble(self):
        assert decode_212(bytes([0x00, 0x80, 0x00])).tolist() == [0, -2048]

    @given(st.lists(st.integers(-2048, 2047), max_size=200))
    def test_round_trip(self, vals):
        assert decode_212(encode_212(vals), len(vals)).tolist() == vals

    def test_truncated(self):
        with pytest.raises(ParseError, match="expected 6 bytes, got 5"):
            decode_212(bytes(5), 4)

    def test_encode_range(self):
        with pytest.raises(ValueError):
            encode_212([2048])

    def test_physical_units(self):
        h = RecordHeader("r", 2, 360.0, 3, (
            ChannelSpec("r.dat", 212, 200.0, 1024),
            ChannelSpec("r.dat", 212, 100.0, 0),
        ))
        adu = [1024, 0, 1224, 100, 824, -100]
        ch0, ch1 = read_wfdb_212(encode_212(adu), h)
        assert ch0.samples.tolist() == [0.0, 1.0, -1.0]
        assert ch1.samples.tolist() == [0.0, 1.0, -1.0]
        assert ch0.fs == pytest.approx(360.0)


class TestAnnotations:
    def test_single_normal_beat(self):
        anns = read_wfdb_annotations(words((1 << 10) | 360, 0), 360.0)
        assert [(a.t, a.code) for a in anns] == [(1.0, 1)]

    def test_immediate_terminator(self):
        assert read_wfdb_annotations(words(0), 360.0) == []

    def test_skip_then_normal(self):
        stream = words(59 << 10, 0x0001, 0x0000, (1 << 10) | 10, 0)
        anns = read_wfdb_annotations(stream, 360.0)
        assert [a.sample for a in anns] == [65536 + 10]

    def test_aux_payload_skipped(self):
        stream = words((1 << 10) | 5, (63 << 10) | 3) + b"(N\x00\x00" + words((1 << 10) | 7, 0)
        anns = read_wfdb_annotations(stream, 100.0)
        assert [a.sample for a in anns] == [5, 12]

    def test_modifier_words_do_not_move_time(self):
        stream = words((1 << 10) | 5, (60 << 10) | 1, (62 << 10) | 1, (61 << 10) | 2,
                       (28 << 10) | 4, 0)
        anns = read_wfdb_annotations(stream, 100.0)
        assert [(a.sample, a.code) for a in anns] == [(5, 1), (9, 28)]

    def test_missing_terminator(self):
        with pytest.raises(ParseError):
            read_wfdb_annotations(words((1 << 10) | 5), 360.0)

    def test_truncated_skip(self):
        with pytest.raises(ParseError):
            read_wfdb_annotations(words(59 << 10, 0x0001), 360.0)

    def test_beat_filter(self):
        anns = read_wfdb_annotations(write_wfdb_annotations([(10, 1), (20, 28), (30, 5)]), 10.0)
        assert [a.code for a in beat_annotations(anns)] == [1, 5]
        assert 28 not in BEAT_CODES and 14 not in BEAT_CODES

    @given(st.lists(st.tuples(st.integers(0, 5000), st.sampled_from(sorted(BEAT_CODES))),
                    max_size=40))
    def test_write_read_round_trip(self, items):
        samples = np.cumsum([s for s, _ in items]).tolist()
        pairs = [(s, c) for s, (_, c) in zip(samples, items)]
        anns = read_wfdb_annotations(write_wfdb_annotations(pairs), 360.0)
        assert [(a.sample, a.code) for a in anns] == pairs
        assert all(b.t >= a.t for a, b in zip(anns, anns[1:]))


def test_load_record(tmp_path):
    fs, n = 360.0, 720
    h = RecordHeader("syn", 2, fs, n, (
        ChannelSpec("syn.dat", 212, 200.0, 0, description="MLII"),
        ChannelSpec("syn.dat", 212, 200.0, 0, description="V5"),
    ))
    rng = np.random.default_rng(0)
    adu = rng.integers(-300, 300, size=(n, 2))
    (tmp_path / "syn.hea").write_text(write_wfdb_header(h))
    (tmp_path / "syn.dat").write_bytes(encode_212(adu.ravel()))
    (tmp_path / "syn.atr").write_bytes(write_wfdb_annotations([(100, 1), (200, 28), (460, 5)]))
    rec = load_record(tmp_path, "syn")
    assert len(rec.channels) == 2 and all(len(c) == n for c in rec.channels)
    np.testing.assert_array_equal(rec.channels[1].samples, adu[:, 1] / 200.0)
    assert [(b.sample, b.code) for b in rec.beats] == [(100, 1), (460, 5)]


class TestCsv:
    def test_spikes_round_trip(self, tmp_path):
        tr = SpikeTrain([0.1, 1 / 3, 2.0], [1.0, -0.7, 1e-9])
        p = tmp_path / "s.csv"
        write_spikes_csv(p, tr)
        assert csv_kind(p) == "spikes"
        assert read_spikes_csv(p) == tr

    def test_signal_round_trip(self, tmp_path):
        x = UniformSignal(0.5, 1 / 360, np.sin(np.arange(50)))
        p = tmp_path / "x.csv"
        write_signal_csv(p, x)
        assert csv_kind(p) == "signal"
        y = read_signal_csv(p)
        np.testing.assert_array_equal(y.samples, x.samples)
        assert y.dt == pytest.approx(x.dt) and y.t0 == x.t0

    def test_nonuniform_signal_rejected(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("t,value\n0,1\n1,2\n3,4\n")
        with pytest.raises(ParseError):
            read_signal_csv(p)

    def test_missing_column(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("time,amp\n0,1\n")
        with pytest.raises(ParseError):
            read_spikes_csv(p)

    def test_detections(self, tmp_path):
        p = tmp_path / "d.csv"
        write_detections_csv(p, [Detection(0.25, 3.0), Detection(1.5)])
        assert p.read_text().splitlines() == ["t", "0.25", "1.5"]
