import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gateminer.recording import (
    DEFAULT_THRESHOLDS_MV, InputState, MalformedHeaderError, ManifestError, MissingSyncError,
    NonMonotoneTimeError, RaggedRowError, Recording, RecordingError, RunManifest,
    read_recording, state_schedule, write_recording,
)


def make_recording(n_inputs=2, width=15, channels=("ch0", "ch1"), rate=1.0, sync=True, seed=0):
    rng = np.random.default_rng(seed)
    length = (1 << n_inputs) * width
    data = {name: rng.normal(0, 0.1, length) for name in channels}
    sync_trace = None
    if sync:
        sync_trace = np.zeros(length)
        sync_trace[::width] = 5.0
    meta = RunManifest(n_inputs=n_inputs, state_duration_s=width / rate, sample_rate_hz=rate,
                       output_channel=channels[0], sync="channel" if sync else "none")
    return Recording(data, sync_trace, meta, sample_rate_hz=rate)


def write_csv(tmp_path, text, manifest=None, name="rec.csv"):
    path = tmp_path / name
    path.write_text(text)
    manifest = manifest or {"n_inputs": 1, "state_duration_s": 1, "sample_rate_hz": 1.0,
                            "repeat_index": 0, "thresholds_mv": [100], "output_channel": "ch0",
                            "sync": "channel"}
    (tmp_path / "rec.manifest.json").write_text(json.dumps(manifest))
    return path


class TestSchedule:
    def test_two_inputs(self):
        assert [s.bits for s in state_schedule(RunManifest(2))] == ["00", "01", "10", "11"]

    def test_four_inputs(self):
        states = state_schedule(RunManifest(4))
        assert len(states) == 16
        assert states[0].bits == "0000" and states[-1].bits == "1111"

    def test_one_input(self):
        assert [s.bits for s in state_schedule(RunManifest(1))] == ["0", "1"]

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 8])
    def test_ordinals_ascending(self, n):
        states = state_schedule(RunManifest(n))
        assert len(states) == 2**n
        assert [s.ordinal for s in states] == list(range(2**n))
        assert all(int(s.bits, 2) == s.ordinal and s.width == n for s in states)

    def test_msb_is_input_a(self):
        assert InputState.from_ordinal(2, 2).bits == "10"


class TestManifest:
    def test_default_sweep_has_ten_thresholds(self):
        assert DEFAULT_THRESHOLDS_MV == (100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0,
                                         450.0, 500.0, 550.0)

    @pytest.mark.parametrize("thresholds", [(100, 100), (200, 100), (0, 100), (-5,)])
    def test_thresholds_must_ascend(self, thresholds):
        with pytest.raises(ManifestError):
            RunManifest(2, thresholds_mv=thresholds)

    def test_json_roundtrip_keeps_extra_keys(self):
        m = RunManifest(4, repeat_index=3, extra={"synth": {"seed": 1}})
        assert RunManifest.from_json(json.loads(json.dumps(m.to_json()))) == m

    def test_length_invariant(self):
        meta = RunManifest(2, state_duration_s=15)
        with pytest.raises(RecordingError, match="need"):
            Recording({"ch0": np.zeros(59)}, np.zeros(59), meta)


class TestRecordingModel:
    def test_zero_length_rejected(self):
        with pytest.raises(RecordingError):
            Recording({"ch0": np.zeros(0)}, np.zeros(0), RunManifest(1, state_duration_s=1))

    def test_unequal_lengths(self):
        with pytest.raises(RecordingError, match="unequal"):
            Recording({"ch0": np.zeros(4), "ch1": np.zeros(5)}, np.zeros(4),
                      RunManifest(1, state_duration_s=1))

    def test_traces_are_immutable_copies(self):
        raw = np.zeros(60)
        rec = Recording({"ch0": raw}, np.zeros(60), RunManifest(2))
        raw[0] = 1.0
        assert rec.channels["ch0"][0] == 0.0
        with pytest.raises(ValueError):
            rec.channels["ch0"][0] = 2.0


class TestReadWrite:
    def test_direct_parse(self, tmp_path):
        rows = ["t,ch0,ch1,sync"] + [f"{i}.0,0.0,0.1,0.0" for i in range(64)]
        manifest = {"n_inputs": 2, "state_duration_s": 16, "output_channel": "ch0",
                    "sync": "channel"}
        rec = read_recording(write_csv(tmp_path, "\n".join(rows) + "\n", manifest))
        assert rec.channel_names == ["ch0", "ch1"]
        assert len(rec) == 64 and len(rec.sync) == 64

    def test_rate_inferred_from_time_column(self, tmp_path):
        rows = ["t,ch0,sync"] + [f"{float(i)},0.0,0.0" for i in range(2)]
        rec = read_recording(write_csv(tmp_path, "\n".join(rows) + "\n"))
        assert rec.sample_rate_hz == 1.0
        assert rec.warnings == ()

    def test_rate_mismatch_warns(self, tmp_path):
        rows = ["t,ch0,sync"] + [f"{i * 0.5},0.0,0.0" for i in range(4)]
        rec = read_recording(write_csv(tmp_path, "\n".join(rows) + "\n"))
        assert rec.sample_rate_hz == 2.0
        assert rec.warnings and "differs" in rec.warnings[0]

    def test_ragged_row(self, tmp_path):
        text = "t,ch0,ch1,sync\n0.0,0.1,0.2,0.0\n1.0,0.1,0.2\n"
        with pytest.raises(RaggedRowError) as info:
            read_recording(write_csv(tmp_path, text))
        assert info.value.row == 2
        assert "row 2" in str(info.value)

    def test_malformed_header(self, tmp_path):
        with pytest.raises(MalformedHeaderError):
            read_recording(write_csv(tmp_path, "time,ch0,sync\n0,0,0\n1,0,0\n"))

    def test_non_monotone_time(self, tmp_path):
        with pytest.raises(NonMonotoneTimeError):
            read_recording(write_csv(tmp_path, "t,ch0,sync\n0,0,0\n2,0,0\n1,0,0\n"))

    def test_missing_sync_column(self, tmp_path):
        with pytest.raises(MissingSyncError):
            read_recording(write_csv(tmp_path, "t,ch0,ch1\n0,0,0\n1,0,0\n"))

    def test_sync_none_allows_missing_column(self, tmp_path):
        manifest = {"n_inputs": 1, "state_duration_s": 1, "output_channel": "ch0", "sync": "none"}
        rec = read_recording(write_csv(tmp_path, "t,ch0\n0,0.1\n1,0.2\n", manifest))
        assert rec.sync is None

    def test_missing_manifest(self, tmp_path):
        path = tmp_path / "lonely.csv"
        path.write_text("t,ch0,sync\n0,0,0\n1,0,0\n")
        with pytest.raises(ManifestError):
            read_recording(path)

    def test_embedded_manifest(self, tmp_path):
        manifest = {"n_inputs": 1, "state_duration_s": 1, "output_channel": "ch0"}
        path = tmp_path / "embedded.csv"
        path.write_text(f"# manifest: {json.dumps(manifest)}\nt,ch0,sync\n0,0.5,1\n1,0.0,0\n")
        rec = read_recording(path)
        assert rec.meta.n_inputs == 1 and rec.channels["ch0"][0] == 0.5

    def test_roundtrip(self, tmp_path):
        rec = make_recording()
        path = write_recording(rec, tmp_path / "r.csv")
        assert read_recording(path) == rec

    def test_eight_input_row_count(self, tmp_path):
        # 2**8 states x 15 s at 1 Hz
        rec = make_recording(n_inputs=8, channels=("ch0",))
        path = write_recording(rec, tmp_path / "big.csv")
        lines = path.read_text().splitlines()
        assert len(lines) - 1 == 3840

    def test_lf_line_endings(self, tmp_path):
        path = write_recording(make_recording(), tmp_path / "r.csv")
        assert b"\r" not in path.read_bytes()

    def test_unwritable_destination(self, tmp_path):
        with pytest.raises(RecordingError):
            write_recording(make_recording(), tmp_path / "no" / "such" / "dir" / "r.csv")

    @settings(max_examples=25, deadline=None)
    @given(
        n=st.integers(1, 3),
        width=st.integers(1, 5),
        rate=st.sampled_from([1.0, 2.0, 10.0, 0.5]),
        values=st.lists(st.floats(-10, 10, allow_nan=False, width=64), min_size=1, max_size=8),
        sync=st.booleans(),
    )
    def test_roundtrip_property(self, tmp_path_factory, n, width, rate, values, sync):
        length = (1 << n) * width
        trace = np.resize(np.array(values), length)
        sync_trace = None
        if sync:
            sync_trace = np.zeros(length)
            sync_trace[::width] = 1.0
        meta = RunManifest(n, state_duration_s=width / rate, sample_rate_hz=rate,
                           sync="channel" if sync else "none", repeat_index=n)
        rec = Recording({"ch0": trace, "ch1": -trace}, sync_trace, meta, sample_rate_hz=rate)
        path = write_recording(rec, tmp_path_factory.mktemp("rt") / "r.csv")
        back = read_recording(path)
        assert back == rec
        assert back.warnings == ()
