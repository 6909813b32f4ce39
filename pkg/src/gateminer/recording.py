"""Recording data model and the CSV + JSON-manifest file format.

A recording is stored as ``<name>.csv`` with header ``t,<ch0>,<ch1>,...,sync``
(the ``sync`` column is absent when the manifest declares ``"sync": "none"``)
and a sidecar ``<name>.manifest.json``.  A manifest may instead be embedded as
a first line ``# manifest: {...}``.  Values are written with Python's
shortest round-trip float repr, so write/read is exact.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS_MV = tuple(float(v) for v in range(100, 551, 50))
SYNC_MODES = ("channel", "none")
_RATE_RTOL = 1e-9


class RecordingError(ValueError):
    """Base class for invalid recordings and malformed recording files."""


class MalformedHeaderError(RecordingError):
    pass


class RaggedRowError(RecordingError):
    def __init__(self, row: int, expected: int, got: int):
        super().__init__(f"row {row}: expected {expected} fields, got {got}")
        self.row = row


class NonMonotoneTimeError(RecordingError):
    def __init__(self, row: int):
        super().__init__(f"row {row}: time column is not strictly increasing")
        self.row = row


class MissingSyncError(RecordingError):
    pass


class ManifestError(RecordingError):
    pass


@dataclass(frozen=True)
class InputState:
    bits: str
    ordinal: int

    @classmethod
    def from_ordinal(cls, ordinal: int, n_inputs: int) -> "InputState":
        if not 0 <= ordinal < 1 << n_inputs:
            raise ValueError(f"ordinal {ordinal} out of range for {n_inputs} inputs")
        return cls(format(ordinal, f"0{n_inputs}b"), ordinal)

    @property
    def width(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class RunManifest:
    n_inputs: int
    state_duration_s: float = 15.0
    repeat_index: int = 0
    thresholds_mv: tuple[float, ...] = DEFAULT_THRESHOLDS_MV
    output_channel: str = "ch0"
    sample_rate_hz: float = 1.0
    sync: str = "channel"
    extra: Mapping = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "thresholds_mv", tuple(float(t) for t in self.thresholds_mv))
        if self.n_inputs < 1:
            raise ManifestError(f"n_inputs must be >= 1, got {self.n_inputs}")
        if not self.state_duration_s > 0:
            raise ManifestError("state_duration_s must be positive")
        if not self.sample_rate_hz > 0:
            raise ManifestError("sample_rate_hz must be positive")
        if self.repeat_index < 0:
            raise ManifestError("repeat_index must be non-negative")
        th = self.thresholds_mv
        if any(t <= 0 for t in th) or any(b <= a for a, b in zip(th, th[1:])):
            raise ManifestError(f"thresholds_mv must be positive and strictly ascending: {th}")
        if self.sync not in SYNC_MODES:
            raise ManifestError(f"sync must be one of {SYNC_MODES}, got {self.sync!r}")

    @property
    def n_states(self) -> int:
        return 1 << self.n_inputs

    @property
    def samples_per_state(self) -> int:
        return int(round(self.state_duration_s * self.sample_rate_hz))

    def to_json(self) -> dict:
        out = {
            "n_inputs": self.n_inputs,
            "state_duration_s": self.state_duration_s,
            "sample_rate_hz": self.sample_rate_hz,
            "repeat_index": self.repeat_index,
            "thresholds_mv": list(self.thresholds_mv),
            "output_channel": self.output_channel,
            "sync": self.sync,
        }
        out.update(self.extra)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "RunManifest":
        known = {"n_inputs", "state_duration_s", "sample_rate_hz", "repeat_index",
                 "thresholds_mv", "output_channel", "sync"}
        try:
            return cls(
                n_inputs=int(data["n_inputs"]),
                state_duration_s=float(data.get("state_duration_s", 15.0)),
                sample_rate_hz=float(data.get("sample_rate_hz", 1.0)),
                repeat_index=int(data.get("repeat_index", 0)),
                thresholds_mv=tuple(data.get("thresholds_mv", DEFAULT_THRESHOLDS_MV)),
                output_channel=str(data.get("output_channel", "ch0")),
                sync=str(data.get("sync", "channel")),
                extra={k: v for k, v in data.items() if k not in known},
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(f"invalid manifest: {exc}") from exc


@dataclass(frozen=True, eq=False)
class Recording:
    """Multichannel voltage trace (volts) plus sync track and manifest.

    ``sync`` is ``None`` when the manifest declares ``sync: none``.
    ``warnings`` carries non-fatal findings such as a sample-rate mismatch.
    """

    channels: Mapping[str, np.ndarray]
    sync: np.ndarray | None
    meta: RunManifest
    sample_rate_hz: float = 1.0
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        chans = {}
        for name, trace in self.channels.items():
            arr = np.array(trace, dtype=float)
            arr.setflags(write=False)
            chans[str(name)] = arr
        if len(chans) != len(self.channels):
            raise RecordingError("channel names must be unique")
        object.__setattr__(self, "channels", chans)
        if self.sync is not None:
            s = np.array(self.sync, dtype=float)
            s.setflags(write=False)
            object.__setattr__(self, "sync", s)
        if not chans:
            raise RecordingError("a recording needs at least one channel")
        if "t" in chans or "sync" in chans:
            raise RecordingError("'t' and 'sync' are reserved column names")
        lengths = {len(v) for v in chans.values()}
        if self.sync is not None:
            lengths.add(len(self.sync))
        if len(lengths) != 1:
            raise RecordingError(f"traces have unequal lengths: {sorted(lengths)}")
        if lengths.pop() < 1:
            raise RecordingError("traces must hold at least one sample")
        if not self.sample_rate_hz > 0:
            raise RecordingError("sample_rate_hz must be positive")
        if self.meta.sync == "channel" and self.sync is None:
            raise MissingSyncError("manifest declares a sync channel but none was given")
        if self.meta.sync == "none" and self.sync is not None:
            raise RecordingError("manifest declares sync: none but a sync trace was given")
        if self.meta.output_channel not in chans:
            raise RecordingError(f"output channel {self.meta.output_channel!r} is not a channel")
        needed = self.meta.n_states * self.meta.state_duration_s * self.sample_rate_hz
        if len(self) < needed - 1e-9:
            raise RecordingError(
                f"{self.meta.n_states} states of {self.meta.state_duration_s} s need "
                f"{needed:g} samples, recording has {len(self)}"
            )

    def __len__(self):
        return len(next(iter(self.channels.values())))

    def __eq__(self, other):
        if not isinstance(other, Recording):
            return NotImplemented
        if list(self.channels) != list(other.channels):
            return False
        if self.meta != other.meta or self.sample_rate_hz != other.sample_rate_hz:
            return False
        if (self.sync is None) != (other.sync is None):
            return False
        if self.sync is not None and not np.array_equal(self.sync, other.sync):
            return False
        return all(np.array_equal(self.channels[k], other.channels[k]) for k in self.channels)

    __hash__ = None

    @property
    def channel_names(self) -> list[str]:
        return list(self.channels)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) / self.sample_rate_hz

    def with_meta(self, **changes) -> "Recording":
        return replace(self, meta=replace(self.meta, **changes))


def state_schedule(manifest: RunManifest) -> list[InputState]:
    """Input states in counting order: 0...0 up to 1...1, input A leftmost."""
    return [InputState.from_ordinal(i, manifest.n_inputs) for i in range(manifest.n_states)]


def manifest_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".manifest.json") if path.suffix else \
        path.with_name(path.name + ".manifest.json")


def _fmt(value: float) -> str:
    return repr(float(value))


def write_recording(rec: Recording, path: str | Path) -> Path:
    """Write ``rec`` as CSV plus manifest sidecar; returns the CSV path."""
    path = Path(path)
    cols = [rec.channels[name] for name in rec.channel_names]
    header = ["t", *rec.channel_names]
    if rec.sync is not None:
        cols.append(rec.sync)
        header.append("sync")
    manifest = rec.meta.to_json()
    lines = [",".join(header)]
    times = rec.times
    for i in range(len(rec)):
        lines.append(",".join([_fmt(times[i]), *(_fmt(c[i]) for c in cols)]))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        manifest_path(path).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
        )
    except OSError as exc:
        raise RecordingError(f"cannot write {path}: {exc}") from exc
    return path


def _load_manifest(path: Path, embedded: str | None) -> RunManifest:
    if embedded is not None:
        try:
            data = json.loads(embedded)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: embedded manifest is not valid JSON: {exc}") from exc
        return RunManifest.from_json(data)
    side = manifest_path(path)
    if not side.exists():
        raise ManifestError(f"{path}: manifest sidecar {side.name} not found")
    try:
        data = json.loads(side.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{side}: not valid JSON: {exc}") from exc
    return RunManifest.from_json(data)


def infer_sample_rate(times: Sequence[float]) -> float | None:
    if len(times) < 2:
        return None
    steps = np.diff(np.asarray(times, dtype=float))
    return float(1.0 / np.median(steps))


def read_recording(path: str | Path) -> Recording:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RecordingError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    embedded = None
    if lines and lines[0].startswith("#"):
        first = lines.pop(0).lstrip("#").strip()
        if first.startswith("manifest:"):
            embedded = first[len("manifest:"):].strip()
    if not lines:
        raise MalformedHeaderError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if len(header) < 2 or header[0] != "t" or any(not h for h in header):
        raise MalformedHeaderError(f"{path}: header must start with 't' and name every column")
    if len(set(header)) != len(header):
        raise MalformedHeaderError(f"{path}: duplicate column names in header")
    manifest = _load_manifest(path, embedded)
    has_sync = header[-1] == "sync"
    if manifest.sync == "channel" and not has_sync:
        raise MissingSyncError(f"{path}: manifest declares a sync channel but there is no 'sync' column")
    names = header[1:-1] if has_sync else header[1:]
    if not names:
        raise MalformedHeaderError(f"{path}: no voltage channels in header")

    rows = []
    for lineno, line in enumerate(lines[1:], start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(header):
            raise RaggedRowError(lineno, len(header), len(fields))
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise RecordingError(f"{path}: row {lineno}: {exc}") from exc
    if not rows:
        raise RecordingError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    times = data[:, 0]
    bad = np.nonzero(np.diff(times) <= 0)[0]
    if len(bad):
        raise NonMonotoneTimeError(int(bad[0]) + 2)

    rate = infer_sample_rate(times) or manifest.sample_rate_hz
    warnings = []
    if not math.isclose(rate, manifest.sample_rate_hz, rel_tol=_RATE_RTOL):
        msg = (f"inferred sample rate {rate!r} Hz differs from manifest "
               f"{manifest.sample_rate_hz!r} Hz")
        logger.warning("%s: %s", path, msg)
        warnings.append(msg)
    else:
        rate = manifest.sample_rate_hz
    channels = {name: data[:, k + 1] for k, name in enumerate(names)}
    sync = data[:, -1] if has_sync and manifest.sync == "channel" else None
    if has_sync and manifest.sync == "none":
        raise MalformedHeaderError(f"{path}: 'sync' column present but manifest declares sync: none")
    return Recording(channels, sync, manifest, sample_rate_hz=rate, warnings=tuple(warnings))
