"""Segmentation of recordings into input-state windows and peak detection.

A peak is a sample whose distance from the baseline strictly exceeds the
threshold (a sample exactly on the band edge is inside the band).  Under the
default ``"extremum"`` policy the sample must also be a local maximum of
``|signal - baseline|`` within its window; a plateau counts once, at its
first sample.  ``"any_excursion"`` counts every out-of-band sample.
Peak polarity is recorded but never affects the derived bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .recording import DEFAULT_THRESHOLDS_MV, InputState, Recording, state_schedule

PEAK_POLICIES = ("extremum", "any_excursion")


class SegmentationError(ValueError):
    pass


class EdgeCountError(SegmentationError):
    def __init__(self, found: int, expected: int):
        super().__init__(f"found {found} sync edges, expected {expected}")
        self.found = found
        self.expected = expected


class TraceTooShortError(SegmentationError):
    pass


class UnknownChannelError(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class StateWindow:
    state: InputState
    start: int
    stop: int
    samples: Mapping[str, np.ndarray]

    @property
    def sample_range(self) -> range:
        return range(self.start, self.stop)

    def __len__(self):
        return self.stop - self.start


@dataclass(frozen=True)
class PeakEvent:
    channel: str
    sample_index: int
    amplitude_v: float


@dataclass(frozen=True)
class ThresholdSweep:
    thresholds_mv: tuple[float, ...] = DEFAULT_THRESHOLDS_MV

    def __post_init__(self):
        th = tuple(float(t) for t in self.thresholds_mv)
        if not th:
            raise ValueError("a sweep needs at least one threshold")
        if any(t <= 0 for t in th) or any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError(f"thresholds must be positive and strictly ascending: {th}")
        object.__setattr__(self, "thresholds_mv", th)

    def __iter__(self):
        return iter(self.thresholds_mv)

    def __len__(self):
        return len(self.thresholds_mv)


@dataclass(frozen=True)
class ChannelBits:
    """Bits and peaks for one (threshold, channel) pair of a sweep."""

    threshold_mv: float
    channel: str
    bits: str
    peaks: tuple[tuple[int, PeakEvent], ...]

    def to_json(self) -> dict:
        return {
            "threshold_mv": self.threshold_mv,
            "channel": self.channel,
            "bits": self.bits,
            "peaks": [
                {"state": state, "index": p.sample_index, "amplitude_v": p.amplitude_v}
                for state, p in self.peaks
            ],
        }


def sync_edges(sync: np.ndarray, level: float | None = None) -> np.ndarray:
    """Indices where the sync trace crosses ``level`` upward.

    ``level`` defaults to the midpoint between the trace's minimum and
    maximum.  A trace that starts above the level has an edge at 0.
    """
    sync = np.asarray(sync, dtype=float)
    lo, hi = float(sync.min()), float(sync.max())
    if level is None:
        if hi == lo:
            return np.zeros(0, dtype=int)
        level = lo + 0.5 * (hi - lo)
    above = sync > level
    prev = np.concatenate([[False], above[:-1]])
    return np.nonzero(above & ~prev)[0]


def segment(rec: Recording, sync_level: float | None = None) -> list[StateWindow]:
    """Split ``rec`` into one window per input state, in counting order.

    With a sync track, windows start at rising sync edges and end at the next
    edge; the last one spans one nominal state duration, clipped to the trace.
    Without one, windows are consecutive blocks of
    ``state_duration_s * sample_rate_hz`` samples.
    """
    states = state_schedule(rec.meta)
    n_states = len(states)
    width = int(round(rec.meta.state_duration_s * rec.sample_rate_hz))
    if width < 1:
        raise SegmentationError("state duration is shorter than one sample")
    if rec.sync is not None:
        edges = sync_edges(rec.sync, sync_level)
        if len(edges) != n_states:
            raise EdgeCountError(len(edges), n_states)
        bounds = [(int(a), int(b)) for a, b in zip(edges, edges[1:])]
        bounds.append((int(edges[-1]), min(len(rec), int(edges[-1]) + width)))
    else:
        if len(rec) < n_states * width:
            raise TraceTooShortError(
                f"{n_states} states x {width} samples need {n_states * width} samples, "
                f"trace has {len(rec)}"
            )
        bounds = [(k * width, (k + 1) * width) for k in range(n_states)]
    windows = []
    for state, (start, stop) in zip(states, bounds):
        windows.append(StateWindow(
            state, start, stop,
            {name: trace[start:stop] for name, trace in rec.channels.items()},
        ))
    return windows


def _extremum_mask(mag: np.ndarray) -> np.ndarray:
    mask = np.ones(len(mag), dtype=bool)
    if len(mag) > 1:
        mask[1:] &= mag[1:] > mag[:-1]
        mask[:-1] &= mag[:-1] >= mag[1:]
    return mask


def detect_peaks(window: StateWindow, channel: str, threshold_mv: float,
                 policy: str = "extremum", baseline_v: float = 0.0) -> list[PeakEvent]:
    """Peaks of ``channel`` in ``window`` escaping the band ``baseline ± threshold``.

    >>> from gateminer.recording import InputState
    >>> w = StateWindow(InputState("0", 0), 0, 4,
    ...                 {"ch0": np.array([0.02, 0.45, 0.03, -0.01])})
    >>> detect_peaks(w, "ch0", 300)
    [PeakEvent(channel='ch0', sample_index=1, amplitude_v=0.45)]
    """
    if channel not in window.samples:
        raise UnknownChannelError(channel)
    if not threshold_mv > 0:
        raise ValueError(f"threshold must be positive, got {threshold_mv}")
    if policy not in PEAK_POLICIES:
        raise ValueError(f"unknown peak policy {policy!r}")
    samples = window.samples[channel]
    mag = np.abs(samples - baseline_v)
    hits = mag > threshold_mv / 1000.0
    if policy == "extremum":
        hits &= _extremum_mask(mag)
    return [
        PeakEvent(channel, window.start + int(i), float(samples[i]))
        for i in np.nonzero(hits)[0]
    ]


def sweep(rec: Recording, thresholds: ThresholdSweep | Iterable[float] | None = None,
          channels: Sequence[str] | None = None, policy: str = "extremum",
          baseline_v: float = 0.0, sync_level: float | None = None,
          windows: list[StateWindow] | None = None) -> list[ChannelBits]:
    """Bits and peaks for every (threshold, channel), thresholds outermost."""
    if thresholds is None:
        thresholds = ThresholdSweep(rec.meta.thresholds_mv)
    elif not isinstance(thresholds, ThresholdSweep):
        thresholds = ThresholdSweep(tuple(thresholds))
    names = list(channels) if channels is not None else rec.channel_names
    for name in names:
        if name not in rec.channels:
            raise UnknownChannelError(name)
    if windows is None:
        windows = segment(rec, sync_level)
    out = []
    for threshold in thresholds:
        for name in names:
            bits = []
            peaks = []
            for w in windows:
                found = detect_peaks(w, name, threshold, policy, baseline_v)
                bits.append("1" if found else "0")
                peaks.extend((w.state.ordinal, p) for p in found)
            out.append(ChannelBits(threshold, name, "".join(bits), tuple(peaks)))
    return out


def sweep_bits(rec: Recording, thresholds: ThresholdSweep | Iterable[float] | None = None,
               **kwargs) -> dict[float, dict[str, str]]:
    """``{threshold_mv: {channel: bits}}``; bit ``i`` belongs to state ordinal ``i``."""
    result: dict[float, dict[str, str]] = {}
    for item in sweep(rec, thresholds, **kwargs):
        result.setdefault(item.threshold_mv, {})[item.channel] = item.bits
    return result
