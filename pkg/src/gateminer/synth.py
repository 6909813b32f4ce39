"""Synthetic recordings with known Boolean functions embedded as spikes.

Randomness comes from numpy's PCG64 bit generator seeded with
``SeedSequence([seed, repeat_index])``; :func:`derive_seed` documents the
mixing used for fixture sets.  Draw order is fixed: for each state in
counting order and each channel (in config order), one uniform for the
flip decision and, for every burst of an active window, a position, an
amplitude and a sign; then the whole noise matrix at once.  A spike
amplitude is uniform on ``mean ± spread``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .logic import TruthTable
from .recording import DEFAULT_THRESHOLDS_MV, Recording, RunManifest

RNG_ALGORITHM = "numpy.random.PCG64(SeedSequence([seed, repeat_index]))"
SYNC_HIGH_V = 5.0


class SynthConfigError(ValueError):
    pass


def derive_seed(seed: int, index: int) -> int:
    """Per-recording seed for fixture sets: first word of SeedSequence([seed, index])."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint32)[0])


@dataclass(frozen=True)
class SynthConfig:
    n_inputs: int
    targets: Mapping[str, TruthTable]
    seed: int
    state_duration_s: float = 15.0
    sample_rate_hz: float = 1.0
    spike_amplitude_mv: tuple[float, float] = (450.0, 50.0)
    noise_sd_mv: float = 20.0
    flip_probability: float = 0.0
    bursts: int = 1
    repeat_index: int = 0
    thresholds_mv: tuple[float, ...] = DEFAULT_THRESHOLDS_MV
    output_channel: str | None = None
    recoverable_up_to_mv: float | None = None
    sync: bool = True

    def __post_init__(self):
        if not self.targets:
            raise SynthConfigError("at least one channel target is required")
        for name, tt in self.targets.items():
            if tt.n_inputs != self.n_inputs:
                raise SynthConfigError(
                    f"target for {name} has {tt.n_inputs} inputs, config says {self.n_inputs}"
                )
        mean, spread = self.spike_amplitude_mv
        if mean <= 0 or spread < 0 or spread > mean:
            raise SynthConfigError("spike amplitude needs mean > 0 and 0 <= spread <= mean")
        if self.noise_sd_mv < 0:
            raise SynthConfigError("noise_sd_mv must be non-negative")
        if not 0.0 <= self.flip_probability <= 1.0:
            raise SynthConfigError("flip_probability must lie in [0, 1]")
        if self.bursts < 1:
            raise SynthConfigError("bursts must be >= 1")
        if self.state_duration_s <= 0 or self.sample_rate_hz <= 0:
            raise SynthConfigError("state duration and sample rate must be positive")
        if self.samples_per_state < 1:
            raise SynthConfigError("a state must span at least one sample")
        if self.output_channel is not None and self.output_channel not in self.targets:
            raise SynthConfigError(f"output channel {self.output_channel!r} has no target")
        if (self.recoverable_up_to_mv is not None
                and not mean - 3 * spread > self.recoverable_up_to_mv):
            raise SynthConfigError(
                f"amplitude mean - 3*spread = {mean - 3 * spread:g} mV does not clear "
                f"recoverable_up_to_mv = {self.recoverable_up_to_mv:g}"
            )

    @property
    def samples_per_state(self) -> int:
        return int(round(self.state_duration_s * self.sample_rate_hz))

    @property
    def clean_threshold_mv(self) -> float:
        """Largest threshold at which noiseless spikes are guaranteed to register."""
        mean, spread = self.spike_amplitude_mv
        return mean - spread

    def to_json(self) -> dict:
        return {
            "n_inputs": self.n_inputs,
            "targets": {name: tt.bits for name, tt in self.targets.items()},
            "seed": self.seed,
            "state_duration_s": self.state_duration_s,
            "sample_rate_hz": self.sample_rate_hz,
            "spike_amplitude_mv": {"mean": self.spike_amplitude_mv[0],
                                   "spread": self.spike_amplitude_mv[1]},
            "noise_sd_mv": self.noise_sd_mv,
            "flip_probability": self.flip_probability,
            "bursts": self.bursts,
            "repeat_index": self.repeat_index,
            "thresholds_mv": list(self.thresholds_mv),
            "output_channel": self.output_channel,
            "recoverable_up_to_mv": self.recoverable_up_to_mv,
            "sync": self.sync,
        }

    @classmethod
    def from_json(cls, data: Mapping, seed: int | None = None) -> "SynthConfig":
        try:
            n = int(data["n_inputs"])
            targets = {str(k): TruthTable(n, tuple(int(c) for c in v))
                       for k, v in data["targets"].items()}
            amp = data.get("spike_amplitude_mv", {"mean": 450.0, "spread": 50.0})
            if isinstance(amp, Mapping):
                amp = (float(amp["mean"]), float(amp["spread"]))
            if seed is None:
                seed = int(data["seed"])
            return cls(
                n_inputs=n,
                targets=targets,
                seed=seed,
                state_duration_s=float(data.get("state_duration_s", 15.0)),
                sample_rate_hz=float(data.get("sample_rate_hz", 1.0)),
                spike_amplitude_mv=(float(amp[0]), float(amp[1])),
                noise_sd_mv=float(data.get("noise_sd_mv", 20.0)),
                flip_probability=float(data.get("flip_probability", 0.0)),
                bursts=int(data.get("bursts", 1)),
                repeat_index=int(data.get("repeat_index", 0)),
                thresholds_mv=tuple(data.get("thresholds_mv", DEFAULT_THRESHOLDS_MV)),
                output_channel=data.get("output_channel"),
                recoverable_up_to_mv=data.get("recoverable_up_to_mv"),
                sync=bool(data.get("sync", True)),
            )
        except SynthConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SynthConfigError(f"invalid synth config: {exc}") from exc


def generate(cfg: SynthConfig) -> Recording:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, cfg.repeat_index])))
    names = list(cfg.targets)
    width = cfg.samples_per_state
    n_states = 1 << cfg.n_inputs
    length = n_states * width
    mean, spread = cfg.spike_amplitude_mv
    traces = np.zeros((len(names), length))

    for ordinal in range(n_states):
        start = ordinal * width
        for c, name in enumerate(names):
            bit = cfg.targets[name].outputs[ordinal]
            if rng.random() < cfg.flip_probability:
                bit = 1 - bit
            if not bit:
                continue
            for _ in range(cfg.bursts):
                pos = int(rng.integers(0, width))
                amp_v = rng.uniform(mean - spread, mean + spread) / 1000.0
                sign = 1.0 if rng.random() < 0.5 else -1.0
                if abs(amp_v) > abs(traces[c, start + pos]):
                    traces[c, start + pos] = sign * amp_v
    if cfg.noise_sd_mv > 0:
        traces += rng.normal(0.0, cfg.noise_sd_mv / 1000.0, size=traces.shape)

    sync = None
    if cfg.sync:
        sync = np.zeros(length)
        sync[::width] = SYNC_HIGH_V
    manifest = RunManifest(
        n_inputs=cfg.n_inputs,
        state_duration_s=cfg.state_duration_s,
        sample_rate_hz=cfg.sample_rate_hz,
        repeat_index=cfg.repeat_index,
        thresholds_mv=cfg.thresholds_mv,
        output_channel=cfg.output_channel or names[0],
        sync="channel" if cfg.sync else "none",
        extra={"synth": {"rng": RNG_ALGORITHM, "seed": cfg.seed,
                         "targets": {k: v.bits for k, v in cfg.targets.items()}}},
    )
    return Recording(
        {name: traces[c] for c, name in enumerate(names)},
        sync, manifest, sample_rate_hz=cfg.sample_rate_hz,
    )


def generate_census_fixture(spec: Sequence[tuple[TruthTable, int]], cfg: SynthConfig,
                            threshold_mv: float | None = None) -> list[Recording]:
    """One recording per (table, occurrence), numbered as consecutive repeats.

    Each recording embeds its table on the output channel, with flips
    disabled, and is tagged with the single extraction threshold
    ``threshold_mv``.  The default sits halfway up to the smallest spike,
    ``(mean - spread) / 2``; the threshold must clear the noise by 6 sd on
    both sides so extraction reproduces the counts exactly.  Recording ``i``
    uses seed ``derive_seed(cfg.seed, i)``.
    """
    if not spec:
        raise SynthConfigError("fixture spec is empty")
    out_channel = cfg.output_channel or next(iter(cfg.targets))
    if threshold_mv is None:
        threshold_mv = cfg.clean_threshold_mv / 2
    margin = 6 * cfg.noise_sd_mv
    if not margin < threshold_mv < cfg.clean_threshold_mv - margin:
        raise SynthConfigError(
            f"threshold {threshold_mv:g} mV is within 6 noise sd of the noise floor "
            f"or of the smallest spike ({cfg.clean_threshold_mv:g} mV)"
        )
    recordings = []
    index = 0
    for tt, count in spec:
        if count < 1:
            raise SynthConfigError(f"fixture counts must be >= 1, got {count}")
        for _ in range(count):
            targets = dict(cfg.targets)
            targets[out_channel] = tt
            rec_cfg = replace(
                cfg, n_inputs=tt.n_inputs, targets=targets, output_channel=out_channel,
                seed=derive_seed(cfg.seed, index), repeat_index=index, flip_probability=0.0,
                thresholds_mv=(float(threshold_mv),),
            )
            recordings.append(generate(rec_cfg))
            index += 1
    return recordings


def fixture_spec_from_json(data: Sequence[Mapping], n_inputs: int) -> list[tuple[TruthTable, int]]:
    try:
        return [(TruthTable(n_inputs, tuple(int(c) for c in item["bits"])), int(item["count"]))
                for item in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise SynthConfigError(f"invalid fixture spec: {exc}") from exc
