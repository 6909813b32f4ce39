"""Recording-to-record extraction shared by the CLI and the estimators."""

from __future__ import annotations

import os
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

from .census import ExtractionRecord
from .circuit import StateGraph, build_state_graph
from .logic import DEFAULT_PETRICK_CAP, TruthTable, format_sop, function_id, minimize
from .recording import Recording, read_recording
from .signal import segment, sweep

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Worker cap from ``GATEMINER_THREADS``, else the available CPUs."""
    env = os.environ.get("GATEMINER_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"GATEMINER_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ValueError("GATEMINER_THREADS must be >= 1")
        return n
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int | None = None) -> list[R]:
    """``[fn(x) for x in items]`` on a thread pool; output order follows ``items``."""
    workers = workers or worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@lru_cache(maxsize=4096)
def _minimized(n: int, bits: str, petrick_cap: int) -> tuple[str, int, bool]:
    sop = minimize(TruthTable(n, tuple(int(c) for c in bits)), petrick_cap=petrick_cap)
    return format_sop(sop), 0 if sop.is_constant else len(sop.terms), sop.heuristic


def extract_records(rec: Recording, thresholds: Iterable[float] | None = None,
                    channels: Sequence[str] | None = None, policy: str = "extremum",
                    baseline_v: float = 0.0, sync_level: float | None = None,
                    petrick_cap: int = DEFAULT_PETRICK_CAP, source: str = "") -> list[ExtractionRecord]:
    """One record per (threshold, channel); channels default to the output channel."""
    if channels is None:
        channels = [rec.meta.output_channel]
    n = rec.meta.n_inputs
    out = []
    for item in sweep(rec, thresholds, channels, policy, baseline_v, sync_level):
        # tables repeat across thresholds and recordings; minimize each once
        text, size, heuristic = _minimized(n, item.bits, petrick_cap)
        out.append(ExtractionRecord(
            repeat_index=rec.meta.repeat_index,
            threshold_mv=item.threshold_mv,
            channel=item.channel,
            n_inputs=n,
            function_id=function_id(TruthTable(n, tuple(int(c) for c in item.bits))).value,
            sop=text,
            circuit_size_terms=size,
            bits=item.bits,
            heuristic=heuristic,
            source=source,
        ))
    return out


def state_graphs(rec: Recording, thresholds: Iterable[float] | None = None,
                 channels: Sequence[str] | None = None, per_state_nodes: bool = False,
                 **sweep_kwargs) -> list[tuple[float, StateGraph]]:
    """One state graph per threshold over the concatenated channel outputs."""
    names = list(channels) if channels is not None else rec.channel_names
    windows = segment(rec, sweep_kwargs.pop("sync_level", None))
    by_threshold: dict[float, dict[str, str]] = {}
    for item in sweep(rec, thresholds, names, windows=windows, **sweep_kwargs):
        by_threshold.setdefault(item.threshold_mv, {})[item.channel] = item.bits
    graphs = []
    for thr, bits in by_threshold.items():
        outputs = ["".join(bits[name][w.state.ordinal] for name in names) for w in windows]
        graphs.append((thr, build_state_graph(
            [(w.state, o) for w, o in zip(windows, outputs)], per_state_nodes)))
    return graphs


def recording_paths(inputs: Iterable[str | Path], pattern: str = "*.csv") -> list[Path]:
    """Expand directories to their matching files; result is sorted by path."""
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(q for q in p.glob(pattern) if q.is_file())
        else:
            paths.append(p)
    return sorted(set(paths))


def extract_paths(paths: Sequence[Path], workers: int | None = None,
                  **kwargs) -> list[ExtractionRecord]:
    def one(path: Path) -> list[ExtractionRecord]:
        return extract_records(read_recording(path), source=path.name, **kwargs)

    return [r for batch in ordered_map(one, list(paths), workers) for r in batch]
