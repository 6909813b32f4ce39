"""Gate census: counting discovered functions across repeats and thresholds."""

from __future__ import annotations

import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .circuit import circuit_size
from .logic import (
    CODIFICATION, TruthTable, format_sop, function_id, minimize, parse_sop,
)


class CensusError(ValueError):
    pass


class MixedInputsError(CensusError):
    pass


@dataclass(frozen=True)
class ExtractionRecord:
    repeat_index: int
    threshold_mv: float
    channel: str
    n_inputs: int
    function_id: int
    sop: str
    circuit_size_terms: int
    bits: str = ""
    heuristic: bool = False
    source: str = ""

    @property
    def id_hex(self) -> str:
        return format(self.function_id, "x")

    def check(self) -> None:
        """Re-evaluate ``sop`` and confirm it reproduces ``function_id``."""
        sop = parse_sop(self.sop, self.n_inputs)
        if function_id(sop.to_table()).value != self.function_id:
            raise CensusError(
                f"record sop {self.sop!r} does not match function id {self.id_hex}"
            )
        if self.bits and function_id(TruthTable(
                self.n_inputs, tuple(int(c) for c in self.bits))).value != self.function_id:
            raise CensusError(f"record bits {self.bits} do not match function id {self.id_hex}")

    def to_json(self) -> dict:
        return {
            "repeat_index": self.repeat_index,
            "threshold_mv": self.threshold_mv,
            "channel": self.channel,
            "n_inputs": self.n_inputs,
            "bits": self.bits,
            "id_hex": self.id_hex,
            "id_dec": str(self.function_id),
            "sop": self.sop,
            "circuit_size_terms": self.circuit_size_terms,
            "heuristic": self.heuristic,
            "source": self.source,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ExtractionRecord":
        try:
            return cls(
                repeat_index=int(data["repeat_index"]),
                threshold_mv=float(data["threshold_mv"]),
                channel=str(data["channel"]),
                n_inputs=int(data["n_inputs"]),
                function_id=int(data["id_hex"], 16),
                sop=str(data["sop"]),
                circuit_size_terms=int(data["circuit_size_terms"]),
                bits=str(data.get("bits", "")),
                heuristic=bool(data.get("heuristic", False)),
                source=str(data.get("source", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CensusError(f"malformed extraction record: {exc}") from exc


def record_from_table(tt: TruthTable, repeat_index: int = 0, threshold_mv: float = 0.0,
                      channel: str = "ch0", source: str = "", **minimize_kwargs) -> ExtractionRecord:
    sop = minimize(tt, **minimize_kwargs)
    return ExtractionRecord(
        repeat_index=repeat_index,
        threshold_mv=float(threshold_mv),
        channel=channel,
        n_inputs=tt.n_inputs,
        function_id=function_id(tt).value,
        sop=format_sop(sop),
        circuit_size_terms=0 if sop.is_constant else len(sop.terms),
        bits=tt.bits,
        heuristic=sop.heuristic,
        source=source,
    )


@dataclass
class GateCensus:
    """Function-ID counts, pooled and per threshold.

    ``sops`` maps each ID to its canonical plain SOP so reports need not
    re-minimize; keys are IDs so formatting can never split a count.
    """

    n_inputs: int | None = None
    counts: Counter = field(default_factory=Counter)
    per_threshold: dict[float, Counter] = field(default_factory=dict)
    sops: dict[int, str] = field(default_factory=dict)

    @property
    def total_records(self) -> int:
        return sum(self.counts.values())

    def add(self, rec: ExtractionRecord) -> None:
        if self.n_inputs is None:
            self.n_inputs = rec.n_inputs
        elif rec.n_inputs != self.n_inputs:
            raise MixedInputsError(
                f"census holds {self.n_inputs}-input functions, got a {rec.n_inputs}-input record"
            )
        self.counts[rec.function_id] += 1
        self.per_threshold.setdefault(rec.threshold_mv, Counter())[rec.function_id] += 1
        self.sops.setdefault(rec.function_id, rec.sop)

    def merge(self, other: "GateCensus") -> "GateCensus":
        """Combine two partial censuses; associative and commutative."""
        if None not in (self.n_inputs, other.n_inputs) and self.n_inputs != other.n_inputs:
            raise MixedInputsError(f"cannot merge {self.n_inputs}- and {other.n_inputs}-input censuses")
        out = GateCensus(self.n_inputs if self.n_inputs is not None else other.n_inputs)
        out.counts = self.counts + other.counts
        for src in (self.per_threshold, other.per_threshold):
            for thr, cnt in src.items():
                out.per_threshold[thr] = out.per_threshold.get(thr, Counter()) + cnt
        out.sops = {**other.sops, **self.sops}
        return out

    def __eq__(self, other):
        if not isinstance(other, GateCensus):
            return NotImplemented
        return (self.n_inputs == other.n_inputs and +self.counts == +other.counts
                and {k: +v for k, v in self.per_threshold.items()}
                == {k: +v for k, v in other.per_threshold.items()})

    def sop_for(self, fid: int) -> str:
        if fid not in self.sops:
            self.sops[fid] = format_sop(minimize(TruthTable.from_function_id(self.n_inputs, fid)))
        return self.sops[fid]

    def id_text(self, fid: int) -> str:
        return format(fid, "x") if self.n_inputs is not None and self.n_inputs >= 8 else str(fid)

    def non_unique(self) -> list[int]:
        return sorted(fid for fid, n in self.counts.items() if n > 1)


def accumulate(records: Iterable[ExtractionRecord], n_inputs: int | None = None) -> GateCensus:
    census = GateCensus(n_inputs)
    for rec in records:
        census.add(rec)
    return census


def top_k(census: GateCensus, k: int | None = None) -> list[tuple[str, int]]:
    """``(sop, count)`` pairs, most frequent first, ties by SOP string.

    ``k=None`` returns every function.
    """
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")
    return [(sop, n) for _, sop, n in _top_entries(census, k)]


def _top_entries(census: GateCensus, k: int | None) -> list[tuple[int, str, int]]:
    entries = sorted(
        ((fid, census.sop_for(fid), n) for fid, n in census.counts.items() if n > 0),
        key=lambda e: (-e[2], e[1]),
    )
    return entries if k is None else entries[:k]


def histogram_csv(census: GateCensus) -> str:
    """``function_id,count`` rows in ascending ID order (hex IDs for n >= 8)."""
    buf = io.StringIO()
    buf.write("function_id,count\n")
    for fid in sorted(fid for fid, n in census.counts.items() if n > 0):
        buf.write(f"{census.id_text(fid)},{census.counts[fid]}\n")
    return buf.getvalue()


def report(census: GateCensus, k: int | None = 10, metric: str = "terms") -> dict:
    return {
        "n_inputs": census.n_inputs,
        "total": census.total_records,
        "codification": CODIFICATION,
        "size_metric": metric,
        "top": [
            {"sop": sop, "id_hex": format(fid, "x"), "count": n,
             "size": circuit_size(parse_sop(sop, census.n_inputs), metric)}
            for fid, sop, n in _top_entries(census, k)
        ],
        "non_unique": len(census.non_unique()),
        "per_threshold": {
            _thr_key(thr): {format(fid, "x"): n for fid, n in sorted(cnt.items()) if n > 0}
            for thr, cnt in sorted(census.per_threshold.items())
        },
    }


def report_json(census: GateCensus, k: int | None = 10, metric: str = "terms") -> str:
    return json.dumps(report(census, k, metric), indent=2, ensure_ascii=False) + "\n"


def report_text(census: GateCensus, k: int | None = 10) -> str:
    """Tab-separated ``count  id_hex  sop`` lines, one per function."""
    lines = [f"{n}\t{format(fid, 'x')}\t{sop}" for fid, sop, n in _top_entries(census, k)]
    return "\n".join(lines) + "\n" if lines else ""


def _thr_key(thr: float) -> str:
    return f"{thr:g}"
