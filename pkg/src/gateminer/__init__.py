"""Mine Boolean logic gates from multichannel spiking voltage recordings."""

from .census import ExtractionRecord, GateCensus, accumulate, histogram_csv, top_k
from .charprops import BandGapResult, optical_band_gap
from .circuit import (
    Netlist, StateGraph, build_state_graph, circuit_size, netlist_from_sop, to_dot,
)
from .estimators import GateCensusEstimator, PeakBitExtractor, SopMinimizer
from .logic import (
    FunctionId, Literal, ProductTerm, SopExpression, TruthTable, evaluate, format_sop,
    function_id, minimize, table_from_bits,
)
from .pipeline import extract_records, state_graphs
from .recording import (
    InputState, Recording, RunManifest, read_recording, state_schedule, write_recording,
)
from .signal import PeakEvent, StateWindow, ThresholdSweep, detect_peaks, segment, sweep_bits
from .synth import SynthConfig, generate, generate_census_fixture

__version__ = "0.1.0"
