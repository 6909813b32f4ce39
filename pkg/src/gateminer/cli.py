"""Command-line entry point: ``gateminer <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import census as census_mod
from .charprops import format_ev, optical_band_gap
from .circuit import CircuitError, circuit_size, netlist_from_sop, to_dot
from .logic import (
    DEFAULT_PETRICK_CAP, LogicError, PetrickOverflowError, SopExpression,
    format_sop, minimize, parse_sop, table_from_bits,
)
from .pipeline import extract_paths, recording_paths, state_graphs
from .recording import RecordingError, read_recording, write_recording
from .signal import PEAK_POLICIES, SegmentationError, UnknownChannelError
from .synth import SynthConfig, SynthConfigError, fixture_spec_from_json, generate, \
    generate_census_fixture

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_PATH = 3
EXIT_INPUT = 4
EXIT_ANALYSIS = 5

EXIT_CODES_HELP = """\
exit codes:
  0  success
  1  unexpected internal error
  2  usage error (unknown subcommand, bad or missing arguments)
  3  bad path (missing input, unwritable output)
  4  malformed input (recording, manifest, JSON, bit-string, SOP)
  5  analysis failure (sync edge mismatch, trace too short, unknown channel)

Errors are reported on stderr as one JSON line:
  {"error": "<kind>", "exit_code": <n>, "message": "<text>"}
"""


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "usage", message)


def _thresholds(text: str | None) -> tuple[float, ...] | None:
    if text is None:
        return None
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise CliError(EXIT_USAGE, "usage", f"bad threshold list {text!r}") from None


def _read_json(path: str | Path):
    path = Path(path)
    if not path.exists():
        raise CliError(EXIT_PATH, "bad_path", f"{path} does not exist")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, "malformed_input", f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise CliError(EXIT_PATH, "bad_path", f"cannot write {out}: {exc}") from exc


def _out_dir(path: str) -> Path:
    d = Path(path)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_PATH, "bad_path", f"cannot create {d}: {exc}") from exc
    return d


# -- subcommands ------------------------------------------------------------------


def cmd_gen(args) -> None:
    cfg = SynthConfig.from_json(_read_json(args.config), seed=args.seed)
    out = _out_dir(args.out)
    written = []
    if args.fixture:
        spec = fixture_spec_from_json(_read_json(args.fixture), cfg.n_inputs)
        recs = generate_census_fixture(spec, cfg, args.threshold)
    else:
        recs = [generate(replace(cfg, repeat_index=cfg.repeat_index + i))
                for i in range(args.repeats)]
    for rec in recs:
        written.append(write_recording(rec, out / f"{args.prefix}_{rec.meta.repeat_index:05d}.csv"))
    sys.stdout.write("".join(f"{p}\n" for p in written))


def cmd_extract(args) -> None:
    paths = recording_paths(args.inputs)
    missing = [p for p in paths if not p.exists()]
    if missing:
        raise CliError(EXIT_PATH, "bad_path", f"{missing[0]} does not exist")
    if not paths:
        raise CliError(EXIT_PATH, "bad_path", "no recordings found")
    channels = None
    if args.all_channels:
        channels = read_recording(paths[0]).channel_names
    elif args.channel:
        channels = args.channel
    records = extract_paths(
        paths, thresholds=_thresholds(args.thresholds), channels=channels, policy=args.policy,
        baseline_v=args.baseline_mv / 1000.0, petrick_cap=args.petrick_cap,
    )
    _emit(json.dumps([r.to_json() for r in records], indent=1, ensure_ascii=False) + "\n", args.out)


def _sop_from_args(args) -> SopExpression:
    if args.bits is not None:
        if args.n is None:
            raise CliError(EXIT_USAGE, "usage", "--bits needs --n")
        tt = table_from_bits(args.n, args.bits)
    elif args.table is not None:
        data = _read_json(args.table)
        try:
            tt = table_from_bits(int(data["n_inputs"]), str(data["bits"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(EXIT_INPUT, "malformed_input", f"table JSON: {exc}") from exc
    else:
        raise CliError(EXIT_USAGE, "usage", "give --bits/--n or --table")
    return minimize(tt, petrick_cap=args.petrick_cap)


def cmd_minimize(args) -> None:
    sop = _sop_from_args(args)
    if args.format == "plain":
        text = format_sop(sop) + "\n"
    elif args.format == "tex":
        text = format_sop(sop, tex=True) + "\n"
    else:
        data = sop.to_json()
        data["plain"] = format_sop(sop)
        data["tex"] = format_sop(sop, tex=True)
        data["size_terms"] = circuit_size(sop, "terms")
        data["size_gates"] = circuit_size(sop, "gates")
        text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    _emit(text, args.out)


def _load_records(inputs: Sequence[str]) -> list[census_mod.ExtractionRecord]:
    paths = recording_paths(inputs, "*.json")
    if not paths:
        raise CliError(EXIT_PATH, "bad_path", "no extraction record files found")
    records = []
    for path in paths:
        data = _read_json(path)
        if isinstance(data, dict):
            data = [data]
        for item in data:
            rec = census_mod.ExtractionRecord.from_json(item)
            rec.check()
            records.append(rec)
    return records


def cmd_census(args) -> None:
    records = _load_records(args.inputs)
    try:
        census = census_mod.accumulate(records)
    except census_mod.MixedInputsError as exc:
        raise CliError(EXIT_INPUT, "malformed_input", str(exc)) from exc
    if args.out_dir:
        d = _out_dir(args.out_dir)
        (d / "histogram.csv").write_text(census_mod.histogram_csv(census), encoding="utf-8")
        (d / "report.json").write_text(census_mod.report_json(census, args.top, args.metric),
                                       encoding="utf-8")
        (d / "report.txt").write_text(census_mod.report_text(census, args.top), encoding="utf-8")
    if args.format == "json":
        text = census_mod.report_json(census, args.top, args.metric)
    elif args.format == "csv":
        text = census_mod.histogram_csv(census)
    else:
        text = census_mod.report_text(census, args.top)
    _emit(text, args.out)


def cmd_graph(args) -> None:
    path = Path(args.recording)
    if not path.exists():
        raise CliError(EXIT_PATH, "bad_path", f"{path} does not exist")
    rec = read_recording(path)
    thresholds = _thresholds(args.thresholds)
    graphs = state_graphs(rec, thresholds, args.channel or None,
                          per_state_nodes=args.per_state_nodes, policy=args.policy)
    text = "".join(to_dot(g, name=f"states_{thr:g}mV") for thr, g in graphs)
    _emit(text, args.out)


def cmd_netlist(args) -> None:
    if args.sop_json:
        try:
            sop = SopExpression.from_json(_read_json(args.sop_json))
        except LogicError as exc:
            raise CliError(EXIT_INPUT, "malformed_input", str(exc)) from exc
    elif args.sop is not None and args.n is not None:
        sop = parse_sop(args.sop, args.n)
    else:
        raise CliError(EXIT_USAGE, "usage", "give an SOP JSON file or --sop with --n")
    net = netlist_from_sop(sop, not_sharing=not args.no_share)
    if args.format == "json":
        text = json.dumps(net.to_json(), indent=2) + "\n"
    else:
        text = to_dot(net)
    _emit(text, args.out)


def cmd_bandgap(args) -> None:
    sys.stdout.write(format_ev(optical_band_gap(args.lambda_nm)) + "\n")


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = _Parser(prog="gateminer", description="Mine Boolean gates from spiking recordings.",
                     epilog=EXIT_CODES_HELP, formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, description=help_text,
                              epilog=EXIT_CODES_HELP, formatter_class=fmt)

    p = add("gen", "Generate synthetic recordings from a SynthConfig JSON file.")
    p.add_argument("config", help="SynthConfig JSON")
    p.add_argument("--seed", type=int, required=True, help="RNG seed (required)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--fixture", help="fixture spec JSON [{bits, count}, ...]")
    p.add_argument("--threshold", type=float, help="fixture extraction threshold in mV")
    p.add_argument("--repeats", type=int, default=1, help="number of repeats without --fixture")
    p.add_argument("--prefix", default="rec", help="file name prefix (default: rec)")
    p.set_defaults(func=cmd_gen)

    p = add("extract", "Extract truth tables and SOPs from recordings.")
    p.add_argument("inputs", nargs="+", help="recording CSV files or directories")
    p.add_argument("--thresholds", help="comma-separated mV list (default: manifest)")
    p.add_argument("--channel", action="append", help="channel to extract (repeatable; "
                   "default: manifest output channel)")
    p.add_argument("--all-channels", action="store_true", help="extract every channel")
    p.add_argument("--policy", choices=PEAK_POLICIES, default="extremum")
    p.add_argument("--baseline-mv", type=float, default=0.0, help="threshold band centre")
    p.add_argument("--petrick-cap", type=int, default=DEFAULT_PETRICK_CAP)
    p.add_argument("--out", help="output JSON file (default: stdout)")
    p.set_defaults(func=cmd_extract)

    p = add("minimize", "Minimize a truth table to a sum of products.")
    p.add_argument("--n", type=int, help="number of inputs")
    p.add_argument("--bits", help="output bits in ordinal order, e.g. 1110")
    p.add_argument("--table", help="table JSON {n_inputs, bits}")
    p.add_argument("--format", choices=("plain", "tex", "json"), default="plain")
    p.add_argument("--petrick-cap", type=int, default=DEFAULT_PETRICK_CAP)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_minimize)

    p = add("census", "Aggregate extraction records into a histogram and top-k report.")
    p.add_argument("inputs", nargs="+", help="record JSON files or directories")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--metric", choices=("terms", "gates"), default="terms")
    p.add_argument("--out-dir", help="also write histogram.csv, report.json, report.txt here")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_census)

    p = add("graph", "Build state graphs from a recording and emit DOT.")
    p.add_argument("recording")
    p.add_argument("--thresholds", help="comma-separated mV list (default: manifest)")
    p.add_argument("--channel", action="append", help="channels forming the output string")
    p.add_argument("--per-state-nodes", action="store_true",
                   help="one node per (input state, output) instead of per output")
    p.add_argument("--policy", choices=PEAK_POLICIES, default="extremum")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_graph)

    p = add("netlist", "Build a gate netlist from an SOP.")
    p.add_argument("sop_json", nargs="?", help="SOP JSON file")
    p.add_argument("--sop", help="plain SOP text, e.g. \"A' + B'\"")
    p.add_argument("--n", type=int, help="number of inputs for --sop")
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("--no-share", action="store_true", help="one NOT per negated literal")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_netlist)

    p = add("bandgap", "Optical band gap (eV) from an absorption peak wavelength (nm).")
    p.add_argument("lambda_nm", type=float)
    p.set_defaults(func=cmd_bandgap)
    return parser


def _fail(err: CliError) -> int:
    line = json.dumps({"error": err.kind, "exit_code": err.code,
                       "message": " ".join(str(err).split())})
    sys.stderr.write(line + "\n")
    return err.code


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "repeats", 1) < 1 or getattr(args, "top", 1) < 1:
            raise CliError(EXIT_USAGE, "usage", "--repeats and --top must be >= 1")
        args.func(args)
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    except CliError as err:
        return _fail(err)
    except (SegmentationError, UnknownChannelError, PetrickOverflowError, CircuitError) as exc:
        return _fail(CliError(EXIT_ANALYSIS, "analysis_failure", str(exc)))
    except (RecordingError, LogicError, SynthConfigError, census_mod.CensusError) as exc:
        return _fail(CliError(EXIT_INPUT, "malformed_input", str(exc)))
    except ValueError as exc:
        return _fail(CliError(EXIT_INPUT, "malformed_input", str(exc)))
    except OSError as exc:
        return _fail(CliError(EXIT_PATH, "bad_path", str(exc)))
    except Exception as exc:  # noqa: BLE001
        return _fail(CliError(EXIT_INTERNAL, "internal", f"{type(exc).__name__}: {exc}"))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
