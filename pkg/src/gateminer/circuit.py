"""Gate-level netlists for SOP expressions, state graphs, and DOT output."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .logic import SopExpression, evaluate, format_sop
from .recording import InputState

GATE_KINDS = ("INPUT", "NOT", "AND", "OR", "OUTPUT")
SIZE_METRICS = ("terms", "gates")

_DOT_SHAPES = {
    "INPUT": "plaintext",
    "NOT": "invtriangle",
    "AND": "box",
    "OR": "box",
    "OUTPUT": "doublecircle",
}


class CircuitError(ValueError):
    pass


class ConstantSopError(CircuitError):
    """A constant expression has no gates to build."""


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    inputs: tuple[str, ...] = ()
    label: str = ""


@dataclass(frozen=True)
class Netlist:
    """Gates in topological order; ``output`` names the single OUTPUT node."""

    n_inputs: int
    gates: tuple[Gate, ...]
    output: str

    def __post_init__(self):
        seen = set()
        outputs = 0
        for g in self.gates:
            if g.kind not in GATE_KINDS:
                raise CircuitError(f"unknown gate kind {g.kind}")
            for src in g.inputs:
                if src not in seen:
                    raise CircuitError(f"gate {g.id} reads {src} before it is defined")
            if g.kind == "NOT" and len(g.inputs) != 1:
                raise CircuitError("NOT gates take exactly one input")
            if g.kind == "AND" and len(g.inputs) < 2:
                raise CircuitError("AND gates take at least two inputs")
            if g.kind == "OUTPUT":
                outputs += 1
            seen.add(g.id)
        if outputs != 1 or self.output not in seen:
            raise CircuitError("a netlist needs exactly one OUTPUT")

    @property
    def gate_count(self) -> int:
        return sum(1 for g in self.gates if g.kind in ("NOT", "AND", "OR"))

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def evaluate(self, assignment: str) -> int:
        if len(assignment) != self.n_inputs:
            raise CircuitError(f"assignment width {len(assignment)} != {self.n_inputs}")
        values: dict[str, int] = {}
        for g in self.gates:
            if g.kind == "INPUT":
                values[g.id] = int(assignment[ord(g.label) - ord("A")])
            elif g.kind == "NOT":
                values[g.id] = 1 - values[g.inputs[0]]
            elif g.kind == "AND":
                values[g.id] = int(all(values[i] for i in g.inputs))
            elif g.kind == "OR":
                values[g.id] = int(any(values[i] for i in g.inputs))
            else:
                values[g.id] = values[g.inputs[0]]
        return values[self.output]

    def to_json(self) -> dict:
        return {
            "gates": [{"id": g.id, "kind": g.kind, "inputs": list(g.inputs)} for g in self.gates],
            "output": self.output,
        }


def netlist_from_sop(sop: SopExpression, not_sharing: bool = True) -> Netlist:
    if sop.is_constant:
        raise ConstantSopError(f"constant {format_sop(sop)} has no gates to build")
    gates: list[Gate] = []
    used = sorted({lit.variable for t in sop.terms for lit in t.literals})
    for var in used:
        name = chr(ord("A") + var)
        gates.append(Gate(f"in_{name}", "INPUT", (), name))

    shared_not: dict[int, str] = {}
    nots: list[Gate] = []
    term_sources: list[list[str]] = []
    for k, term in enumerate(sop.terms):
        sources = []
        for lit in term.display_order():
            name = lit.name
            if not lit.negated:
                sources.append(f"in_{name}")
                continue
            if not_sharing:
                if lit.variable not in shared_not:
                    gid = f"not_{name}"
                    shared_not[lit.variable] = gid
                    nots.append(Gate(gid, "NOT", (f"in_{name}",), "NOT"))
                sources.append(shared_not[lit.variable])
            else:
                gid = f"not_{name}_{k}"
                nots.append(Gate(gid, "NOT", (f"in_{name}",), "NOT"))
                sources.append(gid)
        term_sources.append(sources)
    gates.extend(nots)

    term_nodes = []
    for k, sources in enumerate(term_sources):
        if len(sources) == 1:
            term_nodes.append(sources[0])
        else:
            gid = f"and_{k}"
            gates.append(Gate(gid, "AND", tuple(sources), "AND"))
            term_nodes.append(gid)
    if len(term_nodes) > 1:
        gates.append(Gate("or_0", "OR", tuple(term_nodes), "OR"))
        driver = "or_0"
    else:
        driver = term_nodes[0]
    gates.append(Gate("out", "OUTPUT", (driver,), "F"))
    return Netlist(sop.n_inputs, tuple(gates), "out")


def circuit_size(sop: SopExpression, metric: str = "terms") -> int:
    """Product-term count (``terms``) or NOT/AND/OR gate count (``gates``)."""
    if metric not in SIZE_METRICS:
        raise ValueError(f"metric must be one of {SIZE_METRICS}")
    if sop.is_constant:
        return 0
    if metric == "terms":
        return len(sop.terms)
    return netlist_from_sop(sop, not_sharing=True).gate_count


def netlist_matches_sop(net: Netlist, sop: SopExpression, assignments=None) -> bool:
    n = sop.n_inputs
    if assignments is None:
        assignments = (format(i, f"0{n}b") for i in range(1 << n))
    return all(net.evaluate(a) == evaluate(sop, a) for a in assignments)


# -- state graphs ------------------------------------------------------------------


@dataclass(frozen=True)
class StateEdge:
    source: str
    target: str
    label: str


@dataclass(frozen=True)
class StateGraph:
    nodes: tuple[str, ...]
    edges: tuple[StateEdge, ...]


def build_state_graph(per_state_outputs: Sequence[tuple[InputState | str, str]],
                      per_state_nodes: bool = False) -> StateGraph:
    """Graph over observed output strings, one edge per consecutive input change.

    Nodes are listed in order of first appearance.  With ``per_state_nodes``
    each (input state, output) pair is its own node, named ``state/output``.
    """
    entries = []
    for state, output in per_state_outputs:
        bits = state.bits if isinstance(state, InputState) else str(state)
        entries.append((bits, str(output)))
    widths = {len(out) for _, out in entries}
    if len(widths) > 1:
        raise CircuitError(f"output strings have mixed widths: {sorted(widths)}")
    names = [f"{s}/{o}" if per_state_nodes else o for s, o in entries]
    nodes = tuple(dict.fromkeys(names))
    edges = tuple(
        StateEdge(names[k], names[k + 1], f"{entries[k][0]}->{entries[k + 1][0]}")
        for k in range(len(entries) - 1)
    )
    return StateGraph(nodes, edges)


# -- DOT ------------------------------------------------------------------------------


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(item: Netlist | StateGraph, name: str | None = None) -> str:
    lines = []
    if isinstance(item, Netlist):
        lines.append(f"digraph {_q(name or 'netlist')} {{")
        lines.append("  rankdir=LR;")
        for g in item.gates:
            label = g.label if g.kind in ("INPUT", "OUTPUT") else g.kind
            lines.append(f"  {_q(g.id)} [shape={_DOT_SHAPES[g.kind]}, label={_q(label)}];")
        for g in item.gates:
            for src in g.inputs:
                lines.append(f"  {_q(src)} -> {_q(g.id)};")
    elif isinstance(item, StateGraph):
        lines.append(f"digraph {_q(name or 'states')} {{")
        for node in item.nodes:
            lines.append(f"  {_q(node)} [shape=circle];")
        for e in item.edges:
            lines.append(f"  {_q(e.source)} -> {_q(e.target)} [label={_q(e.label)}];")
    else:
        raise TypeError(f"cannot render {type(item).__name__} as DOT")
    lines.append("}")
    return "\n".join(lines) + "\n"
