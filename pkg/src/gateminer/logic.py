"""Truth tables, function codification and exact two-level minimization.

Input ordinals are read as unsigned integers whose most significant bit is
input ``A``; variable index 0 is ``A``.  A function's ID is its output column
read as a binary number with the ordinal-0 row as the least-significant bit,
so NAND (``1110``) is 7.

Minimization is Quine-McCluskey prime generation followed by an exact cover
(Petrick's method over the reduced prime chart).  Covers are ranked by term
count, then literal count, then the plain rendering of the expression.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

CODIFICATION = (
    "function_id = sum(outputs[i] * 2**i); ordinal 0 is the least-significant "
    "bit; input A is the most-significant bit of the ordinal"
)
DEFAULT_PETRICK_CAP = 10**6

VARIABLE_NAMES = string.ascii_uppercase


class LogicError(ValueError):
    """Raised on malformed truth tables, assignments or expressions."""


class PetrickOverflowError(RuntimeError):
    """The Petrick expansion grew past the configured product cap."""


def _var_name(var: int) -> str:
    return VARIABLE_NAMES[var]


def _parse_bits(bits: str | Sequence[int]) -> tuple[int, ...]:
    if isinstance(bits, str):
        if any(c not in "01" for c in bits):
            raise LogicError(f"bit-string may only contain 0/1, got {bits!r}")
        return tuple(int(c) for c in bits)
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise LogicError("bits must be 0 or 1")
    return out


@dataclass(frozen=True)
class TruthTable:
    n_inputs: int
    outputs: tuple[int, ...]

    def __post_init__(self):
        if self.n_inputs < 1:
            raise LogicError(f"n_inputs must be >= 1, got {self.n_inputs}")
        if len(self.outputs) != 1 << self.n_inputs:
            raise LogicError(
                f"expected {1 << self.n_inputs} outputs for {self.n_inputs} inputs, "
                f"got {len(self.outputs)}"
            )

    @property
    def bits(self) -> str:
        return "".join(map(str, self.outputs))

    @property
    def onset(self) -> list[int]:
        return [i for i, v in enumerate(self.outputs) if v]

    def complement(self) -> "TruthTable":
        return TruthTable(self.n_inputs, tuple(1 - v for v in self.outputs))

    @classmethod
    def from_function_id(cls, n_inputs: int, value: int) -> "TruthTable":
        size = 1 << n_inputs
        if not 0 <= value < (1 << size):
            raise LogicError(f"function id {value} out of range for {n_inputs} inputs")
        return cls(n_inputs, tuple((value >> i) & 1 for i in range(size)))

    @classmethod
    def from_callable(cls, n_inputs: int, fn) -> "TruthTable":
        """Tabulate ``fn(*inputs)`` with inputs ordered A, B, C, ..."""
        rows = []
        for ordinal in range(1 << n_inputs):
            args = [(ordinal >> (n_inputs - 1 - v)) & 1 for v in range(n_inputs)]
            rows.append(1 if fn(*args) else 0)
        return cls(n_inputs, tuple(rows))


@dataclass(frozen=True)
class FunctionId:
    value: int

    @property
    def hex(self) -> str:
        return format(self.value, "x")

    @property
    def decimal(self) -> str:
        return str(self.value)

    def __int__(self):
        return self.value


@dataclass(frozen=True, order=True)
class Literal:
    variable: int
    negated: bool = False

    @property
    def name(self) -> str:
        return _var_name(self.variable)

    def value(self, ordinal: int, n_inputs: int) -> int:
        bit = (ordinal >> (n_inputs - 1 - self.variable)) & 1
        return 1 - bit if self.negated else bit


@dataclass(frozen=True)
class ProductTerm:
    literals: frozenset[Literal] = frozenset()

    def __post_init__(self):
        seen = set()
        for lit in self.literals:
            if lit.variable in seen:
                raise LogicError(f"variable {lit.name} appears twice in one product term")
            seen.add(lit.variable)

    def __len__(self):
        return len(self.literals)

    def display_order(self) -> list[Literal]:
        """Positive literals alphabetically, then negated ones alphabetically."""
        return sorted(self.literals, key=lambda lit: (lit.negated, lit.variable))

    def sort_key(self) -> tuple:
        # Variable order with the plain literal ahead of its complement:
        # reproduces A+B', A'+B, (A.B)+(A'.B') as tabulated for two inputs.
        return (len(self.literals), tuple(sorted((l.variable, l.negated) for l in self.literals)))

    def evaluate(self, ordinal: int, n_inputs: int) -> int:
        return int(all(lit.value(ordinal, n_inputs) for lit in self.literals))


@dataclass(frozen=True)
class SopExpression:
    """An OR of product terms.

    No terms means constant 0; a single empty term means constant 1.
    ``terms`` is kept in canonical order.
    """

    n_inputs: int
    terms: tuple[ProductTerm, ...] = ()
    heuristic: bool = False

    def __post_init__(self):
        for term in self.terms:
            for lit in term.literals:
                if not 0 <= lit.variable < self.n_inputs:
                    raise LogicError(
                        f"literal {lit.variable} out of range for {self.n_inputs} inputs"
                    )
        if any(len(t) == 0 for t in self.terms) and len(self.terms) > 1:
            raise LogicError("constant-1 term cannot be combined with other terms")
        object.__setattr__(self, "terms", tuple(sorted(set(self.terms), key=ProductTerm.sort_key)))

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and len(self.terms[0]) == 0)

    @property
    def constant_value(self) -> int | None:
        if not self.terms:
            return 0
        if len(self.terms) == 1 and len(self.terms[0]) == 0:
            return 1
        return None

    @property
    def literal_count(self) -> int:
        return sum(len(t) for t in self.terms)

    def evaluate_ordinal(self, ordinal: int) -> int:
        return int(any(t.evaluate(ordinal, self.n_inputs) for t in self.terms))

    def to_table(self) -> TruthTable:
        return TruthTable(
            self.n_inputs,
            tuple(self.evaluate_ordinal(i) for i in range(1 << self.n_inputs)),
        )

    @classmethod
    def constant(cls, n_inputs: int, value: int) -> "SopExpression":
        return cls(n_inputs, (ProductTerm(),) if value else ())

    def to_json(self) -> dict:
        return {
            "n_inputs": self.n_inputs,
            "id_hex": function_id(self.to_table()).hex,
            "terms": [
                [{"var": lit.name, "neg": lit.negated} for lit in t.display_order()]
                for t in self.terms
            ],
            "heuristic": self.heuristic,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SopExpression":
        try:
            n = int(data["n_inputs"])
            terms = []
            for raw in data["terms"]:
                lits = []
                for item in raw:
                    name = item["var"]
                    if name not in VARIABLE_NAMES[:n]:
                        raise LogicError(f"unknown variable {name!r} for {n} inputs")
                    lits.append(Literal(VARIABLE_NAMES.index(name), bool(item["neg"])))
                terms.append(ProductTerm(frozenset(lits)))
        except (KeyError, TypeError) as exc:
            raise LogicError(f"malformed SOP JSON: {exc}") from exc
        return cls(n, tuple(terms), heuristic=bool(data.get("heuristic", False)))


# -- table construction and codification -------------------------------------


def table_from_bits(n_inputs: int, bits: str | Sequence[int]) -> TruthTable:
    """Build a table whose output for ordinal ``i`` is ``bits[i]``."""
    outputs = _parse_bits(bits)
    if len(outputs) != 1 << n_inputs:
        raise LogicError(
            f"length mismatch: {n_inputs} inputs need {1 << n_inputs} bits, got {len(outputs)}"
        )
    return TruthTable(n_inputs, outputs)


def function_id(tt: TruthTable) -> FunctionId:
    value = 0
    for i, v in enumerate(tt.outputs):
        if v:
            value |= 1 << i
    return FunctionId(value)


def evaluate(sop: SopExpression, assignment: str | Sequence[int]) -> int:
    """Evaluate ``sop`` on an input bit-string written A first."""
    bits = _parse_bits(assignment)
    if len(bits) != sop.n_inputs:
        raise LogicError(
            f"assignment width {len(bits)} does not match {sop.n_inputs} inputs"
        )
    ordinal = 0
    for b in bits:
        ordinal = (ordinal << 1) | b
    return sop.evaluate_ordinal(ordinal)


# -- formatting -----------------------------------------------------------------


def _format_literal(lit: Literal, tex: bool) -> str:
    if not lit.negated:
        return lit.name
    return rf"\overline{{{lit.name}}}" if tex else f"{lit.name}'"


def format_sop(sop: SopExpression, tex: bool = False) -> str:
    """Render ``sop`` canonically, e.g. ``(A·B') + (B·A')``.

    With ``tex=True`` the same expression renders as
    ``(A \\cdot \\overline{B}) + (B \\cdot \\overline{A})``.
    """
    const = sop.constant_value
    if const is not None:
        return str(const)
    joiner = r" \cdot " if tex else "·"
    rendered = []
    for term in sop.terms:
        body = joiner.join(_format_literal(lit, tex) for lit in term.display_order())
        if len(term) > 1 and len(sop.terms) > 1:
            body = f"({body})"
        rendered.append(body)
    return " + ".join(rendered)


# -- Quine-McCluskey ---------------------------------------------------------------

# A cube is (value, care): ordinal bits under ``care`` are fixed to ``value``.
Cube = tuple[int, int]


def prime_implicants(n_inputs: int, onset: Iterable[int]) -> list[Cube]:
    full = (1 << n_inputs) - 1
    level = {(m, full) for m in onset}
    primes: set[Cube] = set()
    while level:
        merged: set[Cube] = set()
        used: set[Cube] = set()
        for value, care in level:
            bit = 1
            while bit <= care:
                if care & bit and not value & bit:
                    partner = (value | bit, care)
                    if partner in level:
                        merged.add((value, care & ~bit))
                        used.add((value, care))
                        used.add(partner)
                bit <<= 1
        primes |= level - used
        level = merged
    return sorted(primes)


def _cube_minterms(cube: Cube, n_inputs: int) -> list[int]:
    value, care = cube
    free = [1 << b for b in range(n_inputs) if not care & (1 << b)]
    out = []
    for k in range(1 << len(free)):
        m = value
        for j, bit in enumerate(free):
            if k >> j & 1:
                m |= bit
        out.append(m)
    return out


def cube_to_term(cube: Cube, n_inputs: int) -> ProductTerm:
    value, care = cube
    lits = []
    for var in range(n_inputs):
        bit = 1 << (n_inputs - 1 - var)
        if care & bit:
            lits.append(Literal(var, not value & bit))
    return ProductTerm(frozenset(lits))


def _literals(cube: Cube) -> int:
    return bin(cube[1]).count("1")


class _Chart:
    """Prime chart restricted to the minterms still needing cover."""

    def __init__(self, n_inputs: int, primes: list[Cube], onset: list[int]):
        self.n = n_inputs
        self.primes = primes
        self.cost = [_literals(p) for p in primes]
        self.term_key = [cube_to_term(p, n_inputs).sort_key() for p in primes]
        index = {m: k for k, m in enumerate(onset)}
        self.cover = []
        for p in primes:
            mask = 0
            for m in _cube_minterms(p, n_inputs):
                if m in index:
                    mask |= 1 << index[m]
            self.cover.append(mask)
        self.universe = (1 << len(onset)) - 1

    def covering(self, minterm_bit: int, candidates: Iterable[int]) -> list[int]:
        return [p for p in candidates if self.cover[p] & minterm_bit]


def _bits_of(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def _reduce(chart: _Chart, candidates: set[int] | None = None,
            remaining: int | None = None) -> tuple[set[int], set[int], int]:
    """Essential primes, row and column dominance until a fixed point.

    Returns (selected primes, remaining primes, remaining minterm mask).
    Prime removal only drops a prime when another covers a superset of its
    remaining minterms with strictly fewer literals, so every minimum-cost
    cover survives and tie-breaking stays exact.
    """
    selected: set[int] = set()
    candidates = set(range(len(chart.primes))) if candidates is None else set(candidates)
    remaining = chart.universe if remaining is None else remaining
    changed = True
    while changed and remaining:
        changed = False
        candidates = {p for p in candidates if chart.cover[p] & remaining}
        # essential primes
        for bit in _bits_of(remaining):
            covering = chart.covering(bit, candidates)
            if not covering:
                raise LogicError("minterm not covered by any prime implicant")
            if len(covering) == 1:
                p = covering[0]
                selected.add(p)
                remaining &= ~chart.cover[p]
                candidates.discard(p)
                changed = True
                break
        if changed:
            continue
        # row dominance
        ordered = sorted(candidates, key=lambda p: (chart.cost[p], chart.term_key[p]))
        for p in ordered:
            cov_p = chart.cover[p] & remaining
            for q in ordered:
                if q != p and q in candidates and chart.cost[q] < chart.cost[p]:
                    if cov_p & ~chart.cover[q] == 0:
                        candidates.discard(p)
                        changed = True
                        break
        if changed:
            continue
        # column dominance: a minterm whose covering set contains another's is implied
        rows = {}
        for bit in _bits_of(remaining):
            rows[bit] = frozenset(chart.covering(bit, candidates))
        items = sorted(rows.items(), key=lambda kv: len(kv[1]))
        for i, (bit_i, set_i) in enumerate(items):
            for bit_j, set_j in items[i + 1:]:
                if remaining & bit_j and set_i <= set_j:
                    remaining &= ~bit_j
                    changed = True
        if changed:
            # minterms dropped here are implied, not covered; keep them out of the loop
            continue
    return selected, candidates, remaining


def _cover_cost(chart: _Chart, chosen: Iterable[int]) -> tuple[int, int]:
    chosen = list(chosen)
    return len(chosen), sum(chart.cost[p] for p in chosen)


def _greedy_cover(chart: _Chart, candidates: set[int], remaining: int) -> set[int]:
    """Irredundant cover: re-reduce the chart, take the widest prime, repeat."""
    chosen: set[int] = set()
    left = remaining
    pool = set(candidates)
    while left:
        picked, pool, left = _reduce(chart, pool, left)
        chosen |= picked
        if not left:
            break
        best = min(pool, key=lambda p: (-bin(chart.cover[p] & left).count("1"),
                                        chart.cost[p], chart.term_key[p]))
        chosen.add(best)
        pool.discard(best)
        left &= ~chart.cover[best]
    for p in sorted(chosen, key=lambda p: (-chart.cost[p], chart.term_key[p])):
        rest = 0
        for q in chosen:
            if q != p:
                rest |= chart.cover[q]
        if remaining & ~rest == 0:
            chosen.discard(p)
    return chosen


def _petrick(chart: _Chart, candidates: set[int], remaining: int,
             bound: tuple[int, int], cap: int) -> list[frozenset[int]]:
    """All covers of ``remaining`` with cost <= ``bound``, as prime-index sets.

    Partial products are rows of a packed bit matrix over prime indices; a
    product already satisfying a clause is kept as is (X(X+Y) = X), the rest
    are multiplied out, pruned against ``bound`` and deduplicated.
    """
    clauses = sorted(
        {tuple(sorted(chart.covering(bit, candidates))) for bit in _bits_of(remaining)},
        key=lambda c: (len(c), c),
    )
    n_words = (len(chart.primes) + 63) // 64
    prods = np.zeros((1, n_words), dtype=np.uint64)
    terms = np.zeros(1, dtype=np.int64)
    lits = np.zeros(1, dtype=np.int64)
    max_terms, max_lits = bound

    for clause in clauses:
        clause_mask = np.zeros(n_words, dtype=np.uint64)
        for p in clause:
            clause_mask[p // 64] |= np.uint64(1 << (p % 64))
        done = (prods & clause_mask).any(axis=1)
        n_open = int((~done).sum())
        # the cap counts candidate products generated by one multiplication step
        if len(prods) - n_open + n_open * len(clause) > cap:
            raise PetrickOverflowError(f"Petrick expansion exceeded {cap} product terms")
        parts = [(prods[done], terms[done], lits[done])]
        open_prods, open_terms, open_lits = prods[~done], terms[~done] + 1, lits[~done]
        for p in clause:
            new_lits = open_lits + chart.cost[p]
            ok = (open_terms < max_terms) | ((open_terms == max_terms) & (new_lits <= max_lits))
            grown = open_prods[ok]
            grown[:, p // 64] |= np.uint64(1 << (p % 64))
            parts.append((grown, open_terms[ok], new_lits[ok]))
        prods = np.concatenate([q[0] for q in parts])
        terms = np.concatenate([q[1] for q in parts])
        lits = np.concatenate([q[2] for q in parts])
        if len(prods) == 0:
            return []
        rows = np.ascontiguousarray(prods).view(np.dtype((np.void, 8 * n_words))).ravel()
        _, first = np.unique(rows, return_index=True)
        prods, terms, lits = prods[first], terms[first], lits[first]

    best_terms = terms.min()
    best_lits = lits[terms == best_terms].min()
    winners = prods[(terms == best_terms) & (lits == best_lits)]
    covers = []
    for row in winners:
        covers.append(frozenset(
            w * 64 + b for w in range(n_words) for b in range(64) if int(row[w]) >> b & 1
        ))
    return covers


def minimize(tt: TruthTable, petrick_cap: int = DEFAULT_PETRICK_CAP,
             fallback: bool = True) -> SopExpression:
    """Exact minimum sum-of-products for ``tt``.

    Minimizes the number of product terms, then the number of literals; the
    lexicographically smallest plain rendering wins among equal-cost covers.
    When the Petrick expansion exceeds ``petrick_cap`` products the result is
    a greedy irredundant cover flagged ``heuristic=True``, or
    :class:`PetrickOverflowError` is raised if ``fallback`` is false.
    """
    n = tt.n_inputs
    onset = tt.onset
    if not onset:
        return SopExpression.constant(n, 0)
    if len(onset) == 1 << n:
        return SopExpression.constant(n, 1)

    primes = prime_implicants(n, onset)
    chart = _Chart(n, primes, onset)
    selected, candidates, remaining = _reduce(chart)

    def build(extra: Iterable[int], heuristic: bool = False) -> SopExpression:
        terms = tuple(cube_to_term(primes[p], n) for p in selected | set(extra))
        return SopExpression(n, terms, heuristic=heuristic)

    if not remaining:
        return build(())

    greedy = _greedy_cover(chart, candidates, remaining)
    try:
        covers = _petrick(chart, candidates, remaining, _cover_cost(chart, greedy), petrick_cap)
    except PetrickOverflowError:
        if not fallback:
            raise
        return build(greedy, heuristic=True)
    options = [build(c) for c in covers] or [build(greedy)]
    return min(options, key=lambda s: (len(s.terms), s.literal_count, format_sop(s)))


def table_from_sop(sop: SopExpression) -> TruthTable:
    return sop.to_table()


def parse_sop(text: str, n_inputs: int) -> SopExpression:
    """Parse the plain rendering produced by :func:`format_sop`."""
    text = text.strip()
    if text in ("0", "1"):
        return SopExpression.constant(n_inputs, int(text))
    terms = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if chunk.startswith("(") and chunk.endswith(")"):
            chunk = chunk[1:-1]
        lits = []
        for token in chunk.split("·"):
            token = token.strip()
            negated = token.endswith("'")
            name = token[:-1] if negated else token
            if len(name) != 1 or name not in VARIABLE_NAMES[:n_inputs]:
                raise LogicError(f"cannot parse literal {token!r} in {text!r}")
            lits.append(Literal(VARIABLE_NAMES.index(name), negated))
        terms.append(ProductTerm(frozenset(lits)))
    return SopExpression(n_inputs, tuple(terms))
