import itertools
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from gateminer.logic import (
    Literal, LogicError, PetrickOverflowError, ProductTerm, SopExpression, TruthTable,
    evaluate, format_sop, function_id, minimize, parse_sop, prime_implicants, table_from_bits,
)

from conftest import brute_force_min_cover, normalize_ws, sop_from_tex

GOLDEN = Path(__file__).parent / "golden"

TABLE2 = [
    r"(A \cdot \overline{B}) + (B \cdot \overline{A} \cdot \overline{C}) + (B \cdot \overline{C} \cdot \overline{D})",
    r"(C \cdot D \cdot \overline{B}) + (A \cdot \overline{B} \cdot \overline{D}) + (B \cdot \overline{A} \cdot \overline{D}) + (D \cdot \overline{A} \cdot \overline{C})",
    r"(A \cdot \overline{B} \cdot \overline{D}) + (B \cdot \overline{A} \cdot \overline{C} \cdot \overline{D})",
    r"(\overline{A} \cdot \overline{D}) + (A \cdot B \cdot C \cdot D) + (B \cdot \overline{A} \cdot \overline{C}) + (C \cdot \overline{A} \cdot \overline{B})",
    r"(A \cdot \overline{B} \cdot \overline{D}) + (B \cdot \overline{A} \cdot \overline{C}) + (B \cdot \overline{C} \cdot \overline{D})",
    r"A \cdot D \cdot \overline{B} \cdot \overline{C}",
    r"A \cdot \overline{B} \cdot \overline{C} \cdot \overline{D}",
    r"(B \cdot C \cdot D) + (B \cdot C \cdot \overline{A}) + (C \cdot D \cdot \overline{A}) + (A \cdot \overline{B} \cdot \overline{C} \cdot \overline{D})",
    r"(A \cdot D \cdot \overline{B}) + (B \cdot D \cdot \overline{A}) + (A \cdot \overline{B} \cdot \overline{C}) + (B \cdot \overline{A} \cdot \overline{C}) + (D \cdot \overline{A} \cdot \overline{C})",
    r"(D \cdot \overline{A}) + (D \cdot \overline{B}) + (B \cdot \overline{A} \cdot \overline{C})",
]


def all_assignments(n):
    return ["".join(bits) for bits in itertools.product("01", repeat=n)]


class TestTableAndId:
    def test_nand_table(self):
        tt = table_from_bits(2, "1110")
        assert tt.outputs == (1, 1, 1, 0)
        assert tt == TruthTable.from_callable(2, lambda a, b: not (a and b))

    def test_constant_zero_and_shape(self):
        assert table_from_bits(2, "0000").onset == []
        assert len(table_from_bits(4, "0110100110010110").outputs) == 16

    def test_length_mismatch(self):
        with pytest.raises(LogicError, match="length mismatch"):
            table_from_bits(2, "111")

    @pytest.mark.parametrize("bits,value", [("1110", 7), ("1111", 15), ("0110", 6), ("0000", 0)])
    def test_function_id(self, bits, value):
        fid = function_id(table_from_bits(2, bits))
        assert fid.value == value
        assert fid.hex == format(value, "x")

    def test_hex_has_no_leading_zeros(self):
        assert function_id(table_from_bits(2, "1000")).hex == "1"
        assert function_id(table_from_bits(2, "0000")).hex == "0"

    def test_eight_input_id_is_big(self):
        tt = TruthTable(8, (0,) * 255 + (1,))
        assert function_id(tt).value == 2**255
        assert function_id(tt).hex == "8" + "0" * 63

    @given(st.integers(1, 5).flatmap(
        lambda n: st.tuples(st.just(n), st.integers(0, 2 ** (2**n) - 1))))
    def test_id_bijection(self, n_value):
        n, value = n_value
        tt = TruthTable.from_function_id(n, value)
        assert function_id(tt).value == value
        assert table_from_bits(n, tt.bits) == tt


class TestEvaluate:
    def test_nand(self):
        nand = parse_sop("A' + B'", 2)
        assert evaluate(nand, "11") == 0
        assert evaluate(nand, "01") == 1

    def test_table2_top_function(self):
        sop = sop_from_tex(TABLE2[0], 4)
        # A=1, B=0, C=1, D=1 satisfies the A.B' term
        assert evaluate(sop, "1011") == 1

    def test_width_mismatch(self):
        with pytest.raises(LogicError):
            evaluate(parse_sop("A' + B'", 2), "101")


class TestMinimize:
    def test_nand(self):
        assert format_sop(minimize(table_from_bits(2, "1110"))) == "A' + B'"

    def test_xor(self):
        assert format_sop(minimize(table_from_bits(2, "0110"))) == "(A·B') + (B·A')"

    def test_constants(self):
        zero = minimize(table_from_bits(2, "0000"))
        one = minimize(table_from_bits(2, "1111"))
        assert zero.constant_value == 0 and format_sop(zero) == "0"
        assert one.constant_value == 1 and format_sop(one) == "1"

    def test_de_morgan(self):
        and_table = TruthTable.from_callable(2, lambda a, b: a and b)
        assert format_sop(minimize(and_table.complement())) == "A' + B'"

    @pytest.mark.parametrize("line", (GOLDEN / "table1_tex.txt").read_text().splitlines())
    def test_table1_tex(self, line):
        bits, tex = line.split("\t")
        ours = format_sop(minimize(table_from_bits(2, bits)), tex=True)
        assert normalize_ws(ours) == normalize_ws(tex.strip("$"))

    @pytest.mark.parametrize("value", range(16))
    def test_all_two_input_minimal(self, value):
        tt = TruthTable.from_function_id(2, value)
        sop = minimize(tt)
        assert sop.to_table() == tt
        expected_terms, expected_lits = brute_force_min_cover(2, tt.outputs)
        assert (0 if sop.constant_value == 0 else len(sop.terms)) == expected_terms
        assert sop.literal_count == expected_lits

    @pytest.mark.parametrize("seed", range(40))
    def test_random_four_input_minimal(self, seed):
        r = random.Random(seed)
        tt = TruthTable(4, tuple(r.randint(0, 1) for _ in range(16)))
        sop = minimize(tt)
        assert sop.to_table() == tt
        assert not sop.heuristic
        terms, lits = brute_force_min_cover(4, tt.outputs)
        assert len(sop.terms) == terms or sop.is_constant
        assert sop.literal_count == lits

    @pytest.mark.parametrize("tex", TABLE2)
    def test_table2_functions_reminimize_no_larger(self, tex):
        listed = sop_from_tex(tex, 4)
        ours = minimize(listed.to_table())
        assert ours.to_table() == listed.to_table()
        assert len(ours.terms) <= len(listed.terms)

    def test_prime_implicants_of_xor(self):
        # XOR has two primes, both full minterms
        assert sorted(prime_implicants(2, [1, 2])) == [(1, 3), (2, 3)]

    def test_overflow_and_fallback(self):
        r = random.Random(7)
        tt = TruthTable(6, tuple(r.randint(0, 1) for _ in range(64)))
        with pytest.raises(PetrickOverflowError):
            minimize(tt, petrick_cap=2, fallback=False)
        approx = minimize(tt, petrick_cap=2)
        assert approx.heuristic
        assert approx.to_table() == tt
        exact = minimize(tt)
        assert not exact.heuristic
        assert len(exact.terms) <= len(approx.terms)

    def test_deterministic_tie_break(self):
        # 3-input parity-free cyclic function with two equal-cost covers
        tt = table_from_bits(3, "01111110")
        first = format_sop(minimize(tt))
        for _ in range(3):
            assert format_sop(minimize(tt)) == first
        # candidates (A·B') + (C·A') + (B·C') and (A·C') + (B·A') + (C·B'); the first sorts lower
        assert first == "(A·B') + (C·A') + (B·C')"

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 6).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 1), min_size=2**n, max_size=2**n))))
    def test_soundness(self, case):
        n, outputs = case
        tt = TruthTable(n, tuple(outputs))
        sop = minimize(tt)
        for a in all_assignments(n):
            assert evaluate(sop, a) == tt.outputs[int(a, 2)]

    def test_soundness_eight_inputs_sampled(self):
        r = random.Random(42)
        tt = TruthTable(8, tuple(r.randint(0, 1) for _ in range(256)))
        sop = minimize(tt)
        # 256 assignments is exhaustive at n = 8
        assert sop.to_table() == tt


class TestFormat:
    def test_plain_and_tex(self):
        sop = minimize(table_from_bits(2, "0110"))
        assert format_sop(sop) == "(A·B') + (B·A')"
        assert format_sop(sop, tex=True) == r"(A \cdot \overline{B}) + (B \cdot \overline{A})"

    def test_literal_order_within_term(self):
        term = ProductTerm(frozenset({Literal(3, True), Literal(0, False), Literal(1, True),
                                      Literal(2, False)}))
        assert format_sop(SopExpression(4, (term,))) == "A·C·B'·D'"

    def test_eight_input_listing_orders_by_size(self):
        listing = (Path(__file__).parent / "golden" / "eight_input_twice.tex").read_text()
        sop = sop_from_tex(listing, 8)
        assert len(sop.terms) == 41
        rendered = format_sop(sop)
        sizes = [len(t.split("·")) for t in rendered.split(" + ")]
        assert sizes == sorted(sizes)
        assert sizes[0] == 5 and 6 in sizes
        assert sizes.index(6) > max(i for i, s in enumerate(sizes) if s == 5)

    def test_parse_roundtrip(self):
        for value in range(256):
            sop = minimize(TruthTable.from_function_id(3, value))
            assert parse_sop(format_sop(sop), 3) == sop

    def test_json_roundtrip(self):
        sop = minimize(table_from_bits(2, "0110"))
        data = sop.to_json()
        assert data["id_hex"] == "6"
        assert data["terms"][0] == [{"var": "A", "neg": False}, {"var": "B", "neg": True}]
        assert SopExpression.from_json(data) == sop

    def test_injective_over_minimized_three_input(self):
        seen = {}
        for value in range(256):
            text = format_sop(minimize(TruthTable.from_function_id(3, value)))
            assert text not in seen
            seen[text] = value

    def test_invalid_term(self):
        with pytest.raises(LogicError):
            ProductTerm(frozenset({Literal(0, False), Literal(0, True)}))
