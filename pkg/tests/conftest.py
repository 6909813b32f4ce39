import itertools
import re

import numpy as np
import pytest

from gateminer.logic import parse_sop


def brute_force_min_cover(n_inputs, outputs):
    """(terms, literals) of a minimum SOP by exhaustive search.

    Independent of the minimizer: enumerates all 3**n product terms, keeps the
    prime implicants (no literal can be dropped), then tries every k-subset
    for k = 1, 2, ... until one covers the onset.
    """
    onset = frozenset(i for i, v in enumerate(outputs) if v)
    if not onset:
        return 0, 0
    if len(onset) == 1 << n_inputs:
        return 1, 0

    def covered(term):
        # term: tuple over variables of None / 0 / 1, variable 0 is the MSB
        return frozenset(
            m for m in range(1 << n_inputs)
            if all(t is None or ((m >> (n_inputs - 1 - v)) & 1) == t for v, t in enumerate(term))
        )

    implicants = {}
    for term in itertools.product((None, 0, 1), repeat=n_inputs):
        cov = covered(term)
        if cov <= onset:
            implicants[term] = cov

    def is_prime(term):
        for v, t in enumerate(term):
            if t is not None:
                wider = term[:v] + (None,) + term[v + 1:]
                if wider in implicants:
                    return False
        return True

    primes = [(t, c) for t, c in implicants.items() if is_prime(t)]
    for k in range(1, len(primes) + 1):
        best = None
        for combo in itertools.combinations(primes, k):
            if frozenset().union(*(c for _, c in combo)) == onset:
                lits = sum(sum(x is not None for x in t) for t, _ in combo)
                best = lits if best is None else min(best, lits)
        if best is not None:
            return k, best
    raise AssertionError("no cover found")


def tex_to_plain(tex):
    """Turn a tabulated TeX SOP into the plain rendering accepted by parse_sop."""
    text = tex.strip().strip("$")
    text = re.sub(r"\\overline\{(\w)\}", r"\1'", text)
    text = re.sub(r"\s*\\cdot\s*", "·", text)
    text = re.sub(r"\s*\+\s*", " + ", text)
    return text


def sop_from_tex(tex, n_inputs):
    return parse_sop(tex_to_plain(tex), n_inputs)


def normalize_ws(text):
    return re.sub(r"\s+", "", text)


@pytest.fixture
def rng():
    return np.random.default_rng(20231018)


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
