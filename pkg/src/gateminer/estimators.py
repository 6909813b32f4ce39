"""scikit-learn style wrappers so the extraction steps compose in a Pipeline.

``PeakBitExtractor`` turns recordings into a bit matrix, ``SopMinimizer``
turns bit rows into minimized SOP expressions, and ``GateCensusEstimator``
counts functions.  Chained in a :class:`sklearn.pipeline.Pipeline` they
reproduce ``extract`` followed by ``census``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .census import ExtractionRecord, accumulate, top_k
from .logic import DEFAULT_PETRICK_CAP, TruthTable, format_sop, function_id, minimize
from .recording import Recording
from .signal import PEAK_POLICIES, ThresholdSweep, sweep


def _check_recordings(X) -> list[Recording]:
    if isinstance(X, Recording):
        X = [X]
    X = list(X)
    if not X:
        raise ValueError("expected at least one Recording")
    for rec in X:
        if not isinstance(rec, Recording):
            raise TypeError(f"expected Recording instances, got {type(rec).__name__}")
    n = {rec.meta.n_inputs for rec in X}
    if len(n) != 1:
        raise ValueError(f"recordings mix input widths: {sorted(n)}")
    return X


def check_bits(X, n_inputs: int | None = None) -> np.ndarray:
    """Validate a 2-D 0/1 matrix whose rows are truth-table output columns."""
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], str):
        X = [[int(c) for c in row] for row in X]
    X = check_array(X, dtype=np.int64, ensure_2d=True)
    if not np.isin(X, (0, 1)).all():
        raise ValueError("bit matrix may only contain 0 and 1")
    width = X.shape[1]
    if width & (width - 1):
        raise ValueError(f"row width {width} is not a power of two")
    if n_inputs is not None and width != 1 << n_inputs:
        raise ValueError(f"rows have {width} bits, expected {1 << n_inputs}")
    return X


class PeakBitExtractor(TransformerMixin, BaseEstimator):
    """Recordings -> bit matrix of shape (n_recordings * n_thresholds, 2**n_inputs).

    Rows are ordered recording-major, then by ascending threshold.  After
    ``transform``, ``row_index_`` lists ``(recording, threshold_mv)`` per row.
    """

    def __init__(self, thresholds_mv=None, channel=None, policy="extremum",
                 baseline_mv=0.0, sync_level=None):
        self.thresholds_mv = thresholds_mv
        self.channel = channel
        self.policy = policy
        self.baseline_mv = baseline_mv
        self.sync_level = sync_level

    def fit(self, X, y=None):
        X = _check_recordings(X)
        if self.policy not in PEAK_POLICIES:
            raise ValueError(f"policy must be one of {PEAK_POLICIES}")
        if self.thresholds_mv is not None:
            ThresholdSweep(tuple(self.thresholds_mv))
        self.n_inputs_ = X[0].meta.n_inputs
        return self

    def transform(self, X):
        check_is_fitted(self, "n_inputs_")
        X = _check_recordings(X)
        if X[0].meta.n_inputs != self.n_inputs_:
            raise ValueError(f"fitted on {self.n_inputs_}-input recordings")
        rows, index = [], []
        for k, rec in enumerate(X):
            channel = self.channel or rec.meta.output_channel
            for item in sweep(rec, self.thresholds_mv, [channel], self.policy,
                              self.baseline_mv / 1000.0, self.sync_level):
                rows.append([int(c) for c in item.bits])
                index.append((k, item.threshold_mv))
        self.row_index_ = index
        return np.asarray(rows, dtype=np.int64)


class SopMinimizer(TransformerMixin, BaseEstimator):
    """Bit rows -> array of :class:`SopExpression` objects."""

    def __init__(self, petrick_cap=DEFAULT_PETRICK_CAP, fallback=True):
        self.petrick_cap = petrick_cap
        self.fallback = fallback

    def fit(self, X, y=None):
        X = check_bits(X)
        self.n_inputs_ = X.shape[1].bit_length() - 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_inputs_")
        X = check_bits(X, self.n_inputs_)
        memo = {}
        out = np.empty(len(X), dtype=object)
        for i, row in enumerate(X):
            key = row.tobytes()
            if key not in memo:
                memo[key] = minimize(TruthTable(self.n_inputs_, tuple(int(b) for b in row)),
                                     petrick_cap=self.petrick_cap, fallback=self.fallback)
            out[i] = memo[key]
        return out

    def predict(self, X):
        """Function IDs of the rows of ``X``."""
        check_is_fitted(self, "n_inputs_")
        X = check_bits(X, self.n_inputs_)
        return np.array([function_id(TruthTable(self.n_inputs_, tuple(int(b) for b in row))).value
                         for row in X], dtype=object)


class GateCensusEstimator(BaseEstimator):
    """Counts minimized SOPs (as produced by :class:`SopMinimizer`)."""

    def __init__(self, k=10):
        self.k = k

    def fit(self, X, y=None):
        """``X``: iterable of SopExpression; ``y``: optional thresholds per row."""
        sops = list(X)
        thresholds = list(y) if y is not None else [0.0] * len(sops)
        if len(thresholds) != len(sops):
            raise ValueError("y must have one threshold per row of X")
        records = []
        for sop, thr in zip(sops, thresholds):
            records.append(ExtractionRecord(
                repeat_index=0, threshold_mv=float(thr), channel="", n_inputs=sop.n_inputs,
                function_id=function_id(sop.to_table()).value, sop=format_sop(sop),
                circuit_size_terms=0 if sop.is_constant else len(sop.terms),
                heuristic=sop.heuristic,
            ))
        self.census_ = accumulate(records)
        self.top_ = top_k(self.census_, self.k) if self.census_.counts else []
        return self

    def transform(self, X):
        """Count of each row's function in the fitted census."""
        check_is_fitted(self, "census_")
        return np.array([self.census_.counts.get(function_id(s.to_table()).value, 0) for s in X])
