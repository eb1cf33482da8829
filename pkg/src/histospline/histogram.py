"""Weighted histogram construction and bin-count selection rules.

Bin counts can be chosen by the classic rules (square root, Sturges,
Scott, Freedman-Diaconis), by a fixed user count, or by Knuth's Bayesian
rule, which maximizes a marginal log-posterior over equal-width bin
counts.  All rules operate on the raw (unweighted) sample values; weights
only enter the histogram masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DataError

__all__ = [
    "Samples",
    "BinRule",
    "Histogram",
    "select_bin_count",
    "knuth_log_posterior",
    "build_histogram",
]

RULE_TAGS = ("sqrt", "sturges", "scott", "fd", "knuth", "fixed")

DEFAULT_KNUTH_SEARCH_MAX = 200

NORMALIZATION_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Samples:
    """Observation vector with per-sample weights.

    Weights default to the uniform ``1/N`` scheme.  They must be
    nonnegative with a positive sum; normalization to unit total mass
    happens at histogram construction time, so only relative weights
    matter.
    """

    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DataError("need a 1-d sample vector with at least 2 observations")
        if not np.all(np.isfinite(values)):
            raise DataError("sample values must all be finite")
        if self.weights is None:
            weights = np.full(values.size, 1.0 / values.size)
        else:
            weights = np.asarray(self.weights, dtype=float)
            if weights.shape != values.shape:
                raise DataError("weights must have the same length as values")
            if not np.all(np.isfinite(weights)):
                raise DataError("weights must all be finite")
            if np.any(weights < 0.0):
                raise DataError("weights must be nonnegative")
            if float(weights.sum()) <= 0.0:
                raise DataError("at least one weight must be positive")
        object.__setattr__(self, "values", _frozen_array(values))
        object.__setattr__(self, "weights", _frozen_array(weights))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class BinRule:
    """Bin-count selection rule.

    ``tag`` is one of ``sqrt``, ``sturges``, ``scott``, ``fd``, ``knuth``,
    ``fixed``.  ``fixed`` requires ``fixed_count``; ``knuth_search_max``
    bounds the exhaustive posterior scan of the Knuth rule.
    """

    tag: str
    fixed_count: int | None = None
    knuth_search_max: int = DEFAULT_KNUTH_SEARCH_MAX

    def __post_init__(self):
        if self.tag not in RULE_TAGS:
            raise DataError(
                f"unknown bin rule {self.tag!r}; expected one of {', '.join(RULE_TAGS)}"
            )
        if self.tag == "fixed":
            if self.fixed_count is None or int(self.fixed_count) < 1:
                raise DataError("fixed bin rule requires a count >= 1")
        elif self.fixed_count is not None:
            raise DataError(f"fixed_count is only valid with the 'fixed' rule, not {self.tag!r}")
        if int(self.knuth_search_max) < 1:
            raise DataError("knuth_search_max must be >= 1")

    @classmethod
    def sqrt(cls) -> "BinRule":
        return cls("sqrt")

    @classmethod
    def sturges(cls) -> "BinRule":
        return cls("sturges")

    @classmethod
    def scott(cls) -> "BinRule":
        return cls("scott")

    @classmethod
    def freedman_diaconis(cls) -> "BinRule":
        return cls("fd")

    @classmethod
    def knuth(cls, search_max: int = DEFAULT_KNUTH_SEARCH_MAX) -> "BinRule":
        return cls("knuth", knuth_search_max=search_max)

    @classmethod
    def fixed(cls, count: int) -> "BinRule":
        return cls("fixed", fixed_count=count)

    @classmethod
    def parse(cls, text: str, knuth_search_max: int = DEFAULT_KNUTH_SEARCH_MAX) -> "BinRule":
        """Parse a rule label such as ``"knuth"`` or ``"fixed:12"``."""
        text = text.strip().lower()
        if text.startswith("fixed:"):
            raw = text.split(":", 1)[1]
            try:
                count = int(raw)
            except ValueError as exc:
                raise DataError(f"bad fixed bin count {raw!r}") from exc
            return cls.fixed(count)
        if text == "fixed":
            raise DataError("fixed rule needs a count, e.g. 'fixed:10'")
        if text == "knuth":
            return cls.knuth(knuth_search_max)
        return cls(text)

    def label(self) -> str:
        """Canonical string form, the inverse of :meth:`parse`."""
        if self.tag == "fixed":
            return f"fixed:{self.fixed_count}"
        return self.tag


@dataclass(frozen=True)
class Histogram:
    """Equal-width density histogram: ``B+1`` edges, ``B`` heights.

    Heights are densities (mass per data unit); the total integral
    ``sum(heights * widths)`` must be 1 to within ``NORMALIZATION_TOL``.
    """

    edges: np.ndarray
    heights: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        heights = np.asarray(self.heights, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise DataError("edges must be a 1-d array of at least 2 values")
        if heights.ndim != 1 or heights.size != edges.size - 1:
            raise DataError("heights must have exactly len(edges) - 1 entries")
        if not (np.all(np.isfinite(edges)) and np.all(np.isfinite(heights))):
            raise DataError("histogram edges and heights must be finite")
        if np.any(np.diff(edges) <= 0.0):
            raise DataError("edges must be strictly increasing")
        if np.any(heights < 0.0):
            raise DataError("heights must be nonnegative")
        total = float(np.sum(heights * np.diff(edges)))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DataError(f"histogram is not normalized: integral = {total!r}")
        object.__setattr__(self, "edges", _frozen_array(edges))
        object.__setattr__(self, "heights", _frozen_array(heights))

    @property
    def bin_count(self) -> int:
        return self.heights.size

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def select_bin_count(samples: Samples, rule: BinRule) -> int:
    """Choose the number of equal-width bins for ``samples`` under ``rule``.

    Parameters
    ----------
    samples : Samples
        Observations; only the raw values enter the rule, never the weights.
    rule : BinRule
        Selection rule.  ``sqrt`` gives ``round(sqrt(N))``, ``sturges``
        gives ``ceil(log2 N) + 1``, ``scott`` and ``fd`` convert their
        optimal widths (``3.49 * sigma * N**(-1/3)`` and
        ``2 * IQR * N**(-1/3)``) to ``ceil(range / width)``, ``knuth``
        maximizes :func:`knuth_log_posterior` by exhaustive scan over
        ``1..knuth_search_max``, and ``fixed`` returns its count.

    Returns
    -------
    int
        Bin count, always >= 1.  Deterministic for fixed inputs; ties in
        the Knuth scan resolve to the smallest bin count.

    Raises
    ------
    DataError
        If the data has zero range (for the data-dependent rules) or zero
        interquartile range (for ``fd``).
    """
    values = samples.values
    n = values.size
    if rule.tag == "sqrt":
        return max(1, round(math.sqrt(n)))
    if rule.tag == "sturges":
        return math.ceil(math.log2(n)) + 1
    if rule.tag == "fixed":
        return int(rule.fixed_count)

    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        raise DataError("all samples are equal; data range is zero")
    if rule.tag == "scott":
        sigma = float(np.std(values))
        if sigma == 0.0:
            raise DataError("zero standard deviation; Scott's rule is undefined")
        width = 3.49 * sigma * n ** (-1.0 / 3.0)
        return int(math.ceil((hi - lo) / width))
    if rule.tag == "fd":
        q75, q25 = np.percentile(values, [75.0, 25.0])
        iqr = float(q75 - q25)
        if iqr == 0.0:
            raise DataError("zero interquartile range; Freedman-Diaconis rule is undefined")
        width = 2.0 * iqr * n ** (-1.0 / 3.0)
        return int(math.ceil((hi - lo) / width))

    return _knuth_scan(values, int(rule.knuth_search_max))


def knuth_log_posterior(counts, total: int) -> float:
    """Marginal log-posterior of an equal-width histogram with these counts.

    For ``B`` bins holding ``n_k`` of ``N`` samples:

    ``N ln B + lnG(B/2) - B lnG(1/2) - lnG(N + B/2) + sum_k lnG(n_k + 1/2)``

    where ``lnG`` is the log-gamma function.  The value is only meaningful
    relative to other bin counts of the same data, so callers scan ``B``
    and keep the argmax.
    """
    counts = np.asarray(counts)
    if counts.ndim != 1 or counts.size < 1:
        raise DataError("counts must be a non-empty 1-d sequence")
    if np.any(counts < 0):
        raise DataError("counts must be nonnegative")
    if int(total) < 1:
        raise DataError("total must be a positive integer")
    if int(counts.sum()) != int(total):
        raise DataError(f"counts sum to {int(counts.sum())}, expected total {int(total)}")
    b = counts.size
    n = float(total)
    # summing in sorted order makes the symmetric sum exactly
    # permutation-invariant despite floating-point rounding
    return float(
        n * math.log(b)
        + gammaln(b / 2.0)
        - b * gammaln(0.5)
        - gammaln(n + b / 2.0)
        + np.sum(gammaln(np.sort(counts) + 0.5))
    )


def _bin_counts_sorted(sorted_values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    # Half-open bins [e_i, e_{i+1}) with the last bin closed; matches
    # np.histogram exactly for edges spanning the data range.
    idx = np.searchsorted(sorted_values, edges[:-1], side="left")
    return np.diff(np.append(idx, sorted_values.size))


def _knuth_scan(values: np.ndarray, search_max: int) -> int:
    sorted_values = np.sort(values)
    lo, hi = sorted_values[0], sorted_values[-1]
    n = sorted_values.size
    best_b = 1
    best_lp = -math.inf
    for b in range(1, search_max + 1):
        edges = np.linspace(lo, hi, b + 1)
        counts = _bin_counts_sorted(sorted_values, edges)
        lp = knuth_log_posterior(counts, n)
        if lp > best_lp:
            best_b, best_lp = b, lp
    return best_b


def build_histogram(samples: Samples, bin_count: int) -> Histogram:
    """Build the equal-width density histogram of ``samples``.

    Edges span ``[min(values), max(values)]`` exactly with ``bin_count``
    uniform bins.  Each sample contributes its weight to exactly one bin
    (half-open bins, last bin closed so the maximum is counted); heights
    are the bin masses divided by total mass and bin width.
    """
    if int(bin_count) < 1:
        raise DataError("bin_count must be >= 1")
    values, weights = samples.values, samples.weights
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        raise DataError("all samples are equal; cannot histogram a zero range")
    edges = np.linspace(lo, hi, int(bin_count) + 1)
    masses, _ = np.histogram(values, bins=edges, weights=weights)
    total = masses.sum()
    heights = masses / (total * np.diff(edges))
    return Histogram(edges=edges, heights=heights)
