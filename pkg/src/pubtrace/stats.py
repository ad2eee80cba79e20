"""Nonparametric test machinery and descriptive aggregates.

Implements the two hypothesis tests used by the study reports — the
D'Agostino-Pearson omnibus normality test and the two-sided Mann-Whitney
U test — plus medians and proportion tables. Both tests are written
directly from the classical normalizing-transform formulas; no external
statistics library is required (the chi-square(2) and normal tail areas
have closed forms).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from statistics import median as _stat_median
from typing import Any

import numpy as np

from .errors import DegenerateSample, EmptyInput, TooFewSamples

# Exact Mann-Whitney enumeration is refused above this subset count; the
# distribution then falls back to the normal approximation. Counts below
# 2**52 stay exact in float64 arithmetic.
_EXACT_COMB_LIMIT = 2**52

DAGOSTINO_MIN_N = 20


class TestMethod(str, Enum):
    __test__ = False  # not a pytest class

    dagostino_pearson = "dagostino_pearson"
    mann_whitney_u = "mann_whitney_u"


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test."""

    __test__ = False  # not a pytest class

    statistic: float
    p_value: float
    method: TestMethod
    n: int
    n1: int | None = None
    n2: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value out of range: {self.p_value}")

    def reject_h0_at(self, alpha: float) -> bool:
        return self.p_value < alpha

    def to_dict(self) -> dict[str, Any]:
        d = {
            "method": self.method.value,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n": self.n,
        }
        if self.n1 is not None:
            d["n1"] = self.n1
            d["n2"] = self.n2
        return d


@dataclass(frozen=True)
class StatConfig:
    """Study-wide significance settings."""

    alpha: float = 0.005

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1): {self.alpha}")


def _norm_sf(x: float) -> float:
    """Upper tail of the standard normal distribution."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _chi2_sf_2df(x: float) -> float:
    """Upper tail of chi-square with 2 degrees of freedom (closed form)."""
    return math.exp(-0.5 * x)


# ---------------------------------------------------------------------------
# D'Agostino-Pearson omnibus normality test
# ---------------------------------------------------------------------------

def _skewness_z(n: int, g1: float) -> float:
    """Normalizing transform of sample skewness sqrt(b1)."""
    y = g1 * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    )
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    return delta * math.asinh(y / alpha)


def _kurtosis_z(n: int, b2: float) -> float:
    """Normalizing transform of sample kurtosis b2 (not excess)."""
    mean_b2 = 3.0 * (n - 1.0) / (n + 1.0)
    var_b2 = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) ** 2 * (n + 3.0) * (n + 5.0))
    x = (b2 - mean_b2) / math.sqrt(var_b2)
    sqrt_beta1 = (
        6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * math.sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)))
    )
    a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + math.sqrt(1.0 + 4.0 / sqrt_beta1**2))
    denom = 1.0 + x * math.sqrt(2.0 / (a - 4.0))
    term = (1.0 - 2.0 / a) / abs(denom)
    term = math.copysign(abs(term) ** (1.0 / 3.0), denom)
    return ((1.0 - 2.0 / (9.0 * a)) - term) / math.sqrt(2.0 / (9.0 * a))


def dagostino_components(samples: Sequence[float]) -> tuple[float, float]:
    """The two standardized components (skewness Z, kurtosis Z) of the omnibus statistic."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < DAGOSTINO_MIN_N:
        raise TooFewSamples(n, DAGOSTINO_MIN_N)
    centered = x - x.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise DegenerateSample("sample has zero variance")
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    g1 = m3 / m2**1.5
    b2 = m4 / m2**2
    return _skewness_z(n, g1), _kurtosis_z(n, b2)


def dagostino_pearson(samples: Sequence[float]) -> TestResult:
    """Omnibus normality test combining skewness and kurtosis.

    The statistic is K^2 = Z1^2 + Z2^2 where Z1 and Z2 are the classical
    normalizing transforms of sample skewness and kurtosis; under the
    normal null K^2 is chi-square with 2 degrees of freedom. Requires at
    least 20 observations (the transforms are unreliable below).
    """
    z1, z2 = dagostino_components(samples)
    k2 = z1 * z1 + z2 * z2
    return TestResult(
        statistic=k2,
        p_value=min(1.0, _chi2_sf_2df(k2)),
        method=TestMethod.dagostino_pearson,
        n=len(samples),
    )


# ---------------------------------------------------------------------------
# Mann-Whitney U test
# ---------------------------------------------------------------------------

def _midranks(pooled: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Fractional ranks (ties get the mean rank) and tie-group sizes."""
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(pooled.size, dtype=float)
    tie_sizes: list[int] = []
    i = 0
    while i < pooled.size:
        j = i
        while j + 1 < pooled.size and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        # positions i..j (0-based) share ranks i+1..j+1
        avg = (i + j + 2) / 2.0
        ranks[order[i:j + 1]] = avg
        tie_sizes.append(j - i + 1)
        i = j + 1
    return ranks, tie_sizes


def _tie_corrected_sigma(n1: int, n2: int, tie_sizes: list[int]) -> float:
    n = n1 + n2
    tie_term = sum(t**3 - t for t in tie_sizes) / (n * (n - 1.0))
    var = (n1 * n2 / 12.0) * ((n + 1.0) - tie_term)
    return math.sqrt(max(var, 0.0))


def _approx_p(u1: float, n1: int, n2: int, sigma: float, continuity: bool) -> float:
    mean = n1 * n2 / 2.0
    diff = u1 - mean
    if continuity:
        diff = math.copysign(max(abs(diff) - 0.5, 0.0), diff)
    z = diff / sigma
    return min(1.0, 2.0 * _norm_sf(abs(z)))


def _exact_p(ranks: np.ndarray, n1: int, u1_doubled: int) -> float:
    """Exact two-sided p by counting all size-n1 subsets of the pooled ranks.

    Works on doubled ranks (integers even with midranks) and computes the
    subset-count distribution of the rank sum with a subset-sum dynamic
    program; all counts stay below 2**52, so float64 arithmetic is exact.
    """
    doubled = np.rint(ranks * 2).astype(np.int64)
    total = int(doubled.sum())
    # counts[k][s] = number of k-subsets with doubled rank sum s
    counts = np.zeros((n1 + 1, total + 1), dtype=float)
    counts[0][0] = 1.0
    for d in doubled:
        d = int(d)
        for k in range(n1 - 1, -1, -1):
            counts[k + 1][d:] += counts[k][:total + 1 - d]
    dist = counts[n1]
    n_total = float(dist.sum())
    # U1 = R1 - n1(n1+1)/2, so doubled rank sum r corresponds to 2*U1 = r - n1(n1+1)
    r_obs = u1_doubled + n1 * (n1 + 1)
    p_le = float(dist[: r_obs + 1].sum()) / n_total
    p_ge = float(dist[r_obs:].sum()) / n_total
    return min(1.0, 2.0 * min(p_le, p_ge))


def mann_whitney_u(
    x: Sequence[float],
    y: Sequence[float],
    *,
    method: str = "auto",
    continuity: bool = True,
) -> TestResult:
    """Two-sided Mann-Whitney U test with midranks and tie correction.

    The reported statistic is U for ``x``. With ``method="auto"`` the exact
    subset-enumeration distribution is used when ``min(n1, n2) < 8`` and the
    normal approximation (tie-corrected variance, optional continuity
    correction) otherwise. Samples where every pooled value ties give
    p = 1.0.
    """
    if method not in ("auto", "exact", "approx"):
        raise ValueError(f"unknown method: {method!r}")
    x = np.asarray(list(x), dtype=float)
    y = np.asarray(list(y), dtype=float)
    n1, n2 = x.size, y.size
    if n1 == 0 or n2 == 0:
        raise EmptyInput("both samples must be non-empty")

    pooled = np.concatenate([x, y])
    ranks, tie_sizes = _midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0

    if len(tie_sizes) == 1:  # every observation tied
        return TestResult(u1, 1.0, TestMethod.mann_whitney_u, n1 + n2, n1, n2)

    if method == "auto":
        method = "exact" if min(n1, n2) < 8 else "approx"
    if method == "exact" and math.comb(n1 + n2, min(n1, n2)) > _EXACT_COMB_LIMIT:
        # Exact enumeration would overflow exact float64 counting; the
        # approximation is statistically safe at such sizes anyway.
        method = "approx"

    if method == "exact":
        # Enumerate over the smaller side for speed; U1 = n1*n2 - U2.
        if n1 <= n2:
            p = _exact_p(ranks, n1, int(round(2 * u1)))
        else:
            u2 = n1 * n2 - u1
            p = _exact_p(ranks, n2, int(round(2 * u2)))
    else:
        sigma = _tie_corrected_sigma(n1, n2, tie_sizes)
        if sigma == 0.0:
            p = 1.0
        else:
            p = _approx_p(u1, n1, n2, sigma, continuity)

    return TestResult(u1, p, TestMethod.mann_whitney_u, n1 + n2, n1, n2)


# ---------------------------------------------------------------------------
# Descriptive aggregates
# ---------------------------------------------------------------------------

def median(samples: Sequence[float]) -> float:
    """Midpoint of the order statistics; mean of the two central values for even n."""
    if len(samples) == 0:
        raise EmptyInput("median of empty sample")
    return float(_stat_median(samples))


def proportion_table(
    items: Iterable[Any],
    key: Callable[[Any], Any] | None = None,
) -> list[tuple[Any, int, float]]:
    """Count items per key and report (key, count, fraction) rows.

    Rows come back in sorted key order; fractions sum to 1 up to float
    rounding. An empty input gives an empty table.
    """
    counts: dict[Any, int] = {}
    total = 0
    for item in items:
        k = key(item) if key is not None else item
        counts[k] = counts.get(k, 0) + 1
        total += 1
    if total == 0:
        return []
    return [(k, counts[k], counts[k] / total) for k in sorted(counts)]
