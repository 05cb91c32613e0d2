"""Group comparison tests: ANOVA + Tukey HSD, Kruskal-Wallis + pairwise
Wilcoxon rank-sum, and k-sample equality of proportions + pairwise tests.

Group arguments may be a mapping ``label -> values`` or a plain sequence of
samples (labelled ``"0"``, ``"1"``, ...).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .distributions import chi2_sf, f_sf, normal_sf, studentized_range_sf

Groups = Union[Mapping[str, Sequence[float]], Sequence[Sequence[float]]]

EXACT_MAX_N = 12
CORRECTIONS = ("holm", "bonferroni", "none")


class StatsError(ValueError):
    """A test is undefined for the given input."""


@dataclass(frozen=True)
class OmnibusResult:
    test: str  # anova_F | kruskal_H | chisq
    statistic: float
    df: tuple[float, Optional[float]]
    n: int
    p_value: float


@dataclass(frozen=True)
class PairwiseResult:
    group_a: str
    group_b: str
    estimate: float
    p_adjusted: float
    method: str  # tukey | wilcoxon_holm | prop_holm | ...
    statistic: float = float("nan")
    p_raw: float = float("nan")


def _labelled(groups: Groups) -> list[tuple[str, np.ndarray]]:
    if isinstance(groups, Mapping):
        items = list(groups.items())
    else:
        items = [(str(i), g) for i, g in enumerate(groups)]
    return [(str(k), np.asarray(v, dtype=float).ravel()) for k, v in items]


def _clip(p: float) -> float:
    return min(max(float(p), 0.0), 1.0)


# -- multiple comparisons -----------------------------------------------------


def adjust_pvalues(pvalues: Sequence[float], method: str = "holm") -> list[float]:
    """Holm step-down, Bonferroni, or no adjustment; input order is kept."""
    p = np.asarray(pvalues, dtype=float)
    m = len(p)
    if method == "none" or m == 0:
        return p.tolist()
    if method == "bonferroni":
        return np.minimum(1.0, p * m).tolist()
    if method != "holm":
        raise ValueError(f"unknown correction {method!r}; expected one of {CORRECTIONS}")
    order = np.argsort(p, kind="mergesort")
    stepped = np.minimum(1.0, (m - np.arange(m)) * p[order])
    stepped = np.maximum.accumulate(stepped)
    out = np.empty(m)
    out[order] = stepped
    return out.tolist()


# -- ANOVA / Tukey ------------------------------------------------------------


def _anova_parts(data: list[tuple[str, np.ndarray]]):
    if len(data) < 2:
        raise StatsError("need at least two groups")
    if any(len(x) == 0 for _, x in data):
        raise StatsError("empty group")
    k = len(data)
    n_total = sum(len(x) for _, x in data)
    df_within = n_total - k
    if df_within < 1:
        raise StatsError("no within-group degrees of freedom")
    means = np.array([x.mean() for _, x in data])
    sizes = np.array([len(x) for _, x in data], dtype=float)
    grand = np.concatenate([x for _, x in data]).mean()
    ss_between = float(np.sum(sizes * (means - grand) ** 2))
    ss_within = float(sum(np.sum((x - x.mean()) ** 2) for _, x in data))
    return k, n_total, df_within, means, sizes, ss_between, ss_within


def one_way_anova(groups: Groups) -> OmnibusResult:
    """Classical one-way ANOVA, F = MSB / MSW on (k - 1, N - k) df."""
    data = _labelled(groups)
    k, n_total, df_within, _, _, ssb, ssw = _anova_parts(data)
    msb = ssb / (k - 1)
    msw = ssw / df_within
    if msw == 0.0:
        if msb == 0.0:
            raise StatsError("F undefined: all observations identical")
        return OmnibusResult("anova_F", float("inf"), (k - 1, df_within), n_total, 0.0)
    f = msb / msw
    return OmnibusResult("anova_F", f, (k - 1, df_within), n_total, _clip(f_sf(f, k - 1, df_within)))


def tukey_hsd(groups: Groups) -> list[PairwiseResult]:
    """Tukey-Kramer pairwise comparisons; estimate is ``mean_a - mean_b``."""
    data = _labelled(groups)
    k, _, df_within, means, sizes, ssb, ssw = _anova_parts(data)
    msw = ssw / df_within
    if msw == 0.0 and ssb == 0.0:
        raise StatsError("Tukey HSD undefined: all observations identical")
    out = []
    for i, j in itertools.combinations(range(k), 2):
        diff = float(means[i] - means[j])
        se = np.sqrt(msw / 2.0 * (1.0 / sizes[i] + 1.0 / sizes[j]))
        if diff == 0.0:
            q, p = 0.0, 1.0
        elif se == 0.0:
            q, p = float("inf"), 0.0
        else:
            q = abs(diff) / se
            p = _clip(studentized_range_sf(q, k, df_within))
        out.append(PairwiseResult(data[i][0], data[j][0], diff, p, "tukey", q, p))
    return out


# -- rank tests ---------------------------------------------------------------


def midranks(x: np.ndarray) -> tuple[np.ndarray, float]:
    """Average ranks (1-based) and the tie term sum(t^3 - t)."""
    _, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    mid = ends - (counts - 1) / 2.0
    ties = float(np.sum(counts.astype(float) ** 3 - counts))
    return mid[inverse.ravel()], ties


def kruskal_wallis(groups: Groups) -> OmnibusResult:
    """Kruskal-Wallis H with tie correction, referred to chi-square(k - 1)."""
    data = _labelled(groups)
    k = len(data)
    if k < 2:
        raise StatsError("need at least two groups")
    if any(len(x) == 0 for _, x in data):
        raise StatsError("empty group")
    pooled = np.concatenate([x for _, x in data])
    n = len(pooled)
    if n < 3:
        raise StatsError("need at least three observations")
    ranks, ties = midranks(pooled)
    correction = 1.0 - ties / (n**3 - n)
    if correction <= 0.0:
        raise StatsError("H undefined: all observations tied")
    h = 0.0
    start = 0
    center = (n + 1) / 2.0
    for _, x in data:
        r = ranks[start : start + len(x)]
        h += len(x) * (r.mean() - center) ** 2
        start += len(x)
    h = float(12.0 / (n * (n + 1)) * h / correction)
    return OmnibusResult("kruskal_H", h, (k - 1, None), n, _clip(chi2_sf(h, k - 1)))


def _rank_sum_counts(n_a: int, n: int) -> np.ndarray:
    """counts[s] = number of size-n_a subsets of {1..n} with rank sum s."""
    max_sum = n * (n + 1) // 2
    table = np.zeros((n_a + 1, max_sum + 1))
    table[0, 0] = 1.0
    for r in range(1, n + 1):
        for size in range(min(r, n_a), 0, -1):
            table[size, r:] += table[size - 1, : max_sum + 1 - r]
    return table[n_a]


def rank_sum_test(a: Sequence[float], b: Sequence[float], method: str = "auto") -> tuple[float, float, str]:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) test.

    Returns ``(U_a, p, mode)``.  With ``method="auto"`` the exact null
    distribution is used when ``len(a) + len(b) <= 12`` without ties, else the
    normal approximation with continuity correction and tie-corrected
    variance.  ``"exact"`` (tie-free data only) and ``"normal"`` force a mode.
    """
    if method not in ("auto", "exact", "normal"):
        raise ValueError("method must be auto, exact or normal")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n_a, n_b = len(a), len(b)
    if n_a == 0 or n_b == 0:
        raise StatsError("empty group")
    n = n_a + n_b
    ranks, ties = midranks(np.concatenate([a, b]))
    u = float(ranks[:n_a].sum() - n_a * (n_a + 1) / 2.0)
    if method == "exact" and ties:
        raise StatsError("exact rank-sum distribution requires tie-free data")
    if method == "exact" or (method == "auto" and n <= EXACT_MAX_N and ties == 0.0):
        counts = _rank_sum_counts(n_a, n)
        offset = n_a * (n_a + 1) // 2
        dist = counts[offset : offset + n_a * n_b + 1]
        dist = dist / dist.sum()
        ui = int(round(u))
        lower = dist[: ui + 1].sum()
        upper = dist[ui:].sum()
        return u, _clip(2.0 * min(lower, upper)), "exact"
    mu = n_a * n_b / 2.0
    var = n_a * n_b / 12.0 * ((n + 1) - ties / (n * (n - 1)))
    if var <= 0.0:
        return u, 1.0, "normal"
    z = (abs(u - mu) - 0.5) / np.sqrt(var)
    return u, _clip(2.0 * normal_sf(z)), "normal"


def pairwise_wilcoxon(groups: Groups, correction: str = "holm") -> list[PairwiseResult]:
    """Rank-sum test for every pair; estimate is ``median_a - median_b``."""
    data = _labelled(groups)
    raw = []
    for (la, xa), (lb, xb) in itertools.combinations(data, 2):
        u, p, _ = rank_sum_test(xa, xb)
        raw.append((la, lb, float(np.median(xa) - np.median(xb)), u, p))
    adjusted = adjust_pvalues([r[4] for r in raw], correction)
    return [
        PairwiseResult(la, lb, est, padj, f"wilcoxon_{correction}", u, p)
        for (la, lb, est, u, p), padj in zip(raw, adjusted)
    ]


# -- proportions --------------------------------------------------------------


def _prop_chisq(successes: np.ndarray, totals: np.ndarray) -> float:
    """Pearson chi-square on the k x 2 table; Yates-corrected when k == 2."""
    observed = np.column_stack([successes, totals - successes])
    col = observed.sum(axis=0)
    if np.any(col == 0):
        return 0.0
    expected = np.outer(totals, col) / totals.sum()
    dev = np.abs(observed - expected)
    if len(totals) == 2:
        dev = dev - np.minimum(0.5, dev)
    return float(np.sum(dev**2 / expected))


def _check_counts(successes, totals) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(successes, dtype=float)
    t = np.asarray(totals, dtype=float)
    if s.shape != t.shape or s.ndim != 1:
        raise StatsError("successes and totals must be equal-length vectors")
    if len(t) < 2:
        raise StatsError("need at least two groups")
    if np.any(t <= 0):
        raise StatsError("every group total must be positive")
    if np.any(s < 0) or np.any(s > t):
        raise StatsError("successes must lie in [0, total]")
    return s, t


def chisq_proportions(successes: Sequence[int], totals: Sequence[int]) -> OmnibusResult:
    """k-sample test of equal proportions (chi-square on k - 1 df)."""
    s, t = _check_counts(successes, totals)
    stat = _prop_chisq(s, t)
    df = len(t) - 1
    return OmnibusResult("chisq", stat, (df, None), int(t.sum()), _clip(chi2_sf(stat, df)))


def pairwise_proportions(
    successes: Sequence[int],
    totals: Sequence[int],
    correction: str = "holm",
    labels: Optional[Sequence[str]] = None,
) -> list[PairwiseResult]:
    """Continuity-corrected 2 x 2 chi-square for every pair of groups."""
    s, t = _check_counts(successes, totals)
    labels = [str(i) for i in range(len(t))] if labels is None else list(labels)
    raw = []
    for i, j in itertools.combinations(range(len(t)), 2):
        stat = _prop_chisq(s[[i, j]], t[[i, j]])
        raw.append((labels[i], labels[j], s[i] / t[i] - s[j] / t[j], stat, chi2_sf(stat, 1)))
    adjusted = adjust_pvalues([r[4] for r in raw], correction)
    return [
        PairwiseResult(la, lb, float(est), _clip(padj), f"prop_{correction}", stat, _clip(p))
        for (la, lb, est, stat, p), padj in zip(raw, adjusted)
    ]
