"""Extraction of APA-style test statistics and recomputation of their p-values.

Recognized forms (case-insensitive, flexible spacing, thousands separators):

    t(28) = 2.20, p = .04
    F(2, 5295) = 23.7, p < .001
    χ2(2, N = 5,305) = 10.4, p < 0.01     (also chi2, chi-square, X2, χ²)
    r(58) = .35, p = .006
    z = 2.51, p = .012

Each extracted claim is checked for consistency between the reported and the
recomputed p-value, allowing for rounding of the reported value, and flagged
as a decision error when the mismatch flips significance at ``alpha``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distributions import chi2_sf, f_sf, normal_sf, t_sf
from .model import ArticleRecord

KINDS = ("t", "F", "chi2", "r", "z")
COMPARATORS = ("=", "<", ">")

CONSISTENT = "consistent"
INCONSISTENCY = "inconsistency"
DECISION_ERROR = "decision_error"


class InvalidTestError(ValueError):
    """A reported test whose parameters admit no p-value."""


@dataclass(frozen=True)
class ReportedTest:
    kind: str
    value: float
    p_comparator: str
    p_reported: float
    df1: Optional[float] = None
    df2: Optional[float] = None
    n: Optional[int] = None
    p_decimals: int = 0
    source_span: tuple[int, int] = field(default=(0, 0), compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test kind {self.kind!r}")
        if self.p_comparator not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.p_comparator!r}")
        if not 0.0 <= self.p_reported <= 1.0:
            raise ValueError("reported p must lie in [0, 1]")
        if self.kind == "z":
            if self.df1 is not None or self.df2 is not None:
                raise ValueError("z tests take no degrees of freedom")
        elif self.df1 is None:
            raise ValueError(f"{self.kind} test needs df1")
        if (self.kind == "F") != (self.df2 is not None):
            raise ValueError("df2 is required for F tests and only for F tests")
        if self.n is not None and self.kind != "chi2":
            raise ValueError("N is only reported for chi-square tests")


@dataclass(frozen=True)
class ConsistencyVerdict:
    p_recomputed: float
    status: str

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT


# -- grammar ------------------------------------------------------------------

_NUM = r"(?:(?:\d{1,3}(?:,\d{3})+(?!\d)|\d+)(?:\.\d+)?|\.\d+)"
_SNUM = r"[-−–]?\s*" + _NUM
_LEAD = r"(?<![A-Za-z0-9_])"
_P_PART = r"\s*[,;]\s*p\s*(?P<cmp>[=<>])\s*(?P<p>" + _NUM + r")(?![\d.]*\d)"

_CHI = r"(?:chi[\s-]?(?:2|²|squared?)|χ\s*(?:2|²)|x\s*(?:2|²))"

_PATTERNS = {
    "t": _LEAD + r"t\s*\(\s*(?P<df1>" + _NUM + r")\s*\)\s*=\s*(?P<value>" + _SNUM + ")",
    "F": _LEAD
    + r"F\s*\(\s*(?P<df1>" + _NUM + r")\s*,\s*(?P<df2>" + _NUM + r")\s*\)\s*=\s*(?P<value>" + _NUM + ")",
    "chi2": _LEAD
    + _CHI
    + r"\s*\(\s*(?P<df1>" + _NUM + r")\s*(?:,\s*N\s*=\s*(?P<n>" + _NUM + r")\s*)?\)\s*=\s*(?P<value>" + _NUM + ")",
    "r": _LEAD + r"r\s*\(\s*(?P<df1>" + _NUM + r")\s*\)\s*=\s*(?P<value>" + _SNUM + ")",
    "z": _LEAD + r"z\s*=\s*(?P<value>" + _SNUM + ")",
}
_REGEXES = {k: re.compile(v + _P_PART, re.IGNORECASE) for k, v in _PATTERNS.items()}


def _num(s: str) -> float:
    s = re.sub(r"\s+", "", s).replace(",", "")
    return -float(s[1:]) if s[:1] in "-−–" else float(s)


def _decimals(s: str) -> int:
    return len(s.split(".", 1)[1]) if "." in s else 0


def extract_apa_statistics(text: str) -> list[ReportedTest]:
    """Return every APA-formatted test found in ``text``, in textual order.

    Fragments that do not fit the grammar, or carry p-values outside [0, 1],
    are skipped.
    """
    found = []
    for kind, rx in _REGEXES.items():
        for m in rx.finditer(text):
            g = m.groupdict()
            p = _num(g["p"])
            if p > 1.0:
                continue
            try:
                test = ReportedTest(
                    kind=kind,
                    value=_num(g["value"]),
                    p_comparator=g["cmp"],
                    p_reported=p,
                    df1=_num(g["df1"]) if g.get("df1") else None,
                    df2=_num(g["df2"]) if g.get("df2") else None,
                    n=int(_num(g["n"])) if g.get("n") else None,
                    p_decimals=_decimals(g["p"]),
                    source_span=(m.start(), m.end()),
                )
            except ValueError:
                continue
            found.append(test)
    found.sort(key=lambda t: t.source_span)
    return found


def _fmt(x: float) -> str:
    return np.format_float_positional(x, trim="-")


def render(test: ReportedTest) -> str:
    """Canonical APA rendering; ``extract_apa_statistics(render(t)) == [t]``."""
    p = f"p {test.p_comparator} {test.p_reported:.{test.p_decimals}f}"
    value = _fmt(test.value)
    if test.kind == "z":
        head = f"z = {value}"
    elif test.kind == "F":
        head = f"F({_fmt(test.df1)}, {_fmt(test.df2)}) = {value}"
    elif test.kind == "chi2":
        n = f", N = {test.n}" if test.n is not None else ""
        head = f"χ2({_fmt(test.df1)}{n}) = {value}"
    else:
        head = f"{test.kind}({_fmt(test.df1)}) = {value}"
    return f"{head}, {p}"


# -- recomputation ------------------------------------------------------------


def _require_df(*dfs) -> None:
    for df in dfs:
        if df is None or not df > 0:
            raise InvalidTestError(f"degrees of freedom must be > 0, got {df!r}")


def r_to_t(r: float, df: float) -> float:
    return r * math.sqrt(df / (1.0 - r * r))


def recompute_p(test: ReportedTest, tails: str = "two") -> float:
    """P-value implied by the reported statistic and degrees of freedom.

    ``tails`` applies to t, r and z; F and chi-square use the upper tail.
    """
    if tails not in ("two", "one"):
        raise ValueError("tails must be 'two' or 'one'")
    factor = 2.0 if tails == "two" else 1.0
    v = test.value
    if test.kind == "t":
        _require_df(test.df1)
        p = factor * t_sf(abs(v), test.df1)
    elif test.kind == "r":
        _require_df(test.df1)
        if abs(v) >= 1.0:
            raise InvalidTestError(f"correlation must satisfy |r| < 1, got {v}")
        p = factor * t_sf(abs(r_to_t(v, test.df1)), test.df1)
    elif test.kind == "z":
        p = factor * normal_sf(abs(v))
    elif test.kind == "F":
        _require_df(test.df1, test.df2)
        p = f_sf(v, test.df1, test.df2)
    else:
        _require_df(test.df1)
        p = chi2_sf(v, test.df1)
    return min(max(p, 0.0), 1.0)


def rounding_window(test: ReportedTest) -> tuple[float, float]:
    """Half-open interval of true p-values that round to the reported ``p = q``."""
    half = 0.5 * 10.0 ** (-test.p_decimals)
    return test.p_reported - half, test.p_reported + half


def claims_significance(test: ReportedTest, alpha: float = 0.05) -> bool:
    q = test.p_reported
    if test.p_comparator == "<":
        return q <= alpha
    if test.p_comparator == "=":
        return q < alpha
    return False


def is_consistent(test: ReportedTest, p_recomputed: float) -> bool:
    q = test.p_reported
    if test.p_comparator == "=":
        lo, hi = rounding_window(test)
        return lo <= p_recomputed < hi
    if test.p_comparator == "<":
        if q == 0.0:
            # "p < .00" can only mean the value rounded to zero
            return p_recomputed < rounding_window(test)[1]
        return p_recomputed < q
    return p_recomputed > q


def classify_consistency(
    test: ReportedTest, alpha: float = 0.05, tails: str = "two"
) -> ConsistencyVerdict:
    p = recompute_p(test, tails)
    if is_consistent(test, p):
        status = CONSISTENT
    elif claims_significance(test, alpha) != (p < alpha):
        status = DECISION_ERROR
    else:
        status = INCONSISTENCY
    return ConsistencyVerdict(p, status)


@dataclass(frozen=True)
class CheckedTest:
    test: ReportedTest
    verdict: Optional[ConsistencyVerdict]
    error: Optional[str] = None


def check_text(text: str, alpha: float = 0.05, tails: str = "two") -> list[CheckedTest]:
    """Extract and classify every test in ``text``.

    Tests that cannot be recomputed keep ``verdict=None`` and an error message.
    """
    out = []
    for test in extract_apa_statistics(text):
        try:
            out.append(CheckedTest(test, classify_consistency(test, alpha, tails)))
        except InvalidTestError as exc:
            out.append(CheckedTest(test, None, str(exc)))
    return out


def article_decision_error(
    record: ArticleRecord | str, alpha: float = 0.05, tails: str = "two"
) -> tuple[bool, bool]:
    """``(has_any_test, has_decision_error)`` over an article's full text."""
    text = record if isinstance(record, str) else record.full_text
    checked = check_text(text, alpha, tails)
    has_error = any(c.verdict is not None and c.verdict.status == DECISION_ERROR for c in checked)
    return bool(checked), has_error


def checked_to_dict(c: CheckedTest) -> dict:
    t = c.test
    return {
        "kind": t.kind,
        "df1": t.df1,
        "df2": t.df2,
        "n": t.n,
        "value": t.value,
        "p_comparator": t.p_comparator,
        "p_reported": t.p_reported,
        "span": list(t.source_span),
        "p_recomputed": c.verdict.p_recomputed if c.verdict else None,
        "status": c.verdict.status if c.verdict else None,
        "error": c.error,
    }
