"""Probability distributions used for p-value recomputation and post-hoc tests.

The t, F and chi-square distributions are evaluated through the regularized
incomplete beta and gamma functions, each computed with a continued fraction
(modified Lentz).  Survival functions are evaluated directly rather than as
``1 - cdf`` so that small tail probabilities keep full relative precision.

The studentized range CDF is a double integral evaluated with composite
Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

__all__ = [
    "DistributionError",
    "betainc",
    "gammainc",
    "normal_cdf",
    "normal_sf",
    "t_cdf",
    "t_sf",
    "f_cdf",
    "f_sf",
    "chi2_cdf",
    "chi2_sf",
    "studentized_range_cdf",
    "studentized_range_sf",
    "distribution_cdf",
    "distribution_sf",
]

_EPS = 1e-16
_TINY = 1e-300
_MAXIT = 100_000


class DistributionError(ValueError):
    """Raised for parameters outside a distribution's domain."""


def _check_df(*dfs: float) -> None:
    for df in dfs:
        if not (df > 0) or math.isnan(df):
            raise DistributionError(f"degrees of freedom must be > 0, got {df!r}")


# -- incomplete beta ---------------------------------------------------------

_STIRLING_MIN = 8.0
_TWO_PI = 2.0 * math.pi


def _stirling_corr(z: float) -> float:
    """lgamma(z) minus its Stirling approximation, for z >= 8."""
    z2 = 1.0 / (z * z)
    return (1.0 / 12.0 - z2 * (1.0 / 360.0 - z2 * (1.0 / 1260.0 - z2 * (1.0 / 1680.0 - z2 / 1188.0)))) / z


def _log1p_or_log(d: float, ratio: float = None) -> float:
    """log(1 + d); near d = -1 use the undifferenced ratio when supplied."""
    if d > -0.5:
        return math.log1p(d)
    return math.log(ratio if ratio is not None else 1.0 + d)


def _log_beta_front(a: float, b: float, x: float, y: float) -> float:
    """log(x^a y^b / B(a, b)) without cancelling large lgamma terms."""
    lx = math.log1p(-y) if x > 0.5 else math.log(x)
    ly = math.log1p(-x) if y > 0.5 else math.log(y)
    if a >= _STIRLING_MIN and b >= _STIRLING_MIN:
        s = a + b
        return (
            a * _log1p_or_log((a * -y + b * x) / a, x * s / a)
            + b * _log1p_or_log((b * -x + a * y) / b, y * s / b)
            + 0.5 * math.log(a * b / (s * _TWO_PI))
            - (_stirling_corr(a) + _stirling_corr(b) - _stirling_corr(s))
        )
    big, small = (a, b) if a >= b else (b, a)
    if big >= _STIRLING_MIN:
        # lgamma(big) - lgamma(big + small), expanded
        diff = (
            -(big - 0.5) * math.log1p(small / big)
            - small * math.log(big + small)
            + small
            + _stirling_corr(big)
            - _stirling_corr(big + small)
        )
        return a * lx + b * ly - math.lgamma(small) - diff
    return a * lx + b * ly - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), convergent for x < (a+1)/(a+b+2)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise DistributionError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def _ibeta_pair(a: float, b: float, x: float, y: float) -> tuple[float, float]:
    """Return ``(I_x(a, b), I_y(b, a))`` where ``y = 1 - x`` is passed exactly."""
    if x <= 0.0:
        return 0.0, 1.0
    if y <= 0.0:
        return 1.0, 0.0
    front = math.exp(_log_beta_front(a, b, x, y))
    switch = (a + 1.0) / (a + b + 2.0)
    lower_first = x < switch
    s = a + b
    spread = math.sqrt(a * b / (s * s * (s + 1.0)))
    if min(a, b) <= 50.0 and max(a, b) > 4.0 * min(a, b) and abs(x - switch) < spread:
        # Both fractions converge here; the one led by the smaller
        # parameter is far better conditioned, unless it would leave the
        # other tail to be found by a lossy subtraction.
        lower_first = a < b
    if lower_first:
        lower = front * _beta_cf(a, b, x) / a
        if lower <= 0.999 or x < switch:
            return lower, 1.0 - lower
        upper = front * _beta_cf(b, a, y) / b
        return 1.0 - upper, upper
    upper = front * _beta_cf(b, a, y) / b
    if upper <= 0.999 or x >= switch:
        return 1.0 - upper, upper
    lower = front * _beta_cf(a, b, x) / a
    return lower, 1.0 - lower


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise DistributionError("betainc requires a > 0 and b > 0")
    if not 0.0 <= x <= 1.0:
        raise DistributionError("betainc requires 0 <= x <= 1")
    return _ibeta_pair(a, b, x, 1.0 - x)[0]


# -- incomplete gamma --------------------------------------------------------


def _gamma_pair(a: float, x: float) -> tuple[float, float]:
    """Return ``(P(a, x), Q(a, x))``, the regularized lower/upper incomplete gamma."""
    if x <= 0.0:
        return 0.0, 1.0
    if a >= _STIRLING_MIN:
        d = (x - a) / a
        log_front = a * (_log1p_or_log(d, x / a) - d) + 0.5 * math.log(a / _TWO_PI) - _stirling_corr(a)
    else:
        log_front = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        ap = a
        total = term = 1.0 / a
        for _ in range(_MAXIT):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                lower = total * math.exp(log_front)
                return lower, 1.0 - lower
        raise DistributionError(f"incomplete gamma series did not converge (a={a}, x={x})")
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            upper = math.exp(log_front) * h
            return 1.0 - upper, upper
    raise DistributionError(f"incomplete gamma fraction did not converge (a={a}, x={x})")


def gammainc(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x)."""
    if a <= 0:
        raise DistributionError("gammainc requires a > 0")
    if x < 0:
        raise DistributionError("gammainc requires x >= 0")
    return _gamma_pair(a, x)[0]


# -- continuous distributions ------------------------------------------------


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _t_tail(x: float, df: float) -> float:
    """P(T > |x|)."""
    x2 = x * x
    denom = df + x2
    return 0.5 * _ibeta_pair(df / 2.0, 0.5, df / denom, x2 / denom)[0]


def t_cdf(x: float, df: float) -> float:
    _check_df(df)
    if math.isinf(df):
        return normal_cdf(x)
    tail = _t_tail(x, df)
    return 1.0 - tail if x > 0 else tail


def t_sf(x: float, df: float) -> float:
    _check_df(df)
    if math.isinf(df):
        return normal_sf(x)
    tail = _t_tail(x, df)
    return tail if x > 0 else 1.0 - tail


def f_cdf(x: float, df1: float, df2: float) -> float:
    _check_df(df1, df2)
    if x <= 0:
        return 0.0
    denom = df1 * x + df2
    return _ibeta_pair(df1 / 2.0, df2 / 2.0, df1 * x / denom, df2 / denom)[0]


def f_sf(x: float, df1: float, df2: float) -> float:
    _check_df(df1, df2)
    if x <= 0:
        return 1.0
    denom = df1 * x + df2
    return _ibeta_pair(df1 / 2.0, df2 / 2.0, df1 * x / denom, df2 / denom)[1]


def chi2_cdf(x: float, df: float) -> float:
    _check_df(df)
    return _gamma_pair(df / 2.0, x / 2.0)[0] if x > 0 else 0.0


def chi2_sf(x: float, df: float) -> float:
    _check_df(df)
    return _gamma_pair(df / 2.0, x / 2.0)[1] if x > 0 else 1.0


# -- studentized range -------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _composite_gl(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


# Inner integral runs over the location of the smallest of k standard normals.
_Z_NODES, _Z_WEIGHTS = _composite_gl(-9.0, 9.0, 24)
_Z_PDF = np.exp(-0.5 * _Z_NODES**2) / math.sqrt(2.0 * math.pi)
_Z_CDF = ndtr(_Z_NODES)


def _normal_range_cdf(w: np.ndarray, k: int) -> np.ndarray:
    """P(range of k iid standard normals <= w), vectorized over w."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    # P(R <= w) = k * int phi(z) [Phi(z + w) - Phi(z)]^(k-1) dz
    inner = ndtr(_Z_NODES[None, :] + w[:, None]) - _Z_CDF[None, :]
    np.clip(inner, 0.0, 1.0, out=inner)
    vals = k * (inner ** (k - 1)) @ (_Z_PDF * _Z_WEIGHTS)
    return np.clip(vals, 0.0, 1.0)


def studentized_range_cdf(q: float, k: int, df: float) -> float:
    """CDF of the studentized range for ``k`` means and ``df`` error df.

    The scale factor s = sqrt(chi2_df / df) is integrated out on a log scale,
    where its density is unimodal at 0 with width about 1/sqrt(2 df).
    """
    if k < 2 or int(k) != k:
        raise DistributionError(f"studentized range needs integer k >= 2, got {k!r}")
    _check_df(df)
    if q <= 0:
        return 0.0
    k = int(k)
    if math.isinf(df):
        return float(_normal_range_cdf(np.array([q]), k)[0])

    sd = 1.0 / math.sqrt(2.0 * df)
    lo = -max(10.0 * sd, 40.0 / df)
    hi = max(10.0 * sd, 0.5 * math.log1p(90.0 / df) + 0.3)
    t, wt = _composite_gl(lo, hi, 40)
    log_dens = df * t - 0.5 * df * np.exp(2.0 * t)
    dens = np.exp(log_dens - log_dens.max()) * wt
    ranges = _normal_range_cdf(q * np.exp(t), k)
    value = float(dens @ ranges / dens.sum())
    return min(max(value, 0.0), 1.0)


def studentized_range_sf(q: float, k: int, df: float) -> float:
    return 1.0 - studentized_range_cdf(q, k, df)


# -- dispatch ----------------------------------------------------------------


def _unpack(kind: str, params) -> tuple:
    if isinstance(params, dict):
        order = {
            "t": ("df",),
            "chi2": ("df",),
            "F": ("df1", "df2"),
            "normal": (),
            "studentized_range": ("k", "df"),
        }[kind]
        return tuple(params[name] for name in order)
    if params is None:
        return ()
    if isinstance(params, (int, float)):
        return (params,)
    return tuple(params)


_CDFS = {
    "t": t_cdf,
    "F": f_cdf,
    "chi2": chi2_cdf,
    "normal": normal_cdf,
    "studentized_range": studentized_range_cdf,
}
_SFS = {
    "t": t_sf,
    "F": f_sf,
    "chi2": chi2_sf,
    "normal": normal_sf,
    "studentized_range": studentized_range_sf,
}


def distribution_cdf(kind: str, params, x: float) -> float:
    """Evaluate the CDF of ``kind`` at ``x``.

    ``params`` is a dict (``{"df": 10}``, ``{"df1": 2, "df2": 6}``,
    ``{"k": 3, "df": 20}``), a tuple in that order, or ``None`` for the
    normal distribution.
    """
    if kind not in _CDFS:
        raise DistributionError(f"unknown distribution {kind!r}")
    try:
        args = _unpack(kind, params)
    except (KeyError, TypeError) as exc:
        raise DistributionError(f"bad parameters for {kind}: {params!r}") from exc
    return _CDFS[kind](x, *args)


def distribution_sf(kind: str, params, x: float) -> float:
    """Upper-tail probability 1 - CDF, computed without cancellation where possible."""
    if kind not in _SFS:
        raise DistributionError(f"unknown distribution {kind!r}")
    try:
        args = _unpack(kind, params)
    except (KeyError, TypeError) as exc:
        raise DistributionError(f"bad parameters for {kind}: {params!r}") from exc
    return _SFS[kind](x, *args)
