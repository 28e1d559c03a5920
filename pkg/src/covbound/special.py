"""Scalar and vectorized special functions for Gaussian/Student-t machinery.

Self-contained layer: everything here is built from `math`/`numpy`
primitives (no scipy).  The pieces are

* ``erfc`` / ``norm_pdf`` / ``norm_cdf`` -- Cody-style rational
  approximations for the complementary error function, accurate to a few
  ulps over the whole real line,
* ``gauss_interval_prob`` / ``symmetric_interval_prob`` -- probabilities of
  intervals under a (possibly degenerate) normal law,
* ``t_quantile`` -- two-sided Student-t quantile by safeguarded
  Newton/bisection inversion of the regularized incomplete beta function,
* ``residual_scale_density`` / ``residual_scale_interval`` -- density and
  essential support of W = sqrt(chi2_m / m), the scaled residual standard
  deviation of a Gaussian linear model with m error degrees of freedom.

Array arguments are accepted wherever the quadrature engine needs
vectorized evaluation; scalar input yields a Python float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "erfc",
    "norm_pdf",
    "norm_cdf",
    "norm_two_sided_quantile",
    "gauss_interval_prob",
    "symmetric_interval_prob",
    "t_quantile",
    "t_two_sided_tail",
    "residual_scale_density",
    "residual_scale_interval",
    "reg_inc_beta",
    "reg_lower_gamma",
]

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
INV_SQRT_PI = 1.0 / math.sqrt(math.pi)

_EPS = 1e-16
_FPMIN = 1e-300
_ITMAX = 20000


@dataclass(frozen=True)
class Tolerance:
    """Error budget: ``rel_err`` relative, ``abs_err`` absolute.

    Both must be strictly positive.  ``abs_err`` governs quadrature
    acceptance; ``rel_err`` governs root-finding / inversion loops.
    """

    rel_err: float = 1e-12
    abs_err: float = 1e-8

    def __post_init__(self) -> None:
        if not (self.rel_err > 0.0 and self.abs_err > 0.0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


# ----------------------------------------------------------------------
# complementary error function, Cody rational approximations
# ----------------------------------------------------------------------

# |x| <= 0.46875: erf(x) = x * P1(x^2)/Q1(x^2)
_ERF_A = (3.16112374387056560e0, 1.13864154151050156e2,
          3.77485237685302021e2, 3.20937758913846947e3,
          1.85777706184603153e-1)
_ERF_B = (2.36012909523441209e1, 2.44024637934444173e2,
          1.28261652607737228e3, 2.84423683343917062e3)
# 0.46875 < x <= 4: erfc(x) = exp(-x^2) * P2(x)/Q2(x)
_ERF_C = (5.64188496988670089e-1, 8.88314979438837594e0,
          6.61191906371416295e1, 2.98635138197400131e2,
          8.81952221241769090e2, 1.71204761263407058e3,
          2.05107837782607147e3, 1.23033935479799725e3,
          2.15311535474403846e-8)
_ERF_D = (1.57449261107098347e1, 1.17693950891312499e2,
          5.37181101862009858e2, 1.62138957456669019e3,
          3.29079923573345963e3, 4.36261909014324716e3,
          3.43936767414372164e3, 1.23033935480374942e3)
# x > 4: erfc(x) = exp(-x^2)/x * (1/sqrt(pi) - P3(1/x^2)/Q3(1/x^2)/x^2)
_ERF_P = (3.05326634961232344e-1, 3.60344899949804439e-1,
          1.25781726111229246e-1, 1.60837851487422766e-2,
          6.58749161529837803e-4, 1.63153871373020978e-2)
_ERF_Q = (2.56852019228982242e0, 1.87295284992346047e0,
          5.27905102951428412e-1, 6.05183413124413191e-2,
          2.33520497626869185e-3)


def _exp_nxx(y: np.ndarray) -> np.ndarray:
    # exp(-y*y) with the split exp(-ysq^2)*exp(-(y-ysq)(y+ysq)) to keep
    # relative accuracy for large arguments (ysq has an exact square).
    ysq = np.floor(y * 16.0) / 16.0
    return np.exp(-ysq * ysq) * np.exp(-(y - ysq) * (y + ysq))


def erfc(x):
    """Complementary error function, a few-ulp rational approximation."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    y = np.abs(x)
    out = np.empty_like(y)

    m1 = y <= 0.46875
    if m1.any():
        z = x[m1] * x[m1]
        num = _ERF_A[4] * z
        den = z
        for i in range(3):
            num = (num + _ERF_A[i]) * z
            den = (den + _ERF_B[i]) * z
        out[m1] = 1.0 - x[m1] * (num + _ERF_A[3]) / (den + _ERF_B[3])

    m2 = (y > 0.46875) & (y <= 4.0)
    if m2.any():
        yy = y[m2]
        num = _ERF_C[8] * yy
        den = yy
        for i in range(7):
            num = (num + _ERF_C[i]) * yy
            den = (den + _ERF_D[i]) * yy
        out[m2] = _exp_nxx(yy) * (num + _ERF_C[7]) / (den + _ERF_D[7])

    m3 = y > 4.0
    if m3.any():
        yy = y[m3]
        z = 1.0 / (yy * yy)
        num = _ERF_P[5] * z
        den = z
        for i in range(4):
            num = (num + _ERF_P[i]) * z
            den = (den + _ERF_Q[i]) * z
        r = z * (num + _ERF_P[4]) / (den + _ERF_Q[4])
        out[m3] = _exp_nxx(yy) * (INV_SQRT_PI - r) / yy

    neg = (x < 0.0) & ~m1
    out[neg] = 2.0 - out[neg]
    return float(out[0]) if scalar else out


def norm_pdf(x):
    """Standard normal density; underflows to 0.0 far in the tails."""
    x = np.asarray(x, dtype=float)
    val = INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return float(val) if val.ndim == 0 else val


def norm_cdf(x):
    """Standard normal distribution function via erfc(-x/sqrt(2))/2."""
    x = np.asarray(x, dtype=float)
    val = 0.5 * erfc(-x / SQRT2)
    return float(val) if np.ndim(val) == 0 else val


@lru_cache(maxsize=None)
def norm_two_sided_quantile(alpha: float) -> float:
    """z > 0 with P(-z <= Z <= z) = 1 - alpha for standard normal Z."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    target = 1.0 - 0.5 * alpha
    lo, hi = 0.0, 50.0
    z = 1.0
    for _ in range(200):
        f = norm_cdf(z) - target
        if f > 0.0:
            hi = z
        else:
            lo = z
        step = f / max(norm_pdf(z), _FPMIN)
        z_new = z - step
        if not lo < z_new < hi:
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) <= 1e-16 * max(1.0, abs(z)):
            z = z_new
            break
        z = z_new
    return z


# ----------------------------------------------------------------------
# normal interval probabilities
# ----------------------------------------------------------------------

def gauss_interval_prob(lo, hi, mean, var):
    """P(lo <= Z <= hi) for Z ~ N(mean, var), var >= 0.

    var = 0 is the point mass at ``mean``: the result is the indicator of
    lo <= mean <= hi.  Rejects lo > hi and var < 0.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    if np.any(lo > hi):
        raise ValueError("interval endpoints must satisfy lo <= hi")
    if np.any(var < 0.0):
        raise ValueError("variance must be nonnegative")
    scalar = max(lo.ndim, hi.ndim, mean.ndim, var.ndim) == 0
    safe = np.where(var > 0.0, var, 1.0)
    s = np.sqrt(safe)
    smooth = norm_cdf((hi - mean) / s) - norm_cdf((lo - mean) / s)
    point = ((lo <= mean) & (mean <= hi)).astype(float)
    val = np.where(var > 0.0, smooth, point)
    return float(val) if scalar else val


def symmetric_interval_prob(center, halfwidth):
    """Phi(center + halfwidth) - Phi(center - halfwidth).

    Equals P(center - halfwidth <= Z <= center + halfwidth) for
    halfwidth >= 0; even in ``center`` and odd in ``halfwidth``.
    """
    center = np.asarray(center, dtype=float)
    halfwidth = np.asarray(halfwidth, dtype=float)
    val = norm_cdf(center + halfwidth) - norm_cdf(center - halfwidth)
    return float(val) if np.ndim(val) == 0 else val


# ----------------------------------------------------------------------
# regularized incomplete beta, Student-t quantiles
# ----------------------------------------------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    # Lentz's continued fraction for the incomplete beta, NR-style.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _ITMAX + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < _EPS:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def _stirling_tail(z: float) -> float:
    # remainder S(z) in lnGamma(z) = (z-1/2)ln z - z + ln(2 pi)/2 + S(z)
    zz = z * z
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0
            - (1.0 / 1680.0 - 1.0 / (1188.0 * zz)) / zz) / zz) / zz) / z


def _lbeta(a: float, b: float) -> float:
    """ln B(a, b) without the catastrophic lgamma cancellation at large a."""
    if a < b:
        a, b = b, a
    if a < 20.0:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    # lnGamma(a+b) - lnGamma(a) by Stirling differences; exact in the
    # O(b ln a) leading terms, so no big-minus-big subtraction happens.
    ratio = ((a - 0.5) * math.log1p(b / a) + b * math.log(a + b) - b
             + _stirling_tail(a + b) - _stirling_tail(a))
    return math.lgamma(b) - ratio


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for scalar 0 <= x <= 1."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (-_lbeta(a, b) + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_two_sided_tail(t: float, df: int) -> float:
    """P(|T| > t) for T Student-t with df degrees of freedom, t >= 0.

    Equals I_x(df/2, 1/2) at x = df/(df + t^2), but parametrized by t so
    the logs of x and 1-x come from log1p rather than from a rounded x
    (for large df, x sits within a few ulps of 1).
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 1.0
    a = 0.5 * df
    b = 0.5
    tt = t * t
    x = df / (df + tt)
    y = tt / (df + tt)
    ln_bt = (-_lbeta(a, b) - a * math.log1p(tt / df)
             + b * (math.log(tt) - math.log(df + tt)))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, y) / b


def _t_pdf(t: float, df: int) -> float:
    ln = (math.lgamma(0.5 * (df + 1)) - math.lgamma(0.5 * df)
          - 0.5 * math.log(df * math.pi)
          - 0.5 * (df + 1) * math.log1p(t * t / df))
    return math.exp(ln)


@lru_cache(maxsize=None)
def t_quantile(df: int, alpha: float) -> float:
    """Two-sided Student-t quantile: t with P(|T| > t) = alpha.

    Safeguarded Newton on the monotone tail function, bisection fallback
    whenever a Newton step leaves the current bracket.  Relative accuracy
    a few ulps (the tail itself is computed to ~1e-15).
    """
    if df < 1 or df != int(df):
        raise ValueError("degrees of freedom must be a positive integer")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    df = int(df)
    z = norm_two_sided_quantile(alpha)
    if df >= 50000 and z <= 10.0:
        # Large-df expansion in powers of 1/df (Hill-style); its truncation
        # error at df >= 5e4 is far below the double-rounding noise that
        # the incomplete-beta route picks up from x = df/(df+t^2) ~ 1.
        z2 = z * z
        g1 = z * (z2 + 1.0) / 4.0
        g2 = z * (5.0 * z2 * z2 + 16.0 * z2 + 3.0) / 96.0
        g3 = z * (3.0 * z2 ** 3 + 19.0 * z2 * z2 + 17.0 * z2 - 15.0) / 384.0
        g4 = z * (79.0 * z2 ** 4 + 776.0 * z2 ** 3 + 1482.0 * z2 * z2
                  - 1920.0 * z2 - 945.0) / 92160.0
        nu = float(df)
        return z + g1 / nu + g2 / nu ** 2 + g3 / nu ** 3 + g4 / nu ** 4
    lo = 0.0
    hi = 2.0
    while t_two_sided_tail(hi, df) > alpha:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise RuntimeError("t quantile bracket expansion failed")
    t = min(max(z, lo), hi)
    for _ in range(200):
        f = t_two_sided_tail(t, df) - alpha
        if f > 0.0:
            lo = t
        else:
            hi = t
        dens = 2.0 * _t_pdf(t, df)
        t_new = t + f / dens if dens > _FPMIN else 0.5 * (lo + hi)
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-16 * max(1.0, abs(t)):
            t = t_new
            break
        t = t_new
    return t


# ----------------------------------------------------------------------
# regularized incomplete gamma, scaled-chi density and essential support
# ----------------------------------------------------------------------

def _gamma_pq(a: float, x: float) -> tuple[float, float]:
    # (P, Q) regularized lower/upper incomplete gamma; the side that is
    # numerically direct (series below the transition, Lentz continued
    # fraction above) is computed, the other is its complement.
    if x < 0.0 or a <= 0.0:
        raise ValueError("require x >= 0 and a > 0")
    if x == 0.0:
        return 0.0, 1.0
    if x < a + 1.0:
        ap = a
        total = 1.0 / a
        term = total
        for _ in range(_ITMAX):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        p = total * math.exp(-x + a * math.log(x) - math.lgamma(a))
        return p, 1.0 - p
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < _EPS:
            break
    q = math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    return 1.0 - q, q


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    return _gamma_pq(a, x)[0]


def residual_scale_density(w, df: int):
    """Density of W = sqrt(chi2_df / df) at w (0 for w <= 0).

    Evaluated in log space: 2 (df/2)^(df/2) w^(df-1) exp(-df w^2/2) / Gamma(df/2).
    """
    if df < 1 or df != int(df):
        raise ValueError("degrees of freedom must be a positive integer")
    df = int(df)
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    out = np.zeros_like(w)
    pos = w > 0.0
    if pos.any():
        ww = w[pos]
        half = 0.5 * df
        lg = (math.log(2.0) + half * math.log(half) - math.lgamma(half)
              + (df - 1) * np.log(ww) - half * ww * ww)
        out[pos] = np.exp(lg)
    return float(out[0]) if scalar else out


def _scale_cdf_tails(w: float, df: int) -> tuple[float, float]:
    # (P(W <= w), P(W > w))
    if w <= 0.0:
        return 0.0, 1.0
    return _gamma_pq(0.5 * df, 0.5 * df * w * w)


@lru_cache(maxsize=None)
def residual_scale_interval(df: int, eps: float = 1e-12) -> tuple[float, float]:
    """(w_lo, w_hi) leaving probability mass <= eps outside, eps/2 per tail."""
    if df < 1 or df != int(df):
        raise ValueError("degrees of freedom must be a positive integer")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    df = int(df)
    tail = 0.5 * eps

    def bisect(fn, target):
        # fn monotone increasing in w; solve fn(w) = target
        lo, hi = 0.0, 2.0
        while fn(hi) < target:
            hi *= 2.0
            if hi > 1e12:
                break
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if fn(mid) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, hi):
                break
        return 0.5 * (lo + hi)

    w_lo = bisect(lambda w: _scale_cdf_tails(w, df)[0], tail)
    w_hi = bisect(lambda w: 1.0 - _scale_cdf_tails(w, df)[1], 1.0 - tail)
    return w_lo, w_hi
