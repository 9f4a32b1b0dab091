"""Closed-form prediction of Eve's per-bit success probability.

Per sample, the wire voltage exceeds the threshold with probability
``q = 0.5 [1 - erf((U_th - U_DCw) / (U_eff sqrt 2))]``.  Eve's per-bit
decision is a majority vote over ``N`` independent samples, so the bit is
guessed correctly with probability ``P(Binomial(N, q) > N/2)``, with ties
(undetermined bits) removed by renormalisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .physics import BitState, wire_ac_rms, wire_dc_voltage

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_ERF_SATURATION = 6.0  # 1 - erf(6) ~ 2e-17, below double resolution
_ERF_SPLIT = 2.5
_CF_DEPTH = 80


def _erf_series(ax):
    # 2/sqrt(pi) exp(-x^2) sum_n (2x^2)^n x / (2n+1)!!, positive terms only
    two_x2 = 2.0 * ax * ax
    term = ax.copy()
    total = ax.copy()
    n = 0
    while True:
        n += 1
        term = term * two_x2 / (2 * n + 1)
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return _TWO_OVER_SQRT_PI * np.exp(-ax * ax) * total


def _erfc_continued_fraction(ax):
    # exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), evaluated bottom-up
    t = ax.copy()
    for k in range(_CF_DEPTH, 0, -1):
        t = ax + (0.5 * k) / t
    return np.exp(-ax * ax) / (math.sqrt(math.pi) * t)


def erf(x):
    """Error function, accurate to a few ulp on the whole real line.

    A positive-term power series below ``|x| = 2.5``, a continued fraction
    for ``erfc`` above it, and saturation to +-1 beyond ``|x| = 6``.
    Accepts scalars or arrays.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    ax = np.minimum(np.abs(x), _ERF_SATURATION)
    out = np.empty_like(ax)
    small = ax < _ERF_SPLIT
    out[small] = _erf_series(ax[small])
    out[~small] = 1.0 - _erfc_continued_fraction(ax[~small])
    out = np.copysign(out, x)
    return float(out[0]) if scalar else out


def exceed_probability(u_th, u_dcw, u_eff):
    """Probability that one Gaussian wire-voltage sample exceeds ``u_th``."""
    if u_eff < 0:
        raise ValueError("u_eff must be nonnegative")
    if u_eff == 0:
        if u_dcw > u_th:
            return 1.0
        return 0.0 if u_dcw < u_th else 0.5
    return 0.5 * (1.0 - erf((u_th - u_dcw) / (u_eff * math.sqrt(2.0))))


def _binomial_pmf(n, q):
    if q <= 0.0:
        pmf = np.zeros(n + 1)
        pmf[0] = 1.0
        return pmf
    if q >= 1.0:
        pmf = np.zeros(n + 1)
        pmf[n] = 1.0
        return pmf
    lg = np.array([math.lgamma(k + 1) for k in range(n + 1)])
    k = np.arange(n + 1)
    # written so that k and n - k are computed identically when q = 1/2
    log_pmf = lg[n] - (lg + lg[::-1]) + (k * math.log(q) + (n - k) * math.log1p(-q))
    return np.exp(log_pmf)


def predict_bit_success(q, n):
    """Probability that a majority vote of ``n`` samples lands on the side ``q`` favours.

    Returns ``P(X > n/2) / (1 - P(X = n/2))`` for ``X ~ Binomial(n, q)``
    by exact summation of the probability mass function.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    pmf = _binomial_pmf(n, q)
    above = math.fsum(pmf[n // 2 + 1:])
    below = math.fsum(pmf[:(n + 1) // 2])
    if above + below == 0.0:
        return 0.5
    return above / (above + below)


@dataclass(frozen=True)
class AnalyticPrediction:
    temp: float
    q_lh: float
    q_hl: float
    p_bit: float
    u_eff: float


def predict(params):
    """Analytic prediction at the temperature stored in ``params``.

    Assumes Eve knows the true threshold and polarity.
    """
    u_lh = wire_dc_voltage(BitState.LH, params)
    u_hl = wire_dc_voltage(BitState.HL, params)
    u_th = 0.5 * (u_lh + u_hl)
    # LH and HL share the same AC spectrum
    u_eff = wire_ac_rms(BitState.LH, params)
    q_lh = exceed_probability(u_th, u_lh, u_eff)
    q_hl = exceed_probability(u_th, u_hl, u_eff)
    n = params.samples_per_bit
    if params.u_dca >= params.u_dcb:
        p_lh, p_hl = predict_bit_success(q_lh, n), predict_bit_success(1.0 - q_hl, n)
    else:
        p_lh, p_hl = predict_bit_success(1.0 - q_lh, n), predict_bit_success(q_hl, n)
    return AnalyticPrediction(params.temp_eff, q_lh, q_hl, 0.5 * (p_lh + p_hl), u_eff)


def predict_curve(params, temps):
    """Analytic prediction for each temperature in ``temps``."""
    temps = list(temps)
    if not temps:
        raise ValueError("temps must be nonempty")
    return [predict(replace(params, temp_eff=float(t))) for t in temps]
