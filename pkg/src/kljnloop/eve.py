"""The generalized DC loop current attack.

Eve is passive and knows everything public: ``R_L``, ``R_H``, ``T``,
``Δf`` and the bit period boundaries.  She does not know the parasitic
DC sources.  The attack runs in three stages:

1. find LL periods from the AC statistics of voltage and current;
2. estimate ``U_DCA`` and ``U_DCB`` by time-averaging over those periods
   and set the threshold halfway between them;
3. in each retained period, count the voltage samples above the
   threshold and take a majority decision whose sense depends on which
   DC source is larger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError
from .exchange import snap_resistance
from .physics import BitState

A_GREATER = "A_greater"
B_GREATER = "B_greater"
UNDETERMINED = "undetermined"

MIN_CLASSIFY_SAMPLES = 100
# relative slack on the discriminant, absorbs rounding on exact moments only
_DISC_RTOL = 1e-9


@dataclass(frozen=True)
class DcEstimates:
    """Eve's DC source estimates.

    ``e_a`` and ``e_b`` are the realized errors against the true sources.
    They are diagnostics for the test harness; the attack never reads them.
    """

    u_dca_hat: float
    u_dcb_hat: float
    e_a: float
    e_b: float
    n_avg: int


@dataclass(frozen=True)
class AttackOutcome:
    g: float
    guess: object  # BitState.LH, BitState.HL or UNDETERMINED
    correct: bool | None = None


@dataclass(frozen=True)
class GuessStats:
    n_cor: int
    n_tot: int
    n_undetermined: int
    p: float
    outcomes: tuple = ()
    estimates: DcEstimates | None = field(default=None, compare=False)


def ac_resistance_roots(var_u, var_i, params):
    """Solve the voltage/current spectra for the two connected resistances.

    The current variance gives ``R_A + R_B`` and the ratio of the two
    variances gives ``R_A R_B``; the resistances are the roots of the
    resulting quadratic.  Returns ``None`` when the discriminant is
    negative beyond rounding.
    """
    if var_i <= 0:
        return None
    total = params.noise_psd_scale / var_i
    product = var_u / var_i
    disc = total * total - 4.0 * product
    if disc < -_DISC_RTOL * total * total:
        return None
    root = math.sqrt(max(disc, 0.0))
    return (total - root) / 2.0, (total + root) / 2.0


def classify_state_from_ac(trace, params):
    """Label a bit period ``"LL"``, ``"HH"`` or ``"mixed"`` from its noise."""
    if len(trace) < MIN_CLASSIFY_SAMPLES:
        raise InsufficientDataError(
            f"need at least {MIN_CLASSIFY_SAMPLES} samples to classify, got {len(trace)}"
        )
    roots = ac_resistance_roots(float(np.var(trace.u)), float(np.var(trace.i)), params)
    if roots is None:
        return "mixed"
    lo, hi = (snap_resistance(r, params) for r in roots)
    if lo == hi == params.r_low:
        return "LL"
    if lo == hi == params.r_high:
        return "HH"
    return "mixed"


def estimate_dc_sources(traces, params, resistance=None):
    """Estimate both DC sources from periods with equal, known resistors.

    ``U_DCB = <U> - R_B <I>`` and ``U_DCA = <U> + R_A <I>``, with the time
    averages taken over all samples of all given traces.  ``resistance``
    is the common value of ``R_A = R_B``; it defaults to ``r_low`` (LL
    periods), which give the smaller estimation error.
    """
    traces = list(traces)
    if not traces:
        raise InsufficientDataError("no traces to average")
    r = params.r_low if resistance is None else resistance
    u = np.concatenate([t.u for t in traces])
    i = np.concatenate([t.i for t in traces])
    if u.size == 0:
        raise InsufficientDataError("no samples to average")
    u_mean = float(np.mean(u))
    i_mean = float(np.mean(i))
    u_dca_hat = u_mean + r * i_mean
    u_dcb_hat = u_mean - r * i_mean
    return DcEstimates(
        u_dca_hat=u_dca_hat,
        u_dcb_hat=u_dcb_hat,
        e_a=u_dca_hat - params.u_dca,
        e_b=u_dcb_hat - params.u_dcb,
        n_avg=int(u.size),
    )


def threshold_voltage(est):
    return 0.5 * (est.u_dca_hat + est.u_dcb_hat)


def threshold_current(est, params):
    """Midpoint of the LH and HL DC currents implied by ``est`` (they coincide)."""
    return (est.u_dca_hat - est.u_dcb_hat) / (params.r_low + params.r_high)


def polarity(est):
    return A_GREATER if est.u_dca_hat >= est.u_dcb_hat else B_GREATER


def _guess(samples, threshold, polarity):
    n = samples.size
    if n == 0:
        raise InsufficientDataError("empty trace")
    n_plus = int(np.count_nonzero(samples > threshold))
    g = n_plus / n
    if 2 * n_plus == n:
        return AttackOutcome(g, UNDETERMINED)
    above = 2 * n_plus > n
    if polarity == A_GREATER:
        guess = BitState.LH if above else BitState.HL
    elif polarity == B_GREATER:
        guess = BitState.HL if above else BitState.LH
    else:
        raise ValueError(f"unknown polarity {polarity!r}")
    return AttackOutcome(g, guess)


def guess_bit(trace, u_th, polarity):
    """Majority decision on the fraction ``g`` of voltage samples strictly above ``u_th``.

    With ``U_DCA > U_DCB`` the LH state puts the wire above the threshold,
    so ``g > 0.5`` means LH; the sense flips for ``U_DCA < U_DCB``.
    ``g == 0.5`` leaves the bit undetermined.
    """
    return _guess(np.asarray(trace.u), u_th, polarity)


def guess_bit_current(trace, i_th, polarity):
    """Same decision rule applied to current samples against ``i_th``."""
    return _guess(np.asarray(trace.i), i_th, polarity)


def calibrate(run):
    """Pool all periods Eve classifies as LL and estimate the DC sources."""
    ll = [b.trace for b in run.beps if classify_state_from_ac(b.trace, run.params) == "LL"]
    if not ll:
        raise InsufficientDataError("no LL period found; Eve cannot calibrate")
    return estimate_dc_sources(ll, run.params)


def tally(outcomes, truths):
    """Score outcomes against ground truth; undetermined bits are not counted."""
    scored = []
    n_cor = n_tot = n_und = 0
    for outcome, truth in zip(outcomes, truths):
        if outcome.guess == UNDETERMINED:
            n_und += 1
            scored.append(outcome)
            continue
        correct = outcome.guess is truth
        n_tot += 1
        n_cor += correct
        scored.append(AttackOutcome(outcome.g, outcome.guess, correct))
    if n_tot == 0:
        raise InsufficientDataError("every guess was undetermined")
    return n_cor, n_tot, n_und, tuple(scored)


def run_attack(run, channel="voltage"):
    """Attack every retained bit of ``run`` and report Eve's success rate.

    ``channel="current"`` runs the current-threshold variant, which has
    nothing to work with because the DC loop current is the same in LH
    and HL.
    """
    retained = run.retained
    if not retained:
        raise InsufficientDataError("run has no retained bit periods")
    est = calibrate(run)
    pol = polarity(est)
    if channel == "voltage":
        u_th = threshold_voltage(est)
        outcomes = [guess_bit(b.trace, u_th, pol) for b in retained]
    elif channel == "current":
        i_th = threshold_current(est, run.params)
        outcomes = [guess_bit_current(b.trace, i_th, pol) for b in retained]
    else:
        raise ValueError(f"channel must be 'voltage' or 'current', got {channel!r}")
    n_cor, n_tot, n_und, scored = tally(outcomes, [b.state for b in retained])
    return GuessStats(n_cor, n_tot, n_und, n_cor / n_tot, scored, est)
