"""Legitimate KLJN protocol: random switching, resistance inference, discard rule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEstimateError
from .physics import BitState, SystemParams, bep_seed, simulate_bep

_STATES = (BitState.LL, BitState.LH, BitState.HL, BitState.HH)


@dataclass(frozen=True)
class BitPeriod:
    state: BitState
    trace: object
    retained: bool


@dataclass(frozen=True, eq=False)
class ExchangeRun:
    """All bit exchange periods of one run, in order."""

    beps: tuple
    params: SystemParams

    @property
    def retained(self):
        return [b for b in self.beps if b.retained]

    @property
    def key_bits(self):
        """Alice's key bits over retained periods (1 when Alice has R_H)."""
        return [int(b.state is BitState.HL) for b in self.retained]


def draw_bit_states(seed, n):
    """First ``n`` bit states of the switching stream rooted at ``seed``."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    return [_STATES[k] for k in rng.integers(0, 4, size=n)]


def draw_bit_state(seed, index):
    """Bit state number ``index`` of the switching stream rooted at ``seed``."""
    return draw_bit_states(seed, index + 1)[index]


def snap_resistance(estimate, params):
    """Nearest public resistance, measured in log space.

    Nonpositive estimates snap to ``r_low``.
    """
    if not estimate > 0:
        return params.r_low
    split = math.sqrt(params.r_low * params.r_high)
    return params.r_low if estimate < split else params.r_high


def infer_peer_resistance(trace, own_r, params, mode="voltage"):
    """Estimate the other party's resistance from one bit period.

    The sample variance (mean removed) divided by the bandwidth serves as
    the noise spectral density, and the voltage or current spectrum
    formula is solved for the unknown resistance.

    Returns the raw estimate in ohms; use :func:`snap_resistance` to
    decide between ``r_low`` and ``r_high``.
    """
    c = params.noise_psd_scale
    if mode == "current":
        var_i = float(np.var(trace.i))
        if var_i <= 0:
            raise DegenerateEstimateError("zero current variance")
        return c / var_i - own_r
    if mode == "voltage":
        var_u = float(np.var(trace.u))
        denom = c * own_r - var_u
        if denom <= 0 or var_u <= 0:
            raise DegenerateEstimateError(
                "voltage noise estimate is outside the physical range for own_r"
            )
        return var_u * own_r / denom
    raise ValueError(f"mode must be 'voltage' or 'current', got {mode!r}")


def run_key_exchange(params, states=None):
    """Run ``params.key_length`` bit exchange periods.

    ``states`` forces the bit states instead of drawing them from
    ``params.master_seed``; noise is still seeded per period index.
    """
    if states is None:
        states = draw_bit_states(params.master_seed, params.key_length)
    elif len(states) != params.key_length:
        raise ValueError("len(states) must equal key_length")
    beps = []
    for index, state in enumerate(states):
        trace = simulate_bep(state, params, bep_seed(params.master_seed, index))
        beps.append(BitPeriod(state, trace, state.is_secure))
    return ExchangeRun(tuple(beps), params)
