"""Two-generator loop model of a KLJN wire with parasitic DC sources.

Alice drives the wire through ``R_A`` in series with her noise generator
``U_An(t)`` and a parasitic DC source ``U_DCA``; Bob likewise through
``R_B``, ``U_Bn(t)`` and ``U_DCB``.  The wire current is taken positive
from Alice to Bob.  Everything here is a pure function of its inputs, the
random seed included.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

BOLTZMANN = 1.380649e-23  # J/K, exact SI value

_BLOCK_SIDES = (None, "alice", "bob", "both")


@dataclass(frozen=True)
class SystemParams:
    """Physical configuration of one key exchange.

    Parameters
    ----------
    r_low, r_high : float
        The two public resistor values in ohms, ``r_high > r_low > 0``.
    temp_eff : float
        Effective noise temperature in kelvin.
    bandwidth : float
        Noise bandwidth in hertz.
    u_dca, u_dcb : float
        Parasitic DC voltages at Alice's and Bob's ends (any sign).
    samples_per_bit : int
        Voltage/current samples recorded per bit exchange period.
    key_length : int
        Number of bit exchange periods in one run.
    master_seed : int
        Root seed from which every random stream is derived.
    dc_block : {None, "alice", "bob", "both"}
        Side(s) at which an ideal series capacitor removes the DC loop
        current.  ``None`` means the wire is DC-coupled.
    """

    r_low: float = 1e3
    r_high: float = 1e4
    temp_eff: float = 1e12
    bandwidth: float = 1e6
    u_dca: float = 0.0
    u_dcb: float = 0.0
    samples_per_bit: int = 500
    key_length: int = 700
    master_seed: int = 0
    dc_block: str | None = None

    def __post_init__(self):
        if not self.r_low > 0:
            raise InvalidParameterError(f"r_low must be positive, got {self.r_low}")
        if not self.r_high > self.r_low:
            raise InvalidParameterError(
                f"r_high must exceed r_low, got r_low={self.r_low}, r_high={self.r_high}"
            )
        if not self.temp_eff >= 0:
            raise InvalidParameterError(f"temp_eff must be >= 0, got {self.temp_eff}")
        if not self.bandwidth > 0:
            raise InvalidParameterError(f"bandwidth must be positive, got {self.bandwidth}")
        for name in ("u_dca", "u_dcb"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if int(self.samples_per_bit) != self.samples_per_bit or self.samples_per_bit < 1:
            raise InvalidParameterError("samples_per_bit must be an integer >= 1")
        if int(self.key_length) != self.key_length or self.key_length < 1:
            raise InvalidParameterError("key_length must be an integer >= 1")
        if self.dc_block not in _BLOCK_SIDES:
            raise InvalidParameterError(f"dc_block must be one of {_BLOCK_SIDES}")

    @property
    def noise_psd_scale(self):
        """``4kTΔf``: multiply by a resistance to get a noise variance."""
        return 4.0 * BOLTZMANN * self.temp_eff * self.bandwidth


class BitState(enum.Enum):
    """Connected resistor pair; first letter is Alice, second is Bob."""

    LL = (False, False)
    LH = (False, True)
    HL = (True, False)
    HH = (True, True)

    def resistances(self, params):
        a_high, b_high = self.value
        r_a = params.r_high if a_high else params.r_low
        r_b = params.r_high if b_high else params.r_low
        return r_a, r_b

    @property
    def is_secure(self):
        """True for the mixed states kept as key bits."""
        return self.value[0] != self.value[1]


@dataclass(frozen=True, eq=False)
class WireTrace:
    """Sampled wire voltage ``u`` and current ``i`` for one bit period.

    ``truth`` is the hidden bit state; attack code must not read it.
    """

    u: np.ndarray
    i: np.ndarray
    truth: BitState

    def __len__(self):
        return len(self.u)


def johnson_rms(r, t, df):
    """Band-limited rms Johnson noise voltage ``sqrt(4 k T R Δf)``."""
    if not r > 0:
        raise InvalidParameterError(f"resistance must be positive, got {r}")
    if not df > 0:
        raise InvalidParameterError(f"bandwidth must be positive, got {df}")
    if t < 0:
        raise InvalidParameterError(f"temperature must be >= 0, got {t}")
    return math.sqrt(4.0 * BOLTZMANN * t * r * df)


def wire_dc_current(state, params):
    """DC loop current, Alice to Bob positive."""
    if params.dc_block is not None:
        return 0.0
    r_a, r_b = state.resistances(params)
    return (params.u_dca - params.u_dcb) / (r_a + r_b)


def wire_dc_voltage(state, params):
    """DC component of the wire voltage.

    With DC coupling this is the resistive divider
    ``(R_B U_DCA + R_A U_DCB) / (R_A + R_B)``.  With an ideal series
    capacitor no DC current flows, so the wire sits at the source voltage
    of the unblocked side (0 V when both sides are blocked).
    """
    if params.dc_block == "bob":
        return params.u_dca
    if params.dc_block == "alice":
        return params.u_dcb
    if params.dc_block == "both":
        return 0.0
    r_a, r_b = state.resistances(params)
    return (r_b * params.u_dca + r_a * params.u_dcb) / (r_a + r_b)


def wire_ac_rms(state, params):
    """Analytic rms of the wire noise voltage, ``sqrt(4kTΔf R_A R_B/(R_A+R_B))``."""
    r_a, r_b = state.resistances(params)
    return math.sqrt(params.noise_psd_scale * r_a * r_b / (r_a + r_b))


def wire_ac_current_rms(state, params):
    r_a, r_b = state.resistances(params)
    return math.sqrt(params.noise_psd_scale / (r_a + r_b))


def bep_seed(master_seed, index):
    """Seed of the noise streams for bit period ``index``."""
    return np.random.SeedSequence(master_seed, spawn_key=(1, index))


def draw_noise(state, params, seed):
    """Draw Alice's and Bob's generator samples for one bit period.

    The two generators use independent child streams of ``seed``, which
    may be an int or a :class:`numpy.random.SeedSequence`.
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    alice_ss, bob_ss = seed.spawn(2)
    r_a, r_b = state.resistances(params)
    n = params.samples_per_bit
    u_an = np.random.default_rng(alice_ss).standard_normal(n)
    u_bn = np.random.default_rng(bob_ss).standard_normal(n)
    u_an *= johnson_rms(r_a, params.temp_eff, params.bandwidth)
    u_bn *= johnson_rms(r_b, params.temp_eff, params.bandwidth)
    return u_an, u_bn


def wire_trace(state, params, u_an, u_bn):
    """Form wire voltage and current from given generator samples.

    The voltage is built from the loop equation on Bob's side,
    ``U = I R_B + U_Bn + U_DCB``, so it holds to rounding for every
    sample.  Under a DC block the blocking capacitor's DC voltage takes
    the place of the missing loop-current drop.
    """
    u_an = np.asarray(u_an, dtype=np.float64)
    u_bn = np.asarray(u_bn, dtype=np.float64)
    r_a, r_b = state.resistances(params)
    i = (u_an - u_bn) / (r_a + r_b) + wire_dc_current(state, params)
    if params.dc_block is None:
        offset = params.u_dcb
    else:
        offset = wire_dc_voltage(state, params)
    u = i * r_b + u_bn + offset
    return WireTrace(u=u, i=i, truth=state)


def simulate_bep(state, params, seed):
    """Simulate one bit exchange period with i.i.d. Gaussian noise samples."""
    u_an, u_bn = draw_noise(state, params, seed)
    return wire_trace(state, params, u_an, u_bn)
