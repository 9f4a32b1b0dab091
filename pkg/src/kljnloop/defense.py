"""Countermeasures as parameter transforms, plus the DC loop current alarm.

Each transform returns new :class:`~kljnloop.physics.SystemParams`; the
effect of a defense is checked by re-running the exchange and the attack
on the transformed parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError

DEFENSE_KINDS = ("none", "compensate_both", "compensate_single", "dc_block", "scale_noise")
_SIDES = ("alice", "bob", "both")


@dataclass(frozen=True)
class DefenseAction:
    """A defense and its parameter.

    ``parameter`` is the side (``"alice"``, ``"bob"``, ``"both"``) for
    ``dc_block`` and the multiplication factor for ``scale_noise``; the
    other kinds take none.
    """

    kind: str = "none"
    parameter: object = None

    def __post_init__(self):
        if self.kind not in DEFENSE_KINDS:
            raise InvalidParameterError(f"unknown defense kind {self.kind!r}")
        if self.kind == "dc_block" and self.parameter not in _SIDES:
            raise InvalidParameterError("dc_block side must be 'alice', 'bob' or 'both'")
        if self.kind == "scale_noise":
            if isinstance(self.parameter, bool) or not isinstance(self.parameter, (int, float)):
                raise InvalidParameterError("scale_noise needs a numeric factor")
            if not self.parameter > 0:
                raise InvalidParameterError("scale_noise factor must be positive")

    @property
    def label(self):
        if self.kind == "scale_noise":
            return f"scale_noise:{self.parameter:g}"
        if self.kind == "dc_block":
            return f"dc_block:{self.parameter}"
        return self.kind

    def apply(self, params):
        if self.kind == "compensate_both":
            return compensate_dc(params, "both")
        if self.kind == "compensate_single":
            return compensate_dc(params, "single")
        if self.kind == "dc_block":
            return dc_block(params, self.parameter)
        if self.kind == "scale_noise":
            return scale_noise(params, self.parameter)
        return params


def compensate_dc(params, mode="single"):
    """Ideally tuned compensating DC sources.

    ``"both"`` cancels each parasitic source; ``"single"`` adds one
    source at Alice's end so that ``U_DCA = U_DCB``, which is enough to
    stop the DC loop current.
    """
    if mode == "both":
        return replace(params, u_dca=0.0, u_dcb=0.0)
    if mode == "single":
        return replace(params, u_dca=params.u_dcb)
    raise InvalidParameterError(f"mode must be 'both' or 'single', got {mode!r}")


def dc_block(params, side="bob"):
    """Insert an ideal series capacitor at ``side``.

    Steady state only: no DC current flows, the AC path is untouched.
    """
    if side not in _SIDES:
        raise InvalidParameterError("side must be 'alice', 'bob' or 'both'")
    if params.dc_block is not None and params.dc_block != side:
        side = "both"
    return replace(params, dc_block=side)


def scale_noise(params, factor, via="temperature"):
    """Raise the noise power by ``factor``.

    Scaling the temperature or the bandwidth is equivalent, as the noise
    variance depends on their product only.
    """
    if not factor > 0:
        raise InvalidParameterError(f"factor must be positive, got {factor}")
    if via == "temperature":
        return replace(params, temp_eff=params.temp_eff * factor)
    if via == "bandwidth":
        return replace(params, bandwidth=params.bandwidth * factor)
    raise InvalidParameterError(f"via must be 'temperature' or 'bandwidth', got {via!r}")


def mean_current_stderr(params, n_samples):
    """Standard error of the sample-mean wire current with no DC present.

    Uses the largest current noise among the four bit states (LL).
    """
    return math.sqrt(params.noise_psd_scale / (2.0 * params.r_low) / n_samples)


def default_alarm_threshold(params, n_samples):
    # 5 sigma from zero current, and 5 sigma short of a 10 sigma DC current
    return 5.0 * mean_current_stderr(params, n_samples)


def dc_loop_alarm(traces, threshold):
    """True when the mean wire current over all samples exceeds ``threshold``."""
    traces = list(traces)
    if not traces:
        raise ValueError("no traces")
    if not threshold > 0:
        raise InvalidParameterError("threshold must be positive")
    i = np.concatenate([t.i for t in traces])
    return bool(abs(float(np.mean(i))) > threshold)
