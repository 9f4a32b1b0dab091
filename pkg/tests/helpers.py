import math

import numpy as np

from kljnloop.physics import BitState, WireTrace


def moment_trace(var_u, var_i, state=BitState.LH, n=1000, u0=0.3, i0=1e-6):
    """Trace whose sample variances are exactly the given values."""
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return WireTrace(u=u0 + math.sqrt(var_u) * signs, i=i0 + math.sqrt(var_i) * signs, truth=state)


def exact_moments(state, params):
    r_a, r_b = state.resistances(params)
    c = params.noise_psd_scale
    return c * r_a * r_b / (r_a + r_b), c / (r_a + r_b)
