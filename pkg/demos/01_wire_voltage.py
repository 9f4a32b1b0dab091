"""
Wire voltage under parasitic DC sources
=======================================

Two ground-loop sources, 0.2 V at Alice and 0.1 V at Bob, put a DC level
on the wire that depends on which resistors are connected.  The noise on
top of it looks the same for LH and HL, the DC level does not.
"""

import numpy as np

from kljnloop import BitState, SystemParams, simulate_bep, wire_ac_rms, wire_dc_current, wire_dc_voltage

params = SystemParams(temp_eff=1e12, u_dca=0.2, u_dcb=0.1, samples_per_bit=100_000)

# Analytic DC levels and noise rms for each state
for state in BitState:
    print(f"{state.name}: U_DC = {wire_dc_voltage(state, params):.5f} V   "
          f"I_DC = {wire_dc_current(state, params):.3e} A   "
          f"U_eff = {wire_ac_rms(state, params):.4f} V")

# The threshold sits halfway between LH and HL, at the mean of the two sources
u_th = 0.5 * (params.u_dca + params.u_dcb)
print(f"\nthreshold U_th = {u_th} V")

# Simulated traces agree: same spread, different mean, same current
lh = simulate_bep(BitState.LH, params, seed=1)
hl = simulate_bep(BitState.HL, params, seed=2)
for name, tr in (("LH", lh), ("HL", hl)):
    print(f"{name}: mean u = {tr.u.mean():.4f} V, std u = {tr.u.std():.4f} V, "
          f"mean i = {tr.i.mean():.3e} A, fraction above U_th = {np.mean(tr.u > u_th):.4f}")

# A common shift of both sources moves the voltage and leaves the current alone
shifted = simulate_bep(BitState.LH, SystemParams(temp_eff=1e12, u_dca=1.2, u_dcb=1.1,
                                                 samples_per_bit=100_000), seed=1)
print(f"\nshift by 1 V: max |du - 1| = {np.max(np.abs(shifted.u - lh.u - 1.0)):.1e}, "
      f"max |di| = {np.max(np.abs(shifted.i - lh.i)):.1e}")
