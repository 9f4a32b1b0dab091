"""
Defenses and the DC loop alarm
==============================

Starting from a leaking link (0.1 V source difference), each defense is
applied as a parameter transform and the attack is run again.
"""

from dataclasses import replace

from kljnloop import SystemParams, dc_loop_alarm, predict, run_attack, run_key_exchange
from kljnloop.defense import DefenseAction, default_alarm_threshold

leaking = SystemParams(temp_eff=7e12, u_dca=0.1, u_dcb=0.0, master_seed=9)

for action in (DefenseAction(), DefenseAction("compensate_both"), DefenseAction("compensate_single"),
               DefenseAction("dc_block", "bob"), DefenseAction("scale_noise", 100)):
    params = action.apply(leaking)
    stats = run_attack(run_key_exchange(params))
    print(f"{action.label:18s} p_mc = {stats.p:.3f}  p_analytic = {predict(params).p_bit:.3f}")

# Alice and Bob can detect the loop current before exchanging keys.
# At high noise temperature it takes many samples to see a microamp current.
probe = replace(leaking, temp_eff=1e9, key_length=20, samples_per_bit=50_000)
n = probe.key_length * probe.samples_per_bit
threshold = default_alarm_threshold(probe, n)
for params in (probe, replace(probe, u_dca=0.0)):
    traces = [b.trace for b in run_key_exchange(params).beps]
    print(f"U_DCA - U_DCB = {params.u_dca - params.u_dcb:.1f} V: alarm = "
          f"{dc_loop_alarm(traces, threshold)} (threshold {threshold:.2e} A)")
