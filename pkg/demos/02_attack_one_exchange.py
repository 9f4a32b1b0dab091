"""
Eavesdropping on one key exchange
=================================

Eve finds LL periods from the noise statistics, time-averages them to
estimate both DC sources, and then votes on each kept bit by counting
voltage samples above the midpoint of her two estimates.
"""

from collections import Counter

from kljnloop import SystemParams, classify_state_from_ac, predict, run_attack, run_key_exchange
from kljnloop.eve import polarity, threshold_voltage

params = SystemParams(temp_eff=2e13, u_dca=0.1, u_dcb=0.0, master_seed=2024)
run = run_key_exchange(params)
print(f"{len(run.beps)} bit periods, {len(run.retained)} kept for the key")

# What Eve sees when she labels periods from AC statistics alone
labels = Counter((b.state.name, classify_state_from_ac(b.trace, params)) for b in run.beps)
for (truth, label), n in sorted(labels.items()):
    print(f"  true {truth} -> labelled {label}: {n}")

stats = run_attack(run)
est = stats.estimates
print(f"\nDC estimates from {est.n_avg} samples: U_DCA ~ {est.u_dca_hat:.4f} V "
      f"(error {est.e_a:+.4f}), U_DCB ~ {est.u_dcb_hat:.4f} V (error {est.e_b:+.4f})")
print(f"threshold {threshold_voltage(est):.4f} V, polarity {polarity(est)}")
print(f"\nEve guessed {stats.n_cor}/{stats.n_tot} bits right (p = {stats.p:.3f}), "
      f"{stats.n_undetermined} undetermined")
print(f"analytic prediction p = {predict(params).p_bit:.3f}")

# The same attack on the DC current learns nothing
current = run_attack(run, channel="current")
print(f"current-threshold variant: p = {current.p:.3f}")
