"""
Success probability versus noise temperature
============================================

Sweep the effective temperature for source differences of 0.1 V and
0.2 V with 700 bits of 500 samples each, and put the Monte Carlo result
beside the majority-vote prediction.  The equivalent command line run is
``kljnloop run config.json``.
"""

import json

from kljnloop import emit_report, parse_config, run_experiment

config = parse_config(json.dumps({"delta_u_values": [0.1, 0.2], "replicate_count": 1}))
report = run_experiment(config)

print(f"{'T [K]':>10} {'dU [V]':>7} {'p_mc':>7} {'+-':>6} {'p_analytic':>10}")
for row in report.rows:
    print(f"{row.temp_k:10.3g} {row.delta_u_v:7.2f} {row.p_mc:7.3f} "
          f"{row.p_mc_stderr:6.3f} {row.p_analytic:10.4f}")

# Machine-readable copy of the same table
csv_text = emit_report(report, "csv")
print("\n" + csv_text.splitlines()[0])
