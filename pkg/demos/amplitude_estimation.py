"""
=====================================================
Amplitude estimation under readout noise
=====================================================

Maximum likelihood amplitude estimation combines the all-zeros counts from
Grover depths 1, 2, 4, ..., 64.  Without noise the error falls roughly as
1/queries.  With 3% readout error the raw counts carry a bias that stalls the
estimate; mitigated counts keep improving.

The same samples feed the raw and mitigated curves.  Pass ``--csv`` to dump
a table for plotting.
"""
import csv
import sys

import numpy as np

from sparseqrem.mlae import ExperimentConfig, loglog_slope, run_experiment

cfg = ExperimentConfig(n=10, b_max=0.5, shots=100, noise_levels=(0.0, 0.03, 0.05), methods=("raw", "least_norm", "delta"), trials=10)
report = run_experiment(cfg)

print(f"target theta = {report.theta_true:.6f}")
print(f"{'noise':>6} {'method':<11} {'final error':>12} {'slope':>7}")
for c in report.curves:
    print(f"{c.noise:>6.2f} {c.method:<11} {c.mean_error[-1]:>12.3e} {loglog_slope(c.queries, c.mean_error):>7.2f}")

# median error across trials is less sensitive to a single trial locking onto a wrong mode
c = report.curve(0.03, "least_norm")
print("median-error slope, least_norm at 3%:", round(loglog_slope(c.queries, np.median(c.theta_errors, axis=0)), 2))

if "--csv" in sys.argv:
    rows = report.to_csv_rows()
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
