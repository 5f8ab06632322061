"""
==================
Pipeline timings
==================

The reduced inverse costs O(n |S|^2) and never touches the 2^n space, so a
65-qubit distribution with thousands of distinct outcomes is mitigated in
about a second.  Exact inversion of the full tensor is shown alongside for
small n, where its exponential cost is still affordable.
"""
from sparseqrem.benchmark import fit_loglog_slope, scaling_by_qubits, scaling_by_size

rows = scaling_by_size(65, (1024, 2048, 4096, 8192), threads=1)
for r in rows:
    print(f"n=65 |S|={r.subspace_size:>5}  inverse {r.inverse_s:.3f} s  total {r.total_s:.3f} s")
print("slope of inverse time vs |S|:", round(fit_loglog_slope([r.subspace_size for r in rows], [r.inverse_s for r in rows]), 2))

print()
for r in scaling_by_qubits([4, 8, 12, 14, 20, 40, 65], shots=8192):
    print(f"n={r.n:>2} {r.method:<10} |S|={r.subspace_size:>6}  total {r.total_s:.4f} s")
