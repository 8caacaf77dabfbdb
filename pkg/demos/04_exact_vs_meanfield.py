"""One atom, two photon modes: the full master equation next to mean field.

With weak driving the atom barely saturates and the factorized dynamics
should follow the exact one closely.  The exact run keeps up to three
photons per mode and repeats with four to check the truncation.

    python demos/04_exact_vs_meanfield.py
"""
from cavityz2 import SystemParams, build_level_scheme
from cavityz2.oracle import compare_with_meanfield

scheme = build_level_scheme("1/2", "3/2")
params = SystemParams(g0=0.2, N=1.0, eta_plus=0.05, eta_minus=0.05)
out = compare_with_meanfield(scheme, params, [0.0, 1.0], t_end=500.0, n_samples=11)

ex, mf = out["exact"], out["meanfield"]
print("    t     P+1/2 exact  P+1/2 mf    |a+|^2 exact  |a+|^2 mf")
for i in range(len(ex.times)):
    print(f"{ex.times[i]:6.0f}  {ex.populations[i, 1]:.6f}   {mf.populations[i, 1]:.6f}   "
          f"{ex.n_plus[i]:.4e}    {abs(mf.a_plus[i]) ** 2:.4e}")
print()
for k, v in out["deviations"].items():
    print(f"{k:20s} {v:.2e}")
