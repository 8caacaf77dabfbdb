"""F=2 -> F'=3 with the experimental atom number: relaxation and threshold.

Starting from the stretched state m=+2, runs below the threshold detuning
lose their imbalance, runs above keep it.  Close to the threshold the time
to relax grows like (delta_th - delta_p)^(-1/2).  Takes a few minutes.

    python demos/02_f2_threshold.py
"""
import numpy as np

from cavityz2 import SystemParams, build_level_scheme
from cavityz2.analysis import fit_exponent, locate_threshold, relaxation_scan, stretched_populations
from cavityz2.config import KAPPA_MHZ
from cavityz2.meanfield import MeanFieldState, integrate

scheme = build_level_scheme(2, 3)
params = SystemParams(g0=0.0654, N=2e4, eta_plus=14.0, eta_minus=14.0)
start = MeanFieldState.from_populations(scheme, stretched_populations(scheme, +1))

# %% a few trajectories
for delta in (5.0, 6.5, 7.5, 9.0):
    tr = integrate(start, params.replace(delta_p=delta), scheme, t_end=50000.0, n_samples=6, keep_rho=False)
    ips = "  ".join(f"{x:+.3f}" for x in tr.Ip)
    print(f"delta_p = {delta:4.1f} kappa   I_p: {ips}   final I_a = {tr.Ia[-1]:+.3f}")

# %% bisection for the threshold (1e-5 is enough here)
th = locate_threshold(params, scheme, (6.9, 7.0), resolution=1e-5, t_end=1e6)
print(f"\nthreshold {th.delta_th:.6f} kappa = {th.delta_th * KAPPA_MHZ:.3f} MHz "
      f"at kappa/2pi = {KAPPA_MHZ:.4f} MHz ({len(th.evaluations)} runs)")

# %% critical slowing down
dist = np.geomspace(5e-4, 5e-3, 8)
scan = relaxation_scan(params, scheme, th.delta_th - dist, t_end=1e6)
tau = np.array([r.tau for r in scan])
for x, t in zip(dist, tau):
    print(f"  delta_th - delta_p = {x:.2e}   tau = {t:9.0f} / kappa")
fit = fit_exponent(dist, 1 / tau, (dist[0] * 0.999, dist[-1] * 1.001))
print(f"1/tau ~ distance^{fit.exponent:.3f}  (r2 {fit.r2:.5f})")
