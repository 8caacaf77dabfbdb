"""Two ground states, four excited states: the pitchfork in closed form.

Walks through the reduced rate model: the steady imbalance on both sides of
alpha = 4, where in (delta_p, g) the symmetry-broken window opens, and the
three power laws at the critical point.

    python demos/01_two_level_pitchfork.py
"""
import numpy as np

from cavityz2 import SystemParams, critical_coupling, derive_two_level, imbalance_steady, phase_diagram
from cavityz2.analysis import critical_point, field_exponent, order_parameter_exponent, relaxation_exponent
from cavityz2.analytic import contour_minimum_coupling

# %% steady imbalance against alpha
for alpha in (1.0, 3.9, 4.0, 4.1, 5.0, 10.0, 100.0):
    print(f"alpha = {alpha:6.1f}   stable I_p = {imbalance_steady(alpha)}")

# %% where alpha exceeds 4: a window around the normal-mode splitting
g_c = critical_coupling()
print(f"\ncritical collective coupling (delta_p = g): {g_c:.6f} kappa")
print(f"smallest g on the alpha = 4 contour:        {contour_minimum_coupling():.6f} kappa")

deltas = np.linspace(0, 12, 241)
res = phase_diagram(deltas, [4.0, 5.0, 6.0, 8.0, 10.0], SystemParams(g0=1.0, N=1.0))
for g, row in zip(res.axis("g").values, res.values["Ip"]):
    broken = deltas[row > 0]
    span = f"[{broken.min():.2f}, {broken.max():.2f}]" if broken.size else "none"
    print(f"g = {g:4.1f} kappa: broken for delta_p in {span}")

# %% critical exponents at one point of the alpha = 4 contour
p = critical_point(6.0, SystemParams(g0=1.0, N=1.0, eta_plus=1.0, eta_minus=1.0))
d = derive_two_level(p)
print(f"\ncritical point: g = 6, delta_p = {p.delta_p:.6f}, beta_nl = {d.beta_nl:.4f}")
for rep in (order_parameter_exponent(), relaxation_exponent(p), field_exponent(p)):
    print(f"  {rep.name:6s} fitted {rep.fit.exponent:+.4f}  expected {rep.expected:+.4f}  r2 {rep.fit.r2:.8f}")

# The late-time prefactor of the relaxation follows (beta_nl+4)/8.
rep = relaxation_exponent(p)
print(f"  relaxation prefactor / ((beta_nl+4)/8) = {rep.detail['prefactor_ratio_asymptote']:.5f}")
