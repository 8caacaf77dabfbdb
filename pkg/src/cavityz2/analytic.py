"""Closed-form model with two ground states (F=1/2 -> F'=3/2).

In the weak-pump limit the ground population P = P_{+1/2} obeys

    dP/dt = -G_eff [ f(P) P - f(1-P) (1-P) ],   f(P) = 1 / (alpha P^2 + beta_nl P + 1)

whose fixed points are the roots of (2P - 1)(alpha P^2 - alpha P + 1).  This
module evaluates the reduced parameters, fixed points and their stability,
the critical coupling, the asymptotic critical laws and the (delta_p, g)
phase diagram.  Everything is in units of kappa.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from ._parallel import parallel_map
from .errors import (
    DegenerateCaseError,
    NoTransitionError,
    PoleError,
    SingularParametersError,
    StiffnessError,
)
from .levels import build_level_scheme
from .results import OK, INVALID, Axis, SweepResult, Trajectory

ALPHA_C = 4.0
MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Physical rates in units of kappa (``kappa`` is kept for clarity and
    should normally be 1).  ``kappa_MHz`` is kappa/2pi in MHz and is only used
    when converting to laboratory units."""

    g0: float
    N: float
    kappa: float = 1.0
    Gamma: float = 1.0
    delta_p: float = 0.0
    eta_plus: float = 0.0
    eta_minus: float = 0.0
    kappa_MHz: Optional[float] = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.Gamma < 0 or self.N < 0:
            raise ValueError("Gamma and N must be non-negative")
        if self.eta_plus < 0 or self.eta_minus < 0:
            raise ValueError("pump rates must be non-negative")
        if self.kappa_MHz is not None and not self.kappa_MHz > 0:
            raise ValueError("kappa_MHz must be positive")

    @property
    def g(self):
        """Collective coupling g0 * sqrt(N)."""
        return self.g0 * math.sqrt(self.N)

    def replace(self, **kw) -> "SystemParams":
        return replace(self, **kw)

    def with_collective_coupling(self, g) -> "SystemParams":
        """Same N, with g0 rescaled so that g0 sqrt(N) = g."""
        if self.N <= 0:
            raise SingularParametersError("cannot set collective coupling with N = 0")
        return replace(self, g0=g / math.sqrt(self.N))


@lru_cache(maxsize=1)
def two_level_constants():
    """(c_{1+}^2, c_{2+}^2, beta) for F=1/2 -> F'=3/2 as exact fractions.

    c_{1+}: m=-1/2 -> m'=+1/2 by a_+;  c_{2+}: m=+1/2 -> m'=+3/2 by a_+.
    beta: decay m'=+1/2 -> m=+1/2, the channel that completes the transfer.
    """
    s = build_level_scheme(Fraction(1, 2), Fraction(3, 2))
    h = Fraction(1, 2)
    c1 = s.coupling_sq[(-h, h)]
    c2 = s.coupling_sq[(h, 3 * h)]
    beta = s.branching_exact[(h, h)]
    return c1, c2, beta


@dataclass(frozen=True)
class TwoLevelDerived:
    """Reduced parameters of the rate equation.

    ``beta_nl`` is the linear coefficient in the nonlinearity f (not a
    branching ratio).  ``gamma_e`` is the pumping rate per unit eta^2 so that
    ``gamma_eff = gamma_e * eta_plus**2``.  ``delta_eta`` is the relative pump
    imbalance in the convention of :func:`rate_rhs`.
    """

    u: float
    w: float
    alpha: float
    beta_nl: float
    gamma_eff: float
    gamma_e: float = 0.0
    delta_eta: float = 0.0
    denominator: float = 1.0

    def replace(self, **kw) -> "TwoLevelDerived":
        return replace(self, **kw)


def derive_two_level(params: SystemParams) -> TwoLevelDerived:
    """Reduced rate-equation parameters for a :class:`SystemParams` point."""
    x = params.g0 ** 2 * params.N
    if x == 0:
        raise SingularParametersError("g0^2 N = 0: reduced parameters diverge")
    c1, c2, br = (float(v) for v in two_level_constants())
    k, G, d = params.kappa, params.Gamma, params.delta_p
    u = (G * k - 2 * d * d) / x
    w = ((G / 2) ** 2 + d * d) * (k * k + d * d) / (x * x)
    D = c2 * (c2 + u) + w
    if D == 0:
        raise SingularParametersError("vanishing denominator c2(c2+u)+w")
    alpha = (c1 - c2) ** 2 / D
    beta_nl = 2 * (c1 - c2) * (c2 + u / 2) / D
    gamma_e = c1 * br * G / (params.g0 ** 2 * params.N ** 2 * D)
    ep2, em2 = params.eta_plus ** 2, params.eta_minus ** 2
    delta_eta = (em2 - ep2) / ep2 if ep2 > 0 else 0.0
    return TwoLevelDerived(u, w, alpha, beta_nl, gamma_e * ep2, gamma_e, delta_eta, D)


def _fden(P, alpha, beta_nl):
    return alpha * P * P + beta_nl * P + 1.0


def rate_rhs(P_half, derived: TwoLevelDerived, delta_eta: float = 0.0):
    """dP_{+1/2}/dt.

    With ``delta_eta != 0`` the pump that empties m=+1/2 (a_-) is stronger by
    the relative amount ``delta_eta = (eta_-^2 - eta_+^2) / eta_+^2``, which
    adds ``-G_eff * delta_eta * f(P) P``.
    """
    a, b = derived.alpha, derived.beta_nl
    P = P_half
    Q = 1.0 - P
    dP, dQ = _fden(P, a, b), _fden(Q, a, b)
    if np.any(np.asarray(dP) <= 0) or np.any(np.asarray(dQ) <= 0):
        raise PoleError(f"f(P) has a pole near P={P!r} (alpha={a}, beta_nl={b})", P=P)
    hP = P / dP
    return -derived.gamma_eff * ((hP - Q / dQ) + delta_eta * hP)


def rate_rhs_derivative(P_half, derived: TwoLevelDerived, delta_eta: float = 0.0):
    """Analytic d(rate_rhs)/dP."""
    a, b = derived.alpha, derived.beta_nl
    P, Q = P_half, 1.0 - P_half

    def hprime(x):
        return (1.0 - a * x * x) / _fden(x, a, b) ** 2

    return -derived.gamma_eff * (hprime(P) + hprime(Q) + delta_eta * hprime(P))


@dataclass(frozen=True)
class SteadyState:
    P: complex
    stability: str  # stable | unstable | marginal | complex

    @property
    def is_real(self):
        return self.stability != "complex"

    @property
    def Ip(self):
        return 2 * self.P - 1


def cubic_roots(alpha):
    """Roots of 2 a P^3 - 3 a P^2 + (2 + a) P - 1 via the factorization
    (2P - 1)(a P^2 - a P + 1).  Returned as (P_mid, P_plus, P_minus); the last
    two are complex for 0 < alpha < 4 and None for alpha == 0."""
    if alpha == 0:
        return 0.5, None, None
    disc = (alpha - 4.0) / alpha
    if disc >= 0:
        r = 0.5 * math.sqrt(disc)
        return 0.5, 0.5 + r, 0.5 - r
    r = 0.5 * math.sqrt(-disc)
    return 0.5, complex(0.5, r), complex(0.5, -r)


def _classify(P, alpha, beta_nl):
    d = rate_rhs_derivative(P, TwoLevelDerived(0, 0, alpha, beta_nl, 1.0))
    if abs(d) < MARGINAL_TOL:
        return "marginal"
    return "stable" if d < 0 else "unstable"


def steady_states(alpha, beta_nl: float = 0.0):
    """Fixed points of the balanced rate equation with stability labels.

    Stability is the sign of the analytic derivative of the rate (with unit
    G_eff); ``beta_nl`` only matters for the symmetry-broken roots.  At
    alpha == 4 the triple root is returned once, as marginal.
    """
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    mid, p, m = cubic_roots(alpha)
    if p is None:
        return [SteadyState(0.5, "stable")]
    if alpha == ALPHA_C:
        return [SteadyState(0.5, "marginal")]
    out = [SteadyState(mid, _classify(mid, alpha, beta_nl))]
    if isinstance(p, complex):
        out += [SteadyState(p, "complex"), SteadyState(m, "complex")]
    else:
        out += [SteadyState(p, _classify(p, alpha, beta_nl)),
                SteadyState(m, _classify(m, alpha, beta_nl))]
    return out


def imbalance_steady(alpha):
    """Stable steady-state imbalances I_p: (0,) below alpha=4, else (+x, -x)."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha <= ALPHA_C:
        return (0.0,)
    if math.isinf(alpha):
        return (1.0, -1.0)
    x = math.sqrt((alpha - ALPHA_C) / alpha)
    return (x, -x)


def critical_coupling_quadratic(Gamma=1.0, kappa=1.0, c1_sq=None, c2_sq=None):
    """Coefficients (a, b, c) of a x^2 - b x + c = 0 for x = g0^2 N at
    delta_p = g0 sqrt(N), alpha = 4."""
    if c1_sq is None or c2_sq is None:
        c1, c2, _ = two_level_constants()
        c1_sq = c1 if c1_sq is None else c1_sq
        c2_sq = c2 if c2_sq is None else c2_sq
    a = (c1_sq - c2_sq) ** 2 / 4 - (c2_sq - 1) ** 2
    b = c2_sq * Gamma * kappa + Gamma ** 2 / 4 + kappa ** 2
    c = -(Gamma ** 2) * kappa ** 2 / 4
    return a, b, c


def critical_coupling(Gamma=1.0, kappa=1.0, c1_sq=None, c2_sq=None):
    """Minimum collective coupling g_c for symmetry breaking (units of kappa)."""
    a, b, c = (float(v) for v in critical_coupling_quadratic(Gamma, kappa, c1_sq, c2_sq))
    if a == 0:
        roots = [c / b] if b else []
    else:
        disc = b * b - 4 * a * c
        if disc < 0:
            roots = []
        else:
            sq = math.sqrt(disc)
            # numerically stable pair
            q = 0.5 * (b + math.copysign(sq, b))
            roots = [q / a] + ([c / q] if q else [])
    pos = [r for r in roots if r > 0]
    if not pos:
        raise NoTransitionError(f"no positive critical coupling for Gamma={Gamma}, kappa={kappa}")
    return math.sqrt(min(pos))


def contour_minimum_coupling(Gamma=1.0, kappa=1.0, xtol=1e-13):
    """Smallest collective coupling at which alpha reaches 4 for some delta_p.

    Unlike :func:`critical_coupling` this does not fix delta_p = g; the two
    agree to within about half a percent for Gamma = kappa.
    """
    def peak(g):
        base = SystemParams(g0=g, N=1.0, kappa=kappa, Gamma=Gamma)
        r = minimize_scalar(lambda d: -derive_two_level(base.replace(delta_p=d)).alpha,
                            bounds=(0.0, 3 * g), method="bounded", options={"xatol": 1e-12})
        return -r.fun - ALPHA_C

    g0 = critical_coupling(Gamma, kappa)
    lo, hi = 0.5 * g0, 1.5 * g0
    if peak(lo) >= 0 or peak(hi) <= 0:
        raise NoTransitionError("alpha = 4 contour minimum not bracketed")
    return brentq(peak, lo, hi, xtol=xtol)


def integrate_rate(P0, derived: TwoLevelDerived, t_end, tol=1e-10, t_eval=None,
                   delta_eta: float = 0.0, method="DOP853") -> Trajectory:
    """Integrate the rate equation for P_{+1/2} on [0, t_end].

    ``t_eval`` defaults to 400 logarithmically spaced samples (plus t=0).
    The result is a two-column :class:`Trajectory` (P_{-1/2}, P_{+1/2}).
    """
    if not 0.0 <= P0 <= 1.0:
        raise ValueError("P0 must lie in [0, 1]")
    if t_eval is None:
        t0 = min(1e-3 / max(derived.gamma_eff, 1e-300), t_end / 10)
        t_eval = np.concatenate([[0.0], np.geomspace(t0, t_end, 400)])
    t_eval = np.asarray(t_eval, dtype=float)
    sol = solve_ivp(lambda t, y: [rate_rhs(y[0], derived, delta_eta)],
                    (0.0, t_end), [P0], method=method, t_eval=t_eval,
                    rtol=tol, atol=tol * 1e-3)
    if sol.status != 0:
        raise StiffnessError(f"rate integration failed at t={sol.t[-1] if len(sol.t) else 0}: "
                             f"{sol.message}", t=sol.t[-1] if len(sol.t) else None)
    P = sol.y[0]
    h = Fraction(1, 2)
    return Trajectory(sol.t, np.column_stack([1 - P, P]), (-h, h),
                      metadata={"model": "rate", "alpha": derived.alpha,
                                "beta_nl": derived.beta_nl, "gamma_eff": derived.gamma_eff,
                                "delta_eta": delta_eta, "tol": tol})


def relaxation_law(beta_nl, gamma_eff, t):
    """Late-time deviation Delta P(t) = 4/(beta_nl+4) (G_eff t)^(-1/2) at alpha=4."""
    if beta_nl == -4:
        raise DegenerateCaseError("beta_nl = -4 is excluded from the power law")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    return 4.0 / (beta_nl + 4.0) * (gamma_eff * t) ** -0.5


def relaxation_asymptote(beta_nl, gamma_eff, t):
    """Leading-order solution of the rate equation at alpha=4.

    Near P=1/2 the equation reduces to dx/dt = -G_eff 32 x^3/(beta_nl+4)^2,
    whose late-time solution is x = (beta_nl+4)/8 (G_eff t)^(-1/2).
    Same exponent as :func:`relaxation_law`, different prefactor.
    """
    if beta_nl == -4:
        raise DegenerateCaseError("beta_nl = -4 is excluded from the power law")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    return (beta_nl + 4.0) / 8.0 * (gamma_eff * t) ** -0.5


def unbalanced_shift(delta_eta, beta_nl):
    """Asymptotic Delta P(delta_eta) = -1/2 ((beta_nl+4)/4)^(1/3) delta_eta^(1/3)
    at alpha = 4 (odd cube root)."""
    de = np.asarray(delta_eta, dtype=float)
    if np.any(np.abs(de) > 0.1):
        warnings.warn("unbalanced_shift is an asymptotic law; |delta_eta| > 0.1", stacklevel=2)
    out = -0.5 * np.cbrt((beta_nl + 4.0) / 4.0) * np.cbrt(de)
    return float(out) if out.ndim == 0 else out


def unbalanced_steady(derived: TwoLevelDerived, delta_eta, xtol=1e-15):
    """Stable stationary P_{+1/2} of the unbalanced rate equation, bracketed
    around the symmetric point (valid for alpha <= 4 and small imbalance)."""
    if delta_eta == 0:
        return 0.5
    f = lambda P: rate_rhs(P, derived, delta_eta)
    if delta_eta > 0:
        lo, hi = 1e-12, 0.5
    else:
        lo, hi = 0.5, 1 - 1e-12
    return brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)


def alpha_c_crossings(deltas, alphas):
    """Linear-interpolated detunings where alpha(delta) crosses 4."""
    out = []
    s = np.sign(np.asarray(alphas) - ALPHA_C)
    for i in range(len(deltas) - 1):
        if np.isfinite(alphas[i]) and np.isfinite(alphas[i + 1]) and s[i] != s[i + 1] and s[i] != 0:
            a0, a1 = alphas[i], alphas[i + 1]
            out.append(deltas[i] + (ALPHA_C - a0) * (deltas[i + 1] - deltas[i]) / (a1 - a0))
        elif s[i] == 0:
            out.append(deltas[i])
    return out


def _phase_row(args):
    template, g, deltas = args
    alpha = np.full(len(deltas), np.nan)
    Ip = np.full(len(deltas), np.nan)
    flags = np.full(len(deltas), OK, dtype=object)
    for j, d in enumerate(deltas):
        try:
            p = template.with_collective_coupling(g).replace(delta_p=float(d))
            a = derive_two_level(p).alpha
        except SingularParametersError:
            flags[j] = INVALID
            continue
        alpha[j] = a
        Ip[j] = imbalance_steady(a)[0]
    return alpha, Ip, flags


def phase_diagram(delta_grid, g_grid, template: SystemParams, jobs=1) -> SweepResult:
    """alpha and the positive stable |I_p| on a (g, delta_p) grid.

    ``template`` supplies kappa, Gamma and N; g0 is set from each g.  Cells
    where the reduced model is singular (g = 0) are flagged ``invalid``.
    The alpha = 4 contour is stored in ``annotations["alpha_c_contour"]`` as
    (g, delta_p) points.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    gs = np.asarray(g_grid, dtype=float)
    if deltas.size == 0 or gs.size == 0:
        raise ValueError("empty grid")
    rows = parallel_map(_phase_row, [(template, float(g), deltas) for g in gs], jobs)
    alpha = np.array([r[0] for r in rows])
    Ip = np.array([r[1] for r in rows])
    flags = np.array([r[2] for r in rows], dtype=object)
    contour = []
    for g, arow in zip(gs, alpha):
        contour += [(float(g), float(d)) for d in alpha_c_crossings(deltas, arow)]
    g_c = None
    try:
        g_c = critical_coupling(template.Gamma, template.kappa)
    except NoTransitionError:
        pass
    return SweepResult(
        axes=[Axis("g", gs, "kappa"), Axis("delta_p", deltas, "kappa")],
        values={"alpha": alpha, "Ip": Ip},
        flags=flags,
        metadata={"model": "two-level analytic", "Gamma": template.Gamma,
                  "kappa": template.kappa, "N": template.N},
        annotations={"alpha_c_contour": contour, "g_c": g_c},
    )
