"""Relaxation times, threshold location, power-law fits and steady-state maps
built from batches of mean-field runs."""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._parallel import parallel_map
from .analytic import (
    ALPHA_C,
    SystemParams,
    derive_two_level,
    imbalance_steady,
    integrate_rate,
    relaxation_asymptote,
    relaxation_law,
    unbalanced_shift,
    unbalanced_steady,
)
from .errors import InconclusiveError, SingularParametersError
from .levels import LevelScheme
from .meanfield import (
    AtomLossModel,
    IntegrationOptions,
    MeanFieldState,
    _observable_rates,
    get_model,
    imbalance_of,
    initial_state_line,
    integrate,
    refine_fixed_point,
)
from .results import INVALID, NOT_CONVERGED, OK, Axis, SweepResult, Trajectory

RELAXED = "relaxed"
DID_NOT_RELAX = "did_not_relax"
INCONCLUSIVE = "inconclusive"

DEAD_BAND = 1e-4


@dataclass(frozen=True)
class Relaxation:
    status: str
    tau: Optional[float] = None

    @property
    def relaxed(self):
        return self.status == RELAXED


def relaxation_time(traj: Trajectory, threshold: float = 0.1, plateau_tol: float = 1e-6) -> Relaxation:
    """First time |I_p| drops below ``threshold`` (linear interpolation).

    A trajectory that never gets there is ``did_not_relax`` when it has
    settled (stopped as steady, or |I_p| changed by less than ``plateau_tol``
    over its last tenth) and ``inconclusive`` otherwise.
    """
    ip = np.abs(traj.Ip)
    t = traj.times
    below = np.nonzero(ip < threshold)[0]
    if len(below):
        k = below[0]
        if k == 0:
            return Relaxation(RELAXED, float(t[0]))
        t0, t1, y0, y1 = t[k - 1], t[k], ip[k - 1], ip[k]
        return Relaxation(RELAXED, float(t0 + (y0 - threshold) * (t1 - t0) / (y0 - y1)))
    if traj.metadata.get("stop") == "steady":
        return Relaxation(DID_NOT_RELAX)
    n = len(ip)
    if n >= 10:
        tail = ip[-max(2, n // 10):]
        if tail.max() - tail.min() < plateau_tol:
            return Relaxation(DID_NOT_RELAX)
    return Relaxation(INCONCLUSIVE)


def default_t_end(params: SystemParams, scheme: Optional[LevelScheme] = None,
                  factor: float = 200.0, fallback: float = 1e5):
    """``factor / G_eff`` with G_eff from the two-ground-state reduction.

    Other level schemes have no closed-form pumping rate; they get
    ``fallback`` (in 1/kappa).
    """
    if scheme is not None and (scheme.F, scheme.Fp) != (Fraction(1, 2), Fraction(3, 2)):
        return fallback
    try:
        rate = derive_two_level(params).gamma_eff
    except SingularParametersError:
        return fallback
    if not rate > 0 or not math.isfinite(rate):
        return fallback
    return factor / rate


def stretched_populations(scheme: LevelScheme, sign=1):
    P = np.zeros(scheme.n_ground)
    P[-1 if sign > 0 else 0] = 1.0
    return P


def broken_fixed_point_detector(model, N_t, scheme, threshold, every=50.0, rate_gate=1e-6, radius=1e-2):
    """Stop condition for :func:`integrate` that fires once the state sits
    next to a linearly stable fixed point with |I_p| >= threshold.

    A small rate alone is not enough near a saddle-node, where the flow
    crawls past the ghost of the vanished fixed point for a long time.
    Newton refinement finds no nearby stationary point in that case.
    """
    last = [-math.inf]
    found = []

    def check(t, y):
        if t - last[0] < every:
            return False
        if _observable_rates(model, y, N_t) > rate_gate:
            return False
        last[0] = t
        fp = refine_fixed_point(model, y, N_t)
        if fp is None or not fp.stable or np.max(np.abs(fp.y - y)) > radius:
            return False
        if abs(imbalance_of(fp.y, scheme)) < threshold:
            return False
        found.append((t, fp))
        return True

    check.found = found
    return check


def classify_run(params: SystemParams, scheme: LevelScheme, populations=None, t_end=None,
                 threshold=0.1, options=None, extend=True) -> tuple:
    """Integrate from ``populations`` (default: stretched P_{+F} = 1) until
    |I_p| < threshold (relaxed) or the state is next to a stable fixed point
    with |I_p| >= threshold (did not relax).

    Returns (Relaxation, t_end_used, Trajectory).  A run still undecided at
    ``t_end`` is repeated once with 4x the time; after that it is
    ``inconclusive``.
    """
    if populations is None:
        populations = stretched_populations(scheme)
    if t_end is None:
        t_end = default_t_end(params, scheme)
    state = MeanFieldState.from_populations(scheme, populations)
    y0 = state.to_vector()
    if abs(imbalance_of(y0, scheme)) < threshold:
        return Relaxation(RELAXED, 0.0), t_end, None
    model = get_model(scheme, params)
    detector = broken_fixed_point_detector(model, params.N, scheme, threshold)
    event = lambda y: abs(imbalance_of(y, scheme)) - threshold
    tr = integrate(state, params, scheme, None, t_end, options, n_samples=201,
                   stop_condition=detector, event=event, keep_rho=False)
    if tr.metadata["stop"] == "event":
        return Relaxation(RELAXED, tr.metadata["event_time"]), t_end, tr
    if tr.metadata["stop"] == "condition":
        tr.metadata["fixed_point_growth"] = detector.found[0][1].max_growth
        return Relaxation(DID_NOT_RELAX), t_end, tr
    if extend:
        return classify_run(params, scheme, populations, 4 * t_end, threshold, options, extend=False)
    return Relaxation(INCONCLUSIVE), t_end, tr


@dataclass
class ThresholdResult:
    delta_th: float
    bracket: tuple
    t_end: float
    resolution: float
    evaluations: list = field(default_factory=list)
    monotone: bool = True
    relaxing_side: str = "low"

    @property
    def kappa_units(self):
        return self.delta_th


def _classify_delta(args):
    template, scheme, delta, t_end, threshold, options, populations = args
    p = template.replace(delta_p=float(delta))
    rel, used, _ = classify_run(p, scheme, populations, t_end, threshold, options)
    return rel, used


def locate_threshold(template: SystemParams, scheme: LevelScheme, delta_bracket, resolution=1e-3,
                     t_end=None, threshold=0.1, options=None, populations=None) -> ThresholdResult:
    """Bisect in delta_p for the boundary between runs that relax and runs
    that keep |I_p| >= threshold.

    Starting state: fully stretched P_{+F} = 1 unless ``populations`` given.
    Raises :class:`InconclusiveError` when the bracket ends are classified
    alike (e.g. below the critical coupling) or a run stays undecided.
    """
    lo, hi = map(float, delta_bracket)
    if t_end is None:
        t_end = default_t_end(template.replace(delta_p=0.5 * (lo + hi)), scheme)
    evals = []

    def classify(d):
        rel, used = _classify_delta((template, scheme, d, t_end, threshold, options, populations))
        evals.append((d, rel.status, rel.tau))
        if rel.status == INCONCLUSIVE:
            raise InconclusiveError(f"run at delta_p={d} undecided after t_end={used:g}")
        return rel.relaxed

    r_lo, r_hi = classify(lo), classify(hi)
    if r_lo == r_hi:
        what = "relax" if r_lo else "do not relax"
        raise InconclusiveError(f"bracket ({lo}, {hi}) not classifiable: both ends {what} "
                                f"(lo: {evals[0][1]}, hi: {evals[1][1]})")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if classify(mid) == r_lo:
            lo = mid
        else:
            hi = mid
    ordered = sorted(evals)
    flags = [s == RELAXED for _, s, _ in ordered]
    changes = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
    return ThresholdResult(0.5 * (lo + hi), (lo, hi), t_end, resolution, ordered,
                           monotone=changes == 1, relaxing_side="low" if r_lo else "high")


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    stderr: float
    r2: float
    prefactor: float
    n: int


def fit_exponent(xs, ys, window=None, weights=None) -> PowerLawFit:
    """Least-squares slope of log|y| against log x.

    ``window=(xmin, xmax)`` selects the fitted range (default: the last
    decade, ``[max(x)/10, max(x)]``).  Optional ``weights`` apply to the
    log-log residuals.  Needs at least 8 points, all positive.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if window is None:
        xmax = np.nanmax(x)
        window = (xmax / 10.0, xmax)
    sel = (x >= window[0]) & (x <= window[1])
    x, y = x[sel], y[sel]
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)[sel]
    if len(x) < 8:
        raise ValueError(f"need >= 8 points in window, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("non-positive data in fit window")
    lx, ly = np.log(x), np.log(y)
    W = w.sum()
    mx, my = (w * lx).sum() / W, (w * ly).sum() / W
    sxx = (w * (lx - mx) ** 2).sum()
    slope = (w * (lx - mx) * (ly - my)).sum() / sxx
    icpt = my - slope * mx
    res = ly - (icpt + slope * lx)
    n = len(x)
    ss_res = (w * res ** 2).sum()
    ss_tot = (w * (ly - my) ** 2).sum()
    # a flat series has no variance to explain; rounding noise would give r2 ~ 0
    flat = ss_tot <= 1e-24 * max(1.0, (w * ly ** 2).sum())
    r2 = 1.0 if flat else 1.0 - ss_res / ss_tot
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else float("nan")
    return PowerLawFit(float(slope), float(stderr), float(r2), float(math.exp(icpt)), n)


# -- steady-state maps ---------------------------------------------------------

@dataclass
class CellResult:
    """One run of a sweep: inputs plus steady observables."""

    delta_p: float
    s: float
    Ip: float = float("nan")
    Ia: float = float("nan")
    tau: float = float("nan")
    flag: str = OK
    units: str = "kappa"
    t_end: float = float("nan")


def _steady_cell(args):
    template, scheme, delta, s, t_end, options = args
    p = template.replace(delta_p=float(delta))
    P0 = initial_state_line(s, scheme.n_ground)
    state = MeanFieldState.from_populations(scheme, P0)
    try:
        tr = integrate(state, p, scheme, None, t_end, options, n_samples=401,
                       stop_when_steady=True, keep_rho=False)
    except Exception:  # numerical failure is recorded per cell
        return CellResult(delta, s, flag=INVALID, t_end=t_end)
    rel = relaxation_time(tr)
    flag = OK if tr.metadata["stop"] == "steady" else NOT_CONVERGED
    if flag != OK:
        return CellResult(delta, s, flag=flag, t_end=t_end)
    return CellResult(delta, s, float(tr.Ip[-1]), float(tr.Ia[-1]),
                      rel.tau if rel.relaxed else math.inf, OK, "kappa", t_end)


def steady_map(template: SystemParams, scheme: LevelScheme, deltas, s_values, t_end=None,
               options=None, jobs=1) -> SweepResult:
    """Steady I_a, I_p over (delta_p, s) with initial states on the line
    through the stretched and uniform states."""
    if t_end is None:
        t_end = default_t_end(template.replace(delta_p=float(np.mean(deltas))), scheme)
    args = [(template, scheme, float(d), float(s), t_end, options) for d in deltas for s in s_values]
    cells = parallel_map(_steady_cell, args, jobs)
    return assemble_phase_map(cells, deltas=deltas, s_values=s_values,
                              metadata={"t_end": t_end, "F": str(scheme.F), "Fp": str(scheme.Fp),
                                        "g": template.g, "N": template.N})


def classify_imbalance(Ia, dead_band=DEAD_BAND):
    """-1, 0, +1 per cell using |I_a| < dead_band * max|I_a| as zero."""
    Ia = np.asarray(Ia, dtype=float)
    scale = np.nanmax(np.abs(Ia)) if np.any(np.isfinite(Ia)) else 0.0
    cls = np.sign(Ia)
    cls[np.abs(Ia) < dead_band * scale] = 0.0
    if scale == 0:
        cls[np.isfinite(Ia)] = 0.0
    return cls


def assemble_phase_map(cells, deltas=None, s_values=None, metadata=None,
                       dead_band=DEAD_BAND) -> SweepResult:
    """Collect per-run results into a (delta_p, s) map of steady I_a, I_p,
    tau and the -1/0/+1 classification of I_a."""
    cells = list(cells)
    units = {c.units for c in cells}
    if len(units) > 1:
        raise ValueError(f"mixed units in batch: {sorted(units)}")
    if deltas is None:
        deltas = sorted({c.delta_p for c in cells})
    if s_values is None:
        s_values = sorted({c.s for c in cells})
    deltas = [float(d) for d in deltas]
    s_values = [float(s) for s in s_values]
    shape = (len(deltas), len(s_values))
    Ia = np.full(shape, np.nan)
    Ip = np.full(shape, np.nan)
    tau = np.full(shape, np.nan)
    flags = np.full(shape, INVALID, dtype=object)
    di = {d: i for i, d in enumerate(deltas)}
    si = {s: j for j, s in enumerate(s_values)}
    for c in cells:
        i, j = di[float(c.delta_p)], si[float(c.s)]
        flags[i, j] = c.flag
        if c.flag == OK:
            Ia[i, j], Ip[i, j], tau[i, j] = c.Ia, c.Ip, c.tau
    cls = classify_imbalance(Ia, dead_band)
    meta = dict(metadata or {})
    meta["dead_band"] = dead_band
    unit = units.pop() if units else "kappa"
    return SweepResult(
        axes=[Axis("delta_p", deltas, unit), Axis("s", s_values, "1")],
        values={"Ia": Ia, "Ip": Ip, "tau": tau, "class": cls},
        flags=flags,
        metadata=meta,
    )


def tristable_columns(result: SweepResult):
    """Detunings whose column contains all three classes -1, 0, +1."""
    cls = result.values["class"]
    out = []
    for i, d in enumerate(result.axis("delta_p").values):
        vals = set(cls[i][np.isfinite(cls[i])].tolist())
        if {-1.0, 0.0, 1.0} <= vals:
            out.append(float(d))
    return out


def relaxation_scan(template: SystemParams, scheme: LevelScheme, deltas, t_end=None,
                    threshold=0.1, options=None, jobs=1):
    """Relaxation times from the stretched state at each detuning."""
    args = [(template, scheme, float(d), t_end, threshold, options, None) for d in deltas]
    out = parallel_map(_classify_delta, args, jobs)
    return [r for r, _ in out]


# -- exponents of the two-ground-state model ---------------------------------------

def critical_point(g, template: SystemParams, bracket=None):
    """Parameters on the alpha = 4 contour at collective coupling ``g``
    (the crossing on the normal-mode side delta_p > 0 with smallest delta_p
    in ``bracket``, default (0, 3 g))."""
    from scipy.optimize import brentq

    base = template.with_collective_coupling(g)
    lo, hi = bracket if bracket is not None else (1e-6, 3 * g)
    grid = np.linspace(lo, hi, 2001)
    alphas = np.array([derive_two_level(base.replace(delta_p=d)).alpha for d in grid])
    s = np.sign(alphas - ALPHA_C)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if not len(idx):
        raise InconclusiveError(f"alpha never reaches 4 at g={g}")
    i = idx[0]
    f = lambda d: derive_two_level(base.replace(delta_p=d)).alpha - ALPHA_C
    d = brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return base.replace(delta_p=d)


@dataclass(frozen=True)
class ExponentReport:
    name: str
    fit: PowerLawFit
    expected: float
    detail: dict = field(default_factory=dict)


def order_parameter_exponent(lo=1e-6, hi=1e-2, n=41) -> ExponentReport:
    """Slope of |I_p| against alpha - 4 from the exact steady states."""
    x = np.geomspace(lo, hi, n)
    y = np.array([imbalance_steady(ALPHA_C + e)[0] for e in x])
    return ExponentReport("beta", fit_exponent(x, y, (lo, hi)), 0.5)


def relaxation_exponent(params: SystemParams, dP0=0.05, window=(1e4, 1e6), n=200) -> ExponentReport:
    """Late-time decay of P_{+1/2} - 1/2 at alpha = 4.

    ``window`` is in units of 1/G_eff.  Reports the fitted slope (expected
    -1/2) and the measured prefactor relative to :func:`relaxation_law` and
    to :func:`relaxation_asymptote`.
    """
    dv = derive_two_level(params)
    if not dv.gamma_eff > 0:
        raise SingularParametersError("relaxation exponent needs a nonzero pump (eta_plus > 0)")
    t = np.geomspace(window[0], window[1], n) / dv.gamma_eff
    tr = integrate_rate(0.5 + dP0, dv, t[-1], tol=1e-12, t_eval=np.concatenate([[0.0], t]))
    dP = tr.populations[1:, 1] - 0.5
    fit = fit_exponent(t * dv.gamma_eff, dP, window)
    ratio = float(np.median(dP / relaxation_law(dv.beta_nl, dv.gamma_eff, t)))
    ratio_exact = float(np.median(dP / relaxation_asymptote(dv.beta_nl, dv.gamma_eff, t)))
    return ExponentReport("zeta", fit, -0.5, {"prefactor_ratio": ratio,
                                              "prefactor_ratio_asymptote": ratio_exact,
                                              "alpha": dv.alpha,
                                              "beta_nl": dv.beta_nl, "gamma_eff": dv.gamma_eff})


def field_exponent(params: SystemParams, lo=1e-6, hi=1e-3, n=31) -> ExponentReport:
    """Steady shift of P_{+1/2} against the pump imbalance at alpha = 4."""
    dv = derive_two_level(params)
    de = np.geomspace(lo, hi, n)
    dP = np.array([unbalanced_steady(dv, e) - 0.5 for e in de])
    fit = fit_exponent(de, -dP, (lo, hi))
    closed = unbalanced_shift(de, dv.beta_nl)
    rel = float(np.max(np.abs(dP / closed - 1)))
    return ExponentReport("delta", fit, 1.0 / 3.0, {"max_rel_dev_closed_form": rel,
                                                    "alpha": dv.alpha, "beta_nl": dv.beta_nl})


# -- protocol phenomenology --------------------------------------------------------

@dataclass(frozen=True)
class MergeSeparate:
    merged_at: Optional[float]
    separated_at: Optional[float]
    max_split_after_merge: float

    @property
    def merge_then_separate(self):
        return self.merged_at is not None and self.separated_at is not None


def relative_split(traj: Trajectory):
    """|I_a| / (|a+|^2 + |a-|^2), zero where both powers vanish."""
    tot = traj.power_plus + traj.power_minus
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.abs(traj.Ia) / tot
    return np.where(tot > 0, r, 0.0)


def merge_then_separate(traj: Trajectory, after=None, merge_tol=1e-3, separate_tol=0.05) -> MergeSeparate:
    """First time after ``after`` where the two transmitted powers agree to
    ``merge_tol`` (relative), and the first later time where they differ by
    more than ``separate_tol``."""
    r = relative_split(traj)
    t = traj.times
    sel = t > (t[0] if after is None else after)
    idx = np.nonzero(sel & (r < merge_tol))[0]
    if not len(idx):
        return MergeSeparate(None, None, float("nan"))
    k = idx[0]
    later = r[k:]
    sep = np.nonzero(later > separate_tol)[0]
    return MergeSeparate(float(t[k]), float(t[k + sep[0]]) if len(sep) else None, float(later.max()))


def final_split_sign(traj: Trajectory, dead_band=DEAD_BAND):
    """-1, 0 or +1 for the last sample of I_a, with the dead band taken
    relative to the largest |I_a| along the run."""
    Ia = np.asarray(traj.Ia, dtype=float)
    scale = np.max(np.abs(Ia))
    if scale == 0 or abs(Ia[-1]) < dead_band * scale:
        return 0
    return int(np.sign(Ia[-1]))
