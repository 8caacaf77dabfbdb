"""Mean-field dynamics of two cavity modes and N identical multi-level atoms.

The cavity amplitudes a_+, a_- are c-numbers and all atoms share one
single-atom density matrix rho over ground (+) excited Zeeman levels:

    da_l/dt  = (i delta_p - kappa) a_l + eta_l + g0 N(t) Tr(rho K_l)
    drho/dt  = -i [H_sc(a), rho] + Gamma sum beta_m^{m'} D[|m><m'|] rho
    H_sc     = -delta_p P_exc + i g0 sum_l (a_l^* K_l - a_l K_l^dag)

with K_l = sum_m c_m^{m+l} |m><m+l|.  Times are in 1/kappa.

rho is stored in a real parametrization of Hermitian matrices (diagonal,
then real and imaginary parts of the upper triangle), so Hermiticity holds
exactly.  The right-hand side is bilinear in (a, rho); all superoperators
are precomputed and the Jacobian is analytic.  The default integrator is
Radau: the normal-mode transients are fast, lightly damped oscillations,
and an L-stable implicit method steps over them once they have decayed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import BDF, DOP853, LSODA, RK45, Radau
from scipy.optimize import brentq
from scipy.special import expit

from .analytic import SystemParams
from .errors import (
    InvariantViolationError,
    NumericalBlowupError,
    StiffnessError,
)
from .levels import LevelScheme
from .results import Trajectory

METHODS = {"BDF": BDF, "LSODA": LSODA, "Radau": Radau, "RK45": RK45, "DOP853": DOP853}

TRACE_RENORM_MAX = 1e-8
TRACE_ABORT = 1e-6
STEADY_TOL = 1e-9
STEADY_WINDOW = 10.0


# -- Hermitian <-> real vector ------------------------------------------------

def _triu(d):
    return np.triu_indices(d, 1)


def herm_to_vec(rho):
    d = rho.shape[0]
    iu = _triu(d)
    return np.concatenate([rho.diagonal().real, rho[iu].real, rho[iu].imag])


def vec_to_herm(r, d):
    iu = _triu(d)
    npair = len(iu[0])
    rho = np.zeros((d, d), dtype=complex)
    z = r[d:d + npair] + 1j * r[d + npair:]
    rho[iu] = z
    rho = rho + rho.conj().T
    rho[np.diag_indices(d)] = r[:d]
    return rho


def _herm_basis(d):
    """Hermitian basis E_k with rho = sum_k r_k E_k for r = herm_to_vec(rho)."""
    iu = _triu(d)
    basis = []
    for i in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[i, i] = 1
        basis.append(E)
    for i, j in zip(*iu):
        E = np.zeros((d, d), dtype=complex)
        E[i, j] = E[j, i] = 1
        basis.append(E)
    for i, j in zip(*iu):
        E = np.zeros((d, d), dtype=complex)
        E[i, j] = 1j
        E[j, i] = -1j
        basis.append(E)
    return basis


def _superop(fn, basis):
    return np.column_stack([herm_to_vec(fn(E)) for E in basis])


# -- state ---------------------------------------------------------------------

@dataclass
class MeanFieldState:
    a_plus: complex
    a_minus: complex
    rho: np.ndarray

    @classmethod
    def from_populations(cls, scheme: LevelScheme, populations, a_plus=0j, a_minus=0j):
        """Diagonal ground-state rho with the given P_m (ascending m)."""
        P = np.asarray(populations, dtype=float)
        if P.shape != (scheme.n_ground,):
            raise ValueError(f"need {scheme.n_ground} ground populations")
        if np.any(P < 0) or abs(P.sum() - 1) > 1e-9:
            raise ValueError("populations must be non-negative and sum to 1")
        rho = np.zeros((scheme.dim, scheme.dim), dtype=complex)
        rho[np.arange(scheme.n_ground), np.arange(scheme.n_ground)] = P
        return cls(complex(a_plus), complex(a_minus), rho)

    def to_vector(self):
        a = np.array([self.a_plus.real, self.a_plus.imag, self.a_minus.real, self.a_minus.imag])
        return np.concatenate([a, herm_to_vec(self.rho)])

    @classmethod
    def from_vector(cls, y, d):
        return cls(complex(y[0], y[1]), complex(y[2], y[3]), vec_to_herm(y[4:], d))

    def populations(self, scheme):
        return self.rho.diagonal().real[: scheme.n_ground].copy()


# -- atom loss -----------------------------------------------------------------

@dataclass(frozen=True)
class AtomLossModel:
    """Sigmoid atom number N(t) = N0 [1 - (1 + exp(-(t - t0)/dt))^-1]; times in ms."""

    enabled: bool = False
    N0: float = 0.0
    t0: float = 0.0
    dt: float = 1.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("sigmoid width dt must be positive")


def sigmoid_atom_number(t_ms, model: AtomLossModel):
    t = np.asarray(t_ms, dtype=float)
    out = model.N0 * expit((model.t0 - t) / model.dt)
    return float(out) if out.ndim == 0 else out


def kappa_time_to_ms(t, kappa_MHz):
    """Convert times in 1/kappa to ms, with kappa = 2 pi * kappa_MHz MHz."""
    return np.asarray(t) / (2 * math.pi * kappa_MHz * 1e3)


def ms_to_kappa_time(t_ms, kappa_MHz):
    return np.asarray(t_ms) * (2 * math.pi * kappa_MHz * 1e3)


def atom_number_function(params: SystemParams, loss: Optional[AtomLossModel]) -> Callable:
    """N(t) with t in 1/kappa."""
    if loss is None or not loss.enabled:
        N = params.N
        return lambda t: N
    if params.kappa_MHz is None:
        raise ValueError("atom loss is specified in ms; set params.kappa_MHz")
    scale = 1.0 / (2 * math.pi * params.kappa_MHz * 1e3)
    return lambda t: sigmoid_atom_number(t * scale, loss)


# -- equations of motion -------------------------------------------------------

class MeanFieldModel:
    """Precomputed linear pieces of the mean-field equations for one
    (scheme, params) pair."""

    def __init__(self, scheme: LevelScheme, params: SystemParams):
        self.scheme = scheme
        self.params = params
        d = scheme.dim
        self.d = d
        basis = _herm_basis(d)
        ng = scheme.n_ground
        Pe = np.zeros((d, d))
        Pe[ng:, ng:] = np.eye(scheme.n_excited)
        H0 = -params.delta_p * Pe
        jumps = scheme.jump_operators()
        G = params.Gamma

        def L0(rho):
            out = -1j * (H0 @ rho - rho @ H0)
            for b, L in jumps:
                LdL = L.T @ L
                out += G * b * (L @ rho @ L.T - 0.5 * (LdL @ rho + rho @ LdL))
            return out

        self.M0 = _superop(L0, basis)
        g0 = params.g0
        self.Mx, self.My, self.T = [], [], []
        for l in (1, -1):
            K = scheme.lowering(l)
            Hx = 1j * g0 * (K - K.T)
            Hy = g0 * (K + K.T)
            self.Mx.append(_superop(lambda r, H=Hx: -1j * (H @ r - r @ H), basis))
            self.My.append(_superop(lambda r, H=Hy: -1j * (H @ r - r @ H), basis))
            self.T.append(np.array([np.trace(E @ K) for E in basis]))
        self.Tre = [t.real for t in self.T]
        self.Tim = [t.imag for t in self.T]
        k, dp = params.kappa, params.delta_p
        self.A = np.array([[-k, -dp], [dp, -k]])
        self.eta = [params.eta_plus, params.eta_minus]
        self.stack = np.vstack([self.M0, self.Mx[0], self.My[0], self.Mx[1], self.My[1]])
        self.n = d * d

    def rhs(self, t, y, N_t):
        a = y[:4]
        r = y[4:]
        parts = (self.stack @ r).reshape(5, self.n)
        dy = np.empty_like(y)
        dy[4:] = parts[0] + a[0] * parts[1] + a[1] * parts[2] + a[2] * parts[3] + a[3] * parts[4]
        g0N = self.params.g0 * N_t
        for i in range(2):
            x = a[2 * i:2 * i + 2]
            dy[2 * i:2 * i + 2] = self.A @ x
            dy[2 * i] += self.eta[i] + g0N * (self.Tre[i] @ r)
            dy[2 * i + 1] += g0N * (self.Tim[i] @ r)
        return dy

    def jac(self, t, y, N_t):
        a = y[:4]
        r = y[4:]
        n = len(y)
        J = np.zeros((n, n))
        J[4:, 4:] = self.M0 + a[0] * self.Mx[0] + a[1] * self.My[0] + a[2] * self.Mx[1] + a[3] * self.My[1]
        J[4:, 0] = self.Mx[0] @ r
        J[4:, 1] = self.My[0] @ r
        J[4:, 2] = self.Mx[1] @ r
        J[4:, 3] = self.My[1] @ r
        g0N = self.params.g0 * N_t
        for i in range(2):
            J[2 * i:2 * i + 2, 2 * i:2 * i + 2] = self.A
            J[2 * i, 4:] = g0N * self.Tre[i]
            J[2 * i + 1, 4:] = g0N * self.Tim[i]
        return J


_model_cache = {}


def get_model(scheme, params) -> MeanFieldModel:
    key = (scheme.F, scheme.Fp, id(scheme), params.g0, params.kappa, params.Gamma,
           params.delta_p, params.eta_plus, params.eta_minus)
    m = _model_cache.get(key)
    if m is None or m.scheme is not scheme:
        if len(_model_cache) > 64:
            _model_cache.clear()
        m = _model_cache[key] = MeanFieldModel(scheme, params)
    return m


def eom_rhs(state: MeanFieldState, params: SystemParams, scheme: LevelScheme, N_t=None) -> MeanFieldState:
    """Time derivative of ``state`` (returned as a MeanFieldState of rates)."""
    if N_t is None:
        N_t = params.N
    model = get_model(scheme, params)
    dy = model.rhs(0.0, state.to_vector(), N_t)
    if not np.all(np.isfinite(dy)):
        raise NumericalBlowupError("non-finite derivative", state=state)
    return MeanFieldState.from_vector(dy, scheme.dim)


# -- integration ---------------------------------------------------------------

@dataclass
class IntegrationOptions:
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float = np.inf
    method: str = "Radau"
    first_step: Optional[float] = None


@dataclass
class _Recorder:
    d: int
    ng: int
    t: list = field(default_factory=list)
    y: list = field(default_factory=list)
    N: list = field(default_factory=list)


def _observable_rates(model, y, N_t):
    dy = model.rhs(0.0, y, N_t)
    ng = model.scheme.n_ground
    dP = dy[4:4 + ng]
    ap = complex(y[0], y[1]); am = complex(y[2], y[3])
    dap = complex(dy[0], dy[1]); dam = complex(dy[2], dy[3])
    dpow = [2 * (ap.conjugate() * dap).real, 2 * (am.conjugate() * dam).real]
    return np.max(np.abs(np.concatenate([dP, dpow])))


def integrate(initial: MeanFieldState, params: SystemParams, scheme: LevelScheme,
              loss: Optional[AtomLossModel] = None, t_end: float = 1000.0,
              options: Optional[IntegrationOptions] = None, t_eval=None, n_samples=401,
              t_start: float = 0.0, stop_when_steady=False, stop_condition=None,
              event=None, keep_rho=True) -> Trajectory:
    """Integrate the mean-field equations from ``t_start`` to ``t_end`` (1/kappa).

    Samples are taken on ``t_eval`` (default: ``n_samples`` uniform points).
    ``stop_when_steady`` ends the run once the max-norm of the rates of all
    populations and intracavity powers stays below 1e-9 kappa for a window of
    10/kappa.  ``stop_condition(t, y, traj_so_far)`` may end the run early as
    well.  ``event(y)`` is a scalar function of the state vector; its first
    sign change is located on the dense output, stored in
    ``metadata["event_time"]`` and ends the run.  The stop reason is stored
    in ``metadata["stop"]``.

    Trace drift of the sampled rho is corrected (and logged) when below
    1e-8, logged as a warning up to 1e-6, and aborts above that.
    """
    opts = options or IntegrationOptions()
    if t_end <= t_start:
        raise ValueError("t_end must exceed the start time")
    model = get_model(scheme, params)
    N_of_t = atom_number_function(params, loss)
    if t_eval is None:
        t_eval = np.linspace(t_start, t_end, n_samples)
    t_eval = np.asarray(t_eval, dtype=float)

    def fun(t, y):
        return model.rhs(t, y, N_of_t(t))

    def jac(t, y):
        return model.jac(t, y, N_of_t(t))

    y0 = initial.to_vector()
    kw = dict(rtol=opts.rtol, atol=opts.atol, max_step=opts.max_step)
    if opts.first_step:
        kw["first_step"] = opts.first_step
    solver_cls = METHODS[opts.method]
    if opts.method in ("BDF", "LSODA", "Radau"):
        kw["jac"] = jac
    solver = solver_cls(fun, t_start, y0, t_end, **kw)

    times, ys = [], []
    idx = 0
    while idx < len(t_eval) and t_eval[idx] <= t_start:
        times.append(t_eval[idx]); ys.append(y0.copy()); idx += 1
    stop = "t_end"
    steady_since = None
    last_valid = (t_start, y0)
    event_time = None
    if event is not None:
        ev_prev = event(y0)
        if ev_prev == 0:
            event_time = t_start
            stop = "event"
    while solver.status == "running" and event_time is None:
        msg = solver.step()
        if solver.status == "failed":
            raise StiffnessError(f"integration failed at t={solver.t:.6g}: {msg}",
                                 t=last_valid[0], state=MeanFieldState.from_vector(last_valid[1], model.d))
        if not np.all(np.isfinite(solver.y)):
            raise NumericalBlowupError(f"non-finite state at t={solver.t:.6g}", t=last_valid[0],
                                       state=MeanFieldState.from_vector(last_valid[1], model.d))
        t_prev = last_valid[0]
        last_valid = (solver.t, solver.y.copy())
        if event is not None:
            ev = event(solver.y)
            if ev == 0 or (ev > 0) != (ev_prev > 0):
                dense = solver.dense_output()
                event_time = solver.t if ev == 0 else brentq(
                    lambda tt: event(dense(tt)), t_prev, solver.t, xtol=1e-10 * max(1.0, solver.t))
                while idx < len(t_eval) and t_eval[idx] < event_time:
                    times.append(t_eval[idx]); ys.append(dense(t_eval[idx])); idx += 1
                times.append(event_time); ys.append(dense(event_time))
                stop = "event"
                break
            ev_prev = ev
        if idx < len(t_eval) and t_eval[idx] <= solver.t:
            dense = solver.dense_output()
            while idx < len(t_eval) and t_eval[idx] <= solver.t:
                times.append(t_eval[idx]); ys.append(dense(t_eval[idx])); idx += 1
        if stop_when_steady:
            rate = _observable_rates(model, solver.y, N_of_t(solver.t))
            if rate < STEADY_TOL * params.kappa:
                if steady_since is None:
                    steady_since = solver.t
                elif solver.t - steady_since >= STEADY_WINDOW / params.kappa:
                    stop = "steady"
                    break
            else:
                steady_since = None
        if stop_condition is not None and stop_condition(solver.t, solver.y):
            stop = "condition"
            break
    if stop not in ("t_end", "event") and (not times or times[-1] < solver.t):
        times.append(solver.t); ys.append(solver.y.copy())

    traj = _build_trajectory(np.array(times), np.array(ys), model, N_of_t, keep_rho)
    traj.metadata.update({"stop": stop, "t_final": float(times[-1]) if times else t_start,
                          "method": opts.method, "rtol": opts.rtol, "atol": opts.atol,
                          "event_time": event_time})
    return traj


def _build_trajectory(times, ys, model, N_of_t, keep_rho):
    scheme = model.scheme
    d, ng = model.d, scheme.n_ground
    n = len(times)
    rhos = np.array([vec_to_herm(y[4:], d) for y in ys]) if n else np.zeros((0, d, d))
    tr = np.einsum("kii->k", rhos).real if n else np.zeros(0)
    drift = np.abs(tr - 1)
    if n and drift.max() > TRACE_ABORT:
        k = int(np.argmax(drift))
        raise InvariantViolationError(f"trace drift {drift[k]:.3g} at t={times[k]:.6g}")
    fix = drift < TRACE_RENORM_MAX
    if n:
        rhos[fix] /= tr[fix][:, None, None]
    pops = rhos[:, np.arange(ng), np.arange(ng)].real if n else np.zeros((0, ng))
    exc = rhos[:, np.arange(ng, d), np.arange(ng, d)].real.sum(axis=1) if n else np.zeros(0)
    ap = ys[:, 0] + 1j * ys[:, 1] if n else np.zeros(0, complex)
    am = ys[:, 2] + 1j * ys[:, 3] if n else np.zeros(0, complex)
    Nt = np.array([N_of_t(t) for t in times], dtype=float)
    min_eig = float(min(np.linalg.eigvalsh(r).min() for r in rhos)) if n else 0.0
    herm = float(max(np.abs(r - r.conj().T).max() for r in rhos)) if n else 0.0
    meta = {
        "trace_correction_max": float(drift[fix].max()) if fix.any() else 0.0,
        "trace_drift_warning": float(drift[~fix].max()) if (~fix).any() else 0.0,
        "min_eigenvalue": min_eig,
        "hermiticity_error": herm,
        "max_excited_population": float(exc.max()) if n else 0.0,
        "F": str(scheme.F), "Fp": str(scheme.Fp),
    }
    traj = Trajectory(times, pops, scheme.ground_levels, excited_population=exc,
                      a_plus=ap, a_minus=am, atom_number=Nt, metadata=meta)
    if keep_rho:
        traj.rho = rhos
    return traj


def final_state(traj: Trajectory) -> MeanFieldState:
    if traj.rho is None:
        raise ValueError("trajectory was integrated with keep_rho=False")
    return MeanFieldState(complex(traj.a_plus[-1]), complex(traj.a_minus[-1]), traj.rho[-1].copy())


def imbalance_of(y, scheme: LevelScheme):
    """I_p of a raw state vector."""
    ng = scheme.n_ground
    return float(y[4:4 + ng] @ scheme.stretched_sign())


# -- fixed points --------------------------------------------------------------

@dataclass(frozen=True)
class FixedPoint:
    y: np.ndarray
    residual: float
    max_growth: float  # largest real part of the trace-preserving spectrum

    @property
    def stable(self):
        return self.max_growth < 0


def _trace_row(d):
    row = np.zeros(4 + d * d)
    row[4:4 + d] = 1.0
    return row


def refine_fixed_point(model: MeanFieldModel, y, N_t, tol=1e-12, maxiter=50) -> Optional[FixedPoint]:
    """Newton refinement of a stationary point near ``y``.

    The trace-redundant equation is replaced by Tr rho = 1.  Returns ``None``
    when Newton does not converge.
    """
    y = np.array(y, dtype=float)
    tr = _trace_row(model.d)
    k = 4  # first diagonal entry: its rate equation is implied by the others
    for _ in range(maxiter):
        F = model.rhs(0.0, y, N_t)
        F[k] = tr @ y - 1.0
        res = float(np.max(np.abs(F)))
        if not np.isfinite(res):
            return None
        J = model.jac(0.0, y, N_t)
        J[k] = tr
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        y = y + step
        if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(y))):
            break
    else:
        return None
    res = float(np.max(np.abs(model.rhs(0.0, y, N_t))))
    return FixedPoint(y, res, growth_rate(model, y, N_t))


def growth_rate(model: MeanFieldModel, y, N_t):
    """Largest real part of the Jacobian spectrum on the Tr rho = const
    subspace (the conserved trace contributes a spurious zero otherwise)."""
    tr = _trace_row(model.d)
    # orthonormal basis of the complement of the trace direction
    q, _ = np.linalg.qr(np.column_stack([tr / np.linalg.norm(tr), np.eye(len(tr))]))
    Q = q[:, 1:len(tr)]
    J = model.jac(0.0, y, N_t)
    return float(np.max(np.linalg.eigvals(Q.T @ J @ Q).real))


# -- Z2 mirror -----------------------------------------------------------------

def _mirror_gauge(scheme):
    """Permutation m -> -m and the diagonal sign gauge that maps the mirrored
    K_+ onto K_-.  Condon-Shortley symmetry gives a global (-1)^(F+1-F') on
    the excited manifold."""
    perm = scheme.mirror_permutation()
    s = -1.0 if (scheme.F + 1 - scheme.Fp) % 2 else 1.0
    sign = np.ones(scheme.dim)
    sign[scheme.n_ground:] = s
    Kp_m = scheme.lowering(1)[np.ix_(perm, perm)]
    if not np.allclose(Kp_m, np.outer(sign, sign) * scheme.lowering(-1), atol=1e-14):
        raise ValueError("level scheme is not mirror symmetric")
    return perm, sign


def mirror_state(state: MeanFieldState, scheme: LevelScheme) -> MeanFieldState:
    """Apply m -> -m, a_+ <-> a_- to a state."""
    perm, sign = _mirror_gauge(scheme)
    rho = state.rho[np.ix_(perm, perm)] * np.outer(sign, sign)
    return MeanFieldState(state.a_minus, state.a_plus, rho)


def mirror_params(params: SystemParams) -> SystemParams:
    return params.replace(eta_plus=params.eta_minus, eta_minus=params.eta_plus)


# -- protocols -----------------------------------------------------------------

def initial_state_line(s, n_ground=5):
    """Ground populations along the line joining the stretched states through
    the uniform state: s=-1 -> P_{-F}=1, s=0 -> uniform, s=+1 -> P_{+F}=1,
    linear in between.  Ordered by ascending m."""
    if not -1.0 <= s <= 1.0:
        raise ValueError("s must lie in [-1, 1]")
    u = np.full(n_ground, 1.0 / n_ground)
    e = np.zeros(n_ground)
    e[-1 if s >= 0 else 0] = 1.0
    P = (1 - abs(s)) * u + abs(s) * e
    return P / P.sum()


@dataclass
class ProtocolConfig:
    """Prepump with one mode, then pump both modes equally.

    Times are in 1/kappa.  ``populations`` are the ground populations at
    ``start_time`` (ascending m); the prepump runs from there and the whole
    run ends at ``total_duration`` measured from t = 0, which is also the
    origin of the atom-loss clock.  ``eta`` is the common pump rate of both
    phases.
    """

    params: SystemParams
    scheme: LevelScheme
    populations: np.ndarray
    prepump_mode: int = 1
    prepump_duration: float = 0.0
    total_duration: float = 1000.0
    eta: Optional[float] = None
    loss: Optional[AtomLossModel] = None
    options: IntegrationOptions = field(default_factory=IntegrationOptions)
    n_samples: int = 401
    start_time: float = 0.0

    def __post_init__(self):
        if self.prepump_mode not in (1, -1):
            raise ValueError("prepump_mode must be +1 or -1")
        if not (self.start_time >= 0 and self.prepump_duration >= 0
                and self.start_time + self.prepump_duration < self.total_duration):
            raise ValueError("need 0 <= start_time + prepump_duration < total_duration")


def run_protocol(config: ProtocolConfig) -> Trajectory:
    """Two-phase run: one pump on for ``prepump_duration``, then both."""
    p = config.params
    eta = config.eta if config.eta is not None else max(p.eta_plus, p.eta_minus)
    state = MeanFieldState.from_populations(config.scheme, config.populations)
    T = config.total_duration
    t0 = config.start_time
    grid = np.linspace(t0, T, config.n_samples)
    t_pre = t0 + config.prepump_duration
    pieces = []
    if t_pre > t0:
        p1 = p.replace(eta_plus=eta if config.prepump_mode == 1 else 0.0,
                       eta_minus=eta if config.prepump_mode == -1 else 0.0)
        g1 = np.concatenate([grid[grid < t_pre], [t_pre]])
        tr1 = integrate(state, p1, config.scheme, config.loss, t_pre, config.options, t_eval=g1,
                        t_start=t0)
        state = final_state(tr1)
        pieces.append(tr1)
    p2 = p.replace(eta_plus=eta, eta_minus=eta)
    g2 = np.concatenate([[t_pre], grid[grid > t_pre]])
    tr2 = integrate(state, p2, config.scheme, config.loss, T, config.options, t_eval=g2, t_start=t_pre)
    if pieces:
        tr = concat_trajectories(pieces[0], tr2)
    else:
        tr = tr2
    tr.metadata.update({"phase_boundary": t_pre, "prepump_mode": config.prepump_mode, "eta": eta})
    return tr


def concat_trajectories(first: Trajectory, second: Trajectory) -> Trajectory:
    """Join two runs, dropping the duplicated boundary sample of ``second``."""
    keep = second.times > first.times[-1]

    def cat(x, y):
        if x is None or y is None:
            return None
        return np.concatenate([x, y[keep]])

    out = Trajectory(
        cat(first.times, second.times), cat(first.populations, second.populations),
        first.ground_levels, cat(first.excited_population, second.excited_population),
        cat(first.a_plus, second.a_plus), cat(first.a_minus, second.a_minus),
        cat(first.atom_number, second.atom_number), first.time_unit,
    )
    meta = dict(second.metadata)
    for k in ("trace_correction_max", "trace_drift_warning", "hermiticity_error", "max_excited_population"):
        meta[k] = max(first.metadata.get(k, 0.0), second.metadata.get(k, 0.0))
    meta["min_eigenvalue"] = min(first.metadata.get("min_eigenvalue", 0.0),
                                 second.metadata.get("min_eigenvalue", 0.0))
    out.metadata = meta
    if first.rho is not None and second.rho is not None:
        out.rho = np.concatenate([first.rho, second.rho[keep]])
    return out
