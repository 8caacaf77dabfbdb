"""Exact master-equation evolution for one or two atoms in two truncated
Fock spaces.  Used to check the mean-field equations term by term.

Basis ordering: mode +, mode -, atom 1, atom 2 (Kronecker products in that
order).  The Liouvillian is assembled as a sparse matrix acting on the
column-stacked density matrix, vec(A rho B) = (B^T kron A) vec(rho).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply, spsolve

from .analytic import SystemParams
from .errors import CutoffSaturationError, InvariantViolationError
from .levels import LevelScheme
from .meanfield import IntegrationOptions, MeanFieldState, integrate

MAX_DIM = 20_000
MAX_CUTOFF = 4
SATURATION_TOL = 1e-6


def _kron(*ops):
    return reduce(lambda A, B: sp.kron(A, B, format="csr"), ops)


def _destroy(n):
    return sp.diags(np.sqrt(np.arange(1, n)), 1, format="csr")


@dataclass
class ExactModel:
    """Two cavity modes with Fock states 0..photon_cutoff and ``n_atoms``
    atoms of the given level scheme.  ``params.N`` is ignored."""

    scheme: LevelScheme
    params: SystemParams
    n_atoms: int = 1
    photon_cutoff: int = 3
    allow_large_cutoff: bool = field(default=False, repr=False)

    def __post_init__(self):
        if self.n_atoms not in (1, 2):
            raise ValueError("n_atoms must be 1 or 2")
        limit = MAX_CUTOFF + (1 if self.allow_large_cutoff else 0)
        if not 1 <= self.photon_cutoff <= limit:
            raise ValueError(f"photon_cutoff must be in 1..{MAX_CUTOFF}")
        if self.dim > MAX_DIM:
            raise ValueError(f"Hilbert dimension {self.dim} exceeds {MAX_DIM}")
        self._build()

    @property
    def n_fock(self):
        return self.photon_cutoff + 1

    @property
    def dim(self):
        return self.n_fock ** 2 * self.scheme.dim ** self.n_atoms

    def _embed_atom(self, op, j):
        nf, da = self.n_fock, self.scheme.dim
        parts = [sp.identity(nf), sp.identity(nf)]
        for k in range(self.n_atoms):
            parts.append(sp.csr_matrix(op) if k == j else sp.identity(da))
        return _kron(*parts)

    def _embed_mode(self, op, l):
        nf, da = self.n_fock, self.scheme.dim
        idm = sp.identity(nf)
        parts = [op, idm] if l == 1 else [idm, op]
        parts += [sp.identity(da)] * self.n_atoms
        return _kron(*parts)

    def _build(self):
        p, s = self.params, self.scheme
        a1 = _destroy(self.n_fock)
        self.a = {l: self._embed_mode(a1, l) for l in (1, -1)}
        Pexc = np.zeros((s.dim, s.dim))
        Pexc[s.n_ground:, s.n_ground:] = np.eye(s.n_excited)
        self.K = {l: [self._embed_atom(s.lowering(l), j) for j in range(self.n_atoms)] for l in (1, -1)}
        self.proj = [[self._embed_atom(np.diag(np.eye(s.dim)[i]), j) for i in range(s.dim)]
                     for j in range(self.n_atoms)]
        eta = {1: p.eta_plus, -1: p.eta_minus}
        H = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for l in (1, -1):
            a = self.a[l]
            H = H - p.delta_p * (a.T @ a) + 1j * eta[l] * (a.T - a)
            for K in self.K[l]:
                H = H + 1j * p.g0 * (a.T @ K - a @ K.T)
        for j in range(self.n_atoms):
            H = H - p.delta_p * self._embed_atom(Pexc, j)
        self.H = H.tocsr()
        c_ops = [np.sqrt(2 * p.kappa) * self.a[l] for l in (1, -1)]
        for j in range(self.n_atoms):
            for b, L in s.jump_operators():
                c_ops.append(np.sqrt(p.Gamma * b) * self._embed_atom(L, j))
        self.c_ops = c_ops
        self.L = self._liouvillian()

    def _liouvillian(self):
        n = self.dim
        I = sp.identity(n, format="csr")
        H = self.H
        Lv = -1j * (sp.kron(I, H) - sp.kron(H.T, I))
        for C in self.c_ops:
            CdC = (C.conj().T @ C).tocsr()
            Lv = Lv + sp.kron(C.conj(), C) - 0.5 * (sp.kron(I, CdC) + sp.kron(CdC.T, I))
        return Lv.tocsr()

    def apply(self, rho):
        """Master-equation right-hand side in matrix form."""
        out = -1j * (self.H @ rho - (self.H.T @ rho.T).T)
        for C in self.c_ops:
            Cr = C @ rho
            CdC = C.conj().T @ C
            out = out + (C.conj() @ Cr.T).T - 0.5 * (CdC @ rho + (CdC.T @ rho.T).T)
        return out

    def product_state(self, populations):
        """Vacuum in both modes times the diagonal atomic state with the
        given ground populations (the same for every atom)."""
        s = self.scheme
        P = np.asarray(populations, dtype=float)
        if P.shape != (s.n_ground,) or abs(P.sum() - 1) > 1e-9 or np.any(P < 0):
            raise ValueError("invalid ground populations")
        r_at = np.zeros(s.dim)
        r_at[: s.n_ground] = P
        vac = np.zeros(self.n_fock)
        vac[0] = 1.0
        diag = reduce(np.kron, [vac, vac] + [r_at] * self.n_atoms)
        return np.diag(diag).astype(complex)

    # observables -------------------------------------------------------------
    def expect(self, op, rho):
        return complex((op.multiply(rho.T)).sum())

    def top_fock_population(self, rho):
        """Largest population in the highest retained Fock state of either mode."""
        nf, da = self.n_fock, self.scheme.dim ** self.n_atoms
        diag = np.real(rho.diagonal()).reshape(nf, nf, da)
        return float(max(diag[-1].sum(), diag[:, -1].sum()))


@dataclass
class ExactResult:
    times: np.ndarray
    populations: np.ndarray  # per-atom average, ascending m
    excited_population: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    coherence_plus: np.ndarray  # <K_+> per atom
    coherence_minus: np.ndarray
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float
    saturation: float
    cutoff_sensitivity: float = float("nan")
    metadata: dict = field(default_factory=dict)

    @property
    def Ip(self):
        return self.populations @ self.metadata["signs"]


def _observables(model: ExactModel, rhos, times):
    s = model.scheme
    na = model.n_atoms
    pops = np.zeros((len(times), s.n_ground))
    exc = np.zeros(len(times))
    obs = {k: np.zeros(len(times), dtype=complex) for k in ("np", "nm", "ap", "am", "kp", "km")}
    sat, tr_err, herm, mineig = 0.0, 0.0, 0.0, np.inf
    for k, rho in enumerate(rhos):
        tr_err = max(tr_err, abs(np.trace(rho) - 1))
        herm = max(herm, float(np.max(np.abs(rho - rho.conj().T))))
        sat = max(sat, model.top_fock_population(rho))
        d = np.real(rho.diagonal())
        for j in range(na):
            for i in range(s.dim):
                v = float(model.proj[j][i].diagonal() @ d) / na
                if i < s.n_ground:
                    pops[k, i] += v
                else:
                    exc[k] += v
        ap, am = model.a[1], model.a[-1]
        obs["np"][k] = model.expect(ap.T @ ap, rho)
        obs["nm"][k] = model.expect(am.T @ am, rho)
        obs["ap"][k] = model.expect(ap, rho)
        obs["am"][k] = model.expect(am, rho)
        obs["kp"][k] = sum(model.expect(K, rho) for K in model.K[1]) / na
        obs["km"][k] = sum(model.expect(K, rho) for K in model.K[-1]) / na
    if model.dim <= 400:
        for rho in rhos:
            mineig = min(mineig, float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()))
    return pops, exc, obs, sat, tr_err, herm, mineig


def exact_evolve(model: ExactModel, t_end, tol=1e-9, t_eval=None, n_samples=201,
                 populations=None, rho0=None, check_cutoff=True) -> ExactResult:
    """Integrate the full master equation from ``rho0`` (default: vacuum
    times the ground populations ``populations``).

    Raises :class:`CutoffSaturationError` when the top Fock level of either
    mode exceeds 1e-6 population.  With ``check_cutoff`` the run is repeated
    at photon_cutoff + 1 and the largest change of any observable is stored
    in ``cutoff_sensitivity``.
    """
    if rho0 is None:
        if populations is None:
            raise ValueError("need populations or rho0")
        rho0 = model.product_state(populations)
    n = model.dim
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, n_samples)
    v0 = rho0.reshape(-1, order="F").astype(complex)
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval[0] < 0 or np.any(np.diff(t_eval) <= 0):
        raise ValueError("t_eval must be increasing and non-negative")
    # the generator is constant, so the propagator is applied exactly
    if len(t_eval) > 1 and np.allclose(np.diff(t_eval), t_eval[1] - t_eval[0], rtol=1e-12, atol=0):
        vs = expm_multiply(model.L, v0, start=t_eval[0], stop=t_eval[-1], num=len(t_eval), endpoint=True)
    else:
        vs, v, t_prev = [], v0, 0.0
        for t in t_eval:
            v = expm_multiply(model.L * (t - t_prev), v) if t > t_prev else v
            vs.append(v)
            t_prev = t
        vs = np.array(vs)
    rhos = [x.reshape(n, n, order="F") for x in vs]
    times = t_eval
    pops, exc, obs, sat, tr_err, herm, mineig = _observables(model, rhos, times)
    if tr_err > max(tol, 1e-10) * 10:
        raise InvariantViolationError(f"trace drift {tr_err:.3g}")
    if sat > SATURATION_TOL:
        raise CutoffSaturationError(
            f"top Fock level holds {sat:.3g} > {SATURATION_TOL}; increase photon_cutoff")
    res = ExactResult(times, pops, exc, obs["np"].real, obs["nm"].real, obs["ap"], obs["am"],
                      obs["kp"], obs["km"], tr_err, herm, mineig, sat,
                      metadata={"signs": model.scheme.stretched_sign(), "dim": n,
                                "photon_cutoff": model.photon_cutoff, "n_atoms": model.n_atoms})
    if check_cutoff:
        bigger = ExactModel(model.scheme, model.params, model.n_atoms, model.photon_cutoff + 1,
                            allow_large_cutoff=True)
        other = exact_evolve(bigger, t_end, tol, times, rho0=_pad_fock(rho0, model, bigger),
                             check_cutoff=False)
        diffs = [np.max(np.abs(res.populations - other.populations)),
                 np.max(np.abs(res.a_plus - other.a_plus)),
                 np.max(np.abs(res.a_minus - other.a_minus))]
        res.cutoff_sensitivity = float(max(diffs))
    return res


def _pad_fock(rho, small: ExactModel, big: ExactModel):
    nf, Nf, da = small.n_fock, big.n_fock, small.scheme.dim ** small.n_atoms
    r = rho.reshape(nf, nf, da, nf, nf, da)
    out = np.zeros((Nf, Nf, da, Nf, Nf, da), dtype=complex)
    out[:nf, :nf, :, :nf, :nf, :] = r
    return out.reshape(big.dim, big.dim)


def steady_state(model: ExactModel):
    """Null vector of the Liouvillian normalized to unit trace, with the
    residual |L rho| (max norm)."""
    n = model.dim
    L = model.L.tolil()
    tr_row = np.zeros(n * n)
    tr_row[np.arange(n) * (n + 1)] = 1.0
    L[0, :] = tr_row
    b = np.zeros(n * n, dtype=complex)
    b[0] = 1.0
    v = spsolve(L.tocsc(), b)
    rho = v.reshape(n, n, order="F")
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.max(np.abs(model.L @ rho.reshape(-1, order="F"))))
    return rho, residual


def mirror_result(res: ExactResult):
    """Observables under m -> -m, + <-> -.  Field amplitudes keep the
    relative phase of the mirrored basis, so only their moduli are swapped
    in a gauge-free way."""
    return replace(res, populations=res.populations[:, ::-1], n_plus=res.n_minus, n_minus=res.n_plus,
                   a_plus=res.a_minus, a_minus=res.a_plus,
                   coherence_plus=res.coherence_minus, coherence_minus=res.coherence_plus)


def compare_with_meanfield(scheme: LevelScheme, params: SystemParams, populations, t_end,
                           n_samples=201, photon_cutoff=3, tol=1e-9) -> dict:
    """Run the one-atom master equation and mean field with N = 1 on the same
    grid and report the largest deviations relative to each observable's
    peak magnitude."""
    params = params.replace(N=1.0)
    t = np.linspace(0.0, t_end, n_samples)
    ex = exact_evolve(ExactModel(scheme, params, 1, photon_cutoff), t_end, tol, t_eval=t,
                      populations=populations)
    mf = integrate(MeanFieldState.from_populations(scheme, populations), params, scheme,
                   t_end=t_end, t_eval=t, options=IntegrationOptions(rtol=1e-10, atol=1e-12),
                   keep_rho=False)

    def rel(x, y):
        return float(np.max(np.abs(x - y)) / max(np.max(np.abs(y)), 1e-300))

    out = {f"P_{i}": rel(mf.populations[:, i], ex.populations[:, i]) for i in range(scheme.n_ground)}
    out["|a+|^2"] = rel(np.abs(mf.a_plus) ** 2, np.abs(ex.a_plus) ** 2)
    out["|a-|^2"] = rel(np.abs(mf.a_minus) ** 2, np.abs(ex.a_minus) ** 2)
    out["max_excited"] = float(ex.excited_population.max())
    out["cutoff_sensitivity"] = ex.cutoff_sensitivity
    out["saturation"] = ex.saturation
    return {"deviations": out, "exact": ex, "meanfield": mf}
