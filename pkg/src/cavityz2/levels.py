"""Zeeman level schemes, Clebsch-Gordan couplings and decay branching ratios.

Coefficients are built in exact rational arithmetic (squares are stored as
:class:`fractions.Fraction`) and converted to floats only when a
:class:`LevelScheme` is assembled.  The phase convention is Condon-Shortley;
only squares enter the dynamics.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

import numpy as np

__all__ = [
    "half_integer",
    "clebsch_gordan",
    "clebsch_gordan_squared",
    "branching_ratios",
    "build_level_scheme",
    "LevelScheme",
]


def half_integer(x, name="value"):
    """Coerce ``x`` (int, float, Fraction or a string like ``"3/2"``) to a
    Fraction with denominator 1 or 2."""
    try:
        if isinstance(x, str):
            q = Fraction(x.strip())
        elif isinstance(x, float):
            q = Fraction(x).limit_denominator(2)
            if float(q) != x:
                raise ValueError
        else:
            q = Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ValueError(f"{name}={x!r} is not a half-integer") from None
    if (2 * q).denominator != 1:
        raise ValueError(f"{name}={x!r} is not a half-integer")
    return q


def _momentum(x, name):
    q = half_integer(x, name)
    if q < 0:
        raise ValueError(f"{name}={x!r} must be non-negative")
    return q


def _fact(q):
    # q is an integral Fraction >= 0 by construction
    return factorial(int(q))


@lru_cache(maxsize=None)
def _cg_exact(j1, m1, j2, m2, J, M):
    """Return (sign, square) of <j1 m1; j2 m2 | J M> via Racah's formula."""
    if M != m1 + m2:
        return 0, Fraction(0)
    if not abs(j1 - j2) <= J <= j1 + j2:
        return 0, Fraction(0)
    if abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return 0, Fraction(0)
    for j, m in ((j1, m1), (j2, m2), (J, M)):
        if (j - m).denominator != 1:
            return 0, Fraction(0)
    if (j1 + j2 + J).denominator != 1:
        return 0, Fraction(0)

    pre = Fraction(
        int(2 * J + 1) * _fact(J + j1 - j2) * _fact(J - j1 + j2) * _fact(j1 + j2 - J),
        _fact(j1 + j2 + J + 1),
    )
    pre *= (_fact(J + M) * _fact(J - M) * _fact(j1 - m1) * _fact(j1 + m1)
            * _fact(j2 - m2) * _fact(j2 + m2))

    kmin = max(0, int(j2 - J - m1), int(j1 + m2 - J))
    kmax = min(int(j1 + j2 - J), int(j1 - m1), int(j2 + m2))
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (factorial(k) * _fact(j1 + j2 - J - k) * _fact(j1 - m1 - k)
               * _fact(j2 + m2 - k) * _fact(J - j2 + m1 + k) * _fact(J - j1 - m2 + k))
        s += Fraction((-1) ** k, den)
    if s == 0:
        return 0, Fraction(0)
    return (1 if s > 0 else -1), pre * s * s


def _check_args(F, m, q, Fp, mp):
    F = _momentum(F, "F")
    Fp = _momentum(Fp, "Fp")
    m = half_integer(m, "m")
    mp = half_integer(mp, "mp")
    if q not in (-1, 0, 1):
        raise ValueError(f"q={q!r} must be -1, 0 or +1")
    if abs(m) > F or (F - m).denominator != 1:
        raise ValueError(f"m={m} is not a sublevel of F={F}")
    if abs(mp) > Fp or (Fp - mp).denominator != 1:
        raise ValueError(f"mp={mp} is not a sublevel of Fp={Fp}")
    return F, m, Fp, mp


def clebsch_gordan_squared(F, m, q, Fp, mp) -> Fraction:
    """Exact line-strength factor |<F m; 1 q | Fp mp>|^2."""
    F, m, Fp, mp = _check_args(F, m, q, Fp, mp)
    return _cg_exact(F, m, Fraction(1), Fraction(q), Fp, mp)[1]


def clebsch_gordan(F, m, q, Fp, mp) -> float:
    """Dipole coupling factor <F m; 1 q | Fp mp> for the transition m -> mp.

    Returns 0 when the selection rule ``mp == m + q`` is violated.  Invalid
    momenta raise ``ValueError``.
    """
    F, m, Fp, mp = _check_args(F, m, q, Fp, mp)
    sign, sq = _cg_exact(F, m, Fraction(1), Fraction(q), Fp, mp)
    return sign * sqrt(sq)


def _check_pair(F, Fp):
    F = _momentum(F, "F")
    Fp = _momentum(Fp, "Fp")
    if F == 0:
        raise ValueError("ground manifold needs F >= 1/2")
    if abs(F - Fp) > 1 or (F - Fp).denominator != 1 or (F == 0 and Fp == 0):
        raise ValueError(f"no dipole transition between F={F} and Fp={Fp}")
    return F, Fp


def _sublevels(j):
    return tuple(-j + k for k in range(int(2 * j) + 1))


def branching_ratios(F, Fp) -> dict:
    """Exact decay branching ratios ``{(m, mp): beta}`` with columns (fixed mp)
    normalized to one.  pi channels (q = 0) are included."""
    F, Fp = _check_pair(F, Fp)
    table = {}
    for mp in _sublevels(Fp):
        col = {}
        for m in _sublevels(F):
            q = mp - m
            if abs(q) <= 1:
                col[m] = _cg_exact(F, m, Fraction(1), q, Fp, mp)[1]
        total = sum(col.values())
        for m, v in col.items():
            table[(m, mp)] = v / total
    return table


@dataclass(frozen=True)
class LevelScheme:
    """Ground (2F+1) and excited (2Fp+1) Zeeman manifolds.

    Index convention: ground level ``m`` sits at ``ground_index(m)`` in
    ``0..2F`` (ascending m); the excited level ``mp`` at
    ``n_ground + excited_index(mp)`` in the combined atomic basis.
    ``coupling[l]`` is the (n_ground, n_excited) array of c_m^{m+l} for the
    polarization l = +1 or -1; ``branching`` is (n_ground, n_excited).
    """

    F: Fraction
    Fp: Fraction
    ground_levels: tuple
    excited_levels: tuple
    coupling_sq: dict = field(repr=False)
    branching_exact: dict = field(repr=False)
    coupling: dict = field(repr=False)
    branching: np.ndarray = field(repr=False)

    @property
    def n_ground(self):
        return len(self.ground_levels)

    @property
    def n_excited(self):
        return len(self.excited_levels)

    @property
    def dim(self):
        return self.n_ground + self.n_excited

    def ground_index(self, m):
        return self.ground_levels.index(half_integer(m, "m"))

    def excited_index(self, mp):
        return self.excited_levels.index(half_integer(mp, "mp"))

    def c(self, m, mp) -> float:
        """Signed coupling c_m^{mp} (0 for pi or forbidden transitions)."""
        m, mp = half_integer(m), half_integer(mp)
        l = mp - m
        if l not in (1, -1) or m not in self.ground_levels or mp not in self.excited_levels:
            return 0.0
        return float(self.coupling[int(l)][self.ground_index(m), self.excited_index(mp)])

    def beta(self, m, mp) -> float:
        m, mp = half_integer(m), half_integer(mp)
        if m not in self.ground_levels or mp not in self.excited_levels:
            return 0.0
        return float(self.branching[self.ground_index(m), self.excited_index(mp)])

    def lowering(self, l) -> np.ndarray:
        """K_l = sum_m c_m^{m+l} |m><m+l| in the combined (d x d) atomic basis."""
        K = np.zeros((self.dim, self.dim))
        K[: self.n_ground, self.n_ground:] = self.coupling[l]
        return K

    def jump_operators(self):
        """List of (rate weight beta, |m><mp|) for every allowed decay channel."""
        ops = []
        ng = self.n_ground
        for i, m in enumerate(self.ground_levels):
            for j, mp in enumerate(self.excited_levels):
                b = self.branching[i, j]
                if b > 0:
                    L = np.zeros((self.dim, self.dim))
                    L[i, ng + j] = 1.0
                    ops.append((b, L))
        return ops

    def mirror_permutation(self) -> np.ndarray:
        """Index permutation of the combined basis implementing m -> -m."""
        ng, ne = self.n_ground, self.n_excited
        return np.concatenate([np.arange(ng)[::-1], ng + np.arange(ne)[::-1]])

    def stretched_sign(self):
        """+1/-1 helper: sign of m for each ground level (0 for m=0)."""
        return np.sign(np.array([float(m) for m in self.ground_levels]))


def build_level_scheme(F, Fp) -> LevelScheme:
    """Assemble the full :class:`LevelScheme` for the pair (F, Fp)."""
    F, Fp = _check_pair(F, Fp)
    ground = _sublevels(F)
    excited = _sublevels(Fp)
    coupling_sq = {}
    coupling = {}
    for l in (1, -1):
        arr = np.zeros((len(ground), len(excited)))
        for i, m in enumerate(ground):
            mp = m + l
            if mp in excited:
                sign, sq = _cg_exact(F, m, Fraction(1), Fraction(l), Fp, mp)
                coupling_sq[(m, mp)] = sq
                arr[i, excited.index(mp)] = sign * sqrt(sq)
        arr.setflags(write=False)
        coupling[l] = arr
    bexact = branching_ratios(F, Fp)
    barr = np.zeros((len(ground), len(excited)))
    for (m, mp), v in bexact.items():
        barr[ground.index(m), excited.index(mp)] = float(v)
    barr.setflags(write=False)
    return LevelScheme(F, Fp, ground, excited, coupling_sq, bexact, coupling, barr)
