"""Result containers: time series (:class:`Trajectory`) and parameter grids
(:class:`SweepResult`)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np


def level_label(m) -> str:
    m = Fraction(m)
    if m.denominator == 1:
        s = str(abs(m.numerator))
    else:
        s = f"{abs(m.numerator)}/{m.denominator}"
    sign = "-" if m < 0 else ("+" if m > 0 else "")
    return sign + s


@dataclass
class Trajectory:
    """Sampled time evolution.

    ``populations`` has shape (n_samples, n_ground) ordered like
    ``ground_levels`` (ascending m).  Field quantities are ``None`` for the
    scalar rate-equation trajectories.
    """

    times: np.ndarray
    populations: np.ndarray
    ground_levels: tuple
    excited_population: Optional[np.ndarray] = None
    a_plus: Optional[np.ndarray] = None
    a_minus: Optional[np.ndarray] = None
    atom_number: Optional[np.ndarray] = None
    time_unit: str = "1/kappa"
    metadata: dict = field(default_factory=dict)
    rho: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.populations = np.asarray(self.populations, dtype=float)
        if self.times.ndim != 1 or len(self.times) != len(self.populations):
            raise ValueError("times and populations length mismatch")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def Ip(self) -> np.ndarray:
        """Ground-state imbalance sum_{m>0} P_m - sum_{m<0} P_m."""
        sgn = np.sign([float(m) for m in self.ground_levels])
        return self.populations @ sgn

    @property
    def power_plus(self):
        return None if self.a_plus is None else np.abs(self.a_plus) ** 2

    @property
    def power_minus(self):
        return None if self.a_minus is None else np.abs(self.a_minus) ** 2

    @property
    def Ia(self):
        if self.a_plus is None:
            return None
        return self.power_plus - self.power_minus

    def P(self, m) -> np.ndarray:
        return self.populations[:, self.ground_levels.index(Fraction(m))]

    def columns(self) -> dict:
        """Ordered name -> array mapping used for tabular output."""
        cols = {"t": self.times}
        for i, m in enumerate(self.ground_levels):
            cols[f"P_{level_label(m)}"] = self.populations[:, i]
        if self.a_plus is not None:
            cols["aP2"] = self.power_plus
            cols["aM2"] = self.power_minus
        cols["Ip"] = self.Ip
        if self.a_plus is not None:
            cols["Ia"] = self.Ia
        if self.atom_number is not None:
            cols["N"] = self.atom_number
        if self.excited_population is not None:
            cols["Pexc"] = self.excited_population
        return cols

    def final(self, name):
        return self.columns()[name][-1]


@dataclass
class Axis:
    name: str
    values: np.ndarray
    units: str = "kappa"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


# cell flags
OK = "ok"
INVALID = "invalid"
NOT_CONVERGED = "not_converged"


@dataclass
class SweepResult:
    """Grid of steady-state observables.

    ``values`` maps observable names to arrays of shape ``shape``; cells whose
    flag is not ``"ok"`` hold NaN in every observable.
    """

    axes: list
    values: dict
    flags: np.ndarray
    metadata: dict = field(default_factory=dict)
    annotations: dict = field(default_factory=dict)

    def __post_init__(self):
        self.flags = np.asarray(self.flags, dtype=object)
        if self.flags.shape != self.shape:
            raise ValueError(f"flags shape {self.flags.shape} != grid {self.shape}")
        for k, v in self.values.items():
            v = np.asarray(v, dtype=float)
            if v.shape != self.shape:
                raise ValueError(f"{k} shape {v.shape} != grid {self.shape}")
            self.values[k] = v
        bad = self.flags != OK
        for v in self.values.values():
            if np.any(np.isfinite(v[bad])):
                raise ValueError("flagged cells must not carry numeric results")

    @property
    def shape(self):
        return tuple(len(a.values) for a in self.axes)

    def axis(self, name) -> Axis:
        for a in self.axes:
            if a.name == name:
                return a
        raise KeyError(name)
