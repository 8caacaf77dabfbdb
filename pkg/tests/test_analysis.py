import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavityz2 import SystemParams, build_level_scheme
from cavityz2.analysis import (
    DID_NOT_RELAX,
    INCONCLUSIVE,
    RELAXED,
    CellResult,
    assemble_phase_map,
    classify_imbalance,
    classify_run,
    default_t_end,
    fit_exponent,
    locate_threshold,
    relaxation_time,
    steady_map,
    stretched_populations,
    tristable_columns,
)
from cavityz2.errors import InconclusiveError
from cavityz2.results import INVALID, OK, Trajectory

F2 = SystemParams(g0=0.0654, N=2e4, eta_plus=14.0, eta_minus=14.0)


def _traj(t, ip, **meta):
    t = np.asarray(t, float)
    P = 0.5 * (1 + np.asarray(ip, float))
    return Trajectory(t, np.column_stack([1 - P, P]), (-0.5, 0.5), metadata=meta)


@given(st.floats(-3.0, 3.0), st.floats(0.01, 100.0), st.integers(8, 40))
def test_fit_recovers_exact_power_law(k, c, n):
    x = np.geomspace(1e-3, 1e2, n)
    fit = fit_exponent(x, c * x ** k, (1e-3, 1e2))
    assert fit.exponent == pytest.approx(k, abs=1e-9)
    assert fit.prefactor == pytest.approx(c, rel=1e-8)
    assert fit.r2 == pytest.approx(1.0)


def test_fit_default_window_is_last_decade():
    x = np.geomspace(1, 1000, 31)
    y = np.where(x < 100, x ** 2, x ** 0.5)
    assert fit_exponent(x, y).exponent == pytest.approx(0.5, abs=1e-9)


def test_fit_errors():
    x = np.geomspace(1, 10, 5)
    with pytest.raises(ValueError, match="8 points"):
        fit_exponent(x, x)
    x = np.geomspace(1, 10, 10)
    with pytest.raises(ValueError):
        fit_exponent(x, -x, (1, 10))


def test_relaxation_time_interpolates():
    t = np.linspace(0, 10, 11)
    r = relaxation_time(_traj(t, 1 - 0.1 * t))
    assert r.status == RELAXED and r.tau == pytest.approx(9.0)
    r = relaxation_time(_traj(t, np.full(11, 0.05)))
    assert r.status == RELAXED and r.tau == 0.0


def test_relaxation_time_plateau_and_undecided():
    t = np.linspace(0, 10, 20)
    assert relaxation_time(_traj(t, np.full(20, 0.7))).status == DID_NOT_RELAX
    assert relaxation_time(_traj(t, np.full(3, 0.7)[[0] * 20], stop="steady")).status == DID_NOT_RELAX
    assert relaxation_time(_traj(t, 1 - 0.01 * t)).status == INCONCLUSIVE


def test_default_t_end(two_level, f2):
    p = SystemParams(g0=1.0, N=100.0, eta_plus=0.5, eta_minus=0.5, delta_p=8.0)
    from cavityz2.analytic import derive_two_level
    assert default_t_end(p, two_level) == pytest.approx(200 / derive_two_level(p).gamma_eff)
    assert default_t_end(F2, f2) == 1e5


def test_stretched_populations(f2):
    assert stretched_populations(f2, 1).tolist() == [0, 0, 0, 0, 1]
    assert stretched_populations(f2, -1).tolist() == [1, 0, 0, 0, 0]


def test_classify_imbalance():
    cls = classify_imbalance([1.0, -2.0, 1e-6, 0.0, np.nan])
    assert cls[:4].tolist() == [1, -1, 0, 0]
    assert np.isnan(cls[4])
    assert classify_imbalance([0.0, 0.0]).tolist() == [0, 0]


def test_assemble_rejects_mixed_units():
    cells = [CellResult(1.0, 0.0, 0.0, 0.0, 1.0, OK, "kappa", 1.0),
             CellResult(2.0, 0.0, 0.0, 0.0, 1.0, OK, "MHz", 1.0)]
    with pytest.raises(ValueError, match="mixed units"):
        assemble_phase_map(cells)


def test_assemble_and_tristable():
    cells = [CellResult(1.0, -1.0, -0.5, -3.0, 1.0, OK, "kappa", 1.0),
             CellResult(1.0, 0.0, 0.0, 0.0, 1.0, OK, "kappa", 1.0),
             CellResult(1.0, 1.0, 0.5, 3.0, 1.0, OK, "kappa", 1.0),
             CellResult(2.0, -1.0, 0.0, 0.0, 1.0, OK, "kappa", 1.0),
             CellResult(2.0, 1.0, 0.0, 0.0, 1.0, INVALID, "kappa", 1.0)]
    res = assemble_phase_map(cells)
    assert res.shape == (2, 3)
    assert res.flags[1, 1] == INVALID   # cell never computed
    assert tristable_columns(res) == [1.0]


def test_threshold_needs_transition(two_level):
    # below the critical coupling both ends of any bracket relax
    p = SystemParams(g0=1.0, N=16.0, eta_plus=0.3, eta_minus=0.3)
    with pytest.raises(InconclusiveError):
        locate_threshold(p, two_level, (1.0, 8.0), resolution=0.05)


def test_classify_run_phases(f2):
    r, _, _ = classify_run(F2.replace(delta_p=5.0), f2)
    assert r.status == RELAXED and 1000 < r.tau < 5000
    r, _, _ = classify_run(F2.replace(delta_p=9.0), f2)
    assert r.status == DID_NOT_RELAX


def test_steady_map_tristable_and_jobs(f2):
    a = steady_map(F2, f2, [6.0, 8.0], [-1.0, 0.0, 1.0], jobs=1)
    assert a.values["class"].tolist() == [[0, 0, 0], [-1, 0, 1]]
    assert tristable_columns(a) == [8.0]
    b = steady_map(F2, f2, [6.0, 8.0], [-1.0, 0.0, 1.0], jobs=2)
    assert np.array_equal(a.values["Ia"], b.values["Ia"])
