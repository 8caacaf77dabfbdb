import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq, minimize_scalar

from cavityz2.analysis import critical_point, field_exponent, order_parameter_exponent, relaxation_exponent
from cavityz2.analytic import (
    SystemParams,
    TwoLevelDerived,
    critical_coupling,
    contour_minimum_coupling,
    critical_coupling_quadratic,
    cubic_roots,
    derive_two_level,
    imbalance_steady,
    integrate_rate,
    phase_diagram,
    rate_rhs,
    relaxation_asymptote,
    relaxation_law,
    steady_states,
    unbalanced_shift,
    unbalanced_steady,
)
from cavityz2.errors import DegenerateCaseError, PoleError, SingularParametersError
from cavityz2.results import INVALID

G_C = 4.512261965795774  # sqrt of (9/8)(9 + sqrt(745)/3), frozen from the oracle below


def _alpha(g, d, kappa=1.0, Gamma=1.0):
    # reduced parameter written out from its definition, for the oracles
    x = g * g
    u = (Gamma * kappa - 2 * d * d) / x
    w = ((Gamma / 2) ** 2 + d * d) * (kappa ** 2 + d * d) / x ** 2
    return (1 / 3 - 1) ** 2 / (1 * (1 + u) + w)


@pytest.fixture(scope="module")
def critical():
    return critical_point(6.0, SystemParams(g0=1.0, N=1.0, eta_plus=1.0, eta_minus=1.0))


@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.9, 4.0, 4.1, 7.0, 50.0])
def test_cubic_roots_match_companion_matrix(alpha):
    ref = np.roots([2 * alpha, -3 * alpha, 2 + alpha, -1])
    got = [complex(r) for r in cubic_roots(alpha)]
    tol = 1e-5 if alpha == 4.0 else 1e-10
    for r in got:
        assert np.min(np.abs(ref - r)) < tol
    for r in ref:
        assert min(abs(r - x) for x in got) < tol


@given(st.floats(0.01, 100.0))
def test_roots_are_fixed_points(alpha):
    d = TwoLevelDerived(0, 0, alpha, 0.0, 1.0)
    for r in steady_states(alpha):
        if r.is_real:
            assert abs(rate_rhs(float(np.real(r.P)), d)) < 1e-10


@given(st.floats(0.0, 1.0), st.floats(0.0, 3.9), st.floats(-1.0, 1.0))
def test_rate_is_odd_about_half(P, alpha, beta_nl):
    d = TwoLevelDerived(0, 0, alpha, beta_nl, 0.7)
    assert rate_rhs(P, d) == pytest.approx(-rate_rhs(1 - P, d), abs=1e-12)


def test_steady_state_labels():
    assert [s.stability for s in steady_states(2.0)] == ["stable", "complex", "complex"]
    assert [s.stability for s in steady_states(5.0)] == ["unstable", "stable", "stable"]
    assert [s.stability for s in steady_states(4.0)] == ["marginal"]
    assert steady_states(0.0)[0].P == 0.5


def test_imbalance_steady():
    assert imbalance_steady(3.0) == (0.0,)
    x = imbalance_steady(5.0)[0]
    assert x == pytest.approx(math.sqrt(1 / 5))
    assert imbalance_steady(math.inf) == (1.0, -1.0)
    with pytest.raises(ValueError):
        imbalance_steady(-1.0)


def test_critical_coupling_value():
    assert critical_coupling() == pytest.approx(G_C, rel=1e-14)
    assert critical_coupling() == pytest.approx(4.51, abs=5e-3)


def test_critical_coupling_closed_form_mpmath():
    mpmath.mp.dps = 40
    exact = mpmath.sqrt(mpmath.mpf(9) / 8 * (9 + mpmath.sqrt(745) / 3))
    assert critical_coupling() == pytest.approx(float(exact), rel=1e-14)
    a, b, c = (float(v) for v in critical_coupling_quadratic())
    x = G_C ** 2
    assert a * x * x - b * x + c == pytest.approx(0.0, abs=1e-10)


def test_critical_coupling_sits_on_contour_at_resonance():
    # independent oracle: alpha(delta_p = g) = 4 solved directly
    g = brentq(lambda g: _alpha(g, g) - 4.0, 3.0, 6.0, xtol=1e-14)
    assert g == pytest.approx(critical_coupling(), rel=1e-12)


def test_contour_minimum_coupling():
    # independent oracle: smallest g whose maximum alpha over delta reaches 4
    def peak(g):
        r = minimize_scalar(lambda d: -_alpha(g, d), bounds=(0.0, 3 * g), method="bounded",
                            options={"xatol": 1e-12})
        return -r.fun - 4.0

    g = brentq(peak, 3.0, 6.0, xtol=1e-13)
    assert contour_minimum_coupling() == pytest.approx(g, rel=1e-9)
    assert g == pytest.approx(4.493028588685933, rel=1e-9)
    assert g < critical_coupling() < 1.005 * g


def test_derived_alpha_matches_definition():
    p = SystemParams(g0=0.3, N=400.0, delta_p=5.5)
    assert derive_two_level(p).alpha == pytest.approx(_alpha(p.g, 5.5), rel=1e-13)


def test_singular_parameters():
    with pytest.raises(SingularParametersError):
        derive_two_level(SystemParams(g0=0.0, N=10.0))


def test_relaxation_law_examples():
    assert relaxation_law(0.0, 1.0, 1.0) == 1.0
    t = np.array([10.0, 20.0])
    r = relaxation_law(-1.3, 0.2, t)
    assert r[0] / r[1] == pytest.approx(math.sqrt(2))
    with pytest.raises(DegenerateCaseError):
        relaxation_law(-4.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        relaxation_law(0.0, 1.0, 0.0)


def test_relaxation_asymptote_matches_ode(critical):
    # late-time rate-equation solution agrees with the leading-order solution
    rep = relaxation_exponent(critical)
    assert rep.fit.exponent == pytest.approx(-0.5, abs=1e-3)
    assert rep.detail["prefactor_ratio_asymptote"] == pytest.approx(1.0, abs=1e-3)
    assert relaxation_asymptote(0.0, 1.0, 4.0) == pytest.approx(0.25)


def test_unbalanced_shift_examples(critical):
    assert unbalanced_shift(0.0, 0.3) == 0.0
    assert unbalanced_shift(-1e-3, 0.3) == pytest.approx(-unbalanced_shift(1e-3, 0.3))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        unbalanced_shift(0.5, 0.0)
    assert any("asymptotic" in str(x.message) for x in w)
    d = derive_two_level(critical)
    exact = unbalanced_steady(d, 1e-5) - 0.5
    assert exact == pytest.approx(unbalanced_shift(1e-5, d.beta_nl), rel=0.01)


def test_order_and_field_exponents(critical):
    assert order_parameter_exponent().fit.exponent == pytest.approx(0.5, abs=1e-3)
    rep = field_exponent(critical)
    assert rep.fit.exponent == pytest.approx(1 / 3, abs=2e-3)
    assert rep.detail["max_rel_dev_closed_form"] < 0.05


def test_integrate_rate_examples():
    below = TwoLevelDerived(0, 0, 2.0, 0.1, 1.0)
    tr = integrate_rate(0.9, below, 200.0)
    assert tr.populations[-1, 1] == pytest.approx(0.5, abs=1e-8)
    above = TwoLevelDerived(0, 0, 6.0, 0.1, 1.0)
    tr = integrate_rate(0.51, above, 500.0)
    upper = float(np.real(cubic_roots(6.0)[1]))
    assert tr.populations[-1, 1] == pytest.approx(upper, abs=1e-8)
    tr = integrate_rate(0.5, above, 50.0)
    assert np.all(tr.populations[:, 1] == 0.5)


def test_pole_raises():
    with pytest.raises(PoleError):
        rate_rhs(0.5, TwoLevelDerived(0, 0, 4.0, -5.0, 1.0))


def test_phase_diagram_structure():
    res = phase_diagram(np.linspace(-10, 10, 81), np.linspace(0, 10, 21), SystemParams(g0=1.0, N=1.0))
    assert res.shape == (21, 81)
    assert np.all(res.flags[0] == INVALID)
    ip, alpha = res.values["Ip"], res.values["alpha"]
    ok = np.isfinite(alpha)
    assert np.all((ip[ok] > 0) == (alpha[ok] > 4))
    assert res.annotations["g_c"] == pytest.approx(G_C)
    gs = [g for g, d in res.annotations["alpha_c_contour"]]
    assert min(gs) > 4.49
    # mirror symmetry in the detuning
    assert np.allclose(alpha[1:], alpha[1:, ::-1], rtol=1e-12)


def test_phase_diagram_jobs_independent():
    args = (np.linspace(0, 9, 19), np.linspace(4, 8, 5), SystemParams(g0=1.0, N=1.0))
    a = phase_diagram(*args, jobs=1)
    b = phase_diagram(*args, jobs=2)
    assert np.array_equal(a.values["Ip"], b.values["Ip"])
