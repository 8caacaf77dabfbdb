import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavityz2 import SystemParams, build_level_scheme
from cavityz2.meanfield import (
    AtomLossModel,
    IntegrationOptions,
    MeanFieldState,
    ProtocolConfig,
    eom_rhs,
    initial_state_line,
    integrate,
    kappa_time_to_ms,
    mirror_params,
    mirror_state,
    ms_to_kappa_time,
    run_protocol,
    sigmoid_atom_number,
)

F2_PARAMS = SystemParams(g0=0.0654, N=2e4, eta_plus=14.0, eta_minus=14.0, delta_p=7.5)


def _random_state(scheme, rng):
    d = scheme.dim
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    rho /= np.trace(rho).real
    return MeanFieldState(complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal()), rho)


def test_sigmoid_values():
    loss = AtomLossModel(True, 2e4, 51.0, 10.3)
    assert sigmoid_atom_number(61.3, loss) == pytest.approx(2e4 / (1 + math.e), rel=1e-12)
    assert sigmoid_atom_number(61.3, loss) / 2e4 == pytest.approx(0.2689, abs=1e-4)
    assert sigmoid_atom_number(51.0, loss) == pytest.approx(1e4)
    t = np.linspace(0, 100, 11)
    assert np.all(np.diff(sigmoid_atom_number(t, loss)) < 0)


def test_loss_model_validation():
    with pytest.raises(ValueError):
        AtomLossModel(True, 2e4, 51.0, 0.0)


def test_time_conversion_roundtrip():
    t = np.array([0.0, 1.0, 29138.0])
    assert np.allclose(ms_to_kappa_time(kappa_time_to_ms(t, 4.6375), 4.6375), t)
    # one millisecond at kappa/2pi = 4.6375 MHz
    assert ms_to_kappa_time(1.0, 4.6375) == pytest.approx(2 * math.pi * 4637.5)


def test_initial_state_line_values():
    assert np.allclose(initial_state_line(0.0), 0.2)
    assert np.allclose(initial_state_line(1.0), [0, 0, 0, 0, 1])
    assert np.allclose(initial_state_line(-1.0), [1, 0, 0, 0, 0])
    assert np.allclose(initial_state_line(-0.5), [0.6, 0.1, 0.1, 0.1, 0.1])
    with pytest.raises(ValueError):
        initial_state_line(1.5)


@given(st.floats(-1.0, 1.0))
def test_initial_state_line_is_a_distribution(s):
    P = initial_state_line(s)
    assert P.sum() == pytest.approx(1.0)
    assert np.all(P >= 0)
    assert np.allclose(initial_state_line(-s), P[::-1])


@pytest.mark.parametrize("F,Fp", [("1/2", "3/2"), (2, 3), (1, 1)])
def test_rhs_preserves_trace_and_hermiticity(F, Fp, rng):
    scheme = build_level_scheme(F, Fp)
    p = SystemParams(g0=0.3, N=50.0, eta_plus=2.0, eta_minus=1.5, delta_p=1.2)
    for _ in range(5):
        d = eom_rhs(_random_state(scheme, rng), p, scheme)
        assert abs(np.trace(d.rho)) < 1e-12
        assert np.abs(d.rho - d.rho.conj().T).max() < 1e-12


def test_rhs_is_mirror_equivariant(f2, rng):
    p = F2_PARAMS.replace(eta_minus=9.0)
    for _ in range(3):
        s = _random_state(f2, rng)
        lhs = mirror_state(eom_rhs(s, p, f2), f2)
        rhs = eom_rhs(mirror_state(s, f2), mirror_params(p), f2)
        assert np.allclose(lhs.rho, rhs.rho, atol=1e-10)
        assert lhs.a_plus == pytest.approx(rhs.a_plus, abs=1e-10)


def test_ground_state_without_light_is_stationary(f2):
    s = MeanFieldState.from_populations(f2, initial_state_line(0.4))
    d = eom_rhs(s, F2_PARAMS.replace(eta_plus=0.0, eta_minus=0.0), f2)
    assert np.abs(d.rho).max() == 0.0
    assert d.a_plus == 0 and d.a_minus == 0


@pytest.fixture(scope="module")
def f2_run():
    scheme = build_level_scheme(2, 3)
    s0 = MeanFieldState.from_populations(scheme, initial_state_line(0.3))
    return scheme, s0, integrate(s0, F2_PARAMS, scheme, t_end=300.0, n_samples=61)


def test_invariants_along_trajectory(f2_run):
    _, _, tr = f2_run
    assert np.allclose(tr.populations.sum(axis=1) + tr.excited_population, 1.0, atol=1e-10)
    assert tr.metadata["trace_correction_max"] < 1e-10
    assert tr.metadata["hermiticity_error"] < 1e-12
    assert tr.metadata["min_eigenvalue"] > -1e-8
    assert tr.metadata["max_excited_population"] < 0.01


def test_trajectory_mirror_equivariance(f2_run):
    scheme, s0, tr = f2_run
    tm = integrate(mirror_state(s0, scheme), mirror_params(F2_PARAMS), scheme, t_end=300.0, n_samples=61)
    assert np.abs(tm.populations[:, ::-1] - tr.populations).max() < 1e-8
    assert np.abs(tm.a_plus - tr.a_minus).max() < 1e-8 * np.abs(tr.a_plus).max() + 1e-8
    assert np.allclose(tm.Ip, -tr.Ip, atol=1e-8)


@settings(max_examples=4)
@given(st.floats(-1.0, 1.0), st.floats(5.0, 9.0))
def test_mirror_equivariance_property(s, delta):
    scheme = build_level_scheme(2, 3)
    p = F2_PARAMS.replace(delta_p=delta)
    s0 = MeanFieldState.from_populations(scheme, initial_state_line(s))
    a = integrate(s0, p, scheme, t_end=50.0, n_samples=11, keep_rho=False)
    b = integrate(mirror_state(s0, scheme), mirror_params(p), scheme, t_end=50.0, n_samples=11, keep_rho=False)
    assert np.abs(a.populations - b.populations[:, ::-1]).max() < 1e-7


def test_atom_number_follows_loss(f2):
    loss = AtomLossModel(True, 2e4, 0.02, 0.005)
    s0 = MeanFieldState.from_populations(f2, initial_state_line(0.0))
    t_end = ms_to_kappa_time(0.03, 4.6375)
    tr = integrate(s0, F2_PARAMS.replace(kappa_MHz=4.6375), f2, loss=loss, t_end=float(t_end), n_samples=7,
                   keep_rho=False)
    expect = sigmoid_atom_number(kappa_time_to_ms(tr.times, 4.6375), loss)
    assert np.allclose(tr.atom_number, expect, rtol=1e-12)


def test_protocol_mirror(f2):
    pops = np.array([0.1, 0.15, 0.2, 0.25, 0.3])
    kw = dict(prepump_duration=200.0, total_duration=600.0, n_samples=31)
    a = run_protocol(ProtocolConfig(F2_PARAMS, f2, pops, prepump_mode=1, **kw))
    b = run_protocol(ProtocolConfig(F2_PARAMS, f2, pops[::-1], prepump_mode=-1, **kw))
    assert a.metadata["phase_boundary"] == 200.0
    assert np.abs(a.populations - b.populations[:, ::-1]).max() < 1e-7
    assert np.allclose(a.Ia, -b.Ia, atol=1e-6)


def test_protocol_validation(f2):
    with pytest.raises(ValueError):
        ProtocolConfig(F2_PARAMS, f2, initial_state_line(0.0), prepump_mode=0)
    with pytest.raises(ValueError):
        ProtocolConfig(F2_PARAMS, f2, initial_state_line(0.0), prepump_duration=10.0, total_duration=5.0)


def test_options_defaults():
    o = IntegrationOptions()
    assert o.method == "Radau" and o.rtol == 1e-8
