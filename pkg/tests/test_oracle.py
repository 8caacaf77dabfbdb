import numpy as np
import pytest

from cavityz2 import SystemParams, build_level_scheme
from cavityz2.errors import CutoffSaturationError
from cavityz2.oracle import (
    ExactModel,
    compare_with_meanfield,
    exact_evolve,
    mirror_result,
    steady_state,
)

WEAK = SystemParams(g0=0.2, N=1.0, eta_plus=0.05, eta_minus=0.05)


@pytest.fixture(scope="module")
def scheme():
    return build_level_scheme("1/2", "3/2")


@pytest.fixture(scope="module")
def run(scheme):
    return exact_evolve(ExactModel(scheme, WEAK, 1, 3), 50.0, populations=[0.0, 1.0], n_samples=11)


def test_density_matrix_invariants(run):
    assert run.trace_error < 1e-12
    assert run.hermiticity_error < 1e-14
    assert run.min_eigenvalue > -1e-12
    assert np.allclose(run.populations.sum(axis=1) + run.excited_population, 1.0, atol=1e-12)


def test_cutoff_checks(run):
    assert run.saturation < 1e-6
    assert run.cutoff_sensitivity < 1e-8


def test_saturated_cutoff_raises(scheme):
    with pytest.raises(CutoffSaturationError):
        exact_evolve(ExactModel(scheme, WEAK, 1, 1), 50.0, populations=[0.0, 1.0], n_samples=5)


def test_mirror_equivariance(scheme, run):
    other = exact_evolve(ExactModel(scheme, WEAK, 1, 3), 50.0, populations=[1.0, 0.0], n_samples=11,
                         check_cutoff=False)
    m = mirror_result(other)
    assert np.abs(m.populations - run.populations).max() < 1e-12
    assert np.abs(m.n_plus - run.n_plus).max() < 1e-12


def test_nonuniform_grid_matches_uniform(scheme, run):
    t = np.array([0.0, 5.0, 12.0, 50.0])
    res = exact_evolve(ExactModel(scheme, WEAK, 1, 3), 50.0, t_eval=t, populations=[0.0, 1.0],
                       check_cutoff=False)
    assert np.allclose(res.populations[[0, 1, 3]], run.populations[[0, 1, 10]], atol=1e-12)


def test_steady_state_is_symmetric(scheme):
    rho, residual = steady_state(ExactModel(scheme, WEAK.replace(eta_plus=0.01, eta_minus=0.01), 1, 2))
    assert residual < 1e-12
    assert np.trace(rho).real == pytest.approx(1.0)


def test_two_atoms_small(scheme):
    p = WEAK.replace(eta_plus=0.01, eta_minus=0.01)
    res = exact_evolve(ExactModel(scheme, p, 2, 2), 20.0, populations=[0.3, 0.7], n_samples=3,
                       check_cutoff=False)
    assert res.trace_error < 1e-12
    assert res.populations[0].tolist() == pytest.approx([0.3, 0.7])


def test_dimension_guard(scheme):
    with pytest.raises(ValueError):
        ExactModel(scheme, WEAK, 1, 9)


def test_meanfield_agreement_short(scheme):
    out = compare_with_meanfield(scheme, WEAK, [0.0, 1.0], 50.0, n_samples=11)
    dev = out["deviations"]
    for k in ("P_0", "P_1", "|a+|^2", "|a-|^2"):
        assert dev[k] < 0.02, k
