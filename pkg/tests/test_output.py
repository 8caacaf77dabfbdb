import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cavityz2.analytic import SystemParams, phase_diagram
from cavityz2.output import Record, emit, parse_output, sweep_in_MHz, trajectory_in_ms
from cavityz2.results import Trajectory

LEVELS = tuple(Fraction(m) for m in range(-2, 3))
finite = st.floats(-1e6, 1e6, allow_nan=False)


def _traj(n=4, seed=0):
    r = np.random.default_rng(seed)
    P = r.dirichlet(np.ones(5), size=n)
    return Trajectory(np.linspace(0, 3, n), P, LEVELS, r.random(n) * 1e-3,
                      r.normal(size=n) + 1j * r.normal(size=n), r.normal(size=n) + 1j * r.normal(size=n),
                      np.full(n, 2e4), "kappa", {"stop": "t_end"})


def test_trajectory_csv_columns():
    text = emit(_traj(), "csv").decode()
    lines = text.splitlines()
    assert any(l.startswith("# units:") for l in lines)
    header = [l for l in lines if not l.startswith("#")][0].split(",")
    assert header[:11] == ["t", "P_-2", "P_-1", "P_0", "P_+1", "P_+2", "aP2", "aM2", "Ip", "Ia", "N"]


def test_sweep_json_schema():
    res = phase_diagram([0.0, 5.0, 6.0], [0.0, 6.0], SystemParams(g0=1.0, N=1.0))
    doc = json.loads(emit(res, "json"))
    assert doc["schema_version"] == 1 and doc["kind"] == "sweep"
    d = doc["data"]
    assert [a["name"] for a in d["axes"]] == ["g", "delta_p"]
    assert len(d["values"]["alpha"]) == 6 and len(d["flags"]) == 6
    assert d["flags"][:3] == ["invalid"] * 3
    assert d["values"]["alpha"][0] == "NaN"


def test_unsupported_format():
    with pytest.raises(ValueError):
        emit(_traj(), "xml")


@given(st.integers(1, 6), st.integers(0, 1000))
def test_trajectory_json_round_trip(n, seed):
    data = emit(_traj(n, seed), "json", config={"schema_version": 1, "x": [1.5, None]})
    back = parse_output(data)
    assert emit(back.result, "json", back.config) == data


def test_sweep_round_trip_with_nonfinite():
    res = phase_diagram(np.linspace(-8, 8, 9), [0.0, 3.0, 7.0], SystemParams(g0=1.0, N=1.0))
    data = emit(res, "json", {"schema_version": 1})
    back = parse_output(data)
    assert emit(back.result, "json", back.config) == data
    assert back.result.flags[0, 0] == "invalid"


@given(st.dictionaries(st.text(min_size=1, max_size=5), finite, max_size=4),
       arrays(np.float64, st.integers(1, 5), elements=finite))
def test_record_round_trip(fields, column):
    rec = Record("demo", fields, {"x": column.tolist()})
    data = emit(rec, "json")
    assert emit(parse_output(data).result, "json", None) == data


def test_unit_conversion():
    tr = trajectory_in_ms(_traj(), 4.6375)
    assert tr.time_unit == "ms"
    assert tr.times[-1] == pytest.approx(3 / (2 * np.pi * 4637.5))
    res = sweep_in_MHz(phase_diagram([1.0, 2.0], [5.0], SystemParams(g0=1.0, N=1.0)), 4.6375)
    assert res.axis("delta_p").units == "MHz"
    assert res.axis("delta_p").values.tolist() == pytest.approx([4.6375, 9.275])


def test_emit_is_deterministic():
    assert emit(_traj(), "csv") == emit(_traj(), "csv")
