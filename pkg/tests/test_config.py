import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavityz2.config import (
    KAPPA_MHZ,
    ConfigError,
    dumps_config,
    load_preset,
    merge,
    parse_config,
    preset_document,
    preset_names,
    validate,
)


def _doc(**sections):
    d = {"schema_version": 1, "scheme": {"F": "2", "Fp": "3"},
         "params": {"g0": 0.0654, "N": 20000, "eta_plus": 14, "eta_minus": 14, "delta_p": 6.0},
         "init": {"populations": [0, 0, 0, 0, 1]}, "integrate": {"t_end": 100.0}}
    d.update(sections)
    return d


def test_minimal_config():
    cfg = parse_config(json.dumps(_doc()))
    assert cfg.params.g0 == 0.0654 and cfg.params.N == 20000
    assert cfg.populations.tolist() == [0, 0, 0, 0, 1]
    assert cfg.t_end == 100.0
    # defaults are echoed into the resolved document
    assert cfg.raw["integrate"]["method"] == "Radau"
    assert cfg.raw["params"]["kappa"] == 1.0


def test_parse_error_has_line_and_column():
    text = '{\n  "schema_version": 1,\n  "params": {"g0": 1,}\n}'
    with pytest.raises(ConfigError) as e:
        parse_config(text)
    assert (e.value.line, e.value.column) == (3, 22)


def test_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config('{"schema_version": 1, "schema_version": 1}')


@pytest.mark.parametrize("doc,field", [
    ({"schema_version": 1, "bogus": {}}, "bogus"),
    (_doc(params={"g0": 1, "N": 1, "gee": 2}), "params.gee"),
    (_doc(init={}), "init"),
    (_doc(init={"populations": [0.5, 0.6, 0, 0, 0]}), "init.populations"),
    (_doc(init={"populations": [1, 0]}), "init.populations"),
    (_doc(init={"populations": [0, 0, 0, 0, 1], "line_s": 0.2}), "init"),
    (_doc(params={"g0": 1, "N": 1, "delta_p_MHz": 30.0}), "params.delta_p_MHz"),
    (_doc(loss={"enabled": True, "N0": 2e4, "t0": 1.0, "dt": 1.0}), "report.kappa_MHz"),
    (_doc(sweep={"delta_p": {"start": 1, "stop": 2, "num": 0}}), "sweep.delta_p"),
    ({"schema_version": 2}, "schema_version"),
])
def test_validation_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError) as e:
        validate(doc)
    assert e.value.field is not None and e.value.field.startswith(field)


def test_line_parameter_and_mhz():
    cfg = validate(_doc(init={"line_s": -0.5},
                        params={"g0": 0.0654, "N": 2e4, "delta_p_MHz": 32.259},
                        report={"units": "MHz", "kappa_MHz": KAPPA_MHZ}))
    assert cfg.populations.tolist() == pytest.approx([0.6, 0.1, 0.1, 0.1, 0.1])
    assert cfg.params.delta_p == pytest.approx(6.956088)


def test_presets_validate():
    for name in preset_names():
        cfg = load_preset(name)
        assert cfg.raw["preset"] == name
    assert "figS4-quench" in preset_names()


def test_fig2_preset_values():
    cfg = load_preset("fig2")
    assert (cfg.params.N, cfg.params.g0, cfg.params.eta_plus, cfg.params.eta_minus) == (2e4, 0.0654, 14.0, 14.0)
    assert cfg.populations.tolist() == [0, 0, 0, 0, 1]


def test_table_row_preset_values():
    cfg = load_preset("table1-3b-top")
    # tabulated from m=+2 down, stored ascending
    assert cfg.populations.tolist() == pytest.approx([0.0, 0.0, 0.07, 0.17, 0.76])
    assert (cfg.loss.t0, cfg.loss.dt) == (51.0, 10.3)
    assert cfg.raw["drive"]["eta_sq"] == 6.1e-2
    assert cfg.params.eta_plus == pytest.approx(14.0 * np.sqrt(6.1 / 5.0))
    assert cfg.prepump_mode == 1


def test_merge_overrides_one_level():
    base = preset_document("fig2")
    out = merge(base, {"params": {"delta_p": 7.5}})
    assert out["params"]["delta_p"] == 7.5 and out["params"]["g0"] == 0.0654
    assert base["params"]["delta_p"] == 6.0


@given(st.floats(0.01, 1.0), st.floats(1.0, 1e5), st.floats(-20, 20), st.floats(-1, 1))
def test_config_round_trip(g0, N, delta, s):
    cfg = validate(_doc(params={"g0": g0, "N": N, "delta_p": delta}, init={"line_s": s}))
    again = parse_config(dumps_config(cfg.raw))
    assert again.raw == cfg.raw
    assert again.params == cfg.params
    assert np.array_equal(again.populations, cfg.populations)
