"""Run configuration: a versioned JSON document, validated into
:class:`RunConfig`, plus the shipped scenario presets.

Layout (every section optional unless a command needs it)::

    {
      "schema_version": 1,
      "scheme":    {"F": "2", "Fp": "3"},
      "params":    {"g0": 0.0654, "N": 20000, "kappa": 1, "Gamma": 1,
                    "delta_p": 6.0, "eta_plus": 14, "eta_minus": 14},
      "init":      {"populations": [...ascending m...]} or {"line_s": 0.5},
                   optional "prepump_mode": "+"/"-", "prepump_duration"
      "loss":      {"enabled": true, "N0": 20000, "t0": 51.0, "dt": 10.3},   (ms)
      "integrate": {"t_end": 1e5, "time_unit": "kappa"|"ms", "rtol", "atol",
                    "max_step", "method", "n_samples"},
      "sweep":     {"delta_p": {"start", "stop", "num"} | {"values": [...]},
                    "g": ..., "s": ..., "alpha": ..., "bracket": [lo, hi],
                    "resolution": 1e-3, "threshold": 0.1},
      "report":    {"units": "kappa"|"MHz", "kappa_MHz": 4.6},
      "drive":     {"eta_sq": 0.05, "eta_sq_units": "...", "kappa2_per_unit": 3920},
      "oracle":    {"n_atoms": 1, "photon_cutoff": 3}
    }

Detunings may be given as ``delta_p_MHz`` (and sweep axis ``delta_p_MHz``)
when ``report.kappa_MHz`` is set.  Durations follow ``integrate.time_unit``;
the atom-loss sigmoid is always in ms.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .analytic import SystemParams
from .errors import ConfigError
from .levels import build_level_scheme
from .meanfield import AtomLossModel, IntegrationOptions, METHODS, initial_state_line

SCHEMA_VERSION = 1

_SECTIONS = {
    "schema_version", "preset", "description", "scheme", "params", "init", "loss",
    "integrate", "sweep", "report", "drive", "oracle",
}
_KEYS = {
    "scheme": {"F", "Fp"},
    "params": {"g0", "N", "kappa", "Gamma", "delta_p", "delta_p_MHz", "eta_plus", "eta_minus"},
    "init": {"populations", "line_s", "prepump_mode", "prepump_duration", "start_time"},
    "loss": {"enabled", "N0", "t0", "dt"},
    "integrate": {"t_end", "time_unit", "rtol", "atol", "max_step", "method", "n_samples"},
    "sweep": {"delta_p", "delta_p_MHz", "g", "s", "alpha", "bracket", "resolution", "threshold",
              "fit_window"},
    "report": {"units", "kappa_MHz"},
    "drive": {"eta_sq", "eta_sq_units", "kappa2_per_unit"},
    "oracle": {"n_atoms", "photon_cutoff", "t_end", "n_samples"},
}
_AXIS_KEYS = {"start", "stop", "num", "values"}


@dataclass
class RunConfig:
    """Validated configuration.  ``raw`` is the resolved document (defaults
    filled in) that gets echoed into every output."""

    raw: dict
    scheme: Any = None
    params: Optional[SystemParams] = None
    populations: Optional[np.ndarray] = None
    prepump_mode: Optional[int] = None
    prepump_duration: float = 0.0
    start_time: float = 0.0
    loss: Optional[AtomLossModel] = None
    t_end: Optional[float] = None
    n_samples: int = 401
    options: IntegrationOptions = field(default_factory=IntegrationOptions)
    axes: dict = field(default_factory=dict)
    bracket: Optional[tuple] = None
    resolution: float = 1e-3
    threshold: float = 0.1
    fit_window: Optional[tuple] = None
    units: str = "kappa"
    kappa_MHz: Optional[float] = None
    oracle: dict = field(default_factory=dict)

    def require(self, *names):
        for n in names:
            if getattr(self, n) is None:
                section = {"populations": "init", "params": "params", "scheme": "scheme",
                           "t_end": "integrate.t_end", "bracket": "sweep.bracket",
                           "prepump_mode": "init.prepump_mode"}.get(n, n)
                raise ConfigError(f"missing required section or field '{section}'", field=section)

    def time_to_kappa(self, t):
        """Duration in config time units -> 1/kappa."""
        if self.raw.get("integrate", {}).get("time_unit", "kappa") == "ms":
            return t * 2 * math.pi * self.kappa_MHz * 1e3
        return t


def _duplicate_guard(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ValueError(f"duplicate key '{k}'")
        out[k] = v
    return out


def parse_document(text: str) -> dict:
    """JSON text -> document, without validation (used for overlays)."""
    try:
        return json.loads(text, object_pairs_hook=_duplicate_guard)
    except json.JSONDecodeError as e:
        raise ConfigError(f"parse error: {e.msg} (line {e.lineno}, column {e.colno})",
                          line=e.lineno, column=e.colno) from None
    except ValueError as e:
        raise ConfigError(f"parse error: {e}") from None


def read_document(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_document(fh.read())
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}", field="--config") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    return validate(parse_document(text))


def load_config(path) -> RunConfig:
    return validate(read_document(path))


def _num(sec, key, where, positive=False, nonneg=False, integer=False):
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number", field=f"{where}.{key}")
    if integer and int(v) != v:
        raise ConfigError(f"{where}.{key} must be an integer", field=f"{where}.{key}")
    if positive and not v > 0:
        raise ConfigError(f"{where}.{key} must be positive", field=f"{where}.{key}")
    if nonneg and v < 0:
        raise ConfigError(f"{where}.{key} must be non-negative", field=f"{where}.{key}")
    return int(v) if integer else float(v)


def _axis(spec, where):
    if not isinstance(spec, dict):
        raise ConfigError(f"{where} must be an object", field=where)
    extra = set(spec) - _AXIS_KEYS
    if extra:
        raise ConfigError(f"unknown key '{sorted(extra)[0]}' in {where}", field=f"{where}.{sorted(extra)[0]}")
    if "values" in spec:
        vals = spec["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"{where}.values must be a non-empty list", field=f"{where}.values")
        return np.array([_num({"v": x}, "v", where) for x in vals])
    for k in ("start", "stop", "num"):
        if k not in spec:
            raise ConfigError(f"{where}.{k} is required", field=f"{where}.{k}")
    a, b = _num(spec, "start", where), _num(spec, "stop", where)
    n = _num(spec, "num", where, positive=True, integer=True)
    if b < a or (n > 1 and a == b):
        raise ConfigError(f"{where} is an empty range", field=where)
    return np.linspace(a, b, n)


def validate(doc) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object")
    extra = set(doc) - _SECTIONS
    if extra:
        k = sorted(extra)[0]
        raise ConfigError(f"unknown key '{k}'", field=k)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}", field="schema_version")
    for sec, keys in _KEYS.items():
        if sec in doc:
            if not isinstance(doc[sec], dict):
                raise ConfigError(f"{sec} must be an object", field=sec)
            bad = set(doc[sec]) - keys
            if bad:
                k = sorted(bad)[0]
                raise ConfigError(f"unknown key '{k}' in {sec}", field=f"{sec}.{k}")
    raw = copy.deepcopy(doc)
    cfg = RunConfig(raw=raw)

    rep = raw.setdefault("report", {})
    rep.setdefault("units", "kappa")
    if rep["units"] not in ("kappa", "MHz"):
        raise ConfigError("report.units must be 'kappa' or 'MHz'", field="report.units")
    if "kappa_MHz" in rep and rep["kappa_MHz"] is not None:
        cfg.kappa_MHz = _num(rep, "kappa_MHz", "report", positive=True)
    else:
        rep["kappa_MHz"] = None
    cfg.units = rep["units"]
    if cfg.units == "MHz" and cfg.kappa_MHz is None:
        raise ConfigError("MHz reporting needs report.kappa_MHz", field="report.kappa_MHz")

    if "scheme" in raw:
        sc = raw["scheme"]
        for k in ("F", "Fp"):
            if k not in sc:
                raise ConfigError(f"scheme.{k} is required", field=f"scheme.{k}")
            sc[k] = str(Fraction(str(sc[k])))
        try:
            cfg.scheme = build_level_scheme(sc["F"], sc["Fp"])
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"scheme: {e}", field="scheme") from None

    drive = raw.get("drive")
    if drive is not None:
        if "eta_sq" not in drive:
            raise ConfigError("drive.eta_sq is required", field="drive.eta_sq")
        _num(drive, "eta_sq", "drive", nonneg=True)
        drive.setdefault("eta_sq_units", "unspecified")
        drive.setdefault("kappa2_per_unit", None)

    if "params" in raw:
        p = raw["params"]
        for k in ("g0", "N"):
            if k not in p:
                raise ConfigError(f"params.{k} is required", field=f"params.{k}")
        if "delta_p_MHz" in p:
            if "delta_p" in p:
                raise ConfigError("give params.delta_p or params.delta_p_MHz, not both",
                                  field="params.delta_p_MHz")
            if cfg.kappa_MHz is None:
                raise ConfigError("params.delta_p_MHz needs report.kappa_MHz", field="params.delta_p_MHz")
            p["delta_p"] = _num(p, "delta_p_MHz", "params") / cfg.kappa_MHz
        if drive is not None and drive.get("kappa2_per_unit") is not None:
            eta = math.sqrt(_num(drive, "eta_sq", "drive") * _num(drive, "kappa2_per_unit", "drive", positive=True))
            for k in ("eta_plus", "eta_minus"):
                if k in p and abs(p[k] - eta) > 1e-12 * max(1.0, eta):
                    raise ConfigError(f"params.{k} conflicts with drive calibration", field=f"params.{k}")
                p[k] = eta
        defaults = {"kappa": 1.0, "Gamma": 1.0, "delta_p": 0.0, "eta_plus": 0.0, "eta_minus": 0.0}
        for k, v in defaults.items():
            p.setdefault(k, v)
        vals = {k: _num(p, k, "params") for k in ("g0", "N", "kappa", "Gamma", "delta_p", "eta_plus", "eta_minus")}
        try:
            cfg.params = SystemParams(**vals, kappa_MHz=cfg.kappa_MHz)
        except ValueError as e:
            raise ConfigError(f"params: {e}", field="params") from None

    it = raw.setdefault("integrate", {})
    it.setdefault("time_unit", "kappa")
    if it["time_unit"] not in ("kappa", "ms"):
        raise ConfigError("integrate.time_unit must be 'kappa' or 'ms'", field="integrate.time_unit")
    if it["time_unit"] == "ms" and cfg.kappa_MHz is None:
        raise ConfigError("ms durations need report.kappa_MHz", field="integrate.time_unit")
    it.setdefault("rtol", 1e-8)
    it.setdefault("atol", 1e-10)
    it.setdefault("method", "Radau")
    it.setdefault("n_samples", 401)
    if it["method"] not in METHODS:
        raise ConfigError(f"integrate.method must be one of {sorted(METHODS)}", field="integrate.method")
    opts = dict(rtol=_num(it, "rtol", "integrate", positive=True),
                atol=_num(it, "atol", "integrate", positive=True), method=it["method"])
    if it.get("max_step") is not None:
        opts["max_step"] = cfg.time_to_kappa(_num(it, "max_step", "integrate", positive=True))
    else:
        it["max_step"] = None
    cfg.options = IntegrationOptions(**opts)
    cfg.n_samples = _num(it, "n_samples", "integrate", integer=True)
    if cfg.n_samples < 2:
        raise ConfigError("integrate.n_samples must be at least 2", field="integrate.n_samples")
    if it.get("t_end") is not None:
        cfg.t_end = cfg.time_to_kappa(_num(it, "t_end", "integrate", positive=True))
    else:
        it["t_end"] = None

    if "init" in raw:
        ini = raw["init"]
        if not ini:
            raise ConfigError("init section is empty", field="init")
        if ("populations" in ini) == ("line_s" in ini):
            raise ConfigError("init needs exactly one of populations, line_s", field="init")
        if cfg.scheme is None:
            raise ConfigError("init needs a scheme section", field="scheme")
        ng = cfg.scheme.n_ground
        if "populations" in ini:
            P = ini["populations"]
            if not isinstance(P, list) or len(P) != ng:
                raise ConfigError(f"init.populations must list {ng} values", field="init.populations")
            P = np.array([_num({"v": x}, "v", "init.populations", nonneg=True) for x in P])
            if abs(P.sum() - 1) > 1e-9:
                raise ConfigError(f"init.populations sum to {P.sum():.12g}, not 1", field="init.populations")
        else:
            s = _num(ini, "line_s", "init")
            try:
                P = initial_state_line(s, ng)
            except ValueError as e:
                raise ConfigError(f"init.line_s: {e}", field="init.line_s") from None
        cfg.populations = P
        mode = ini.setdefault("prepump_mode", None)
        if mode is not None:
            if mode not in ("+", "-"):
                raise ConfigError("init.prepump_mode must be '+' or '-'", field="init.prepump_mode")
            cfg.prepump_mode = 1 if mode == "+" else -1
        ini.setdefault("prepump_duration", 0.0)
        cfg.prepump_duration = cfg.time_to_kappa(_num(ini, "prepump_duration", "init", nonneg=True))
        ini.setdefault("start_time", 0.0)
        cfg.start_time = cfg.time_to_kappa(_num(ini, "start_time", "init", nonneg=True))
        if cfg.prepump_duration > 0 and cfg.prepump_mode is None:
            raise ConfigError("init.prepump_duration needs init.prepump_mode", field="init.prepump_mode")

    if "loss" in raw:
        lo = raw["loss"]
        lo.setdefault("enabled", True)
        if not isinstance(lo["enabled"], bool):
            raise ConfigError("loss.enabled must be true or false", field="loss.enabled")
        if lo["enabled"]:
            for k in ("N0", "t0", "dt"):
                if k not in lo:
                    raise ConfigError(f"loss.{k} is required", field=f"loss.{k}")
            if cfg.kappa_MHz is None:
                raise ConfigError("atom loss times are in ms and need report.kappa_MHz",
                                  field="report.kappa_MHz")
            try:
                cfg.loss = AtomLossModel(True, _num(lo, "N0", "loss", positive=True),
                                         _num(lo, "t0", "loss"), _num(lo, "dt", "loss"))
            except ValueError as e:
                raise ConfigError(f"loss: {e}", field="loss.dt") from None

    if "sweep" in raw:
        sw = raw["sweep"]
        for name in ("delta_p", "g", "s", "alpha"):
            if name in sw:
                cfg.axes[name] = _axis(sw[name], f"sweep.{name}")
        if "delta_p_MHz" in sw:
            if "delta_p" in sw:
                raise ConfigError("give sweep.delta_p or sweep.delta_p_MHz, not both", field="sweep.delta_p_MHz")
            if cfg.kappa_MHz is None:
                raise ConfigError("sweep.delta_p_MHz needs report.kappa_MHz", field="sweep.delta_p_MHz")
            cfg.axes["delta_p"] = _axis(sw["delta_p_MHz"], "sweep.delta_p_MHz") / cfg.kappa_MHz
        if "s" in cfg.axes and np.any(np.abs(cfg.axes["s"]) > 1):
            raise ConfigError("sweep.s values must lie in [-1, 1]", field="sweep.s")
        if "bracket" in sw:
            b = sw["bracket"]
            if not isinstance(b, list) or len(b) != 2:
                raise ConfigError("sweep.bracket must be [lo, hi]", field="sweep.bracket")
            lo_, hi_ = (_num({"v": x}, "v", "sweep.bracket") for x in b)
            if not lo_ < hi_:
                raise ConfigError("sweep.bracket must satisfy lo < hi", field="sweep.bracket")
            cfg.bracket = (lo_, hi_)
        if "fit_window" in sw:
            w = sw["fit_window"]
            if not isinstance(w, list) or len(w) != 2:
                raise ConfigError("sweep.fit_window must be [lo, hi]", field="sweep.fit_window")
            cfg.fit_window = tuple(_num({"v": x}, "v", "sweep.fit_window", positive=True) for x in w)
        sw.setdefault("resolution", 1e-3)
        sw.setdefault("threshold", 0.1)
        cfg.resolution = _num(sw, "resolution", "sweep", positive=True)
        cfg.threshold = _num(sw, "threshold", "sweep", positive=True)

    if "oracle" in raw:
        o = raw["oracle"]
        o.setdefault("n_atoms", 1)
        o.setdefault("photon_cutoff", 3)
        o.setdefault("t_end", 500.0)
        o.setdefault("n_samples", 51)
        cfg.oracle = {"n_atoms": _num(o, "n_atoms", "oracle", integer=True),
                      "photon_cutoff": _num(o, "photon_cutoff", "oracle", integer=True),
                      "t_end": _num(o, "t_end", "oracle", positive=True),
                      "n_samples": _num(o, "n_samples", "oracle", integer=True)}
    return cfg


def merge(base: dict, override: dict) -> dict:
    """Section-wise overlay of ``override`` on ``base`` (one level deep)."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "init":
            out[k] = {**out[k], **v}
        else:
            out[k] = copy.deepcopy(v)
    return out


def dumps_config(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


# -- presets -------------------------------------------------------------------

# kappa/2pi in MHz at which the F=2 mean-field threshold in kappa units
# (FIG2_THRESHOLD_KAPPA) sits at 32.259 MHz.
FIG2_THRESHOLD_KAPPA = 6.956088
FIG2_THRESHOLD_MHZ = 32.259
KAPPA_MHZ = FIG2_THRESHOLD_MHZ / FIG2_THRESHOLD_KAPPA

# tabulated drive strengths are rescaled so that 5.0e-2 corresponds to the
# simulation drive of 14 kappa
ETA_SQ_KAPPA2_PER_UNIT = 14.0 ** 2 / 5.0e-2

_F2 = {"F": "2", "Fp": "3"}
_F12 = {"F": "1/2", "Fp": "3/2"}
_FIG2_PARAMS = {"g0": 0.0654, "N": 20000, "eta_plus": 14.0, "eta_minus": 14.0}


# detunings at distances 3e-4 ... 3e-2 below the threshold, 9 per decade near it
_FIG2_SCAN = [round(FIG2_THRESHOLD_KAPPA - d, 9) for d in
              np.concatenate([np.geomspace(3e-4, 3e-3, 9), np.geomspace(3e-3, 3e-2, 4)[1:]])]


def _table_row(delta_MHz, eta_sq, pops_desc, t0, dt, mode):
    """One fitted run: populations (listed from m=+2 down) at the start of the
    symmetric pumping, 10 ms after the start of the sequence."""
    return {
        "schema_version": SCHEMA_VERSION,
        "description": f"fitted run at {delta_MHz:g} MHz, prepump '{mode}', symmetric pumping from 10 ms",
        "scheme": dict(_F2),
        "params": {"g0": 0.0654, "N": 20000, "delta_p_MHz": delta_MHz},
        "drive": {"eta_sq": eta_sq, "eta_sq_units": "as tabulated (unspecified)",
                  "kappa2_per_unit": ETA_SQ_KAPPA2_PER_UNIT},
        "init": {"populations": list(reversed(pops_desc)), "prepump_mode": mode,
                 "prepump_duration": 0.0, "start_time": 10.0},
        "loss": {"enabled": True, "N0": 20000, "t0": t0, "dt": dt},
        "integrate": {"t_end": 60.0, "time_unit": "ms", "n_samples": 601},
        "report": {"units": "MHz", "kappa_MHz": KAPPA_MHZ},
    }


PRESETS = {
    "fig1c": {
        "schema_version": SCHEMA_VERSION,
        "description": "steady P_{+1/2} and I_p against alpha for two ground states",
        "scheme": dict(_F12),
        "sweep": {"alpha": {"start": 0.0, "stop": 10.0, "num": 201}},
    },
    "fig1d": {
        "schema_version": SCHEMA_VERSION,
        "description": "steady I_p over (delta_p, g) for two ground states",
        "scheme": dict(_F12),
        "params": {"g0": 1.0, "N": 1.0},
        "sweep": {"delta_p": {"start": -10.0, "stop": 10.0, "num": 201},
                  "g": {"start": 0.0, "stop": 10.0, "num": 101}},
    },
    "fig2": {
        "schema_version": SCHEMA_VERSION,
        "description": "F=2 -> F'=3 relaxation from the stretched state",
        "scheme": dict(_F2),
        "params": dict(_FIG2_PARAMS, delta_p=6.0),
        "init": {"populations": [0.0, 0.0, 0.0, 0.0, 1.0]},
        "integrate": {"t_end": 1000000.0, "n_samples": 1001},
        "sweep": {"bracket": [6.9, 7.0], "resolution": 1e-6, "threshold": 0.1,
                  "delta_p": {"values": _FIG2_SCAN}, "fit_window": [2.5e-4, 3.5e-3]},
        "report": {"units": "kappa", "kappa_MHz": KAPPA_MHZ},
    },
    "fig3a": {
        "schema_version": SCHEMA_VERSION,
        "description": "prepump protocol in the symmetric phase",
        "scheme": dict(_F2),
        "params": dict(_FIG2_PARAMS, delta_p_MHz=23.0),
        "init": {"populations": [0.2, 0.2, 0.2, 0.2, 0.2], "prepump_mode": "+",
                 "prepump_duration": 10.0},
        "loss": {"enabled": True, "N0": 20000, "t0": 37.4, "dt": 7.6},
        "integrate": {"t_end": 60.0, "time_unit": "ms", "n_samples": 601},
        "report": {"units": "MHz", "kappa_MHz": KAPPA_MHZ},
    },
    "fig3b": {
        "schema_version": SCHEMA_VERSION,
        "description": "prepump protocol in the symmetry-broken phase",
        "scheme": dict(_F2),
        "params": dict(_FIG2_PARAMS, delta_p_MHz=33.0),
        "init": {"populations": [0.2, 0.2, 0.2, 0.2, 0.2], "prepump_mode": "+",
                 "prepump_duration": 10.0},
        "loss": {"enabled": True, "N0": 20000, "t0": 51.0, "dt": 10.3},
        "integrate": {"t_end": 60.0, "time_unit": "ms", "n_samples": 601},
        "report": {"units": "MHz", "kappa_MHz": KAPPA_MHZ},
    },
    "fig3d": {
        "schema_version": SCHEMA_VERSION,
        "description": "steady I_a over detuning and initial-state line",
        "scheme": dict(_F2),
        "params": dict(_FIG2_PARAMS),
        "integrate": {"t_end": 200000.0},
        "sweep": {"delta_p": {"start": 5.0, "stop": 11.0, "num": 25},
                  "s": {"start": -1.0, "stop": 1.0, "num": 21}},
        "report": {"units": "kappa", "kappa_MHz": KAPPA_MHZ},
    },
    "figS4-quench": {
        "schema_version": SCHEMA_VERSION,
        "description": "start below threshold and let atom loss lower the threshold",
        "scheme": dict(_F2),
        "params": dict(_FIG2_PARAMS, delta_p_MHz=28.0),
        "init": {"populations": [0.2, 0.2, 0.2, 0.2, 0.2], "prepump_mode": "+",
                 "prepump_duration": 10.0},
        "loss": {"enabled": True, "N0": 20000, "t0": 37.4, "dt": 7.6},
        "integrate": {"t_end": 60.0, "time_unit": "ms", "n_samples": 601},
        "report": {"units": "MHz", "kappa_MHz": KAPPA_MHZ},
    },
    "table1-3a-top": _table_row(23.0, 5.0e-2, [0.29, 0.20, 0.17, 0.16, 0.18], 37.4, 7.6, "+"),
    "table1-3a-bottom": _table_row(23.0, 5.0e-2, [0.18, 0.16, 0.17, 0.20, 0.29], 35.0, 8.0, "-"),
    "table1-3b-top": _table_row(33.0, 6.1e-2, [0.76, 0.17, 0.07, 0.0, 0.0], 51.0, 10.3, "+"),
    "table1-3b-bottom": _table_row(33.0, 6.8e-2, [0.0, 0.0, 0.05, 0.15, 0.80], 51.0, 10.3, "-"),
}


def preset_names():
    return sorted(PRESETS)


def preset_document(name) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}' (available: {', '.join(preset_names())})",
                          field="preset")
    doc = copy.deepcopy(PRESETS[name])
    doc["preset"] = name
    return doc


def load_preset(name) -> RunConfig:
    return validate(preset_document(name))
