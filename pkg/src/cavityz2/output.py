"""Serialization of results to CSV and JSON.

JSON documents carry ``schema_version``, the package version, the resolved
run configuration and a ``kind`` tag; :func:`parse_output` rebuilds the
result so that emitting it again reproduces the input byte for byte.
Non-finite floats are written as the strings "NaN", "Infinity", "-Infinity".
CSV files start with ``#`` comment lines (version, kind, units, config)
followed by a header row of named columns.
"""
from __future__ import annotations

import copy
import io
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .results import Axis, SweepResult, Trajectory

SCHEMA_VERSION = 1
FORMATS = ("csv", "json")
_NONFINITE = {"NaN": math.nan, "Infinity": math.inf, "-Infinity": -math.inf}


@dataclass
class Record:
    """Small keyed result (tables of levels, thresholds, fits...).

    ``table`` is an optional mapping column name -> list, used as the CSV body.
    """

    kind: str
    fields: dict
    table: Optional[dict] = None
    metadata: dict = field(default_factory=dict)


def _num_out(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "NaN" if math.isnan(x) else ("Infinity" if x > 0 else "-Infinity")


def _num_in(x):
    if x is None:
        return math.nan
    return _NONFINITE[x] if isinstance(x, str) else float(x)


def jsonable(obj):
    """Plain JSON types; numpy scalars and arrays become floats/lists."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num_out(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": _num_out(obj.real), "im": _num_out(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _floats(a):
    return [_num_out(v) for v in np.asarray(a, dtype=float).ravel()]


def _traj_data(tr: Trajectory):
    d = {
        "time_unit": tr.time_unit,
        "ground_levels": [str(m) for m in tr.ground_levels],
        "times": _floats(tr.times),
        "populations": [_floats(row) for row in tr.populations],
        "metadata": jsonable(tr.metadata),
        "columns": {k: _floats(v) for k, v in tr.columns().items()},
    }
    for name in ("excited_population", "atom_number"):
        v = getattr(tr, name)
        d[name] = None if v is None else _floats(v)
    for name in ("a_plus", "a_minus"):
        v = getattr(tr, name)
        d[name] = None if v is None else {"re": _floats(np.real(v)), "im": _floats(np.imag(v))}
    return d


def _sweep_data(sw: SweepResult):
    return {
        "axes": [{"name": a.name, "units": a.units, "values": _floats(a.values)} for a in sw.axes],
        "shape": list(sw.shape),
        "values": {k: _floats(v) for k, v in sw.values.items()},
        "flags": [str(f) for f in np.asarray(sw.flags).ravel()],
        "metadata": jsonable(sw.metadata),
        "annotations": jsonable(sw.annotations),
    }


def _kind(result):
    if isinstance(result, Trajectory):
        return "trajectory"
    if isinstance(result, SweepResult):
        return "sweep"
    if isinstance(result, Record):
        return "record"
    raise TypeError(f"cannot emit {type(result).__name__}")


def emit(result, fmt="json", config: Optional[dict] = None) -> bytes:
    """Serialize ``result`` (Trajectory, SweepResult or Record).

    ``config`` is the resolved configuration document echoed into the file.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unsupported format '{fmt}' (use one of {', '.join(FORMATS)})")
    kind = _kind(result)
    if fmt == "json":
        if kind == "trajectory":
            data = _traj_data(result)
        elif kind == "sweep":
            data = _sweep_data(result)
        else:
            data = {"name": result.kind, "fields": jsonable(result.fields),
                    "table": jsonable(result.table), "metadata": jsonable(result.metadata)}
        doc = {"schema_version": SCHEMA_VERSION,
               "artifact": {"name": "cavityz2", "version": __version__},
               "config": jsonable(config), "kind": kind, "data": data}
        return (json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n").encode("utf-8")
    return _emit_csv(result, kind, config)


def _fmt(v):
    if isinstance(v, str):
        return v
    v = float(v)
    return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))


def _emit_csv(result, kind, config):
    buf = io.StringIO()
    buf.write(f"# cavityz2 {__version__}\n# schema_version: {SCHEMA_VERSION}\n# kind: {kind}\n")
    if kind == "trajectory":
        tu = result.time_unit
        buf.write(f"# units: t [{tu}]; P_m, Pexc, Ip [dimensionless]; aP2, aM2, Ia [intracavity photons];"
                  " N [atoms]\n")
        cols = result.columns()
    elif kind == "sweep":
        units = "; ".join(f"{a.name} [{a.units}]" for a in result.axes)
        buf.write(f"# units: {units}\n")
        grids = np.meshgrid(*[a.values for a in result.axes], indexing="ij")
        cols = {a.name: g.ravel() for a, g in zip(result.axes, grids)}
        cols["flag"] = [str(f) for f in np.asarray(result.flags).ravel()]
        cols.update({k: v.ravel() for k, v in result.values.items()})
        if result.annotations:
            buf.write(f"# annotations: {json.dumps(jsonable(result.annotations), sort_keys=True)}\n")
    else:
        for k in sorted(result.fields):
            buf.write(f"# {k}: {json.dumps(jsonable(result.fields[k]), sort_keys=True)}\n")
        cols = result.table or {}
    meta = getattr(result, "metadata", None)
    if meta:
        buf.write(f"# metadata: {json.dumps(jsonable(meta), sort_keys=True)}\n")
    buf.write(f"# config: {json.dumps(jsonable(config), sort_keys=True)}\n")
    names = list(cols)
    if names:
        buf.write(",".join(names) + "\n")
        n = len(cols[names[0]])
        for i in range(n):
            buf.write(",".join(_fmt(cols[c][i]) for c in names) + "\n")
    return buf.getvalue().encode("utf-8")


@dataclass
class Parsed:
    result: object
    config: Optional[dict]
    version: str


def parse_output(data) -> Parsed:
    """Rebuild the result from a JSON document written by :func:`emit`."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    doc = json.loads(data)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError("unsupported schema_version")
    kind, d = doc["kind"], doc["data"]
    if kind == "trajectory":
        def arr(x):
            return None if x is None else np.array([_num_in(v) for v in x])

        def cplx(x):
            return None if x is None else arr(x["re"]) + 1j * arr(x["im"])

        pops = np.array([[_num_in(v) for v in row] for row in d["populations"]])
        result = Trajectory(arr(d["times"]), pops.reshape(len(d["times"]), len(d["ground_levels"])),
                            tuple(Fraction(m) for m in d["ground_levels"]),
                            arr(d["excited_population"]), cplx(d["a_plus"]), cplx(d["a_minus"]),
                            arr(d["atom_number"]), d["time_unit"], d["metadata"])
    elif kind == "sweep":
        shape = tuple(d["shape"])
        axes = [Axis(a["name"], [_num_in(v) for v in a["values"]], a["units"]) for a in d["axes"]]
        values = {k: np.array([_num_in(x) for x in v]).reshape(shape) for k, v in d["values"].items()}
        flags = np.array(d["flags"], dtype=object).reshape(shape)
        result = SweepResult(axes, values, flags, d["metadata"], d["annotations"])
    elif kind == "record":
        result = Record(d["name"], d["fields"], d["table"], d["metadata"])
    else:
        raise ValueError(f"unknown kind '{kind}'")
    return Parsed(result, doc["config"], doc["artifact"]["version"])


# -- unit conversion for reporting ------------------------------------------------

def trajectory_in_ms(tr: Trajectory, kappa_MHz) -> Trajectory:
    if tr.time_unit == "ms":
        return tr
    out = copy.copy(tr)
    out.times = tr.times / (2 * math.pi * kappa_MHz * 1e3)
    out.time_unit = "ms"
    out.metadata = dict(tr.metadata, kappa_MHz=kappa_MHz)
    return out


def sweep_in_MHz(sw: SweepResult, kappa_MHz) -> SweepResult:
    axes = [Axis(a.name, a.values * kappa_MHz, "MHz") if a.units == "kappa" else a for a in sw.axes]
    return replace(sw, axes=axes, metadata=dict(sw.metadata, kappa_MHz=kappa_MHz))
