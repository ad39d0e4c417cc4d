"""JSON and CSV readers and writers for the package's value types.

Floats are written with ``repr`` precision, so read -> write -> read is
bit-identical.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .analytic import PowerSeries
from .beltrami import BeltramiField, HalfPlaneGrid, MapJet
from .curves import PlaneCurve
from .grids import CircleGrid, LineGrid, MonotoneMap, SampledFunction
from .spaces import NormReport
from .welding import WeldingResult

__all__ = [
    "dump_json",
    "load_json",
    "to_dict",
    "sampled_from_dict",
    "series_from_dict",
    "field_from_dict",
    "monotone_from_dict",
    "read_any",
    "write_csv_function",
    "read_csv_function",
    "write_csv_curve",
    "read_csv_curve",
    "rows_to_csv",
]


def _floats(a) -> list:
    return [float(t) for t in np.asarray(a, dtype=np.float64).ravel()]


def _complex_parts(a):
    a = np.asarray(a)
    re = np.real(a).astype(np.float64)
    im = np.imag(a).astype(np.float64) if np.iscomplexobj(a) else np.zeros_like(re)
    return re, im


def to_dict(obj) -> dict:
    """JSON-ready dict for any of the package's value types."""
    if isinstance(obj, SampledFunction):
        re, im = _complex_parts(obj.values)
        d = {"representation": "line" if obj.is_line else "circle"}
        if obj.is_line:
            d["half_width"] = obj.grid.half_width
        d.update(n=obj.grid.node_count, re=_floats(re), im=_floats(im),
                 modulo_constant=bool(obj.modulo_constant))
        return d
    if isinstance(obj, MonotoneMap):
        return {"representation": "monotone", "half_width": obj.grid.half_width,
                "n": obj.grid.node_count, "values": _floats(obj.values),
                "tail_offsets": _floats(obj.tail_offsets), "tail_slopes": _floats(obj.tail_slopes)}
    if isinstance(obj, PowerSeries):
        re, im = _complex_parts(obj.coefficients)
        return {"domain": obj.domain_tag, "re": _floats(re), "im": _floats(im)}
    if isinstance(obj, BeltramiField):
        g = obj.grid
        re, im = _complex_parts(obj.values)
        d = {"representation": "halfplane", "half_width": g.half_width, "n": g.x_count,
             "y_min": g.y_min, "y_max": g.y_max, "y_count": g.y_count,
             "y_levels": _floats(g.y_centers),
             "re": [_floats(r) for r in re], "im": [_floats(r) for r in im]}
        if obj.image_points is not None:
            pre, pim = _complex_parts(obj.image_points)
            d["image_re"] = [_floats(r) for r in pre]
            d["image_im"] = [_floats(r) for r in pim]
        return d
    if isinstance(obj, MapJet):
        g = obj.grid
        d = {"representation": "jet", "half_width": g.half_width, "n": g.x_count,
             "y_min": g.y_min, "y_max": g.y_max, "y_count": g.y_count,
             "y_levels": _floats(g.y_centers)}
        for name in ("value", "wirtinger_dz", "wirtinger_dzbar"):
            re, im = _complex_parts(getattr(obj, name))
            d[name] = {"re": [_floats(r) for r in re], "im": [_floats(r) for r in im]}
        return d
    if isinstance(obj, NormReport):
        return obj.to_dict()
    if isinstance(obj, WeldingResult):
        return {
            "log_f_prime": to_dict(obj.log_f_prime),
            "log_h_prime": None if obj.log_h_prime is None else to_dict(obj.log_h_prime),
            "residual": float(obj.residual),
            "iterations": int(obj.iterations),
            "converged": bool(obj.converged),
            "damping": float(obj.damping),
            "history": _floats(obj.history),
            "composition_error": None if obj.composition_error is None else float(obj.composition_error),
            "truncation_note": obj.truncation_note,
        }
    raise TypeError(f"no JSON schema for {type(obj).__name__}")


def sampled_from_dict(d: dict) -> SampledFunction:
    rep = d.get("representation")
    n = int(d["n"])
    if rep == "line":
        grid = LineGrid(float(d["half_width"]), n)
    elif rep == "circle":
        grid = CircleGrid(n)
    else:
        raise ValueError(f"not a sampled function: representation {rep!r}")
    re = np.asarray(d["re"], dtype=np.float64)
    im = np.asarray(d.get("im") or np.zeros_like(re), dtype=np.float64)
    vals = re if not np.any(im) else re + 1j * im
    return SampledFunction(grid, vals, bool(d.get("modulo_constant", False)))


def monotone_from_dict(d: dict) -> MonotoneMap:
    if d.get("representation") != "monotone":
        raise ValueError("not a monotone map")
    grid = LineGrid(float(d["half_width"]), int(d["n"]))
    return MonotoneMap(grid, d["values"], tuple(d["tail_offsets"]), tuple(d["tail_slopes"]))


def series_from_dict(d: dict) -> PowerSeries:
    re = np.asarray(d["re"], dtype=np.float64)
    im = np.asarray(d.get("im") or np.zeros_like(re), dtype=np.float64)
    return PowerSeries(re + 1j * im, d.get("domain", "disk"))


def _halfplane_grid(d):
    return HalfPlaneGrid(float(d["half_width"]), int(d["n"]), float(d["y_min"]),
                         float(d["y_max"]), int(d["y_count"]))


def field_from_dict(d: dict) -> BeltramiField:
    if d.get("representation") != "halfplane":
        raise ValueError("not a Beltrami field")
    grid = _halfplane_grid(d)
    vals = np.asarray(d["re"], dtype=np.float64) + 1j * np.asarray(d["im"], dtype=np.float64)
    img = None
    if "image_re" in d:
        img = np.asarray(d["image_re"], dtype=np.float64) + 1j * np.asarray(d["image_im"], dtype=np.float64)
    return BeltramiField(grid, vals, img)


def jet_from_dict(d: dict) -> MapJet:
    grid = _halfplane_grid(d)
    parts = [np.asarray(d[k]["re"], dtype=np.float64) + 1j * np.asarray(d[k]["im"], dtype=np.float64)
             for k in ("value", "wirtinger_dz", "wirtinger_dzbar")]
    return MapJet(grid, *parts)


def from_dict(d: dict):
    """Rebuild whatever value type the dict describes."""
    rep = d.get("representation")
    if rep in ("line", "circle"):
        return sampled_from_dict(d)
    if rep == "monotone":
        return monotone_from_dict(d)
    if rep == "halfplane":
        return field_from_dict(d)
    if rep == "jet":
        return jet_from_dict(d)
    if "domain" in d:
        return series_from_dict(d)
    raise ValueError("unrecognized JSON schema")


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj if isinstance(obj, (dict, list)) else to_dict(obj), indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def read_any(path):
    """Load a JSON value file, or a CSV line function (x,re,im)."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return read_csv_function(p)
    return from_dict(load_json(p))


def _grid_from_x(x) -> LineGrid:
    x = np.asarray(x, dtype=np.float64)
    M = x.shape[0] - 1
    X = float(x[-1])
    grid = LineGrid(X, M)
    if abs(x[0] + X) > 1e-9 * X or np.max(np.abs(grid.nodes - x)) > 1e-9 * max(1.0, X):
        raise ValueError("x column is not a symmetric uniform grid")
    return grid


def _read_xyz(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"x", "re"} <= set(rows[0]):
        raise ValueError(f"{path}: expected columns x,re,im")
    x = np.array([float(r["x"]) for r in rows])
    re = np.array([float(r["re"]) for r in rows])
    im = np.array([float(r.get("im") or 0.0) for r in rows])
    return x, re, im


def read_csv_function(path) -> SampledFunction:
    x, re, im = _read_xyz(path)
    return SampledFunction(_grid_from_x(x), re if not np.any(im) else re + 1j * im)


def read_csv_curve(path) -> PlaneCurve:
    x, re, im = _read_xyz(path)
    return PlaneCurve(_grid_from_x(x), re + 1j * im)


def _xyz_csv(x, vals) -> str:
    re, im = _complex_parts(vals)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "re", "im"])
    for row in zip(x, re, im):
        w.writerow([repr(float(t)) for t in row])
    return buf.getvalue()


def write_csv_function(u: SampledFunction, path=None) -> str:
    text = _xyz_csv(u.grid.nodes, u.values)
    if path is not None:
        Path(path).write_text(text)
    return text


def write_csv_curve(curve: PlaneCurve, path=None) -> str:
    text = _xyz_csv(curve.grid.nodes, curve.points)
    if path is not None:
        Path(path).write_text(text)
    return text


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
