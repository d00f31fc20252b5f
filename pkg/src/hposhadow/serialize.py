"""JSON and CSV forms of systems, orbits, hpos and shadow traces.

Complex numbers are written as a bare number when real and as ``[re, im]``
otherwise.  Every float is rounded to 15 significant digits, so writing a
file that was read back reproduces it exactly.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np

from .errors import InputError
from .expanding import make_circle_system, make_polynomial_system
from .hyperbolic import HenonParams, make_henon_system
from .mds import HomotopyPseudoOrbit, MultivaluedSystem, Orbit, ShadowTrace, as_points, make_hpo
from .paths import PolyPath
from .spaces import Circle, Discrete, Product, complex_from_json, root_space
from .symbolic import graph_from_adjacency, graph_system

DIGITS = 15


def _num(v: float) -> float:
    return float(f"{float(v):.{DIGITS}g}")


def complex_to_json(z) -> float | list[float]:
    z = complex(z)
    if z.imag == 0:
        return _num(z.real)
    return [_num(z.real), _num(z.imag)]


def _jsonable(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, complex, np.floating, np.complexfloating)):
        return complex_to_json(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    raise InputError(f"cannot serialize {type(v).__name__}")


# ---------------------------------------------------------------- systems


def _henon_params(p: dict) -> HenonParams:
    try:
        return HenonParams(
            complex_from_json(p["c"]),
            complex_from_json(p["b"]),
            float(p.get("Rx", p.get("R"))),
            float(p.get("Ry", p.get("R"))),
            float(p.get("Rx_inner", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"Hénon parameters need c, b and box radii: {exc}") from exc


def henon_params_from_json(data: dict) -> tuple[HenonParams, str]:
    """Parameters and metric of a Hénon system document."""
    if data.get("family") != "henon":
        raise InputError(f"expected a henon system, got family {data.get('family')!r}")
    p = data.get("params", {})
    return _henon_params(p), p.get("metric", "euclidean")


def system_from_json(data: dict) -> MultivaluedSystem:
    """Build a system from ``{"family": ..., "params": {...}}``."""
    if not isinstance(data, dict):
        raise InputError("a system document is a JSON object")
    family = data.get("family")
    p = data.get("params", {})
    try:
        if family == "circle-linear":
            return make_circle_system(int(p["degree"]))
        if family == "circle-perturbed":
            return make_circle_system(int(p["degree"]), float(p["epsilon"]), p.get("perturbation", "sin"))
        if family == "polynomial":
            hole = p.get("hole", "auto")
            if isinstance(hole, dict):
                hole = (complex_from_json(hole.get("center", 0)), float(hole["radius"]))
            return make_polynomial_system(complex_from_json(p["c"]), float(p["R"]), p.get("metric", "euclidean"), hole)
        if family == "henon":
            return make_henon_system(_henon_params(p), p.get("metric", "euclidean"))
        if family == "graph":
            if "adjacency" in p:
                return graph_from_adjacency(p["adjacency"])
            return graph_system([tuple(e) for e in p["edges"]], p.get("vertices"))
        if family == "associated":
            from .associated import associated_expanding

            parent = system_from_json({"family": "henon", "params": p["parent"]})
            return associated_expanding(parent, complex_from_json(p.get("y0", 0)))
    except KeyError as exc:
        raise InputError(f"{family} system is missing parameter {exc}") from exc
    raise InputError(f"unknown system family {family!r}")


def system_to_json(system: MultivaluedSystem) -> dict:
    params = dict(system.params)
    if system.family == "polynomial":
        hole = params.get("hole")
        params["hole"] = None if hole is None else {"center": hole[0], "radius": hole[1]}
    return {"family": system.family, "params": _jsonable(params)}


def load_system(path: str) -> MultivaluedSystem:
    return system_from_json(read_json(path))


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


# ---------------------------------------------------------------- points, orbits, hpos


def point_to_json(space, p):
    base = root_space(space)
    if isinstance(base, Discrete):
        return _jsonable(p)
    if isinstance(base, Circle):
        return _num(p)
    if isinstance(base, Product):
        return [complex_to_json(p[0]), complex_to_json(p[1])]
    return complex_to_json(p)


def point_from_json(space, v):
    base = root_space(space)
    if isinstance(base, Discrete):
        return tuple(v) if isinstance(v, list) else v
    if isinstance(base, Circle):
        return float(v)
    if isinstance(base, Product):
        if not isinstance(v, list) or len(v) != 2:
            raise InputError(f"points of a product are [x, y] pairs, got {v!r}")
        return np.array([complex_from_json(v[0]), complex_from_json(v[1])])
    return complex_from_json(v)


def points_from_json(space, values) -> np.ndarray:
    return as_points(space, [point_from_json(space, v) for v in values])


def orbit_to_json(space, orbit: Orbit) -> dict:
    return {
        "start": orbit.start,
        "window": orbit.window,
        "defect_tol": _num(orbit.defect_tol),
        "points": [point_to_json(space, p) for p in orbit.points],
    }


def orbit_from_json(space, data: dict) -> Orbit:
    return Orbit(
        points_from_json(space, data["points"]),
        int(data.get("start", 0)),
        data.get("window", "forward"),
        float(data.get("defect_tol", 1e-9)),
    )


def _fill_window(points: list, start: int, window: str, N: int | None, periodic: bool) -> tuple[list, int]:
    """Points on ``[-N, N]`` (bi) or ``[0, N]`` (forward), tiling periodic input."""
    if N is None:
        return points, start
    if N < 1:
        raise InputError("the window N must be at least 1")
    lo = -N if window == "bi" else 0
    hi = N
    if periodic:
        n = len(points)
        return [points[(i - start) % n] for i in range(lo, hi + 1)], lo
    if lo < start or hi > start + len(points) - 1:
        raise InputError(f"input covers indices [{start}, {start + len(points) - 1}], not the window [{lo}, {hi}]")
    return points[lo - start : hi - start + 1], lo


def input_orbit(system: MultivaluedSystem, data: dict, N: int | None = None) -> Orbit:
    """An orbit document, optionally tiled (``"periodic": true``) or cut to a window."""
    window = data.get("window", "forward")
    pts, start = _fill_window(list(data["points"]), int(data.get("start", 0)), window, N, bool(data.get("periodic")))
    return Orbit(points_from_json(system.X1, pts), start, window, float(data.get("defect_tol", 1e-9)))


def input_hpo(system: MultivaluedSystem, data: dict, N: int | None = None) -> HomotopyPseudoOrbit:
    """An hpo document.

    ``paths[k]`` lists the vertices of the path into point ``k + 1``.
    Without ``paths`` each path is the straight segment from ``sigma`` of the
    previous point to ``iota`` of the next one (the shortest arc on the circle).
    """
    if not isinstance(data, dict) or "points" not in data:
        raise InputError("an hpo document needs a 'points' list")
    window = data.get("window", "forward")
    periodic = bool(data.get("periodic"))
    raw = list(data["points"])
    start = int(data.get("start", 0))
    if "paths" in data:
        if periodic:
            raise InputError("periodic hpos take their paths from straight segments")
        pts = points_from_json(system.X1, raw)
        paths = [PolyPath(system.X0, [point_from_json(system.X0, v) for v in path]) for path in data["paths"]]
        hpo = make_hpo(system, pts, paths, start, window, data.get("bound"))
        if N is None:
            return hpo
        lo = -N if window == "bi" else 0
        if lo < start or N > start + len(pts) - 1:
            raise InputError(f"input covers indices [{start}, {start + len(pts) - 1}], not the window [{lo}, {N}]")
        a, b = lo - start, N - start
        return HomotopyPseudoOrbit(hpo.points[a : b + 1], hpo.paths[a:b], lo, window, hpo.bound)
    raw, start = _fill_window(raw, start, window, N, periodic)
    pts = points_from_json(system.X1, raw)
    paths = []
    if len(pts) > 1:
        sig = system.sigma(pts[:-1])
        iot = system.iota(pts[1:])
        for a, b in zip(sig, iot):
            if isinstance(root_space(system.X0), Circle):
                b = a + ((float(b) - float(a) + 0.5) % 1.0 - 0.5)
            paths.append(PolyPath(system.X0, as_points(system.X0, [a, b])))
    return make_hpo(system, pts, paths, start, window, data.get("bound"))


def hpo_to_json(space0, space1, hpo: HomotopyPseudoOrbit) -> dict:
    return {
        "start": hpo.start,
        "window": hpo.window,
        "points": [point_to_json(space1, p) for p in hpo.points],
        "paths": [[point_to_json(space0, v) for v in path.vertices] for path in hpo.paths],
    }


def trace_to_json(trace: ShadowTrace) -> dict:
    return {
        "stages": list(trace.stages),
        "max_length": _jsonable(trace.max_length),
        "max_defect": _jsonable(trace.max_defect),
        "extra": _jsonable(trace.extra),
        "meta": _jsonable(trace.meta),
    }


def _coord_header(space, prefix: str) -> list[str]:
    base = root_space(space)
    if isinstance(base, Product):
        return [f"{prefix}re_x", f"{prefix}im_x", f"{prefix}re_y", f"{prefix}im_y"]
    if isinstance(base, (Circle, Discrete)):
        return [f"{prefix}x"]
    return [f"{prefix}re", f"{prefix}im"]


def _coords(space, p) -> list[str]:
    base = root_space(space)
    if isinstance(base, Discrete):
        return [str(p)]
    if isinstance(base, Circle):
        return [f"{float(p):.{DIGITS}g}"]
    zs = [complex(p[0]), complex(p[1])] if isinstance(base, Product) else [complex(p)]
    return [f"{v:.{DIGITS}g}" for z in zs for v in (z.real, z.imag)]


def orbit_to_csv(space, orbit: Orbit) -> str:
    """Rows ``index, coordinates...`` with real and imaginary parts split."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", *_coord_header(space, "")])
    for i, p in zip(orbit.indices, orbit.points):
        writer.writerow([i, *_coords(space, p)])
    return buf.getvalue()


def orbit_from_csv(space, text: str, window: str = "bi", defect_tol: float = 1e-9) -> Orbit:
    rows = list(csv.reader(io.StringIO(text)))
    base = root_space(space)
    idx, pts = [], []
    for row in rows[1:]:
        idx.append(int(row[0]))
        vals = row[1:]
        if isinstance(base, Circle):
            pts.append(float(vals[0]))
        elif isinstance(base, Discrete):
            pts.append(vals[0])
        else:
            f = [float(v) for v in vals]
            zs = [complex(f[k], f[k + 1]) for k in range(0, len(f), 2)]
            pts.append(np.array(zs) if isinstance(base, Product) else zs[0])
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise InputError("orbit CSV indices must be consecutive")
    return Orbit(as_points(space, pts), idx[0], window, defect_tol)


def paired_csv(source_space, target_space, source: Orbit, image: Orbit, residual: dict[int, float]) -> str:
    """Rows pairing each source point with its image and the conjugacy residual at that index."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", *_coord_header(source_space, "src_"), *_coord_header(target_space, "img_"), "residual"])
    for i, q in zip(image.indices, image.points):
        if i not in source.indices:
            continue
        r = residual.get(i)
        writer.writerow([i, *_coords(source_space, source.at(i)), *_coords(target_space, q), "" if r is None else f"{r:.{DIGITS}g}"])
    return buf.getvalue()


def dumps(data) -> str:
    return json.dumps(_jsonable(data), indent=2, ensure_ascii=False) + "\n"


__all__ = [
    "complex_to_json",
    "system_from_json",
    "system_to_json",
    "henon_params_from_json",
    "load_system",
    "read_json",
    "point_to_json",
    "point_from_json",
    "orbit_to_json",
    "orbit_from_json",
    "input_orbit",
    "input_hpo",
    "hpo_to_json",
    "trace_to_json",
    "orbit_to_csv",
    "orbit_from_csv",
    "paired_csv",
    "dumps",
]
