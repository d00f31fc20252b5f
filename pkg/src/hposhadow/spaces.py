"""Metric spaces that carry points and polygonal paths.

Four concrete kinds are supported:

* ``Circle``: the circle R/Z.  Path vertices are *lifted* reals, so a
  polyline records its own winding through the displacement of its lift.
* ``Discrete``: a finite set with the 0/1 metric; the only paths are constant.
* ``Planar``: a round disk in C, optionally with one round hole removed,
  carrying either the euclidean metric or a complete hyperbolic metric
  (Poincaré disk, or the hyperbolic metric of a concentric annulus).
* ``Product``: a product of two planar factors with the sum metric.
  Points are complex arrays whose last axis has length 2.

``Subset`` restricts a space by a predicate while keeping its metric.  It
models sets such as the preimage domain of a polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import DomainError, InputError, UnsupportedError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_S = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS


class Space:
    kind = "abstract"

    def contains(self, p) -> bool:
        return bool(np.all(self.contains_many(np.asarray(p)[None])))

    def contains_many(self, pts) -> np.ndarray:
        raise NotImplementedError

    def segment_lengths(self, vertices) -> np.ndarray:
        raise NotImplementedError

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def coincide(self, p, q, tol: float) -> bool:
        """Whether two points agree to within ``tol`` in raw coordinates."""
        return bool(np.max(np.abs(np.asarray(p) - np.asarray(q))) <= tol)

    def interpolate(self, a, b, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        a = np.asarray(a)
        b = np.asarray(b)
        shape = (len(s),) + (1,) * a.ndim
        return a + (b - a) * s.reshape(shape)

    def winding(self, loop) -> tuple[int, ...]:
        """Homotopy invariant of a closed polyline; zero means null-homotopic."""
        raise UnsupportedError(f"no homotopy decision procedure for {self.kind} spaces")

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Circle(Space):
    """The circle R/Z with arc-length metric."""

    kind = "circle"

    def contains_many(self, pts):
        return np.isfinite(np.asarray(pts, dtype=float))

    def segment_lengths(self, vertices):
        return np.abs(np.diff(np.asarray(vertices, dtype=float)))

    def distance(self, p, q):
        d = (float(p) - float(q)) % 1.0
        return min(d, 1.0 - d)

    def coincide(self, p, q, tol):
        return self.distance(p, q) <= tol

    def winding(self, loop):
        v = np.asarray(loop, dtype=float)
        return (int(round(v[-1] - v[0])),)

    def to_json(self):
        return {"kind": "circle", "parameters": {}, "metric": "arc"}


@dataclass(frozen=True, eq=False)
class Discrete(Space):
    """A finite set of hashable elements with the 0/1 metric."""

    elements: tuple = ()
    kind = "discrete"

    def contains(self, p):
        return p in set(self.elements)

    def contains_many(self, pts):
        members = set(self.elements)
        return np.array([p in members for p in pts], dtype=bool)

    def segment_lengths(self, vertices):
        v = list(vertices)
        return np.array([0.0 if a == b else 1.0 for a, b in zip(v, v[1:])])

    def distance(self, p, q):
        return 0.0 if p == q else 1.0

    def coincide(self, p, q, tol):
        return p == q

    def interpolate(self, a, b, s):
        if a != b:
            raise DomainError("paths in a discrete space must be constant")
        return np.array([a] * len(s), dtype=object)

    def winding(self, loop):
        return ()

    def to_json(self):
        return {"kind": "discrete", "parameters": {"elements": list(self.elements)}, "metric": "discrete"}


@dataclass(frozen=True, eq=False)
class Planar(Space):
    """Open disk ``|z - center| < radius`` minus an optional closed round hole.

    ``hole`` is ``(hole_center, hole_radius)``.  With ``metric="poincare"``
    the disk carries the Poincaré metric, and a hole concentric with the disk
    turns it into the hyperbolic metric of the annulus.
    """

    center: complex = 0j
    radius: float = 1.0
    metric: str = "euclidean"
    hole: tuple[complex, float] | None = None
    kind = "planar"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"disk radius must be positive, got {self.radius}")
        if self.metric not in ("euclidean", "poincare"):
            raise InputError(f"unknown metric {self.metric!r}")
        if self.hole is not None:
            hc, hr = self.hole
            if hr <= 0 or abs(hc - self.center) + hr >= self.radius:
                raise DomainError("the hole must be a nonempty disk inside the domain")
            if self.metric == "poincare" and abs(hc - self.center) > 0:
                raise UnsupportedError("the hyperbolic metric is only implemented for concentric annuli")

    def contains_many(self, pts):
        z = np.asarray(pts, dtype=complex)
        inside = np.abs(z - self.center) < self.radius
        if self.hole is not None:
            inside &= np.abs(z - self.hole[0]) > self.hole[1]
        return inside

    def density(self, z) -> np.ndarray:
        """Metric density with respect to |dz|."""
        z = np.asarray(z, dtype=complex)
        if self.metric == "euclidean":
            return np.ones(z.shape)
        r = np.abs(z - self.center)
        if self.hole is None:
            return 2.0 * self.radius / (self.radius**2 - r**2)
        r1, r2 = self.hole[1], self.radius
        width = math.log(r2 / r1)
        return (math.pi / width) / (r * np.sin(math.pi * np.log(r / r1) / width))

    def segment_lengths(self, vertices):
        v = np.asarray(vertices, dtype=complex)
        step = np.diff(v)
        if self.metric == "euclidean":
            return np.abs(step)
        pts = v[:-1, None] + step[:, None] * _GL_S[None, :]
        return np.abs(step) * (self.density(pts) @ _GL_W)

    def pair_lengths(self, a, b) -> np.ndarray:
        """Lengths of the straight segments from ``a`` to ``b``, elementwise."""
        a = np.asarray(a, dtype=complex)
        step = np.asarray(b, dtype=complex) - a
        if self.metric == "euclidean":
            return np.abs(step)
        pts = a[..., None] + step[..., None] * _GL_S
        return np.abs(step) * (self.density(pts) @ _GL_W)

    def distance(self, p, q):
        p, q = complex(p), complex(q)
        if self.metric == "euclidean":
            return abs(p - q)
        if self.hole is None:
            u = (p - self.center) / self.radius
            w = (q - self.center) / self.radius
            return 2.0 * math.atanh(min(abs(u - w) / abs(1 - u.conjugate() * w), 1.0))
        # No closed form on the annulus; the straight segment gives an upper bound
        # that is sharp for the short separations where defects are measured.
        return float(self.segment_lengths([p, q])[0])

    def winding(self, loop):
        if self.hole is None:
            return ()
        v = np.asarray(loop, dtype=complex) - self.hole[0]
        turns = np.angle(v[1:] / v[:-1]).sum() / (2 * math.pi)
        return (int(round(turns)),)

    def to_json(self):
        params: dict[str, Any] = {"center": _cjson(self.center), "radius": self.radius}
        if self.hole is not None:
            params["hole"] = {"center": _cjson(self.hole[0]), "radius": self.hole[1]}
        return {"kind": "planar", "parameters": params, "metric": self.metric}


@dataclass(frozen=True, eq=False)
class Product(Space):
    """Product of two planar spaces with the sum metric."""

    first: Planar
    second: Planar
    kind = "product"

    def contains_many(self, pts):
        z = np.asarray(pts, dtype=complex)
        return self.first.contains_many(z[..., 0]) & self.second.contains_many(z[..., 1])

    def segment_lengths(self, vertices):
        v = np.asarray(vertices, dtype=complex)
        return self.first.segment_lengths(v[:, 0]) + self.second.segment_lengths(v[:, 1])

    def pair_lengths(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
        return self.first.pair_lengths(a[..., 0], b[..., 0]) + self.second.pair_lengths(a[..., 1], b[..., 1])

    def distance(self, p, q):
        p, q = np.asarray(p), np.asarray(q)
        return self.first.distance(p[0], q[0]) + self.second.distance(p[1], q[1])

    def winding(self, loop):
        v = np.asarray(loop, dtype=complex)
        return self.first.winding(v[:, 0]) + self.second.winding(v[:, 1])

    def to_json(self):
        return {
            "kind": "product",
            "parameters": {"factors": [self.first.to_json(), self.second.to_json()]},
            "metric": "sum",
        }


@dataclass(frozen=True, eq=False)
class Subset(Space):
    """Points of ``base`` satisfying ``predicate``, with the metric of ``base``."""

    base: Space
    predicate: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    description: str = "subset"

    @property
    def kind(self):
        return self.base.kind

    def contains_many(self, pts):
        pts = np.asarray(pts)
        inside = self.base.contains_many(pts)
        if inside.any():
            inside = inside & np.asarray(self.predicate(pts), dtype=bool)
        return inside

    def segment_lengths(self, vertices):
        return self.base.segment_lengths(vertices)

    def distance(self, p, q):
        return self.base.distance(p, q)

    def coincide(self, p, q, tol):
        return self.base.coincide(p, q, tol)

    def interpolate(self, a, b, s):
        return self.base.interpolate(a, b, s)

    def winding(self, loop):
        return self.base.winding(loop)

    def density(self, z):
        return self.base.density(z)

    def pair_lengths(self, a, b):
        return self.base.pair_lengths(a, b)

    def to_json(self):
        out = dict(self.base.to_json())
        out["restriction"] = self.description
        return out


def root_space(space: Space) -> Space:
    while isinstance(space, Subset):
        space = space.base
    return space


def _cjson(z) -> float | list[float]:
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InputError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    return complex(v)


def space_from_json(data: dict) -> Space:
    kind = data.get("kind")
    params = data.get("parameters", {})
    if kind == "circle":
        return Circle()
    if kind == "discrete":
        return Discrete(tuple(params["elements"]))
    if kind == "planar":
        hole = params.get("hole")
        return Planar(
            complex_from_json(params.get("center", 0)),
            float(params["radius"]),
            data.get("metric", "euclidean"),
            None if hole is None else (complex_from_json(hole.get("center", 0)), float(hole["radius"])),
        )
    if kind == "product":
        a, b = params["factors"]
        return Product(space_from_json(a), space_from_json(b))
    raise InputError(f"unknown space kind {kind!r}")
