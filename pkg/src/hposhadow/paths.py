"""Polygonal paths in the spaces of :mod:`hposhadow.spaces`."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spaces import Circle, Discrete, Space, root_space


def _as_vertices(space: Space, vertices) -> np.ndarray:
    base = root_space(space)
    if isinstance(base, Discrete):
        items = list(vertices)
        arr = np.empty(len(items), dtype=object)
        for k, item in enumerate(items):
            arr[k] = item
        return arr
    if isinstance(base, Circle):
        return np.asarray(vertices, dtype=float).reshape(-1)
    return np.asarray(vertices, dtype=complex)


@dataclass(frozen=True, eq=False)
class PolyPath:
    """A path given by its vertices, joined by straight segments.

    On the circle the vertices are lifted reals, so ``[0.0, 1.0]`` is the loop
    at 0 that winds once.  In a discrete space a path must be constant.
    """

    space: Space
    vertices: np.ndarray

    def __post_init__(self):
        v = _as_vertices(self.space, self.vertices)
        if len(v) == 0:
            raise DomainError("a path needs at least one vertex")
        if isinstance(root_space(self.space), Discrete) and any(x != v[0] for x in v):
            raise DomainError("paths in a discrete space must be constant")
        object.__setattr__(self, "vertices", v)

    @classmethod
    def constant(cls, space: Space, point) -> "PolyPath":
        return cls(space, _as_vertices(space, [point]))

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def segment_lengths(self) -> np.ndarray:
        if len(self.vertices) < 2:
            return np.zeros(0)
        return self.space.segment_lengths(self.vertices)

    def length(self) -> float:
        return math.fsum(self.segment_lengths())

    def reversed(self) -> "PolyPath":
        return PolyPath(self.space, self.vertices[::-1].copy())

    def concat(self, other: "PolyPath", tol: float = 1e-9) -> "PolyPath":
        """Run ``self`` then ``other``; the junction must match to within ``tol``."""
        if not self.space.coincide(self.end, other.start, tol):
            raise DomainError(f"cannot concatenate paths: {self.end!r} != {other.start!r}")
        tail = other.vertices
        if isinstance(root_space(self.space), Circle):
            tail = tail + round(float(self.end) - float(other.start))
        return PolyPath(self.space, np.concatenate([self.vertices, tail[1:]]))

    __mul__ = concat

    def refined(self, k: int) -> "PolyPath":
        """Split every segment into ``k`` equal pieces; the image is unchanged."""
        if k < 1:
            raise DomainError("refinement factor must be at least 1")
        v = self.vertices
        if k == 1 or len(v) < 2:
            return self
        s = np.arange(k) / k
        pieces = [self.space.interpolate(a, b, s) for a, b in zip(v[:-1], v[1:])]
        pieces.append(v[-1:])
        return PolyPath(self.space, np.concatenate(pieces))

    def displacement(self) -> float:
        """Lifted displacement of a circle path."""
        return float(self.vertices[-1] - self.vertices[0])

    def to_json(self) -> list:
        return [_vertex_json(v) for v in self.vertices]


def _vertex_json(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_vertex_json(x) for x in v]
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v
