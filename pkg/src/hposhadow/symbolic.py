"""Graph shifts, circle codings and itineraries.

A directed graph is a multivalued system with ``X0`` the vertices, ``X1`` the
edges, ``iota`` the tail map and ``sigma`` the head map.  Its orbits are
bi-infinite or one-sided walks.  For the degree-``d`` circle map the arcs
``[k/d, (k+1)/d)`` form a Markov partition, and itineraries with respect to
it are base-``d`` expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, InputError
from .expanding import ExpansionCertificate, constant_lifter
from .mds import MultivaluedSystem, Orbit, as_points
from .spaces import Discrete

MAX_PERIOD = 12
BOUNDARY_GUARD = 1e-8


def graph_system(edges: Iterable[tuple[Hashable, Hashable, Hashable]], vertices: Sequence | None = None) -> MultivaluedSystem:
    """Graph shift from ``(name, tail, head)`` triples."""
    edges = [tuple(e) for e in edges]
    if not edges:
        raise InputError("a graph needs at least one edge")
    if any(len(e) != 3 for e in edges):
        raise InputError("edges are (name, tail, head) triples")
    names = [e[0] for e in edges]
    if len(set(names)) != len(names):
        raise InputError("edge names must be distinct")
    tail = {e[0]: e[1] for e in edges}
    head = {e[0]: e[2] for e in edges}
    verts = list(vertices) if vertices is not None else sorted({*tail.values(), *head.values()}, key=str)
    if not set(tail.values()) | set(head.values()) <= set(verts):
        raise InputError("every edge endpoint must be a listed vertex")
    X0 = Discrete(tuple(verts))
    X1 = Discrete(tuple(names))

    def iota(es):
        return as_points(X0, [tail[e] for e in es])

    def sigma(es):
        return as_points(X0, [head[e] for e in es])

    system = MultivaluedSystem(
        X0=X0,
        X1=X1,
        iota=iota,
        sigma=sigma,
        certificate=ExpansionCertificate(2.0, 0.5, "graph"),
        family="graph",
        params={"vertices": verts, "edges": [list(e) for e in edges]},
    )
    object.__setattr__(system, "lift", constant_lifter(system))
    return system


def graph_from_adjacency(adjacency: Mapping[Hashable, Sequence[Hashable]]) -> MultivaluedSystem:
    """Graph shift from an adjacency list ``{vertex: [head, head, ...]}``.

    Repeated heads give parallel edges.  Edges are numbered 0, 1, 2, ... in
    the order they are listed.
    """
    edges = []
    for v, heads in adjacency.items():
        for w in heads:
            edges.append((len(edges), v, w))
    return graph_system(edges, vertices=list(adjacency))


def full_shift(d: int) -> MultivaluedSystem:
    """One vertex with ``d`` loops named 0, ..., d - 1."""
    if d < 1:
        raise DomainError("the alphabet needs at least one symbol")
    return graph_system([(k, 0, 0) for k in range(d)], vertices=[0])


def adjacency_matrix(system: MultivaluedSystem) -> np.ndarray:
    """Entry ``(v, w)`` counts the edges from vertex ``v`` to vertex ``w``."""
    verts = list(system.X0.elements)
    pos = {v: k for k, v in enumerate(verts)}
    A = np.zeros((len(verts), len(verts)), dtype=np.int64)
    for e in system.X1.elements:
        A[pos[system.iota_of(e)], pos[system.sigma_of(e)]] += 1
    return A


def enumerate_periodic(system: MultivaluedSystem, n: int) -> list[tuple]:
    """All closed walks of length ``n`` as edge tuples (rotations counted separately).

    Their number is the trace of the n-th power of the adjacency matrix.
    """
    if n < 1:
        raise DomainError("period must be at least 1")
    if n > MAX_PERIOD:
        raise DomainError(f"period {n} exceeds the enumeration limit {MAX_PERIOD}")
    edges = list(system.X1.elements)
    tail = {e: system.iota_of(e) for e in edges}
    head = {e: system.sigma_of(e) for e in edges}
    out_of: dict = {}
    for e in edges:
        out_of.setdefault(tail[e], []).append(e)
    found = []

    def extend(word):
        if len(word) == n:
            if head[word[-1]] == tail[word[0]]:
                found.append(tuple(word))
            return
        for e in out_of.get(head[word[-1]], []):
            word.append(e)
            extend(word)
            word.pop()

    for e in edges:
        extend([e])
    return found


@dataclass(frozen=True)
class MarkovPartition:
    """The arcs ``[k/d, (k+1)/d)`` of the circle, labelled ``k``."""

    degree: int

    def __post_init__(self):
        if not 2 <= self.degree <= 10:
            raise DomainError("symbols are single digits, so the degree must be between 2 and 10")

    def symbol(self, x: float, guard: float = BOUNDARY_GUARD) -> str:
        x = float(x) % 1.0
        scaled = x * self.degree
        nearest = round(scaled)
        if abs(scaled - nearest) / self.degree < guard or abs(x - 1.0) < guard:
            raise DomainError(f"point {x!r} is within {guard:g} of an arc boundary")
        return str(int(math.floor(scaled)) % self.degree)


def code_orbit(system: MultivaluedSystem, partition: MarkovPartition, orbit: Orbit) -> str:
    """Itinerary of an orbit of a linear circle map with respect to ``partition``."""
    if system.family != "circle-linear" or system.params["degree"] != partition.degree:
        raise InputError("coding needs the linear circle map whose degree matches the partition")
    return "".join(partition.symbol(x) for x in orbit.points)


def parse_itinerary(text: str) -> tuple[str, str]:
    """Split ``"1(00)"`` into the preperiod ``"1"`` and the period ``"00"``."""
    text = text.strip()
    if text.count("(") != 1 or not text.endswith(")"):
        raise InputError(f"itineraries look like 'pre(period)', got {text!r}")
    pre, period = text[:-1].split("(")
    return pre, period


def decode_symbols(d: int, preperiod: str, period: str) -> Fraction:
    """The circle point whose base-``d`` expansion is ``preperiod`` followed by ``period`` repeated."""
    if d < 2:
        raise DomainError("base must be at least 2")
    if not period:
        raise InputError("the periodic part must be nonempty")
    for s in preperiod + period:
        if not s.isdigit() or int(s) >= d:
            raise InputError(f"symbol {s!r} is not a digit below {d}")
    head = Fraction(int(preperiod, d) if preperiod else 0, d ** len(preperiod))
    cycle = Fraction(int(period, d), d ** len(period) - 1)
    return (head + cycle / d ** len(preperiod)) % 1


def itinerary_orbit(d: int, preperiod: str, period: str, length: int) -> list[Fraction]:
    """Exact points ``x_0, ..., x_{length-1}`` of the orbit with the given itinerary."""
    points = []
    pre, per = preperiod, period
    for _ in range(length):
        points.append(decode_symbols(d, pre, per))
        if pre:
            pre = pre[1:]
        else:
            per = per[1:] + per[0]
    return points


__all__ = [
    "graph_system",
    "graph_from_adjacency",
    "full_shift",
    "adjacency_matrix",
    "enumerate_periodic",
    "MarkovPartition",
    "code_orbit",
    "parse_itinerary",
    "decode_symbols",
    "itinerary_orbit",
]
