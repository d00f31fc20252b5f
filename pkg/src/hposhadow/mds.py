"""Multivalued dynamical systems and the objects built on them.

A multivalued system is a pair of maps ``iota, sigma: X1 -> X0``.  An orbit
is a sequence in ``X1`` with ``sigma(x[i-1]) == iota(x[i])``.  A homotopy
pseudo-orbit (hpo) relaxes the equality to a path ``alpha[i]`` from
``sigma(x[i-1])`` to ``iota(x[i])``.  Homotopy semi-conjugacies transport
hpos from one system to another.

Index conventions: an orbit or hpo stores its points in an array together
with ``start``, the index of the first point.  ``paths[k]`` joins
``points[k]`` to ``points[k + 1]``, so it is the path with index
``start + k + 1``.  ``window`` is ``"forward"`` for one-sided data and
``"bi"`` for a finite window of a bi-infinite sequence.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import CertificateError, DomainError, InputError, OrbitDefectError
from .paths import PolyPath, _as_vertices
from .spaces import Circle, Discrete, Space, root_space

DEFAULT_DEFECT_TOL = 1e-9
ENDPOINT_TOL = 1e-12


def as_points(space: Space, pts) -> np.ndarray:
    """Convert a sequence of points of ``space`` to the canonical array form."""
    return _as_vertices(space, pts)


def single(space: Space, p) -> np.ndarray:
    """A one-element point array holding ``p``."""
    if isinstance(root_space(space), Discrete):
        arr = np.empty(1, dtype=object)
        arr[0] = p
        return arr
    return as_points(space, np.asarray(p)[None])


@dataclass(frozen=True, eq=False, kw_only=True)
class MultivaluedSystem:
    """The data ``(X0, X1; iota, sigma)`` plus whatever certifies it.

    ``iota`` and ``sigma`` act on point arrays.  On the circle, ``sigma`` is a
    continuous lift R -> R, so applying it vertexwise to a lifted path gives
    the lifted image path.  ``lift`` is set for expanding systems: it maps a
    batch of target vertex arrays and base points to lifted vertex arrays.
    """

    X0: Space
    X1: Space
    iota: Callable[[np.ndarray], np.ndarray]
    sigma: Callable[[np.ndarray], np.ndarray]
    d_sigma: Callable[[np.ndarray], np.ndarray] | None = None
    certificate: Any = None
    lift: Callable | None = None
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def sigma_of(self, p):
        return self.sigma(single(self.X1, p))[0]

    def iota_of(self, p):
        return self.iota(single(self.X1, p))[0]


@dataclass(frozen=True, eq=False)
class Orbit:
    points: np.ndarray
    start: int = 0
    window: str = "forward"
    defect_tol: float = DEFAULT_DEFECT_TOL

    def __len__(self):
        return len(self.points)

    @property
    def indices(self) -> range:
        return range(self.start, self.start + len(self.points))

    def at(self, i: int):
        return self.points[i - self.start]


@dataclass(frozen=True, eq=False)
class HomotopyPseudoOrbit:
    points: np.ndarray
    paths: tuple[PolyPath, ...]
    start: int = 0
    window: str = "forward"
    bound: float | None = None

    def __len__(self):
        return len(self.points)

    @property
    def indices(self) -> range:
        return range(self.start, self.start + len(self.points))

    def path_lengths(self) -> np.ndarray:
        return np.array([p.length() for p in self.paths])

    @property
    def length_bound(self) -> float:
        if self.bound is not None:
            return self.bound
        lengths = self.path_lengths()
        return float(lengths.max()) if len(lengths) else 0.0


def _check_window(window: str):
    if window not in ("forward", "bi"):
        raise InputError(f"window must be 'forward' or 'bi', got {window!r}")


def _nonmembers(space: Space, pts) -> np.ndarray:
    if isinstance(root_space(space), Discrete):
        return np.array([not space.contains(p) for p in pts], dtype=bool)
    return ~space.contains_many(pts)


def orbit_defects(system: MultivaluedSystem, points) -> np.ndarray:
    """Distances ``d0(sigma(x[i-1]), iota(x[i]))`` for consecutive points."""
    pts = as_points(system.X1, points)
    if len(pts) < 2:
        return np.zeros(0)
    s = system.sigma(pts[:-1])
    t = system.iota(pts[1:])
    return np.array([system.X0.distance(a, b) for a, b in zip(s, t)])


def validate_orbit(
    system: MultivaluedSystem,
    points,
    window: str = "forward",
    start: int = 0,
    tol: float = DEFAULT_DEFECT_TOL,
) -> Orbit:
    """Check that ``points`` is an orbit up to ``tol`` and wrap it."""
    _check_window(window)
    pts = as_points(system.X1, points)
    if len(pts) == 0:
        raise InputError("an orbit needs at least one point")
    bad = np.flatnonzero(_nonmembers(system.X1, pts))
    if len(bad):
        raise DomainError(f"orbit point at index {start + bad[0]} is not in X1")
    defects = orbit_defects(system, pts)
    worse = np.flatnonzero(defects > tol)
    if len(worse):
        found = [(start + int(k), float(defects[k])) for k in worse]
        i, d = found[0]
        raise OrbitDefectError(f"orbit defect {d:.3e} at index {i} exceeds {tol:.1e} ({len(found)} in all)", found)
    return Orbit(pts, start, window, tol)


def shift_orbit(orbit: Orbit) -> Orbit:
    """The orbit ``y[i] = x[i + 1]``; the window loses one point."""
    if len(orbit) < 2:
        raise DomainError("cannot shift an orbit with a single point")
    return Orbit(orbit.points[1:], orbit.start, orbit.window, orbit.defect_tol)


def _snap(system: MultivaluedSystem, path: PolyPath, a, b, tol: float, index: int) -> PolyPath:
    """Force the endpoints of ``path`` to be exactly ``a`` and ``b``."""
    space = system.X0
    if not space.coincide(path.start, a, tol):
        raise DomainError(f"path {index} does not start at sigma(x[{index - 1}])")
    if not space.coincide(path.end, b, tol):
        raise DomainError(f"path {index} does not end at iota(x[{index}])")
    base = root_space(space)
    if isinstance(base, Discrete):
        return path
    v = path.vertices.copy()
    if isinstance(base, Circle):
        v = v + round(float(a) - float(v[0]))
        v[0] = a
        v[-1] = b + round(float(v[-1]) - float(b))
    else:
        v[0] = a
        v[-1] = b
    return PolyPath(path.space, v)


def make_hpo(
    system: MultivaluedSystem,
    points,
    paths: Sequence[PolyPath | Sequence],
    start: int = 0,
    window: str = "forward",
    bound: float | None = None,
    tol: float = DEFAULT_DEFECT_TOL,
) -> HomotopyPseudoOrbit:
    """Build an hpo after checking membership and path endpoints.

    Endpoints within ``tol`` of the required images are snapped onto them, so
    the stored paths start and end exactly at computed images.
    """
    _check_window(window)
    pts = as_points(system.X1, points)
    if len(pts) == 0:
        raise InputError("an hpo needs at least one point")
    if len(paths) != len(pts) - 1:
        raise InputError(f"{len(pts)} points need {len(pts) - 1} paths, got {len(paths)}")
    bad = np.flatnonzero(_nonmembers(system.X1, pts))
    if len(bad):
        raise DomainError(f"hpo point at index {start + bad[0]} is not in X1")
    sig = system.sigma(pts[:-1]) if len(pts) > 1 else []
    iot = system.iota(pts[1:]) if len(pts) > 1 else []
    fixed = []
    for k, p in enumerate(paths):
        if not isinstance(p, PolyPath):
            p = PolyPath(system.X0, p)
        fixed.append(_snap(system, p, sig[k], iot[k], tol, start + k + 1))
    hpo = HomotopyPseudoOrbit(pts, tuple(fixed), start, window, bound)
    if bound is not None and len(fixed):
        worst = int(np.argmax(hpo.path_lengths()))
        if hpo.path_lengths()[worst] > bound:
            raise DomainError(f"path {start + worst + 1} is longer than the declared bound {bound}")
    return hpo


def hpo_from_orbit(system: MultivaluedSystem, orbit: Orbit) -> HomotopyPseudoOrbit:
    """View an orbit as an hpo whose paths are the (tiny) defect segments."""
    pts = orbit.points
    if len(pts) < 2:
        return HomotopyPseudoOrbit(pts, (), orbit.start, orbit.window)
    sig = system.sigma(pts[:-1])
    iot = system.iota(pts[1:])
    base = root_space(system.X0)
    paths = []
    for a, b in zip(sig, iot):
        if isinstance(base, Discrete):
            paths.append(PolyPath.constant(system.X0, a))
        elif isinstance(base, Circle):
            paths.append(PolyPath(system.X0, [a, b + round(float(a) - float(b))]))
        else:
            paths.append(PolyPath(system.X0, np.stack([a, b])))
    return HomotopyPseudoOrbit(pts, tuple(paths), orbit.start, orbit.window)


@dataclass
class ShadowTrace:
    """Per-stage record of a shadowing run.

    ``extra`` holds additional per-stage columns and ``meta`` holds constants of
    the run (expansion factor, a-priori budgets and so on).
    """

    stages: list[int] = field(default_factory=list)
    max_length: list[float] = field(default_factory=list)
    max_defect: list[float] = field(default_factory=list)
    points: list[np.ndarray] = field(default_factory=list)
    extra: dict[str, list] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)

    def record(self, stage: int, max_length: float, max_defect: float, points, **columns):
        if self.stages and stage <= self.stages[-1]:
            raise ValueError("trace stages must increase")
        self.stages.append(stage)
        self.max_length.append(float(max_length))
        self.max_defect.append(float(max_defect))
        self.points.append(points)
        for key, value in columns.items():
            self.extra.setdefault(key, []).append(value)

    @property
    def n_stages(self) -> int:
        return self.stages[-1] if self.stages else 0

    def to_csv(self, handle=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = sorted(self.extra)
        writer.writerow(["stage", "max_length", "max_defect", *keys])
        for k, stage in enumerate(self.stages):
            row = [stage, f"{self.max_length[k]:.15g}", f"{self.max_defect[k]:.15g}"]
            row += [f"{float(self.extra[key][k]):.15g}" for key in keys]
            writer.writerow(row)
        text = buf.getvalue()
        if handle is not None:
            handle.write(text)
        return text


@dataclass(frozen=True, eq=False)
class HomotopySemiConjugacy:
    """Maps ``h0: X0 -> Y0`` and ``h1: X1 -> Y1`` with homotopies ``G`` and ``H``.

    ``G(x, t)`` runs from ``h0(sigma(x))`` to ``sigma'(h1(x))`` and ``H(x, t)``
    from ``h0(iota(x))`` to ``iota'(h1(x))``.  ``h0`` and ``h1`` act on point
    arrays.  ``G`` and ``H`` take one point and an array of times and return
    the corresponding array of points in ``Y0``.  ``K`` is the number of
    segments used when a homotopy is turned into a polyline.
    """

    source: MultivaluedSystem
    target: MultivaluedSystem
    h0: Callable[[np.ndarray], np.ndarray]
    h1: Callable[[np.ndarray], np.ndarray]
    G: Callable[[Any, np.ndarray], np.ndarray]
    H: Callable[[Any, np.ndarray], np.ndarray]
    K: int = 64
    name: str = "custom"


def unwrap_lift(v: np.ndarray) -> np.ndarray:
    """Lift circle samples so that consecutive values differ by less than 1/2."""
    v = np.asarray(v, dtype=float)
    if len(v) < 2:
        return v.copy()
    d = np.diff(v)
    d -= np.round(d)
    return np.concatenate([[v[0]], v[0] + np.cumsum(d)])


def _homotopy_path(space: Space, fn, x, K: int) -> PolyPath:
    t = np.linspace(0.0, 1.0, K + 1)
    vals = fn(x, t)
    if isinstance(root_space(space), Circle):
        vals = unwrap_lift(vals)
    elif isinstance(root_space(space), Discrete):
        vals = vals[:1]
    return PolyPath(space, vals)


def _image_path(space: Space, h0, path: PolyPath) -> PolyPath:
    base = root_space(space)
    src = root_space(path.space)
    if isinstance(src, Discrete):
        return PolyPath.constant(space, h0(path.vertices[:1])[0])
    if isinstance(src, Circle):
        steps = path.segment_lengths()
        k = max(1, int(np.ceil(steps.max() * 16))) if len(steps) else 1
        path = path.refined(k)
    vals = h0(path.vertices)
    if isinstance(base, Circle):
        vals = unwrap_lift(vals)
    if isinstance(base, Discrete):
        return PolyPath.constant(space, vals[0])
    return PolyPath(space, vals)


def _endpoint_check(space: Space, got, want, what: str, index: int, tol: float):
    scale = 1.0
    if not isinstance(root_space(space), Discrete):
        scale = max(1.0, float(np.max(np.abs(np.asarray(want, dtype=complex)))))
    if not space.coincide(got, want, tol * scale):
        raise CertificateError(f"endpoint identity for {what} fails at index {index}")


def check_hsc_at(h: HomotopySemiConjugacy, x, index: int = 0, tol: float = ENDPOINT_TOL):
    """Verify the four endpoint identities of ``h`` at the point ``x`` of X1."""
    S, T = h.source, h.target
    xs = single(S.X1, x)
    hx = h.h1(xs)
    ends = np.array([0.0, 1.0])
    g = h.G(x, ends)
    hh = h.H(x, ends)
    _endpoint_check(T.X0, g[0], h.h0(S.sigma(xs))[0], "G at t=0", index, tol)
    _endpoint_check(T.X0, g[1], T.sigma(hx)[0], "G at t=1", index, tol)
    _endpoint_check(T.X0, hh[0], h.h0(S.iota(xs))[0], "H at t=0", index, tol)
    _endpoint_check(T.X0, hh[1], T.iota(hx)[0], "H at t=1", index, tol)


def apply_hsc(h: HomotopySemiConjugacy, hpo: HomotopyPseudoOrbit, tol: float = ENDPOINT_TOL) -> HomotopyPseudoOrbit:
    """Transport an hpo: points go through ``h1`` and paths become ``G^-1 . h0(alpha) . H``."""
    T = h.target
    xs = hpo.points
    for k, x in enumerate(xs):
        check_hsc_at(h, x, hpo.start + k, tol)
    ys = h.h1(xs)
    paths = []
    for k, alpha in enumerate(hpo.paths):
        g = _homotopy_path(T.X0, h.G, xs[k], h.K).reversed()
        mid = _image_path(T.X0, h.h0, alpha)
        hh = _homotopy_path(T.X0, h.H, xs[k + 1], h.K)
        paths.append(g.concat(mid, 1e-9).concat(hh, 1e-9))
    return make_hpo(T, ys, paths, hpo.start, hpo.window, tol=1e-9)


def compose_hsc(k: HomotopySemiConjugacy, h: HomotopySemiConjugacy) -> HomotopySemiConjugacy:
    """The composite ``k o h``: maps compose and each homotopy runs h's part first."""
    if h.target is not k.source:
        raise InputError("the target of the first semi-conjugacy must be the source of the second")
    X1 = h.source.X1

    def h0(p):
        return k.h0(h.h0(p))

    def h1(p):
        return k.h1(h.h1(p))

    def joined(first, second):
        def fn(x, t):
            t = np.asarray(t, dtype=float)
            out = []
            lo = t <= 0.5
            hx = h.h1(single(X1, x))[0]
            if lo.any():
                out.append(k.h0(first(x, 2 * t[lo])))
            if (~lo).any():
                out.append(second(hx, 2 * t[~lo] - 1))
            return np.concatenate(out)

        return fn

    return HomotopySemiConjugacy(
        h.source,
        k.target,
        h0,
        h1,
        joined(h.G, k.G),
        joined(h.H, k.H),
        K=h.K + k.K,
        name=f"{k.name}∘{h.name}",
    )


def hpo_homotopy_check(
    system: MultivaluedSystem,
    A: HomotopyPseudoOrbit,
    B: HomotopyPseudoOrbit,
    beta: Sequence[PolyPath],
    tol: float = DEFAULT_DEFECT_TOL,
) -> tuple[bool, int | None]:
    """Decide whether ``beta`` is a homotopy between two hpos.

    ``beta[k]`` joins ``A.points[k]`` to ``B.points[k]``.  For every path index
    the loop ``alpha_A . iota(beta_i) . (sigma(beta_{i-1}) . alpha_B)^-1`` must
    be null-homotopic.  Returns ``(True, None)`` or ``(False, first_bad_index)``.
    """
    if A.start != B.start or len(A) != len(B) or len(beta) != len(A):
        raise InputError("the two hpos and the homotopy must share one window")
    X0, X1 = system.X0, system.X1
    for k in range(len(A)):
        if not (X1.coincide(beta[k].start, A.points[k], tol) and X1.coincide(beta[k].end, B.points[k], tol)):
            return False, A.start + k
    discrete = isinstance(root_space(X0), Discrete)
    for k in range(len(A.paths)):
        if discrete:
            continue
        left = A.paths[k].concat(_image_path(X0, system.iota, beta[k + 1]), tol)
        right = _image_path(X0, system.sigma, beta[k].refined(32)).concat(B.paths[k], tol)
        loop = left.concat(right.reversed(), tol)
        if any(w != 0 for w in X0.winding(loop.vertices)):
            return False, A.start + k + 1
    return True, None


def higher_block(system: MultivaluedSystem, n: int):
    """The block system of words of length ``n`` and its semi-conjugacy to ``system``.

    Returns ``(block, hsc)``.  ``block`` has X0 the admissible words of length
    ``n - 1`` and X1 those of length ``n``.  Its ``iota`` drops the last
    symbol and its ``sigma`` drops the first.  For ``n = 1`` the original
    system comes back with the identity semi-conjugacy.
    """
    if n < 1:
        raise DomainError("block length must be at least 1")
    if not (isinstance(root_space(system.X0), Discrete) and isinstance(root_space(system.X1), Discrete)):
        raise InputError("higher_block needs finite discrete spaces")
    if n == 1:
        return system, identity_hsc(system)
    edges = list(root_space(system.X1).elements)
    head = {e: system.sigma_of(e) for e in edges}
    tail = {e: system.iota_of(e) for e in edges}

    def words(length):
        out = [(e,) for e in edges]
        for _ in range(length - 1):
            out = [w + (e,) for w in out for e in edges if head[w[-1]] == tail[e]]
        return out

    X0 = Discrete(tuple(words(n - 1)))
    X1 = Discrete(tuple(words(n)))

    def drop_last(ws):
        return as_points(X0, [w[:-1] for w in ws])

    def drop_first(ws):
        return as_points(X0, [w[1:] for w in ws])

    block = MultivaluedSystem(
        X0=X0,
        X1=X1,
        iota=drop_last,
        sigma=drop_first,
        certificate=system.certificate,
        lift=system.lift,
        family="graph",
        params={"block": n},
    )
    def first_vertex(ws):
        return as_points(system.X0, [tail[w[0]] for w in ws])

    def first_edge(ws):
        return as_points(system.X1, [w[0] for w in ws])

    def const_sigma(w, t):
        return as_points(system.X0, [head[w[0]]] * len(t))

    def const_iota(w, t):
        return as_points(system.X0, [tail[w[0]]] * len(t))

    hsc = HomotopySemiConjugacy(block, system, first_vertex, first_edge, const_sigma, const_iota, K=1, name="block")
    return block, hsc


def identity_hsc(system: MultivaluedSystem, K: int = 64) -> HomotopySemiConjugacy:
    """The identity semi-conjugacy with constant homotopies."""

    def const_sigma(x, t):
        return _repeat(system.X0, system.sigma(single(system.X1, x))[0], len(t))

    def const_iota(x, t):
        return _repeat(system.X0, system.iota(single(system.X1, x))[0], len(t))

    return HomotopySemiConjugacy(system, system, _same, _same, const_sigma, const_iota, K=K, name="identity")


def _same(p):
    return p


def _repeat(space: Space, p, n: int) -> np.ndarray:
    if isinstance(root_space(space), Discrete):
        arr = np.empty(n, dtype=object)
        for i in range(n):
            arr[i] = p
        return arr
    return np.repeat(np.asarray(p)[None], n, axis=0)


def constant_hsc(source: MultivaluedSystem, target: MultivaluedSystem, h0, h1, K: int = 64, name: str = "constant"):
    """A semi-conjugacy whose homotopies are constant at ``h0(sigma x)`` and ``h0(iota x)``.

    It is valid only when the maps commute exactly; ``apply_hsc`` checks that.
    """

    def G(x, t):
        return _repeat(target.X0, h0(source.sigma(single(source.X1, x)))[0], len(t))

    def H(x, t):
        return _repeat(target.X0, h0(source.iota(single(source.X1, x)))[0], len(t))

    return HomotopySemiConjugacy(source, target, h0, h1, G, H, K=K, name=name)


def max_distance(space: Space, a, b) -> float:
    return max((space.distance(p, q) for p, q in zip(a, b)), default=0.0)


def common_window(A: Orbit, B: Orbit) -> tuple[np.ndarray, np.ndarray]:
    """Restrict two orbits to the indices they share."""
    lo = max(A.start, B.start)
    hi = min(A.start + len(A), B.start + len(B))
    if hi <= lo:
        return A.points[:0], B.points[:0]
    return A.points[lo - A.start : hi - A.start], B.points[lo - B.start : hi - B.start]


def conjugacy_residuals(space: Space, image: Orbit, shifted_image: Orbit) -> dict[int, float]:
    """Residuals of ``h(shift x) = shift h(x)`` index by index.

    ``image`` is ``h(x)`` and ``shifted_image`` is ``h(shift x)``.  The entry
    for index ``i`` compares ``h(shift x)[i]`` with ``h(x)[i + 1]``.
    """
    out = {}
    for i, q in zip(shifted_image.indices, shifted_image.points):
        j = i + 1 - image.start
        if 0 <= j < len(image):
            out[i] = space.distance(q, image.points[j])
    return out


__all__ = [
    "MultivaluedSystem",
    "Orbit",
    "HomotopyPseudoOrbit",
    "HomotopySemiConjugacy",
    "ShadowTrace",
    "validate_orbit",
    "shift_orbit",
    "make_hpo",
    "hpo_from_orbit",
    "apply_hsc",
    "compose_hsc",
    "hpo_homotopy_check",
    "higher_block",
    "identity_hsc",
    "constant_hsc",
    "orbit_defects",
    "common_window",
    "max_distance",
    "unwrap_lift",
    "conjugacy_residuals",
]

