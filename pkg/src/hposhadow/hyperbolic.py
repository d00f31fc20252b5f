"""Crossed mappings of bidisks and bi-infinite shadowing for Hénon maps.

A crossed mapping sends a product ``Mx x My`` across itself: horizontal
disks are stretched over ``Mx`` and vertical disks pulled back over ``My``.
For the Hénon family ``f(x, y) = (x**2 + c - b y, x)`` the boundary crossing
conditions, the off-criticality condition, the crossing degree and a cone
field certificate are all computed here.

Shadowing alternates two moves.  Paths are lifted through the image of a
horizontal line, then slid along the image to the vertical curve through the
next point.  Every intersection point is stored as the orbit segment joining
its horizontal line to its vertical curve.  Such a segment solves a well
conditioned boundary-value problem (see :mod:`hposhadow.segments`), so no
point is ever pushed forward through the expanding direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import BudgetError, CertificateError, ConvergenceError, DomainError, InputError
from .expanding import _newton_track, _refine_rows
from .mds import (
    HomotopyPseudoOrbit,
    HomotopySemiConjugacy,
    MultivaluedSystem,
    Orbit,
    ShadowTrace,
    apply_hsc,
    hpo_from_orbit,
)
from .paths import PolyPath
from .segments import solve_segments
from .spaces import Planar, Product, Subset

DEFAULT_WINDOW = 40
DEFAULT_TOL = 1e-9
SLOPE_FLOOR = 1e-8


@dataclass(frozen=True)
class HenonParams:
    """``f(x, y) = (x**2 + c - b y, x)`` on ``Mx x My``.

    ``Mx`` is the disk of radius ``Rx``, minus the concentric disk of radius
    ``Rx_inner`` when that is positive.  ``My`` is the disk of radius ``Ry``.
    """

    c: complex
    b: complex
    Rx: float
    Ry: float
    Rx_inner: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "b", complex(self.b))
        for name in ("Rx", "Ry", "Rx_inner"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.Rx > 0 and self.Ry > 0):
            raise DomainError("box radii must be positive")
        if not 0 <= self.Rx_inner < self.Rx:
            raise DomainError("the inner radius must lie in [0, Rx)")


@dataclass(frozen=True)
class HyperbolicCertificate:
    lam: float
    lam_horizontal: float
    lam_vertical: float
    cone_margin: float
    degree: int
    C: float
    bcc: tuple[float, float] | None
    occ: float | None
    metric: str
    grid: int
    ygrid: int


@dataclass(frozen=True, eq=False, kw_only=True)
class CrossedSystem(MultivaluedSystem):
    """A crossed mapping viewed as the system ``iota = inclusion, sigma = f``."""

    finv: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    henon: HenonParams | None = None
    clearance: float = 0.0

    @property
    def lam(self) -> float:
        return self.certificate.lam

    @property
    def degree(self) -> int:
        return self.certificate.degree

    @property
    def C(self) -> float:
        return self.certificate.C

    @property
    def Mx(self) -> Planar:
        return self.X0.first

    @property
    def My(self) -> Planar:
        return self.X0.second


# ---------------------------------------------------------------- conditions


def check_bcc(params: HenonParams) -> tuple[float, float]:
    """Margins of the two boundary crossing conditions (positive means satisfied).

    The first margin says how far ``f`` pushes the vertical boundary of the box
    outside ``Mx``.  The second says how far ``f^-1`` pushes the horizontal
    boundary outside ``My``.  Both use exact modulus ranges of the relevant
    circle-plus-disk sets.
    """
    c, b = params.c, params.b
    if b == 0:
        raise DomainError("b = 0 is degenerate: the map is not invertible")
    r1, r2 = params.Rx_inner, params.Rx
    spread = abs(b) * params.Ry

    def outside(center_mod, radius_sq, slack):
        lo = max(0.0, abs(center_mod - radius_sq) - slack)
        hi = center_mod + radius_sq + slack
        return max(r1 - hi, lo - r2)

    radii = [r2] + ([r1] if r1 > 0 else [])
    first = min(outside(abs(c), r * r, spread) for r in radii)
    dmin = abs(abs(c) - params.Ry**2)
    dmax = abs(c) + params.Ry**2
    gap = max(0.0, dmin - r2, r1 - dmax)
    second = gap / abs(b) - params.Ry
    return first, second


def check_occ(params: HenonParams) -> float:
    """Margin by which the critical values ``c - b y`` stay away from ``Mx``.

    When the inner radius is positive the critical point ``x = 0`` is not in
    ``Mx`` at all and the condition holds vacuously (``inf``).
    """
    if params.Rx_inner > 0:
        return math.inf
    return abs(params.c) - abs(params.b) * params.Ry - params.Rx


def henon_maps(c: complex, b: complex):
    c, b = complex(c), complex(b)

    def f(P):
        P = np.asarray(P, dtype=complex)
        x, y = P[..., 0], P[..., 1]
        return np.stack([x * x + c - b * y, x], axis=-1)

    def finv(P):
        P = np.asarray(P, dtype=complex)
        x, y = P[..., 0], P[..., 1]
        return np.stack([y, (y * y + c - x) / b], axis=-1)

    def jac(P):
        P = np.asarray(P, dtype=complex)
        J = np.zeros(P.shape[:-1] + (2, 2), dtype=complex)
        J[..., 0, 0] = 2 * P[..., 0]
        J[..., 0, 1] = -b
        J[..., 1, 0] = 1
        return J

    return f, finv, jac


def _lattice(space: Planar, n: int) -> np.ndarray:
    s = np.linspace(-space.radius, space.radius, n)
    z = space.center + (s[:, None] + 1j * s[None, :]).ravel()
    return z[space.contains_many(z)]


def _sample_X1(X0: Product, X1: Subset, grid: int, ygrid: int) -> np.ndarray:
    xs = _lattice(X0.first, grid)
    ys = _lattice(X0.second, ygrid)
    P = np.stack(np.broadcast_arrays(xs[:, None], ys[None, :]), axis=-1).reshape(-1, 2)
    return P[X1.contains_many(P)]


def _fiber_degree(f, Mx: Planar, My: Planar, samples: int = 5) -> int:
    """Number of solutions ``x in Mx`` of ``pi_x f(x, y0) = x0``, by the argument principle."""
    theta = np.exp(2j * np.pi * np.arange(2048) / 2048)
    contours = [(Mx.center + Mx.radius * theta, 1)]
    if Mx.hole is not None:
        contours.append((Mx.hole[0] + Mx.hole[1] * theta, -1))
    counts = set()
    for x0 in _lattice(Mx, samples + 2)[:: max(1, samples // 2)]:
        for y0 in _lattice(My, samples):
            total = 0
            for z, sign in contours:
                w = f(np.stack([z, np.full_like(z, y0)], axis=-1))[..., 0] - x0
                if np.abs(w).min() == 0:
                    raise CertificateError("the fibre meets the boundary of Mx")
                turns = np.angle(np.roll(w, -1) / w).sum() / (2 * np.pi)
                total += sign * int(round(turns))
            counts.add(total)
    if len(counts) != 1:
        raise CertificateError(f"crossing degree is not constant over the box: {sorted(counts)}")
    return counts.pop()


def crossed_degree(system_or_params) -> int:
    """Degree of the crossed mapping, counted on sampled vertical fibres."""
    if isinstance(system_or_params, HenonParams):
        params = system_or_params
        first, second = check_bcc(params)
        if min(first, second) <= 0:
            raise CertificateError("the boundary crossing conditions fail, so the degree is undefined")
        f, _, _ = henon_maps(params.c, params.b)
        X0 = _box(params, "euclidean")
        return _fiber_degree(f, X0.first, X0.second)
    system = system_or_params
    return _fiber_degree(system.sigma, system.Mx, system.My)


class ConeScan(NamedTuple):
    lam: float
    lam_horizontal: float
    lam_vertical: float
    margin: float
    worst_point: np.ndarray


def _cone_scan(X0: Product, f, jac, P: np.ndarray) -> ConeScan:
    """Worst-case cone expansion over sampled points, exact over directions.

    At each point the horizontal cone is ``rho_y |v_y| <= rho_x |v_x|`` and the
    vertical cone the reverse.  For a 2x2 matrix the minimum of ``|a + b s|``
    over the disk ``|s| <= r`` is ``|a| - |b| r``, so the worst direction in
    each cone has a closed form and only the base points need sampling.
    """
    Mx, My = X0.first, X0.second
    J = jac(P)
    a, bb, cc, dd = J[:, 0, 0], J[:, 0, 1], J[:, 1, 0], J[:, 1, 1]
    det = a * dd - bb * cc
    al, be, ga, de = dd / det, -bb / det, -cc / det, a / det
    FP = f(P)
    rx_p, ry_p = Mx.density(P[:, 0]), My.density(P[:, 1])
    rx_f, ry_f = Mx.density(FP[:, 0]), My.density(FP[:, 1])
    r = rx_p / ry_p
    stretch = rx_f * (np.abs(a) - np.abs(bb) * r)
    lam_h = stretch / rx_p
    inv_h = stretch - ry_f * (np.abs(cc) + np.abs(dd) * r)
    rp = ry_f / rx_f
    shrink = ry_p * (np.abs(de) - np.abs(ga) * rp)
    lam_v = shrink / ry_f
    inv_v = shrink - rx_p * (np.abs(al) * rp + np.abs(be))
    margin = np.minimum(inv_h, inv_v)
    worst = int(np.argmin(margin))
    if margin[worst] <= 0:
        which = "horizontal" if inv_h[worst] <= inv_v[worst] else "vertical"
        raise CertificateError(
            f"{which} cone is not invariant at (x, y) = ({P[worst, 0]:.4f}, {P[worst, 1]:.4f})"
        )
    lam = np.minimum(lam_h, lam_v)
    k = int(np.argmin(lam))
    return ConeScan(float(lam[k]), float(lam_h.min()), float(lam_v.min()), float(margin.min()), P[k])


def estimate_lambda(system, grid: int = 64, ygrid: int = 12, metric: str = "euclidean") -> float:
    """Cone expansion factor over a ``grid`` x ``grid`` by ``ygrid`` x ``ygrid`` sample of X1.

    ``system`` is a crossed system or bare :class:`HenonParams`; the latter
    skips the crossing conditions, so a box that fails them can still be
    scanned for the point where the cones break down.
    """
    if isinstance(system, HenonParams):
        f, _, jac = henon_maps(system.c, system.b)
        X0 = _box(system, metric)
        X1 = Subset(X0, lambda P: X0.contains_many(f(P)), "points whose image stays in the box")
    else:
        f, jac, X0, X1 = system.sigma, system.jac, system.X0, system.X1
    P = _sample_X1(X0, X1, grid, ygrid)
    if len(P) == 0:
        raise CertificateError("X1 is empty on the sampling grid")
    scan = _cone_scan(X0, f, jac, P)
    if scan.lam <= 1.01:
        raise CertificateError(f"sampled cone expansion {scan.lam:.4f} <= 1.01 near {scan.worst_point}")
    return scan.lam


def _diameter(space: Planar, z: np.ndarray) -> float:
    z = np.unique(np.round(z, 12))
    if len(z) > 1500:
        z = z[np.linspace(0, len(z) - 1, 1500).astype(int)]
    if space.metric == "euclidean":
        return float(np.abs(z[:, None] - z[None, :]).max())
    u = (z - space.center) / space.radius
    ratio = np.abs(u[:, None] - u[None, :]) / np.abs(1 - np.conj(u[:, None]) * u[None, :])
    return float(2 * np.arctanh(np.minimum(ratio, 1 - 1e-16)).max())


def _box(params: HenonParams, metric: str) -> Product:
    hole = (0j, params.Rx_inner) if params.Rx_inner > 0 else None
    return Product(Planar(0j, params.Rx, metric, hole), Planar(0j, params.Ry, metric))


def _build_crossed(X0: Product, f, finv, jac, grid, ygrid, family, params, henon=None, bcc=None, occ=None):
    Mx, My = X0.first, X0.second

    def in_X1(P):
        P = np.asarray(P, dtype=complex)
        return X0.contains_many(f(P))

    X1 = Subset(X0, in_X1, "points whose image stays in the box")
    P = _sample_X1(X0, X1, grid, ygrid)
    if len(P) == 0:
        raise CertificateError("X1 is empty on the sampling grid")
    degree = _fiber_degree(f, Mx, My)
    scan = _cone_scan(X0, f, jac, P)
    if scan.lam <= 1.01:
        raise CertificateError(f"sampled cone expansion {scan.lam:.4f} <= 1.01 near {scan.worst_point}")
    cert = HyperbolicCertificate(
        lam=scan.lam,
        lam_horizontal=scan.lam_horizontal,
        lam_vertical=scan.lam_vertical,
        cone_margin=scan.margin,
        degree=degree,
        C=_diameter(My, P[:, 0]),
        bcc=bcc,
        occ=occ,
        metric=Mx.metric,
        grid=grid,
        ygrid=ygrid,
    )
    return CrossedSystem(
        X0=X0,
        X1=X1,
        iota=_identity,
        sigma=f,
        certificate=cert,
        family=family,
        params=params,
        finv=finv,
        jac=jac,
        henon=henon,
        clearance=float(np.abs(P[:, 0]).min()),
    )


def _identity(p):
    return p


def make_henon_system(params: HenonParams, metric: str = "euclidean", grid: int = 64, ygrid: int = 12) -> CrossedSystem:
    """Certify a Hénon map on a box and package it as a crossed system.

    Raises :class:`CertificateError` when a crossing condition, the
    off-criticality condition or the cone certificate fails.
    """
    if params.b == 0:
        raise DomainError("b = 0 is degenerate: the map is not invertible")
    bcc = check_bcc(params)
    if min(bcc) <= 0:
        raise CertificateError(f"boundary crossing conditions fail: margins {bcc[0]:.4g}, {bcc[1]:.4g}")
    occ = check_occ(params)
    if occ <= 0:
        raise CertificateError(f"off-criticality condition fails: margin {occ:.4g}")
    f, finv, jac = henon_maps(params.c, params.b)
    family_params = {
        "c": params.c,
        "b": params.b,
        "Rx": params.Rx,
        "Ry": params.Ry,
        "Rx_inner": params.Rx_inner,
        "metric": metric,
    }
    return _build_crossed(_box(params, metric), f, finv, jac, grid, ygrid, "henon", family_params, params, bcc, occ)


def make_crossed_system(f, finv, jac, Mx: Planar, My: Planar, grid: int = 32, ygrid: int = 8) -> CrossedSystem:
    """Certify an arbitrary holomorphic crossed mapping of ``Mx x My``.

    Shadowing needs the Hénon structure; such systems support the
    certificate, degree and semi-conjugacy machinery only.
    """
    return _build_crossed(Product(Mx, My), f, finv, jac, grid, ygrid, "crossed", {})


# ---------------------------------------------------------------- disks and intersections


@dataclass(frozen=True)
class HorizontalDisk:
    """The graph ``y = phi(x)`` over ``Mx``."""

    phi: Callable[[np.ndarray], np.ndarray]

    def at(self, x):
        x = np.asarray(x, dtype=complex)
        return np.stack([x, np.broadcast_to(self.phi(x), x.shape)], axis=-1)


@dataclass(frozen=True)
class VerticalDisk:
    """The graph ``x = psi(y)`` over ``My``."""

    psi: Callable[[np.ndarray], np.ndarray]

    def at(self, y):
        y = np.asarray(y, dtype=complex)
        return np.stack([np.broadcast_to(self.psi(y), y.shape), y], axis=-1)


class Intersection(NamedTuple):
    point: np.ndarray
    u: PolyPath
    s: PolyPath


def _scalar_newton(F, z0: complex, what: str) -> complex:
    z = complex(z0)
    h = 1e-7
    r = F(z)
    for _ in range(100):
        if abs(r) <= 1e-14 * (1 + abs(z)):
            return z
        d = (F(z + h) - F(z - h)) / (2 * h)
        if d == 0:
            break
        step = r / d
        t = 1.0
        while t > 1e-10:
            trial = z - t * step
            rt = F(trial)
            if abs(rt) < abs(r):
                break
            t /= 2
        if abs(trial - z) <= 1e-16 * (1 + abs(z)):
            z, r = trial, rt
            break
        z, r = trial, rt
    if abs(r) > 1e-9 * (1 + abs(z)):
        raise ConvergenceError(f"Newton iteration for {what} did not converge")
    return z


def unique_intersection(system: CrossedSystem, H: HorizontalDisk, V: VerticalDisk, p_h, p_v, gamma: PolyPath) -> Intersection:
    """The intersection point of ``f(H)`` and ``V`` selected by the path ``gamma``.

    ``gamma`` runs in ``X0`` from ``f(p_h)`` to ``p_v``.  Its x-projection is
    lifted through ``x -> pi_x f(x, phi(x))`` starting at ``p_h``; the lift's
    endpoint is then slid along ``f(H)`` onto ``V``.  Returns the point
    ``zeta``, a path ``u`` in ``f(H)`` from ``f(p_h)`` to ``zeta`` and a path
    ``s`` in ``V`` from ``zeta`` to ``p_v`` such that ``u . s`` is homotopic to
    ``gamma``.
    """
    p_h = np.asarray(p_h, dtype=complex)
    p_v = np.asarray(p_v, dtype=complex)
    f = system.sigma
    if not system.X0.coincide(gamma.start, f(p_h), 1e-9):
        raise DomainError("gamma does not start at f(p_h)")
    if not system.X0.coincide(gamma.end, p_v, 1e-9):
        raise DomainError("gamma does not end at p_v")

    def image(xi):
        return f(H.at(xi))

    step = max(system.clearance, 1e-3) ** 2 / 4
    targets = _refine_rows(np.asarray(gamma.vertices[:, 0])[None], step)[0]
    xi = [complex(p_h[0])]
    for t in targets[1:]:
        xi.append(_scalar_newton(lambda z, t=t: complex(image(z)[0]) - t, xi[-1], "the lift"))
    x_v = complex(p_v[0])
    for s in np.linspace(0, 1, 9)[1:]:
        def slide(z, s=s):
            q = image(z)
            return complex(q[0]) - ((1 - s) * x_v + s * complex(V.psi(q[1])))

        xi.append(_scalar_newton(slide, xi[-1], "the slide onto V"))
    zeta = image(xi[-1])
    u = PolyPath(system.X0, image(np.array(xi)))
    heights = zeta[1] + (p_v[1] - zeta[1]) * np.linspace(0, 1, 9)
    s = PolyPath(system.X0, np.concatenate([zeta[None], V.at(heights[1:-1]), p_v[None]]))
    loop = np.concatenate([u.vertices[:, 0], s.vertices[1:, 0], gamma.vertices[::-1, 0][1:]])
    if any(w != 0 for w in system.Mx.winding(loop)):
        raise CertificateError("u . s is not homotopic to gamma")
    return Intersection(zeta, u, s)


def all_intersections(system: CrossedSystem, H: HorizontalDisk, V: VerticalDisk, seeds: int = 24) -> np.ndarray:
    """Every intersection of ``f(H)`` with ``V`` inside the box, found by seeded Newton runs."""
    f = system.sigma
    found: list[complex] = []
    for z0 in _lattice(system.Mx, seeds):
        def gap(z):
            q = f(H.at(z))
            return complex(q[0]) - complex(V.psi(q[1]))

        try:
            z = _scalar_newton(gap, z0, "an intersection")
        except ConvergenceError:
            continue
        q = f(H.at(z))
        if system.Mx.contains(z) and system.X0.contains(q) and all(abs(z - w) > 1e-8 for w in found):
            found.append(z)
    return f(H.at(np.array(found, dtype=complex))) if found else np.zeros((0, 2), dtype=complex)


# ---------------------------------------------------------------- shadowing


def _pad3(rows: list[np.ndarray]) -> np.ndarray:
    K = max(len(r) for r in rows)
    out = np.empty((len(rows), K, 2), dtype=complex)
    for k, r in enumerate(rows):
        out[k, : len(r)] = r
        out[k, len(r) :] = r[-1]
    return out


def _compress(paths: np.ndarray, Mx: Planar) -> np.ndarray:
    """Replace paths by straight segments wherever that keeps their homotopy class.

    The box is convex in y.  In x it is convex unless there is a hole, in
    which case a path is straightened only if it stays in a disk around its
    start that avoids the hole and the outer boundary.
    """
    if paths.shape[1] <= 2:
        return paths
    ends = paths[:, [0, -1]]
    if Mx.hole is None:
        return ends
    x0 = paths[:, 0, 0]
    reach = np.abs(paths[:, :, 0] - x0[:, None]).max(axis=1)
    room = np.minimum(np.abs(x0 - Mx.hole[0]) - Mx.hole[1], Mx.radius - np.abs(x0 - Mx.center))
    ok = reach < 0.5 * room
    if ok.all():
        return ends
    rows = [ends[k] if ok[k] else paths[k] for k in range(len(paths))]
    return _pad3(rows)


class HyperbolicShadow(NamedTuple):
    orbit: Orbit
    trace: ShadowTrace


def required_window(lam: float, C0: float, C1: float, tol: float) -> int:
    """Half-width ``N`` for which the a-priori zigzag bounds drop below ``tol``."""
    m = math.ceil(math.log(2 * max(C0, C1) / tol) / math.log(lam))
    return max(m, 0) + 1


def shadow_hyperbolic(system: CrossedSystem, hpo: HomotopyPseudoOrbit, tol: float = DEFAULT_TOL) -> HyperbolicShadow:
    """Shadow a bi-infinite hpo (given on a finite window) of a Hénon map.

    At zigzag stage ``m`` the candidate orbit is the middle point of the
    orbit segment joining the horizontal line of index ``i - m`` to the
    vertical curve of index ``i + m``.  Such a point is defined on the
    central window ``[start + m, end - m]``.  The run stops once the images
    of the latest horizontal and vertical connecting paths are shorter than
    ``tol``.  The result is then polished into an exact orbit segment.
    """
    prm = system.henon
    if prm is None:
        raise InputError("bi-infinite shadowing is implemented for the Hénon family")
    if hpo.window != "bi":
        raise InputError("hyperbolic shadowing needs a bi-infinite window")
    if not tol > 0:
        raise InputError("tol must be positive")
    c, b = prm.c, prm.b
    X0, Mx, My = system.X0, system.Mx, system.My
    Z = np.asarray(hpo.points, dtype=complex)
    L = len(Z)
    outside = np.flatnonzero(~system.X1.contains_many(Z))
    if len(outside):
        raise DomainError(f"hpo point at index {hpo.start + outside[0]} is not in X1")
    lam, C = system.lam, system.C
    Cp = hpo.length_bound
    C0 = C + 1
    C1 = 2 * C0 / (lam - 1) + Cp + C + 1
    need = required_window(lam, C0, C1, tol)
    trace = ShadowTrace(meta={"lam": lam, "C": C, "C_prime": Cp, "C0": C0, "C1": C1, "tol": tol, "required_N": need})
    lengths = hpo.path_lengths()
    if len(lengths) == 0 or lengths.max() < tol:
        trace.record(0, lengths.max(initial=0.0), lengths.max(initial=0.0), Z.copy())
        return HyperbolicShadow(Orbit(Z, hpo.start, "bi", tol), trace)

    ys = Z[:, 1]
    Xr = Z[:, 0] ** 2 + c - b * ys
    step = max(system.clearance, 1e-3) ** 2 / 4
    levels = {1: Z[:, :1].copy()}
    paths = _compress(_pad3([p.vertices for p in hpo.paths]), Mx)
    m = 0
    n = 1
    while True:
        if L - n < 1:
            raise BudgetError(
                f"window of {L} points ran out before tol {tol:g} was reached; "
                f"the a-priori requirement is half-width N >= {need}",
                required_window=need,
            )
        cur = levels[n]
        ylow = ys[: L - n]

        def F(xi, ylow=ylow):
            return xi * xi + c - b * ylow

        def dF(xi):
            return 2 * xi

        T = _refine_rows(paths[:, :, 0], step).copy()
        xi0 = cur[:-1, 0]
        T[:, 0] = F(xi0)
        xi = _newton_track(F, dF, T, xi0, 1.0 + np.abs(T).max(axis=1))
        guess = np.concatenate([xi[:, -1:], cur[1:]], axis=1)
        new = solve_segments(ylow, Xr[n:L], guess, c, b)
        levels[n + 1] = new

        # Horizontal connecting paths: the lift, then the slide, on the line y = y[i-1].
        slide = xi[:, -1:] + (new[:, :1] - xi[:, -1:]) * np.linspace(0, 1, 4)[1:]
        hx = np.concatenate([xi, slide], axis=1)
        horiz = np.stack([hx, np.broadcast_to(ylow[:, None], hx.shape)], axis=-1)

        # Vertical connecting paths: from zeta = f(new point) down the vertical curve to the old point.
        zeta = np.stack([new[:, 1], new[:, 0]], axis=-1)
        eta_mid = 0.5 * (new[:, 0] + ys[1 : L - n + 1])
        mid = solve_segments(eta_mid, Xr[n:L], cur[1:], c, b)
        old = np.stack([cur[1:, 0], ys[1 : L - n + 1]], axis=-1)
        vert = np.stack([zeta, np.stack([mid[:, 0], eta_mid], axis=-1), old], axis=1)

        if Mx.hole is not None:
            slide_img = slide * slide + c - b * ylow[:, None]
            loops = np.concatenate([slide_img, vert[:, :, 0]], axis=1)
            for k, loop in enumerate(loops):
                if Mx.winding(np.concatenate([[T[k, -1]], loop]))[0] != 0:
                    raise CertificateError(f"slide at index {hpo.start + k + 1} changes the homotopy class")

        nxt = [np.concatenate([vert[k], horiz[k + 1, 1:]]) for k in range(len(new) - 1)]
        paths = _compress(_pad3(nxt), Mx) if nxt else np.zeros((0, 2, 2), dtype=complex)
        levels.pop(n - 2, None)

        if n % 2 == 1 and n >= 3:
            m = (n - 1) // 2
            done = _zigzag(system, trace, levels, m, ys, Xr, L, hpo.start, tol, C0, C1)
            if done is not None:
                return HyperbolicShadow(_polish(system, done, hpo.start + m, tol, trace), trace)
        n += 1


def _zigzag(system, trace, levels, m, ys, Xr, L, start, tol, C0, C1):
    c, b = system.henon.c, system.henon.b
    X0, Mx, My = system.X0, system.Mx, system.My
    S2, S3, S4 = levels[2 * m], levels[2 * m + 1], levels[2 * m + 2]
    rows = L - 2 * m
    # Horizontal: images under f^m of the paths joining level 2m to level 2m+1 on y = y[j].
    e1 = np.stack([S2[:rows, m], S2[:rows, m - 1]], axis=-1)
    e2 = np.stack([S3[:, m], S3[:, m - 1]], axis=-1)
    xm = 0.5 * (e1[:, 0] + e2[:, 0])
    hm = solve_segments(ys[:rows], xm, S2[:rows, :m], c, b)
    hmid = np.stack([xm, hm[:, m - 1]], axis=-1)
    hpath = np.stack([e1, hmid, e2], axis=1)
    # Vertical: images under f^m of the paths joining level 2m+1 to f of level 2m+2 on a vertical curve.
    v1 = np.stack([S3[1:, m], S3[1:, m - 1]], axis=-1)
    v2 = np.stack([S4[:, m + 1], S4[:, m]], axis=-1)
    ym = 0.5 * (v1[:, 1] + v2[:, 1])
    vm = solve_segments(ym, Xr[2 * m + 1 : 2 * m + 1 + rows - 1], S3[1:, m:], c, b)
    vmid = np.stack([vm[:, 0], ym], axis=-1)
    vpath = np.stack([v1, vmid, v2], axis=1)

    def plen(P):
        return X0.pair_lengths(P[:, :-1], P[:, 1:]).sum(axis=1)

    def slopes(P, horizontal):
        a, z = P[:, :-1], P[:, 1:]
        midp = 0.5 * (a + z)
        dx = Mx.density(midp[..., 0]) * np.abs(z[..., 0] - a[..., 0])
        dy = My.density(midp[..., 1]) * np.abs(z[..., 1] - a[..., 1])
        num, den = (dy, dx) if horizontal else (dx, dy)
        # chords near rounding level carry no direction information
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(np.hypot(dx, dy) > SLOPE_FLOOR, num / den, 0.0)
        return float(r.max(initial=0.0))

    h_len = float(plen(hpath).max(initial=0.0))
    v_len = float(plen(vpath).max(initial=0.0))
    w = e2
    fw = system.sigma(w[:-1])
    defect = float(X0.pair_lengths(fw, w[1:]).max(initial=0.0))
    lam = system.lam
    trace.record(
        m,
        max(h_len, v_len),
        defect,
        w.copy(),
        horizontal=h_len,
        vertical=v_len,
        horizontal_bound=2 * C1 / lam**m,
        vertical_bound=2 * C0 / lam**m,
        horizontal_slope=slopes(hpath, True),
        vertical_slope=slopes(vpath, False),
    )
    if max(h_len, v_len) < tol:
        return w
    return None


def _polish(system: CrossedSystem, w: np.ndarray, start: int, tol: float, trace: ShadowTrace) -> Orbit:
    """Turn the zigzag points into an exact orbit segment with the same end conditions."""
    c, b = system.henon.c, system.henon.b
    left = w[:1, 1]
    right = w[-1:, 0] ** 2 + c - b * w[-1:, 1]
    x = solve_segments(left, right, w[None, :, 0], c, b)[0]
    pts = np.stack([x, np.concatenate([left, x[:-1]])], axis=-1)
    shift = float(np.abs(pts - w).max())
    trace.meta["polish_shift"] = shift
    if shift > max(1e3 * tol, 1e-10):
        raise ConvergenceError(f"polishing moved the orbit by {shift:.2e}")
    if not system.X1.contains_many(pts).all():
        raise ConvergenceError("the shadowing orbit left X1")
    return Orbit(pts, start, "bi", tol)


def induced_map_hyperbolic(h: HomotopySemiConjugacy, orbit: Orbit, tol: float = DEFAULT_TOL) -> Orbit:
    """Image of an orbit under the map on orbit spaces induced by ``h``."""
    if not isinstance(h.target, CrossedSystem):
        raise CertificateError("the target carries no hyperbolicity certificate")
    hpo = apply_hsc(h, hpo_from_orbit(h.source, orbit))
    return shadow_hyperbolic(h.target, hpo, tol).orbit


def verify_orbit_uniqueness(system: CrossedSystem, A: Orbit, B: Orbit, beta=None) -> str:
    """``"equal"`` when two computed orbits agree on their common window, else ``"distinct"``.

    ``beta`` optionally lists paths in ``X1`` joining ``A`` to ``B`` index by
    index.  ``X0`` is simply connected, so only their endpoints are checked.
    """
    from .mds import common_window

    a, b = common_window(A, B)
    if len(a) == 0:
        raise InputError("the orbits share no indices")
    if beta is not None:
        if len(beta) != len(a):
            raise InputError("beta needs one path per shared index")
        for k, path in enumerate(beta):
            if not (system.X1.coincide(path.start, a[k], 1e-9) and system.X1.coincide(path.end, b[k], 1e-9)):
                raise DomainError(f"beta path {k} does not join the two orbits")
    gap = float(np.abs(a - b).max())
    return "equal" if gap <= 2 * max(A.defect_tol, B.defect_tol) else "distinct"


def henon_orbit(system: CrossedSystem, seed, start: int, stop: int, tol: float = 1e-13) -> Orbit:
    """Exact orbit segment on ``[start, stop]`` of a periodic or fixed point, by Newton on the period.

    ``seed`` is a list of approximate points of one period.  The returned
    window repeats the refined cycle.
    """
    prm = system.henon
    seed = np.asarray(seed, dtype=complex).reshape(-1, 2)
    p = len(seed)
    x = seed[:, 0].copy()
    for _ in range(100):
        prev = np.roll(x, 1)
        nxt = np.roll(x, -1)
        F = nxt + prm.b * prev - x * x - prm.c
        if np.abs(F).max() < tol:
            break
        J = np.diag(-2 * x).astype(complex)
        for k in range(p):
            J[k, (k + 1) % p] += 1
            J[k, (k - 1) % p] += prm.b
        x = x - np.linalg.solve(J, F)
    cycle = np.stack([x, np.roll(x, 1)], axis=-1)
    idx = np.arange(start, stop + 1) % p
    return Orbit(cycle[idx], start, "bi", 1e-12)


__all__ = [
    "HenonParams",
    "HyperbolicCertificate",
    "CrossedSystem",
    "check_bcc",
    "check_occ",
    "crossed_degree",
    "estimate_lambda",
    "make_henon_system",
    "make_crossed_system",
    "henon_maps",
    "HorizontalDisk",
    "VerticalDisk",
    "Intersection",
    "unique_intersection",
    "all_intersections",
    "HyperbolicShadow",
    "shadow_hyperbolic",
    "required_window",
    "induced_map_hyperbolic",
    "verify_orbit_uniqueness",
    "henon_orbit",
]
