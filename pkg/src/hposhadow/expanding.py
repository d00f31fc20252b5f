"""Expanding multivalued systems and forward shadowing by repeated lifting.

A certified expanding system carries an :class:`ExpansionCertificate`.  Paths
in ``X0`` can then be lifted through ``sigma`` from a chosen base point, and
lifting an hpo's paths stage after stage contracts them by the expansion
factor.  The limits of the base points form the shadowing orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import BudgetError, CertificateError, ConvergenceError, DomainError, InputError
from .mds import (
    HomotopyPseudoOrbit,
    HomotopySemiConjugacy,
    MultivaluedSystem,
    Orbit,
    ShadowTrace,
    apply_hsc,
    constant_hsc,
    hpo_from_orbit,
    orbit_defects,
    single,
)
from .paths import PolyPath
from .spaces import Circle, Discrete, Planar, Space, Subset, root_space

NEWTON_CAP = 100


@dataclass(frozen=True)
class ExpansionCertificate:
    """Expansion factor ``lam`` valid below the locality scale ``delta``.

    ``method`` says how the factor was obtained ("analytic", "sampled",
    "inherited" or "graph").  Sampled certificates also record the grid size
    and the worst-case margin ``lam - 1``.
    """

    lam: float
    delta: float
    method: str
    grid: int | None = None
    margin: float | None = None


def _require_expanding(system: MultivaluedSystem) -> ExpansionCertificate:
    cert = system.certificate
    if not isinstance(cert, ExpansionCertificate) or system.lift is None:
        raise CertificateError("the system carries no expansion certificate")
    return cert


# ---------------------------------------------------------------- lifting


def _refine_rows(V: np.ndarray, step: float) -> np.ndarray:
    """Subdivide every segment of a batch of polylines so no step exceeds ``step``."""
    if V.shape[1] < 2:
        return V
    longest = float(np.abs(np.diff(V, axis=1)).max())
    k = int(math.ceil(longest / step)) if longest > step else 1
    if k == 1:
        return V
    s = np.arange(k) / k
    inner = V[:, :-1, None] + np.diff(V, axis=1)[:, :, None] * s
    return np.concatenate([inner.reshape(V.shape[0], -1), V[:, -1:]], axis=1)


def _newton_track(F, dF, T: np.ndarray, base: np.ndarray, tol_scale: np.ndarray) -> np.ndarray:
    """Follow the solution of ``F(y) = T[:, j]`` column by column from ``base``.

    Each column is solved by Newton's method seeded with a first-order
    predictor from the previous column; steps that increase the residual are
    halved.
    """
    B, K = T.shape
    Y = np.empty_like(T)
    Y[:, 0] = base
    y = base.copy()
    for j in range(1, K):
        target = T[:, j]
        y = y + (target - T[:, j - 1]) / dF(y)
        res = F(y) - target
        ok = np.abs(res) <= 1e-14 * tol_scale
        for _ in range(NEWTON_CAP):
            if ok.all():
                break
            step = res / dF(y)
            t = np.ones(B)
            for _ in range(30):
                trial = y - t * step
                rt = F(trial) - target
                worse = (np.abs(rt) > np.abs(res)) & ~ok & (t > 1e-9)
                if not worse.any():
                    break
                t = np.where(worse, t / 2, t)
            moved = np.abs(trial - y)
            y = np.where(ok, y, trial)
            res = np.where(ok, res, rt)
            ok = ok | (np.abs(res) <= 1e-14 * tol_scale) | (moved <= 1e-16 * tol_scale)
        if not (np.abs(res) <= 1e-9 * tol_scale).all():
            raise ConvergenceError("path lifting failed to converge")
        Y[:, j] = y
    return Y


def circle_lifter(system: MultivaluedSystem) -> Callable:
    """Lifting through a lifted circle map ``F`` with ``F(x + 1) = F(x) + d``."""
    F, dF = system.sigma, system.d_sigma

    def lift(V: np.ndarray, base: np.ndarray) -> np.ndarray:
        cert = system.certificate
        V = np.asarray(V, dtype=float)
        base = np.asarray(base, dtype=float)
        V = V + np.round(F(base) - V[:, 0])[:, None]
        V = _refine_rows(V, cert.delta * cert.lam / 4)
        V[:, 0] = F(base)
        return _newton_track(F, dF, V, base, 1.0 + np.abs(V).max(axis=1))

    return lift


def planar_lifter(system: MultivaluedSystem) -> Callable:
    """Lifting through a holomorphic ``sigma`` by Newton continuation."""
    F, dF = system.sigma, system.d_sigma

    def lift(V: np.ndarray, base: np.ndarray) -> np.ndarray:
        cert = system.certificate
        V = np.asarray(V, dtype=complex)
        base = np.asarray(base, dtype=complex)
        V = _refine_rows(V, cert.delta * cert.lam / 4)
        V = V.copy()
        V[:, 0] = F(base)
        return _newton_track(F, dF, V, base, 1.0 + np.abs(V).max(axis=1))

    return lift


def constant_lifter(system: MultivaluedSystem) -> Callable:
    def lift(V, base):
        out = np.empty((len(base), 1), dtype=object)
        for k, b in enumerate(base):
            out[k, 0] = b
        return out

    return lift


def lift_path(system: MultivaluedSystem, path: PolyPath, base) -> PolyPath:
    """Lift ``path`` through ``sigma`` starting at ``base``.

    The result starts at ``base`` and its image under ``sigma`` is ``path``.
    """
    _require_expanding(system)
    if not system.X1.contains(base):
        raise DomainError("the base point is not in X1")
    if not system.X0.coincide(path.start, system.sigma_of(base), 1e-9):
        raise DomainError("the path does not start at sigma(base)")
    V = system.lift(path.vertices[None], single(system.X1, base))
    return PolyPath(system.X1, V[0])


# ---------------------------------------------------------------- systems


def _named_perturbation(g):
    if g is None or g == "sin":
        return (
            lambda x: np.sin(2 * np.pi * x) / (2 * np.pi),
            lambda x: np.cos(2 * np.pi * x),
        )
    if isinstance(g, tuple) and len(g) == 2 and all(callable(f) for f in g):
        return g
    raise InputError(f"unknown perturbation {g!r}; use 'sin' or a (g, dg) pair of callables")


def make_circle_system(d: int, eps: float = 0.0, g=None) -> MultivaluedSystem:
    """The degree-``d`` circle map ``x -> d x + eps g(x)``.

    ``g`` must be 1-periodic with ``|g'| <= 1``; ``"sin"`` selects
    ``sin(2 pi x) / (2 pi)``.  The expansion factor is ``d - |eps|``.
    """
    if int(d) != d:
        raise InputError(f"degree must be an integer, got {d}")
    d = int(d)
    lam = abs(d) - abs(eps)
    if lam <= 1:
        raise CertificateError(f"x -> {d}x + {eps} g(x) is not certified expanding: factor {lam} <= 1")
    circle = Circle()
    if eps == 0:
        def sigma(x):
            return d * np.asarray(x, dtype=float)

        def d_sigma(x):
            return np.full(np.shape(x), float(d))

        family, params = "circle-linear", {"degree": d}
    else:
        gf, dg = _named_perturbation(g)

        def sigma(x):
            x = np.asarray(x, dtype=float)
            return d * x + eps * gf(x)

        def d_sigma(x):
            return d + eps * dg(np.asarray(x, dtype=float))

        family = "circle-perturbed"
        params = {"degree": d, "epsilon": eps, "perturbation": g if isinstance(g, str) or g is None else "custom"}
        if params["perturbation"] is None:
            params["perturbation"] = "sin"
    system = MultivaluedSystem(
        X0=circle,
        X1=circle,
        iota=_identity,
        sigma=sigma,
        d_sigma=d_sigma,
        certificate=ExpansionCertificate(lam, 0.5, "analytic"),
        family=family,
        params=params,
    )
    object.__setattr__(system, "lift", circle_lifter(system))
    return system


def _identity(x):
    return x


def _grid(R: float, n: int) -> np.ndarray:
    s = np.linspace(-R, R, n)
    return (s[:, None] + 1j * s[None, :]).ravel()


def polynomial_hole(c: complex) -> tuple[complex, float] | None:
    """Round neighbourhood of the attracting fixed point of ``z**2 + c``, if any.

    The disk is centred at the fixed point with radius half its distance from
    the neutral circle ``|2z| = 1`` of multipliers.
    """
    roots = np.roots([1.0, -1.0, complex(c)])
    attracting = [z for z in roots if abs(2 * z) < 1]
    if not attracting:
        return None
    z = complex(attracting[0])
    return z, (1 - abs(2 * z)) / 2


def make_polynomial_system(
    c: complex,
    R: float,
    metric: str = "euclidean",
    hole="auto",
    grid: int = 64,
) -> MultivaluedSystem:
    """The quadratic map ``z -> z**2 + c`` on ``X0 = {|z| < R}`` minus a hole.

    ``X1`` is the preimage of ``X0``.  With ``hole="auto"`` a disk around the
    attracting fixed point is removed when there is one.  Expansion is
    certified by sampling the metric expansion factor over a ``grid`` x
    ``grid`` lattice.
    """
    c = complex(c)
    if R < 1 + math.sqrt(1 + abs(c)):
        raise DomainError(f"R = {R} is below the escape radius 1 + sqrt(1 + |c|)")
    if isinstance(hole, str):
        if hole != "auto":
            raise InputError(f"hole must be 'auto', None or (center, radius), got {hole!r}")
        hole = polynomial_hole(c)
    X0 = Planar(0j, float(R), metric, None if hole is None else (complex(hole[0]), float(hole[1])))
    if X0.contains(c):
        raise CertificateError(f"the critical value {c} lies in X0, so z**2 + c is not a covering there")

    def sigma(z):
        z = np.asarray(z, dtype=complex)
        return z * z + c

    def d_sigma(z):
        return 2 * np.asarray(z, dtype=complex)

    X1 = Subset(X0, lambda z: X0.contains_many(sigma(z)), "preimage")
    lam, m = _sample_expansion(X0, X1, sigma, d_sigma, R, grid)
    system = MultivaluedSystem(
        X0=X0,
        X1=X1,
        iota=_identity,
        sigma=sigma,
        d_sigma=d_sigma,
        certificate=ExpansionCertificate(lam, m * m / lam, "sampled", grid, lam - 1),
        family="polynomial",
        params={"c": c, "R": float(R), "metric": metric, "hole": hole},
    )
    object.__setattr__(system, "lift", planar_lifter(system))
    return system


def _sample_expansion(X0: Planar, X1: Space, sigma, d_sigma, R: float, grid: int) -> tuple[float, float]:
    z = _grid(R, grid)
    z = z[X1.contains_many(z)]
    if len(z) == 0:
        raise CertificateError("X1 is empty on the sampling grid")
    factor = X0.density(sigma(z)) * np.abs(d_sigma(z)) / X0.density(z)
    lam = float(factor.min())
    if lam <= 1.01:
        worst = z[int(np.argmin(factor))]
        raise CertificateError(f"sampled expansion factor {lam:.4f} <= 1.01 near z = {worst:.4f}")
    return lam, float(np.abs(z).min())


# ---------------------------------------------------------------- shadowing


class ExpandingShadow(NamedTuple):
    orbit: Orbit
    trace: ShadowTrace
    homotopy: list[PolyPath]


def default_tol(system: MultivaluedSystem) -> float:
    return 1e-10 if isinstance(root_space(system.X0), Circle) else 1e-8


def _row_lengths(space: Space, V: np.ndarray) -> np.ndarray:
    if V.shape[0] == 0:
        return np.zeros(0)
    base = root_space(space)
    if isinstance(base, Circle) or (isinstance(base, Planar) and base.metric == "euclidean"):
        return np.abs(np.diff(V, axis=1)).sum(axis=1)
    return np.array([space.segment_lengths(row).sum() for row in V])


def _pad(rows: list[np.ndarray]) -> np.ndarray:
    K = max(len(r) for r in rows)
    out = np.empty((len(rows), K), dtype=rows[0].dtype)
    for k, r in enumerate(rows):
        out[k, : len(r)] = r
        out[k, len(r) :] = r[-1]
    return out


def shadow_expanding(system: MultivaluedSystem, hpo: HomotopyPseudoOrbit, tol: float | None = None) -> ExpandingShadow:
    """Shadow an hpo of a certified expanding system by an orbit.

    Every stage lifts each path from the previous point and moves the point
    to the lift's endpoint; the lifted paths become the next stage's paths,
    and the last index of the window is used up.  The run stops once the
    longest path is shorter than ``tol``.  ``homotopy[k]`` joins the input
    point with index ``start + k`` to the output point with the same index.
    """
    cert = _require_expanding(system)
    tol = default_tol(system) if tol is None else tol
    if not tol > 0:
        raise InputError("tol must be positive")
    X0, X1 = system.X0, system.X1
    circle = isinstance(root_space(X0), Circle)
    pts = hpo.points.copy()
    if circle:
        pts = pts % 1.0
    C = hpo.length_bound
    budget = math.ceil(math.log(C / tol) / math.log(cert.lam)) if C > tol else 0
    trace = ShadowTrace(meta={"lam": cert.lam, "C": C, "tol": tol, "stage_budget": budget})

    if isinstance(root_space(X0), Discrete) or len(hpo.paths) == 0:
        defects = orbit_defects(system, pts)
        trace.record(0, 0.0, defects.max(initial=0.0), pts)
        homotopy = [PolyPath.constant(X1, p) for p in pts]
        return ExpandingShadow(Orbit(pts, hpo.start, hpo.window, tol), trace, homotopy)

    V = _pad([p.vertices for p in hpo.paths])
    lengths = _row_lengths(X0, V)
    trace.record(0, lengths.max(), orbit_defects(system, pts).max(initial=0.0), pts.copy())
    pieces: list[np.ndarray] = []
    stage = 0
    while lengths.max(initial=0.0) >= tol:
        if V.shape[0] < 2:
            raise BudgetError(
                f"window of {len(hpo)} points is too short to reach tol {tol:g}; "
                f"the a-priori requirement is {budget + 2} points",
                required_window=budget + 2,
            )
        if stage > 4 * budget + 20:
            raise ConvergenceError("path lengths stopped contracting; the certificate does not hold here")
        beta = system.lift(V, pts[:-1])
        pieces.append(beta)
        pts = beta[:, -1].copy()
        if circle:
            pts = pts % 1.0
        rest = beta[1:]
        V = system.iota(rest.ravel()).reshape(rest.shape)
        lengths = _row_lengths(X0, V)
        stage += 1
        trace.record(stage, lengths.max(initial=0.0), orbit_defects(system, pts).max(initial=0.0), pts.copy())
    if not X1.contains_many(pts).all():
        raise ConvergenceError("the shadowing orbit left X1")
    homotopy = []
    for i in range(len(pts)):
        rows = [p[i] for p in pieces]
        if circle and rows:
            shifted = [rows[0]]
            for r in rows[1:]:
                shifted.append(r + round(float(shifted[-1][-1]) - float(r[0])))
            rows = shifted
        verts = np.concatenate([rows[0]] + [r[1:] for r in rows[1:]]) if rows else single(X1, hpo.points[i])
        homotopy.append(PolyPath(X1, verts))
    return ExpandingShadow(Orbit(pts, hpo.start, hpo.window, tol), trace, homotopy)


def uniqueness_radius(lam: float, C: float, C_prime: float) -> float:
    """Radius within which two shadowing orbits of the same hpo must coincide."""
    if lam <= 1:
        raise DomainError(f"expansion factor must exceed 1, got {lam}")
    if C < 0 or C_prime < 0:
        raise DomainError("length bounds must be non-negative")
    return lam * (C + C_prime) / (lam - 1)


def induced_map_expanding(h: HomotopySemiConjugacy, orbit: Orbit, tol: float | None = None) -> Orbit:
    """Image of an orbit under the map on orbit spaces induced by ``h``."""
    _require_expanding(h.target)
    hpo = apply_hsc(h, hpo_from_orbit(h.source, orbit))
    return shadow_expanding(h.target, hpo, tol).orbit


# ---------------------------------------------------------------- named semi-conjugacies


def straight_line_hsc(source: MultivaluedSystem, target: MultivaluedSystem, K: int = 64) -> HomotopySemiConjugacy:
    """Identity maps with ``G`` the straight homotopy from ``sigma`` to ``sigma'``.

    Valid between two circle maps of the same degree, or between two maps of a
    convex planar domain with the same ``X1``.
    """

    def G(x, t):
        a = source.sigma(single(source.X1, x))[0]
        b = target.sigma(single(target.X1, x))[0]
        t = np.asarray(t, dtype=float)
        return a + (b - a) * t

    def H(x, t):
        return np.repeat(single(target.X0, x), len(t))

    return HomotopySemiConjugacy(source, target, _identity, _identity, G, H, K=K, name="straight-line")


def half_rotation_hsc(system: MultivaluedSystem, K: int = 64) -> HomotopySemiConjugacy:
    """The self-map ``x -> x + 1/2`` of an odd-degree circle map.

    ``h0`` is the identity and ``h1`` the half rotation; ``G`` turns through
    half a revolution from ``sigma(x)`` and ``H`` from ``x``.
    """
    if system.family not in ("circle-linear", "circle-perturbed"):
        raise InputError("the half rotation is defined for circle systems")

    def h1(x):
        return (np.asarray(x, dtype=float) + 0.5) % 1.0

    def G(x, t):
        return system.sigma(single(system.X1, x))[0] + np.asarray(t, dtype=float) / 2

    def H(x, t):
        return float(x) + np.asarray(t, dtype=float) / 2

    return HomotopySemiConjugacy(system, system, _identity, h1, G, H, K=K, name="half-rotation")


def rotation_hsc(system: MultivaluedSystem, r: float) -> HomotopySemiConjugacy:
    """Rotation by ``r`` on both spaces with constant homotopies.

    This is only a semi-conjugacy when rotation commutes with the map.
    """

    def rot(x):
        return (np.asarray(x, dtype=float) + r) % 1.0

    return constant_hsc(system, system, rot, rot, name=f"rotation {r}")


__all__ = [
    "ExpansionCertificate",
    "ExpandingShadow",
    "make_circle_system",
    "make_polynomial_system",
    "polynomial_hole",
    "lift_path",
    "shadow_expanding",
    "uniqueness_radius",
    "induced_map_expanding",
    "straight_line_hsc",
    "half_rotation_hsc",
    "rotation_hsc",
    "circle_lifter",
    "planar_lifter",
    "constant_lifter",
    "default_tol",
]
