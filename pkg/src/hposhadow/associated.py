"""One-dimensional expanding systems attached to a Hénon map.

Freezing the second coordinate at a height ``y0`` turns
``f(x, y) = (x**2 + c - b y, x)`` into the quadratic map
``sigma(x) = x**2 + c - b y0``, restricted to the points that stay in the box.
This system is expanding and inherits its factor from the cone certificate.
Two explicit homotopy semi-conjugacies identify its orbit space with that of
the Hénon map:

* ``k`` sends ``x`` to ``(x, y0)``.  Its ``G`` is the vertical segment from
  ``(sigma(x), y0)`` up to ``f(x, y0) = (sigma(x), x)``.
* ``h`` sends a point ``p`` to the point at height ``y0`` on the same leaf
  ``{q : pi_x f(q) = pi_x f(p)}``.  Its ``H`` slides along that leaf.

``h o k`` is the identity on the nose, and ``k o h`` is homotopic to the
identity, so the induced maps are inverse conjugacies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .expanding import ExpansionCertificate, induced_map_expanding, planar_lifter, straight_line_hsc
from .hyperbolic import DEFAULT_TOL, CrossedSystem, induced_map_hyperbolic
from .mds import HomotopySemiConjugacy, MultivaluedSystem, Orbit, as_points, common_window
from .spaces import Subset
from .symbolic import full_shift


@dataclass(frozen=True, eq=False, kw_only=True)
class AssociatedSystem(MultivaluedSystem):
    parent: CrossedSystem
    y0: complex


def associated_expanding(parent: CrossedSystem, y0: complex = 0.0) -> AssociatedSystem:
    """The quadratic system ``x -> x**2 + c - b y0`` on the slice of the box at height ``y0``."""
    prm = parent.henon
    if prm is None:
        raise InputError("associated systems are defined for Hénon maps")
    y0 = complex(y0)
    if not parent.My.contains(y0):
        raise DomainError(f"height {y0} is outside My")
    c, b = prm.c, prm.b
    Mx, My = parent.Mx, parent.My
    shift = c - b * y0

    def sigma(x):
        x = np.asarray(x, dtype=complex)
        return x * x + shift

    def d_sigma(x):
        return 2 * np.asarray(x, dtype=complex)

    X1 = Subset(Mx, lambda x: My.contains_many(x) & Mx.contains_many(sigma(x)), f"slice at height {y0}")
    lam = parent.lam
    m = parent.clearance
    system = AssociatedSystem(
        X0=Mx,
        X1=X1,
        iota=_identity,
        sigma=sigma,
        d_sigma=d_sigma,
        certificate=ExpansionCertificate(lam, m * m / lam, "inherited"),
        family="associated",
        params={"parent": dict(parent.params), "y0": y0},
        parent=parent,
        y0=y0,
    )
    object.__setattr__(system, "lift", planar_lifter(system))
    return system


def _identity(x):
    return x


def _leaf_track(P: np.ndarray, y0: complex, b: complex, t: np.ndarray) -> np.ndarray:
    """x-coordinates along the leaves through the points ``P`` as the height moves to ``y0``.

    Row ``k`` of the result follows the root of
    ``x**2 = P[k, 0]**2 + b t (y0 - P[k, 1])`` continuously from ``P[k, 0]``.
    Writing the right side as ``x0**2 (1 + t s)``, the segment ``1 + t s``
    meets the principal branch cut only when it runs through 0, so
    ``x0 sqrt(1 + t s)`` is the continuation whenever one exists.
    """
    P = np.asarray(P, dtype=complex).reshape(-1, 2)
    t = np.asarray(t, dtype=float)
    x0 = P[:, :1]
    if np.any(x0 == 0):
        raise DomainError("a leaf through a critical point x = 0 has no continuation")
    s = b * (y0 - P[:, 1:]) / (x0 * x0)
    blocked = (np.abs(s.imag) <= 1e-14 * np.abs(s)) & (s.real <= -1)
    if blocked.any():
        k = int(np.flatnonzero(blocked.ravel())[0])
        raise DomainError(f"the leaf through point {k} meets the critical point before height {y0}")
    return x0 * np.sqrt(1 + t[None, :] * s)


def henon_to_associated(parent: CrossedSystem, Y: AssociatedSystem) -> HomotopySemiConjugacy:
    """The semi-conjugacy ``h`` from the Hénon map to its associated system at ``Y.y0``."""
    prm = parent.henon
    b, y0 = prm.b, Y.y0

    def h0(P):
        return np.asarray(P, dtype=complex)[..., 0]

    def h1(P):
        return _leaf_track(P, y0, b, np.array([1.0]))[:, 0]

    def G(p, t):
        return np.full(len(t), parent.sigma(np.asarray(p))[0], dtype=complex)

    def H(p, t):
        return _leaf_track(p, y0, b, t)[0]

    return HomotopySemiConjugacy(parent, Y, h0, h1, G, H, K=64, name="associated-h")


def associated_to_henon(Y: AssociatedSystem, parent: CrossedSystem) -> HomotopySemiConjugacy:
    """The semi-conjugacy ``k`` from the associated system back to the Hénon map."""
    y0 = Y.y0

    def tau(x):
        x = np.asarray(x, dtype=complex)
        return np.stack([x, np.full_like(x, y0)], axis=-1)

    def G(x, t):
        x = complex(x)
        t = np.asarray(t, dtype=float)
        top = Y.sigma_of(x)
        return np.stack([np.full(len(t), top, dtype=complex), (1 - t) * y0 + t * x], axis=-1)

    def H(x, t):
        return np.repeat(tau(np.array([complex(x)])), len(t), axis=0)

    return HomotopySemiConjugacy(Y, parent, tau, tau, G, H, K=64, name="associated-k")


def inverse_limit_conjugacy(
    parent: CrossedSystem,
    direction: str,
    orbit: Orbit,
    tol: float = DEFAULT_TOL,
    y0: complex = 0.0,
) -> Orbit:
    """Carry an orbit between a Hénon map and the inverse limit of its associated system.

    ``direction="to_henon"`` takes an orbit of the associated system at
    height ``y0`` to a Hénon orbit.  ``direction="from_henon"`` goes the
    other way.
    """
    Y = associated_expanding(parent, y0)
    if direction == "to_henon":
        return induced_map_hyperbolic(associated_to_henon(Y, parent), orbit, tol)
    if direction == "from_henon":
        return induced_map_expanding(henon_to_associated(parent, Y), orbit, tol)
    raise InputError(f"direction must be 'to_henon' or 'from_henon', got {direction!r}")


def change_height(Ya: AssociatedSystem, Yb: AssociatedSystem) -> HomotopySemiConjugacy:
    """Identity maps between two associated systems, with ``G`` moving the height linearly."""
    if Ya.parent is not Yb.parent:
        raise InputError("both associated systems must come from the same Hénon map")
    return straight_line_hsc(Ya, Yb)


def y0_independence(parent: CrossedSystem, y0: complex, y1: complex, samples: list[Orbit], tol: float = DEFAULT_TOL) -> float:
    """Largest disagreement between two routes from Hénon orbits to height ``y1``.

    For each sample Hénon orbit ``p``, one route reads ``p`` at height ``y0``
    and then changes the height to ``y1``.  The other reads ``p`` at ``y1``
    directly.  Independence of the height means the two agree.
    """
    Ya = associated_expanding(parent, y0)
    Yb = associated_expanding(parent, y1)
    move = change_height(Ya, Yb)
    worst = 0.0
    for p in samples:
        direct = induced_map_expanding(henon_to_associated(parent, Yb), p, tol)
        if complex(y0) == complex(y1):
            continue
        via = induced_map_expanding(move, induced_map_expanding(henon_to_associated(parent, Ya), p, tol), tol)
        a, b = common_window(via, direct)
        if len(a):
            worst = max(worst, float(np.abs(a - b).max()))
    return worst


def classify_henon(c: complex, b: complex) -> tuple[str, str | None]:
    """Name the parameter regime and the model of the Hénon map on its Julia set.

    Boundary values of each condition are left unclassified.
    """
    c, b = complex(c), complex(b)
    if abs(c) > 2 * (1 + abs(b)) ** 2:
        return "horseshoe", "full 2-shift"
    if c == 0 and abs(b) < (math.sqrt(2) - 1) / 2:
        return "solenoid", "inverse limit of z ↦ z²"
    if c == -1 and abs(b) < 0.02:
        return "basilica", "inverse limit of the basilica"
    return "unclassified", None


def coding_hsc(Y: AssociatedSystem) -> HomotopySemiConjugacy:
    """Semi-conjugacy from the full 2-shift to an associated system whose X0 contains 0.

    The vertex goes to 0, and edge ``e`` goes to the preimage of 0 in lobe
    ``e``.  Lobe 0 is the root with the smaller real part.  ``H`` is the
    straight segment from 0 to that preimage and ``G`` is constant at 0.
    """
    if not Y.X0.contains(0j):
        raise DomainError("the base point 0 is not in X0")
    shift = Y.sigma_of(0j)
    root = complex(np.sqrt(complex(-shift)))
    lobes = sorted([root, -root], key=lambda z: (z.real, z.imag))
    for z in lobes:
        if not Y.X1.contains(z):
            raise DomainError("a preimage of 0 is outside X1")
    S = full_shift(2)

    def h0(vs):
        return np.zeros(len(vs), dtype=complex)

    def h1(es):
        return np.array([lobes[int(e)] for e in es], dtype=complex)

    def G(e, t):
        return np.zeros(len(t), dtype=complex)

    def H(e, t):
        return lobes[int(e)] * np.asarray(t, dtype=float)

    return HomotopySemiConjugacy(S, Y, h0, h1, G, H, K=1, name="coding")


def itinerary_orbit_associated(Y: AssociatedSystem, word: str, N: int, tol: float = 1e-12) -> Orbit:
    """The periodic orbit of ``Y`` with the given periodic itinerary, on the window ``[-N, N]``."""
    if not word or any(s not in "01" for s in word):
        raise InputError("itineraries are nonempty words over 0 and 1")
    n = len(word)
    code = coding_hsc(Y)
    reps = 2 * N + 1 + 8 * n + 64
    edges = as_points(code.source.X1, [int(word[i % n]) for i in range(reps)])
    pts = induced_map_expanding(code, Orbit(edges, 0, "forward", 0.0), tol).points
    if len(pts) < n:
        raise DomainError("itinerary window too short")
    cycle = pts[:n]
    return Orbit(np.array([cycle[i % n] for i in range(-N, N + 1)]), -N, "bi", tol)


__all__ = [
    "AssociatedSystem",
    "associated_expanding",
    "henon_to_associated",
    "associated_to_henon",
    "inverse_limit_conjugacy",
    "change_height",
    "y0_independence",
    "classify_henon",
    "coding_hsc",
    "itinerary_orbit_associated",
]
