import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hposhadow import HenonParams, make_circle_system, make_henon_system

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.function_scoped_fixture, HealthCheck.too_slow],
)
settings.load_profile("default")

# A box on which the c = 0, b = 0.15 map satisfies both crossing conditions:
# an annulus in x keeps the critical value 0 away from the x-disk.
SOLENOID = HenonParams(0, 0.15, 1.55, 1.6, Rx_inner=0.5)
HORSESHOE = HenonParams(-6, 0.1, 4, 4)


@pytest.fixture(scope="session")
def doubling():
    return make_circle_system(2)


@pytest.fixture(scope="session")
def tripling():
    return make_circle_system(3)


@pytest.fixture(scope="session")
def horseshoe():
    return make_henon_system(HORSESHOE)


@pytest.fixture(scope="session")
def solenoid():
    return make_henon_system(SOLENOID, metric="poincare")


def doubling_orbit(x0: float, n: int, d: int = 2) -> np.ndarray:
    """Exact-in-floating-point orbit of x -> d x mod 1."""
    out = np.empty(n)
    x = x0 % 1.0
    for k in range(n):
        out[k] = x
        x = (d * x) % 1.0
    return out


def random_circle_hpo(system, rng, n: int, max_len: float = 1.0):
    """An hpo of a circle map with random points and random paths of length <= max_len.

    Each path runs from sigma(x[i-1]) to x[i] along the lift with an extra
    excursion vertex, so its length is |a| + |a - (target - start)| <= max_len.
    """
    from hposhadow import make_hpo

    while True:
        pts = rng.random(n)
        sig = system.sigma(pts[:-1])
        paths = []
        ok = True
        for s, x in zip(sig, pts[1:]):
            gap = (x - s + 0.5) % 1.0 - 0.5
            room = (max_len - abs(gap)) / 2
            if room < 0:
                ok = False
                break
            a = gap / 2 + rng.uniform(-room, room)
            paths.append([s, s + a, s + gap])
        if ok:
            return make_hpo(system, pts, paths)


def henon_hpo(system, points, start: int):
    """Bi-infinite hpo through ``points`` with straight paths from f(p[i]) to p[i + 1]."""
    from hposhadow import make_hpo

    pts = np.asarray(points, dtype=complex)
    images = system.sigma(pts[:-1])
    paths = [np.stack([a, b]) for a, b in zip(images, pts[1:])]
    return make_hpo(system, pts, paths, start, "bi")
