import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hposhadow import Circle, Discrete, Planar, PolyPath, Product
from hposhadow.errors import DomainError, InputError, UnsupportedError
from hposhadow.spaces import space_from_json

coord = st.floats(-0.6, 0.6)


def test_poincare_segment_length_matches_closed_form_distance():
    # The density 2R/(R^2 - r^2) integrates to 2 atanh(r/R) along a radius.
    D = Planar(0j, 2.0, "poincare")
    for r in (0.1, 0.5, 1.0, 1.5):
        exact = 2 * math.atanh(r / 2.0)
        assert D.segment_lengths([0j, r])[0] == pytest.approx(exact, rel=1e-12)
        assert D.distance(0j, r) == pytest.approx(exact, rel=1e-12)


def test_poincare_distance_is_moebius_invariant():
    D = Planar(0j, 1.0, "poincare")
    a = 0.3 + 0.2j
    z, w = 0.1 - 0.4j, -0.5 + 0.1j

    def move(p):
        return (p - a) / (1 - np.conj(a) * p)

    assert D.distance(move(z), move(w)) == pytest.approx(D.distance(z, w), rel=1e-12)


def test_annulus_density_on_core_circle():
    # The core geodesic of {r1 < |z| < r2} sits at sqrt(r1 r2) with density pi / (L r).
    A = Planar(0j, 4.0, "poincare", (0j, 1.0))
    L = math.log(4.0)
    r = 2.0
    assert A.density(r) == pytest.approx(math.pi / (L * r), rel=1e-12)


def test_annulus_winding_counts_turns_around_hole():
    A = Planar(0j, 4.0, "euclidean", (0j, 1.0))
    loop = 2 * np.exp(2j * np.pi * np.linspace(0, 2, 33))
    assert A.winding(loop) == (2,)
    assert Planar(0j, 1.0).winding(loop / 4) == ()


def test_planar_rejects_bad_parameters():
    with pytest.raises(DomainError):
        Planar(0j, -1.0)
    with pytest.raises(InputError):
        Planar(0j, 1.0, "taxicab")
    with pytest.raises(UnsupportedError):
        Planar(0j, 2.0, "poincare", (0.5 + 0j, 0.1))


def test_circle_and_discrete_metrics():
    C = Circle()
    assert C.distance(0.1, 0.9) == pytest.approx(0.2)
    assert C.winding([0.0, 0.5, 1.0]) == (1,)
    D = Discrete(("a", "b"))
    assert D.distance("a", "b") == 1.0
    assert D.distance("a", "a") == 0.0
    with pytest.raises(DomainError):
        PolyPath(D, ["a", "b"])


def test_product_sum_metric():
    P = Product(Planar(0j, 2.0), Planar(0j, 3.0))
    p = np.array([0.5, 1j])
    q = np.array([1.5, 0j])
    assert P.distance(p, q) == pytest.approx(1.0 + 1.0)
    assert P.contains(p) and not P.contains(np.array([2.5, 0]))


def test_space_json_round_trip():
    for space in (Circle(), Planar(1 + 1j, 2.0, "poincare"), Product(Planar(0j, 2.0), Planar(0j, 1.0))):
        back = space_from_json(space.to_json())
        assert back.to_json() == space.to_json()


def test_circle_concat_shifts_lift():
    C = Circle()
    p = PolyPath(C, [0.0, 0.6])
    q = PolyPath(C, [1.6, 1.9])  # starts at 0.6 mod 1
    r = p.concat(q)
    assert r.end == pytest.approx(0.9)
    assert r.length() == pytest.approx(0.9)


@given(st.lists(st.tuples(coord, coord), min_size=2, max_size=6), st.lists(st.tuples(coord, coord), min_size=1, max_size=6))
def test_length_is_additive_and_reversal_invariant(a, b):
    D = Planar(0j, 1.0, "poincare")
    p = PolyPath(D, [complex(*v) for v in a])
    q = PolyPath(D, [p.end] + [complex(*v) for v in b])
    pq = p * q
    assert pq.length() == pytest.approx(p.length() + q.length(), rel=1e-13, abs=1e-15)
    assert p.reversed().length() == pytest.approx(p.length(), rel=1e-13, abs=1e-15)
    assert pq.start == p.start and pq.end == q.end


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=8), st.integers(1, 6))
def test_refinement_preserves_circle_path(v, k):
    path = PolyPath(Circle(), v)
    fine = path.refined(k)
    assert fine.length() == pytest.approx(path.length(), rel=1e-12, abs=1e-12)
    assert fine.displacement() == pytest.approx(path.displacement(), abs=1e-12)
