import math

import numpy as np
import pytest
from conftest import HORSESHOE
from hypothesis import given
from hypothesis import strategies as st

from hposhadow import (
    Orbit,
    associated_expanding,
    change_height,
    classify_henon,
    coding_hsc,
    henon_orbit,
    induced_map_expanding,
    inverse_limit_conjugacy,
    itinerary_orbit_associated,
    make_henon_system,
    y0_independence,
)
from hposhadow.errors import DomainError, InputError
from hposhadow.mds import check_hsc_at, common_window, conjugacy_residuals, shift_orbit

# sympy roots, 20 digits
HENON_FIXED = 3.0604780421266384779
PERIOD2 = (1.7066568192793515674, -2.8066568192793515674)
# fixed point of x^2 - 6 - 0.1 * 0.5 = x
SIGMA_HALF_FIXED = 3.0099800796022266439

TOL = 1e-9


def test_sigma_is_the_frozen_quadratic(horseshoe, solenoid):
    Y = associated_expanding(solenoid, 0)
    xs = np.array([0.7, 1.2 + 0.3j, -1.1j])
    assert np.array_equal(Y.sigma(xs), xs * xs)
    Y1 = associated_expanding(horseshoe, 1)
    assert np.allclose(Y1.sigma(xs), xs * xs - 6.1, atol=1e-15)
    assert Y1.certificate.lam == horseshoe.lam


@given(st.floats(-3.9, 3.9), st.floats(-3, 3), st.floats(-3, 3))
def test_sigma_matches_first_coordinate_of_f(y0, xr, xi):
    S = make_henon_system(HORSESHOE)
    Y = associated_expanding(S, y0)
    x = complex(xr, xi)
    assert Y.sigma_of(x) == pytest.approx(complex(S.sigma_of(np.array([x, y0]))[0]), abs=1e-12)


def test_height_outside_box_is_refused(horseshoe):
    with pytest.raises(DomainError):
        associated_expanding(horseshoe, 10)


def test_height_change_needs_same_parent(horseshoe, solenoid):
    with pytest.raises(InputError):
        change_height(associated_expanding(horseshoe), associated_expanding(solenoid))


def fixed_orbit(system, N=40):
    return henon_orbit(system, [[3, 3]], -N, N)


def test_y0_independence_examples(horseshoe):
    samples = [fixed_orbit(horseshoe)]
    assert y0_independence(horseshoe, 0, 0, samples, TOL) == 0
    assert y0_independence(horseshoe, 0, 0.5, samples, TOL) <= TOL
    with pytest.raises(DomainError):
        y0_independence(horseshoe, 0, 10, samples, TOL)


def test_height_half_reading_of_fixed_point(horseshoe):
    Y = associated_expanding(horseshoe, 0.5)
    image = inverse_limit_conjugacy(horseshoe, "from_henon", fixed_orbit(horseshoe), TOL, y0=0.5)
    assert np.abs(image.points - SIGMA_HALF_FIXED).max() <= TOL
    assert Y.sigma_of(SIGMA_HALF_FIXED) == pytest.approx(SIGMA_HALF_FIXED, abs=1e-12)


def test_to_henon_solenoid_fixed_point(solenoid):
    # x^2 = x at 1, and the Hénon fixed point solves x^2 - 1.15 x = 0.
    image = inverse_limit_conjugacy(solenoid, "to_henon", Orbit(np.ones(81, dtype=complex), -40, "bi"), TOL)
    k = -image.start
    assert np.abs(image.points[k] - 1.15).max() <= TOL


def test_from_henon_horseshoe_fixed_point(horseshoe):
    # fixed point of x^2 - 6, (1 + sqrt 25) / 2
    image = inverse_limit_conjugacy(horseshoe, "from_henon", fixed_orbit(horseshoe), TOL)
    assert np.abs(image.points - 3).max() <= TOL


def test_bad_direction(horseshoe):
    with pytest.raises(InputError):
        inverse_limit_conjugacy(horseshoe, "sideways", fixed_orbit(horseshoe))


def test_round_trip_on_period_two(horseshoe):
    orbit = henon_orbit(horseshoe, [[1.7, -2.8], [-2.8, 1.7]], -40, 40)
    assert sorted(orbit.points[:2, 0].real) == pytest.approx(sorted(PERIOD2), abs=1e-12)
    down = inverse_limit_conjugacy(horseshoe, "from_henon", orbit, TOL)
    back = inverse_limit_conjugacy(horseshoe, "to_henon", Orbit(down.points, down.start, "bi", TOL), TOL)
    a, b = common_window(back, orbit)
    assert len(a) > 0
    assert np.abs(a - b).max() <= 2 * TOL


def test_to_henon_commutes_with_shift(horseshoe):
    Y = associated_expanding(horseshoe)
    orbit = itinerary_orbit_associated(Y, "001", 40)
    image = inverse_limit_conjugacy(horseshoe, "to_henon", orbit, TOL)
    shifted = inverse_limit_conjugacy(horseshoe, "to_henon", shift_orbit(orbit), TOL)
    residual = conjugacy_residuals(horseshoe.X1, image, shifted)
    assert residual and max(residual.values()) <= 2 * TOL


def test_coding_hsc_endpoint_identities(horseshoe):
    h = coding_hsc(associated_expanding(horseshoe))
    for e in (0, 1):
        check_hsc_at(h, e)


@given(st.text("01", min_size=1, max_size=5))
def test_itinerary_orbits_are_periodic_orbits(word):
    S = make_henon_system(HORSESHOE)
    Y = associated_expanding(S)
    orbit = itinerary_orbit_associated(Y, word, 6)
    x = orbit.points
    assert np.abs(Y.sigma(x[:-1]) - x[1:]).max() <= 1e-10
    n = len(word)
    assert np.abs(x[n:] - x[:-n]).max() <= 1e-10
    # lobe 0 is the left half-line
    assert all((x[i].real < 0) == (word[(i + orbit.start) % n] == "0") for i in range(len(x)))


def test_classify_examples():
    assert classify_henon(-6, 0.1) == ("horseshoe", "full 2-shift")
    assert classify_henon(0, 0.15) == ("solenoid", "inverse limit of z ↦ z²")
    assert classify_henon(-1, 0.01) == ("basilica", "inverse limit of the basilica")
    assert classify_henon(0.3, 0.5)[0] == "unclassified"


def test_classify_boundaries_are_unclassified():
    b = 0.25
    assert classify_henon(2 * (1 + b) ** 2, b)[0] == "unclassified"
    assert classify_henon(0, (math.sqrt(2) - 1) / 2)[0] == "unclassified"
    assert classify_henon(-1, 0.02)[0] == "unclassified"


@given(st.complex_numbers(max_magnitude=20, allow_nan=False), st.complex_numbers(max_magnitude=2, allow_nan=False))
def test_classify_is_a_pure_predicate(c, b):
    first = classify_henon(c, b)
    assert classify_henon(c, b) == first
    assert (first[0] == "horseshoe") == (abs(c) > 2 * (1 + abs(b)) ** 2)


@given(st.complex_numbers(min_magnitude=0.3, max_magnitude=3, allow_nan=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False), st.floats(-3, 3))
def test_leaf_formula_matches_newton_continuation(x0, y, y0):
    from hposhadow.associated import _leaf_track
    from hposhadow.expanding import _newton_track

    b = 0.1
    P = np.array([[x0, y]])
    t = np.linspace(0, 1, 65)
    T = x0**2 + b * t[None, :] * (y0 - y)
    if np.abs(T).min() < 0.05:
        return
    tracked = _newton_track(lambda z: z * z, lambda z: 2 * z, T, np.array([x0]), 1.0 + np.abs(T).max(axis=1))
    assert np.allclose(_leaf_track(P, y0, b, t), tracked, atol=1e-10)
