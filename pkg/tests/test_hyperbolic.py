import math

import numpy as np
import pytest
from conftest import HORSESHOE, SOLENOID, henon_hpo
from hypothesis import given
from hypothesis import strategies as st

from hposhadow import (
    HenonParams,
    HorizontalDisk,
    Orbit,
    PolyPath,
    VerticalDisk,
    all_intersections,
    check_bcc,
    check_occ,
    crossed_degree,
    estimate_lambda,
    henon_orbit,
    identity_hsc,
    induced_map_expanding,
    induced_map_hyperbolic,
    make_circle_system,
    make_crossed_system,
    make_henon_system,
    shadow_hyperbolic,
    unique_intersection,
    verify_orbit_uniqueness,
)
from hposhadow.errors import BudgetError, CertificateError, DomainError
from hposhadow.spaces import Planar

# Roots of the fixed-point and period-2 quadratics for c = -6, b = 0.1,
# evaluated independently with sympy to 20 digits.
FIXED = 3.0604780421266384779
FIXED_OTHER = -1.9604780421266384779
PERIOD2 = (1.7066568192793515674, -2.8066568192793515674)


def sampled_bcc(params, n=721, ny=41):
    """Brute-force margins on a boundary grid, independent of the closed-form ranges."""
    th = np.exp(2j * np.pi * np.arange(n) / n)
    r = np.linspace(0, params.Ry, ny)
    ys = (r[:, None] * th[None, ::8]).ravel()
    xs = params.Rx * th
    first = np.abs(xs[:, None] ** 2 + params.c - params.b * ys[None, :]).min() - params.Rx
    rx = np.linspace(0, params.Rx, ny)
    inner = (rx[:, None] * th[None, ::8]).ravel()
    yb = params.Ry * th
    second = (np.abs(yb[:, None] ** 2 + params.c - inner[None, :]) / abs(params.b)).min() - params.Ry
    return first, second


# ---------------------------------------------------------------- conditions


def test_bcc_horseshoe_examples():
    first, second = check_bcc(HORSESHOE)
    assert first == pytest.approx(5.6)
    assert second == pytest.approx(56.0)
    s1, s2 = sampled_bcc(HORSESHOE)
    assert s1 == pytest.approx(first, abs=1e-6)
    assert s2 == pytest.approx(second, abs=1e-6)


@given(st.floats(-12, 12), st.floats(0.02, 0.5), st.floats(1, 5))
def test_bcc_is_a_lower_bound_of_sampled_margins(c, b, R):
    params = HenonParams(c, b, R, R)
    first, second = check_bcc(params)
    s1, s2 = sampled_bcc(params, n=361, ny=21)
    assert first <= s1 + 1e-9
    assert second <= s2 + 1e-9


def test_occ_examples():
    assert check_occ(HORSESHOE) == pytest.approx(1.6)
    assert check_occ(HenonParams(-1, 0.01, 2, 2)) == pytest.approx(-1.02)
    assert check_occ(HenonParams(-6, 1e-300, 4, 4)) == pytest.approx(2.0)
    assert check_occ(SOLENOID) == math.inf


def test_b_zero_is_refused():
    with pytest.raises(DomainError):
        check_bcc(HenonParams(-6, 0, 4, 4))


def test_make_henon_system_accepts_horseshoe(horseshoe):
    assert horseshoe.degree == 2
    assert horseshoe.lam > 1
    assert horseshoe.lam == pytest.approx(2.5697, abs=1e-3)


def test_make_henon_system_rejects_small_box():
    with pytest.raises(CertificateError):
        make_henon_system(HenonParams(-6, 0.1, 2, 2))


def test_disk_box_for_small_c_fails_off_criticality():
    # With the full disk of radius 2 the critical value 0 lies inside Mx.
    with pytest.raises(CertificateError):
        make_henon_system(HenonParams(0, 0.15, 2, 2))


def test_solenoid_annulus_is_certified(solenoid):
    assert solenoid.degree == 2
    assert solenoid.lam > 1


def test_degree_of_failing_box_is_undefined():
    with pytest.raises(CertificateError):
        crossed_degree(HenonParams(-6, 0.1, 2, 2))


def test_linear_toy_map():
    def f(P):
        P = np.asarray(P, dtype=complex)
        return np.stack([2 * P[..., 0], 0.5 * P[..., 1]], axis=-1)

    def finv(P):
        P = np.asarray(P, dtype=complex)
        return np.stack([0.5 * P[..., 0], 2 * P[..., 1]], axis=-1)

    def jac(P):
        P = np.asarray(P, dtype=complex)
        J = np.zeros(P.shape[:-1] + (2, 2), dtype=complex)
        J[..., 0, 0] = 2
        J[..., 1, 1] = 0.5
        return J

    S = make_crossed_system(f, finv, jac, Planar(radius=1.0), Planar(radius=1.0))
    assert crossed_degree(S) == 1
    assert S.lam == pytest.approx(2.0, rel=1e-6)


def test_cone_violation_is_reported():
    with pytest.raises(CertificateError, match="cone"):
        estimate_lambda(HenonParams(-6, 0.1, 6, 6))


# ---------------------------------------------------------------- intersections


def test_unique_intersection_example(horseshoe):
    H = HorizontalDisk(lambda x: np.zeros_like(x))
    V = VerticalDisk(lambda y: np.zeros_like(y))
    p_h = np.array([math.sqrt(6), 0], dtype=complex)
    p_v = np.array([0, 0], dtype=complex)
    start = horseshoe.sigma(p_h)
    gamma = PolyPath(horseshoe.X0, np.stack([start, p_v]))
    hit = unique_intersection(horseshoe, H, V, p_h, p_v, gamma)
    assert np.allclose(hit.point, [0, math.sqrt(6)], atol=1e-9)
    assert horseshoe.X0.coincide(hit.u.start, start, 1e-12)
    assert horseshoe.X0.coincide(hit.s.end, p_v, 1e-12)
    assert len(all_intersections(horseshoe, H, V)) == 2


@given(st.floats(-0.3, 0.3), st.floats(-0.05, 0.05), st.floats(-0.3, 0.3), st.floats(-0.05, 0.05))
def test_degree_two_disks_meet_twice(a, s, b0, t):
    S = make_henon_system(HORSESHOE)
    H = HorizontalDisk(lambda x: a + s * x)
    V = VerticalDisk(lambda y: b0 + t * y)
    assert len(all_intersections(S, H, V)) == S.degree


# ---------------------------------------------------------------- shadowing


def test_henon_orbit_solves_period_equation(horseshoe):
    o = henon_orbit(horseshoe, [[1.7, -2.8], [-2.8, 1.7]], -3, 3)
    assert sorted(o.points[:2, 0].real) == pytest.approx(sorted(PERIOD2), abs=1e-12)


def test_exact_orbit_needs_no_stages(horseshoe):
    orbit = henon_orbit(horseshoe, [[3, 3]], -10, 10)
    result = shadow_hyperbolic(horseshoe, henon_hpo(horseshoe, orbit.points, -10))
    assert np.array_equal(result.orbit.points, orbit.points)


def test_constant_hpo_shadows_to_fixed_point(horseshoe):
    hpo = henon_hpo(horseshoe, [[3, 3]] * 81, -40)
    result = shadow_hyperbolic(horseshoe, hpo, 1e-9)
    orbit = result.orbit
    k = -orbit.start
    assert np.abs(orbit.points[k] - FIXED).max() <= 1e-9
    assert abs(FIXED**2 - 1.1 * FIXED - 6) < 1e-12
    assert FIXED_OTHER**2 - 1.1 * FIXED_OTHER - 6 == pytest.approx(0, abs=1e-12)


def test_period_two_hpo(horseshoe):
    hpo = henon_hpo(horseshoe, [[1.7, -2.8], [-2.8, 1.7]] * 40 + [[1.7, -2.8]], -40)
    orbit = shadow_hyperbolic(horseshoe, hpo, 1e-9).orbit
    xs = orbit.points[:, 0]
    assert np.abs(xs.imag).max() < 1e-9
    for x in xs:
        assert min(abs(x - p) for p in PERIOD2) <= 1e-9
    assert np.abs(xs[1:] - xs[:-1]).min() > 1


def test_short_window_reports_required_half_width(horseshoe):
    hpo = henon_hpo(horseshoe, [[3, 3]] * 11, -5)
    with pytest.raises(BudgetError) as info:
        shadow_hyperbolic(horseshoe, hpo, 1e-9)
    N = info.value.required_window
    assert N is not None and N > 5
    assert str(N) in str(info.value)


@st.composite
def noisy_horseshoe_hpos(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    word = rng.integers(0, 2, 6)
    S = make_henon_system(HORSESHOE)
    seeds = np.array([[PERIOD2[0], PERIOD2[1]], [FIXED, FIXED]])
    base = np.array([FIXED, FIXED_OTHER])
    cycle = base[word]
    pts = np.stack([np.roll(cycle, 0), np.roll(cycle, 1)], axis=-1)
    pts = np.tile(pts, (14, 1))[:81] + rng.uniform(-0.05, 0.05, (81, 2))
    return S, pts


@given(noisy_horseshoe_hpos())
def test_zigzag_decay_and_slopes(data):
    S, pts = data
    result = shadow_hyperbolic(S, henon_hpo(S, pts, -40), 1e-9)
    ex = result.trace.extra
    for h, hb, v, vb in zip(ex["horizontal"], ex["horizontal_bound"], ex["vertical"], ex["vertical_bound"]):
        assert h <= 1.01 * hb
        assert v <= 1.01 * vb
    lam = S.lam
    assert max(ex["horizontal_slope"]) <= 1 / lam
    assert max(ex["vertical_slope"]) <= 1 / lam
    defects = np.abs(S.sigma(result.orbit.points[:-1]) - result.orbit.points[1:]).max()
    assert defects <= 1e-9


def test_refined_paths_give_the_same_orbit(horseshoe):
    pts = np.array([[3.1, 2.9]] * 81)
    hpo = henon_hpo(horseshoe, pts, -40)
    fine = type(hpo)(hpo.points, tuple(p.refined(4) for p in hpo.paths), hpo.start, hpo.window)
    a = shadow_hyperbolic(horseshoe, hpo).orbit
    b = shadow_hyperbolic(horseshoe, fine).orbit
    assert verify_orbit_uniqueness(horseshoe, a, b) == "equal"


def test_fixed_point_and_period_two_are_distinct(horseshoe):
    a = shadow_hyperbolic(horseshoe, henon_hpo(horseshoe, [[3, 3]] * 81, -40)).orbit
    b = shadow_hyperbolic(horseshoe, henon_hpo(horseshoe, [[1.7, -2.8], [-2.8, 1.7]] * 40 + [[1.7, -2.8]], -40)).orbit
    assert verify_orbit_uniqueness(horseshoe, a, b) == "distinct"


def test_uniqueness_beta_must_join_the_orbits(horseshoe):
    a = henon_orbit(horseshoe, [[3, 3]], -2, 2)
    beta = [PolyPath.constant(horseshoe.X1, p) for p in a.points]
    assert verify_orbit_uniqueness(horseshoe, a, a, beta) == "equal"
    with pytest.raises(DomainError):
        verify_orbit_uniqueness(horseshoe, a, a, beta[::-1][:4] + [PolyPath.constant(horseshoe.X1, np.zeros(2))])


def test_identity_induces_identity(horseshoe):
    orbit = henon_orbit(horseshoe, [[1.7, -2.8], [-2.8, 1.7]], -40, 40)
    image = induced_map_hyperbolic(identity_hsc(horseshoe), orbit)
    k = -image.start
    assert np.abs(image.points[k] - orbit.points[40]).max() <= 1e-9


def test_induced_map_needs_crossed_target():
    S = make_circle_system(2)
    with pytest.raises(CertificateError):
        induced_map_hyperbolic(identity_hsc(S), Orbit(np.zeros(3), -1, "bi"))
    # the expanding route is fine for the same data
    assert len(induced_map_expanding(identity_hsc(S), Orbit(np.zeros(3)))) == 3
