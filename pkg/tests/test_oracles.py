"""Recompute the frozen reference constants used across the suite with exact arithmetic."""

import pytest

sympy = pytest.importorskip("sympy")

import test_acceptance as acc  # noqa: E402
import test_associated as assoc  # noqa: E402
import test_hyperbolic as hyp  # noqa: E402


def roots(poly):
    x = sympy.symbols("x")
    return sorted(float(r.evalf(25)) for r in sympy.solve(sympy.sympify(poly), x))


def test_horseshoe_fixed_points():
    # (x, x) fixed by f: x = x^2 - 6 - 0.1 x
    expected = roots("x**2 - 11*x/10 - 6")
    assert sorted(acc.FIXED) == pytest.approx(expected, abs=1e-15)
    assert sorted((hyp.FIXED, hyp.FIXED_OTHER)) == pytest.approx(expected, abs=1e-15)


def test_horseshoe_period_two():
    # p + q = -(1 + b) and p q = -4.79 after subtracting the two orbit equations
    p, q = sympy.symbols("p q")
    sols = sympy.solve([q + sympy.Rational(1, 10) * q - p**2 + 6, p + sympy.Rational(1, 10) * p - q**2 + 6], [p, q])
    period = sorted({float(s[0]) for s in sols if abs(complex(s[0]) - complex(s[1])) > 1e-9})
    assert sorted(acc.PERIOD2) == pytest.approx(period, abs=1e-15)
    assert sorted(hyp.PERIOD2) == pytest.approx(roots("x**2 + 11*x/10 - 479/100"), abs=1e-15)


def test_associated_fixed_points():
    assert roots("x**2 - 6 - x") == [-2.0, 3.0]
    assert max(roots("x**2 - 6 - 1/20 - x")) == pytest.approx(assoc.SIGMA_HALF_FIXED, abs=1e-15)
    # solenoid: x^2 - 0.15 x = x
    assert max(roots("x**2 - 115*x/100")) == pytest.approx(1.15, abs=1e-15)
