import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perilib.kepler import (
    estimate_c0,
    in_strip,
    solve_kepler,
    solve_kepler_array,
    solve_kepler_zero_ecc_form,
    xi_prime_array,
)


def bisect(f, a, b, tol=1e-15):
    """Independent bracketing oracle."""
    fa = f(a)
    assert fa * f(b) <= 0
    for _ in range(200):
        m = 0.5 * (a + b)
        if fa * f(m) <= 0:
            b = m
        else:
            a, fa = m, f(m)
        if b - a < tol:
            break
    return 0.5 * (a + b)


def test_identity_case():
    sol = solve_kepler(0.0, 1.2)
    assert sol.xi == 1.2
    assert sol.residual == 0.0


def test_sin_pi_symmetry():
    sol = solve_kepler(0.5, np.pi)
    assert abs(sol.xi - np.pi) < 1e-14


def test_against_bisection_oracle():
    # oracle value for (e, ell) = (0.9, 1.0)
    expected = bisect(lambda x: x - 0.9 * np.sin(x) - 1.0, 0.0, 2 * np.pi)
    assert abs(expected - 1.8620866868745325) < 1e-12
    sol = solve_kepler(0.9, 1.0)
    assert abs(sol.xi - expected) < 1e-13


def test_periodicity_in_ell():
    base = solve_kepler(0.7, 0.9).xi
    shifted = solve_kepler(0.7, 0.9 + 2 * np.pi).xi
    assert abs(shifted - base - 2 * np.pi) < 1e-13


def test_odd_symmetry_about_pi():
    for e in (0.1, 0.5, 0.95):
        for ell in (0.3, 1.1, 2.9):
            a = solve_kepler(e, ell).xi
            b = solve_kepler(e, 2 * np.pi - ell).xi
            assert abs(b - (2 * np.pi - a)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    e=st.floats(min_value=0.0, max_value=0.99),
    ell=st.floats(min_value=0.0, max_value=2 * np.pi, exclude_max=True),
)
def test_residual_property(e, ell):
    sol = solve_kepler(e, ell)
    assert sol.residual <= 1e-13
    assert sol.iterations <= 50


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        solve_kepler(1.0, 0.3)
    with pytest.raises(ValueError):
        solve_kepler(0.5, 0.3, tol=0.0)


def test_vectorized_matches_scalar():
    ells = np.linspace(0, 2 * np.pi, 41)[:-1]
    xs = solve_kepler_array(0.97, ells)
    for ell, x in zip(ells, xs):
        assert abs(x - solve_kepler(0.97, ell).xi) < 1e-12


def test_zero_ecc_form_fixed_point():
    sol = solve_kepler_zero_ecc_form(np.pi)
    assert abs(sol.xi - np.pi) < 1e-14


def test_zero_ecc_form_oracle():
    expected = bisect(lambda x: x - np.sin(x) - np.pi / 2, 0.0, 2 * np.pi)
    assert abs(expected - 2.309881460010057) < 1e-12
    sol = solve_kepler_zero_ecc_form(np.pi / 2)
    assert abs(sol.xi - expected) < 1e-13


def test_zero_ecc_form_positive_on_real_strip():
    # right edge of the real strip for eps0 = 0.25
    x = 2 * np.pi - 2 * np.sqrt(0.25)
    sol = solve_kepler_zero_ecc_form(x)
    assert 1 - np.cos(sol.xi) > 0


def test_zero_ecc_form_matches_bisection_on_strip():
    eps0 = 0.25
    s = np.sqrt(eps0)
    for x in np.linspace(2 * s, 2 * np.pi - 2 * s, 25):
        expected = bisect(lambda z: z - np.sin(z) - x, 0.0, 2 * np.pi)
        assert abs(solve_kepler_zero_ecc_form(x).xi - expected) < 1e-12


def test_zero_ecc_form_complex_branch():
    # solution must (a) solve the equation and (b) connect continuously to
    # the real branch as Im x -> 0
    x = 3.0 + 0.4j
    sol = solve_kepler_zero_ecc_form(x)
    assert abs(sol.xi - np.sin(sol.xi) - x) < 1e-12
    near = solve_kepler_zero_ecc_form(3.0 + 1e-8j)
    real = solve_kepler_zero_ecc_form(3.0)
    assert abs(near.xi - real.xi) < 1e-6


def test_c0_positive():
    assert estimate_c0(0.25, 64) > 0


def test_c0_grid_refinement_stable():
    a = estimate_c0(0.25, 32)
    b = estimate_c0(0.25, 64)
    assert abs(a - b) / b < 0.05


def test_c0_extreme_eps0_finite():
    for eps0 in (0.1, 0.9):
        v = estimate_c0(eps0, 32)
        assert np.isfinite(v) and v > 0


def test_c0_rejects_small_grid():
    with pytest.raises(ValueError):
        estimate_c0(0.25, 8)


def test_strip_membership():
    eps0 = 0.25
    assert in_strip(np.pi + 0.4j, eps0)
    assert in_strip(2 * np.pi - 2 * np.sqrt(eps0), eps0)
    assert not in_strip(0.3, eps0)
    assert not in_strip(np.pi + 0.8j, eps0)


def test_xi_prime_array_matches_scalar():
    xs = np.linspace(0.4, 2 * np.pi - 0.4, 37)
    zs = xi_prime_array(xs)
    for x, z in zip(xs, zs):
        assert abs(z - solve_kepler_zero_ecc_form(x).xi) < 1e-12
