"""Kepler equation solvers.

Two forms are needed: the classical elliptic equation xi - e sin(xi) = ell
for eccentricities 0 <= e < 1, and the zero-angular-momentum form
xi' - sin(xi') = x that parametrizes the radial (e = 1) orbit of the outer
body, including complex arguments on the analyticity strip of that orbit.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-14
MAX_ITER = 50


class KeplerError(RuntimeError):
    """Raised when an iteration fails to reach the requested tolerance."""


@dataclass(frozen=True)
class KeplerSolution:
    """Solution record for one Kepler solve."""

    xi: float | complex
    residual: float
    iterations: int


def _newton_bisect(e, ell, tol, max_iter):
    """Guarded Newton for xi - e sin xi = ell, ell reduced to [0, 2pi).

    Newton from xi0 = ell + e sin(ell); any iterate leaving the bracket
    [ell - e, ell + e] is replaced by a bisection step, which keeps the
    method robust up to e ~ 1.
    """
    lo, hi = ell - e, ell + e
    xi = ell + e * np.sin(ell)
    for it in range(1, max_iter + 1):
        f = xi - e * np.sin(xi) - ell
        if abs(f) <= tol:
            return xi, abs(f), it
        if f > 0:
            hi = xi
        else:
            lo = xi
        d = 1.0 - e * np.cos(xi)
        step = f / d if d > 1e-14 else np.inf
        cand = xi - step
        xi = cand if lo < cand < hi else 0.5 * (lo + hi)
    f = xi - e * np.sin(xi) - ell
    if abs(f) <= tol:
        return xi, abs(f), max_iter
    raise KeplerError(
        "Kepler iteration did not converge: e=%r ell=%r residual=%.3e"
        % (e, ell, abs(f))
    )


def solve_kepler(e, ell, tol=DEFAULT_TOL, max_iter=MAX_ITER):
    """Solve xi - e sin(xi) = ell for the eccentric anomaly.

    Parameters
    ----------
    e : eccentricity in [0, 1)
    ell : mean anomaly (rad), any real value
    tol : residual tolerance

    Returns a KeplerSolution whose xi is continuous in ell: the branch for
    ell + 2*pi*k is the principal solution shifted by 2*pi*k.
    """
    if not 0.0 <= e < 1.0:
        raise ValueError("eccentricity must lie in [0, 1), got %r" % (e,))
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = np.floor(ell / (2 * np.pi))
    ell0 = ell - 2 * np.pi * k
    if e == 0.0:
        return KeplerSolution(ell, 0.0, 0)
    xi, res, it = _newton_bisect(e, ell0, tol, max_iter)
    return KeplerSolution(xi + 2 * np.pi * k, res, it)


def solve_kepler_array(e, ell, tol=DEFAULT_TOL, max_iter=2 * MAX_ITER):
    """Vectorized eccentric anomaly for an array of mean anomalies.

    Same guarded Newton as solve_kepler, evaluated simultaneously on all
    entries; used by the quadrature loops.
    """
    ell = np.asarray(ell, dtype=float)
    k = np.floor(ell / (2 * np.pi))
    ell0 = ell - 2 * np.pi * k
    if e == 0.0:
        return ell0 + 2 * np.pi * k
    lo, hi = ell0 - e, ell0 + e
    xi = ell0 + e * np.sin(ell0)
    for _ in range(max_iter):
        f = xi - e * np.sin(xi) - ell0
        if np.max(np.abs(f)) <= tol:
            break
        hi = np.where(f > 0, np.minimum(hi, xi), hi)
        lo = np.where(f < 0, np.maximum(lo, xi), lo)
        d = 1.0 - e * np.cos(xi)
        cand = xi - f / np.maximum(d, 1e-14)
        xi = np.where((cand > lo) & (cand < hi), cand, 0.5 * (lo + hi))
    res = np.abs(xi - e * np.sin(xi) - ell0)
    if np.max(res) > tol:
        raise KeplerError("vectorized Kepler solve stalled, residual %.3e" % np.max(res))
    return xi + 2 * np.pi * k


def in_strip(x, eps0):
    """True if x lies in the closed complex strip used for the radial orbit:
    |Re x - pi| <= pi - 2 sqrt(eps0), |Im x| <= sqrt(eps0).
    """
    s = np.sqrt(eps0)
    return (abs(np.real(x) - np.pi) <= np.pi - 2 * s + 1e-12) and (
        abs(np.imag(x)) <= s + 1e-12
    )


def solve_kepler_zero_ecc_form(x, tol=DEFAULT_TOL, max_iter=MAX_ITER, steps=8):
    """Solve xi' - sin(xi') = x for the e = 1 (radial orbit) anomaly.

    Real x in (0, 2*pi) has a unique solution in (0, 2*pi); for complex x the
    branch is continued from the real solution at Re x along a straight
    segment in the imaginary direction, Newton-correcting at each step.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    xr = float(np.real(x))
    if not 0.0 < xr < 2 * np.pi:
        raise ValueError("Re x must lie in (0, 2*pi), got %r" % (xr,))
    # real solve: guarded Newton on (0, 2*pi)
    lo, hi = 0.0, 2 * np.pi
    xi = np.pi
    total_it = 0
    for it in range(1, 2 * max_iter + 1):
        f = xi - np.sin(xi) - xr
        total_it = it
        if abs(f) <= tol:
            break
        if f > 0:
            hi = xi
        else:
            lo = xi
        d = 1.0 - np.cos(xi)
        cand = xi - f / d if d > 1e-14 else np.nan
        xi = cand if lo < cand < hi else 0.5 * (lo + hi)
    else:
        raise KeplerError("real radial Kepler solve stalled at x=%r" % (x,))
    xim = float(np.imag(x))
    if xim == 0.0 and not np.iscomplexobj(x):
        return KeplerSolution(xi, abs(xi - np.sin(xi) - xr), total_it)
    # imaginary continuation
    z = complex(xi)
    for k in range(1, steps + 1):
        target = xr + 1j * xim * k / steps
        for it in range(1, max_iter + 1):
            f = z - np.sin(z) - target
            if abs(f) <= tol:
                break
            d = 1.0 - np.cos(z)
            if abs(d) < 1e-14:
                raise KeplerError("vanishing derivative during continuation")
            z = z - f / d
        else:
            raise KeplerError("complex radial Kepler solve stalled at x=%r" % (x,))
        total_it += it
    return KeplerSolution(z, abs(z - np.sin(z) - complex(x)), total_it)


def xi_prime_array(x, tol=DEFAULT_TOL, max_iter=120):
    """Vectorized real solution of xi' - sin xi' = x for x in (0, 2*pi)."""
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= 2 * np.pi)):
        raise ValueError("arguments must lie in (0, 2*pi)")
    lo = np.zeros_like(x)
    hi = np.full_like(x, 2 * np.pi)
    z = np.full_like(x, np.pi)
    for _ in range(max_iter):
        f = z - np.sin(z) - x
        if np.max(np.abs(f)) <= tol:
            break
        hi = np.where(f > 0, z, hi)
        lo = np.where(f < 0, z, lo)
        d = 1.0 - np.cos(z)
        cand = z - f / np.maximum(d, 1e-14)
        z = np.where((cand > lo) & (cand < hi), cand, 0.5 * (lo + hi))
    res = np.abs(z - np.sin(z) - x)
    if np.max(res) > tol:
        raise KeplerError("vectorized radial solve stalled, residual %.3e" % np.max(res))
    return z


def xi_prime_real(x, tol=DEFAULT_TOL):
    """Bare real solution of xi' - sin xi' = x (fast path for the flow)."""
    lo, hi = 0.0, 2 * np.pi
    z = np.pi
    for _ in range(100):
        f = z - np.sin(z) - x
        if abs(f) <= tol:
            return z
        if f > 0:
            hi = z
        else:
            lo = z
        d = 1.0 - np.cos(z)
        cand = z - f / d if d > 1e-14 else -1.0
        z = cand if lo < cand < hi else 0.5 * (lo + hi)
    return z


def estimate_c0(eps0, grid_n=64, tol=1e-13):
    """Measure the domain constant c0 of the radial-orbit strip.

    Returns the minimum of |1 - cos xi'(x)| / eps0 over a grid_n x grid_n
    grid on the strip |Re x - pi| <= pi - 2 sqrt(eps0), |Im x| <= sqrt(eps0).
    The constant is only asserted to exist (positively) by the theory, so it
    is measured, never hard-coded.
    """
    if not 0.0 < eps0 < 1.0:
        raise ValueError("eps0 must lie in (0, 1)")
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    s = np.sqrt(eps0)
    half = np.pi - 2 * s
    res = np.linspace(np.pi - half, np.pi + half, grid_n)
    ims = np.linspace(-s, s, grid_n)
    best = np.inf
    for re in res:
        z = complex(solve_kepler_zero_ecc_form(re, tol=tol).xi)
        best = min(best, abs(1.0 - np.cos(z)))
        # walk each imaginary half-column by continuation from the real
        # axis, reusing the previous point as the Newton seed
        for sign in (1.0, -1.0):
            order = sorted((im for im in ims if im * sign > 0), key=abs)
            zc = z
            for im in order:
                target = re + 1j * im
                for _ in range(MAX_ITER):
                    f = zc - np.sin(zc) - target
                    if abs(f) <= tol:
                        break
                    zc = zc - f / (1.0 - np.cos(zc))
                else:
                    raise KeplerError("c0 scan stalled at x=%r" % (target,))
                best = min(best, abs(1.0 - np.cos(zc)))
    return best / eps0
