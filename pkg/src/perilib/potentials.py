"""Rescaled averaged potentials of the planar problem.

u_hat is the mean over one inner orbit of the reciprocal distance between the
outer body and the moving inner body, rescaled by the radius; e_hat is the
quadratic first integral that generates the same level sets; f_eps is the
single-integral renormalizing profile with a closed form at t = 1.  The key
numerical fact exercised throughout: u_hat = f_eps composed with e_hat.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kepler import solve_kepler, solve_kepler_array, xi_prime_real

RADICAND_FLOOR = 1e-10


class SingularLocusError(ArithmeticError):
    """Evaluation attempted too close to the holomorphy-loss locus."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Periodic-trapezoid rule on [0, 2*pi): n_nodes equispaced nodes."""

    n_nodes: int = 256
    rule: str = "trapezoid-periodic"

    def __post_init__(self):
        if self.n_nodes < 32 or self.n_nodes % 2:
            raise ValueError("n_nodes must be even and >= 32")
        if self.rule != "trapezoid-periodic":
            raise ValueError("unknown quadrature rule %r" % (self.rule,))


DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=32)
def _xi_nodes(n):
    xi = 2 * np.pi * np.arange(n) / n
    return xi, np.cos(xi), np.sin(xi)


def rho_p(Lambda, G, ell, g):
    """Radial factor rho = 1 - e cos(xi) and projection factor
    p = (cos(xi) - e) cos(g) - (G/Lambda) sin(xi) sin(g)
    at eccentric anomaly xi(e, ell)."""
    e = np.sqrt(max(0.0, 1.0 - G**2 / Lambda**2))
    if e == 1.0:
        # degenerate ellipse: xi - sin(xi) = ell
        k = np.floor(ell / (2 * np.pi))
        ell0 = ell - 2 * np.pi * k
        xi = (0.0 if ell0 == 0.0 else xi_prime_real(ell0)) + 2 * np.pi * k
    else:
        xi = solve_kepler(e, ell).xi
    rho = 1.0 - e * np.cos(xi)
    p = (np.cos(xi) - e) * np.cos(g) - (G / Lambda) * np.sin(xi) * np.sin(g)
    return rho, p


def u_hat(eps, Lambda, G, g, quad=DEFAULT_QUAD):
    """Rescaled averaged potential (1/2pi) * integral dl / sqrt(1 + 2 eps p + eps^2 rho^2).

    Evaluated in the eccentric anomaly (dl = rho dxi), where the integrand is
    analytic uniformly in the eccentricity, so the periodic trapezoid rule
    converges spectrally even at e = 1.
    """
    xi, cxi, sxi = _xi_nodes(quad.n_nodes)
    e = np.sqrt(max(0.0, 1.0 - G**2 / Lambda**2))
    rho = 1.0 - e * cxi
    p = (cxi - e) * np.cos(g) - (G / Lambda) * sxi * np.sin(g)
    rad = 1.0 + 2 * eps * p + eps**2 * rho**2
    if rad.min() < RADICAND_FLOOR:
        raise SingularLocusError(
            "u_hat radicand %.3e below floor (eps=%r, G=%r, g=%r)"
            % (rad.min(), eps, G, g)
        )
    return float(np.mean(rho / np.sqrt(rad)))


def u_hat_mean_anomaly(eps, Lambda, G, g, quad=DEFAULT_QUAD):
    """u_hat by brute-force trapezoid in the mean anomaly itself.

    Loses spectral accuracy as e -> 1 (the integrand has a near-cusp at
    pericenter); kept as the independent cross-check of the change of
    variables used by u_hat.
    """
    n = quad.n_nodes
    ell = 2 * np.pi * np.arange(n) / n
    e = np.sqrt(max(0.0, 1.0 - G**2 / Lambda**2))
    xi = solve_kepler_array(e, ell)
    rho = 1.0 - e * np.cos(xi)
    p = (np.cos(xi) - e) * np.cos(g) - (G / Lambda) * np.sin(xi) * np.sin(g)
    rad = 1.0 + 2 * eps * p + eps**2 * rho**2
    if rad.min() < RADICAND_FLOOR:
        raise SingularLocusError("u_hat radicand below floor")
    return float(np.mean(1.0 / np.sqrt(rad)))


def e_hat(eps, Lambda, G, g):
    """sqrt(1 - G^2/Lambda^2) cos(g) + eps G^2/Lambda^2."""
    u2 = G**2 / Lambda**2
    return np.sqrt(np.maximum(0.0, 1.0 - u2)) * np.cos(g) + eps * u2


def e_hat_aa(eps, Lambda, Gcal, gamma):
    """The same first integral in the action-angle chart:
    Gcal/Lambda + eps (1 - Gcal^2/Lambda^2) cos^2(gamma)."""
    u = Gcal / Lambda
    return u + eps * (1.0 - u**2) * np.cos(gamma) ** 2


def f_eps(eps, t, quad=DEFAULT_QUAD):
    """Renormalizing profile
    (1/2pi) * integral (1 - cos xi) dxi / sqrt(1 - 2 eps (1-cos xi) t + eps^2 (1-cos xi)^2)
    for |eps| < 1/2 and (eps, t) off the singular locus."""
    if abs(eps) >= 0.5:
        raise ValueError("f_eps requires |eps| < 1/2, got %r" % (eps,))
    _, cxi, _ = _xi_nodes(quad.n_nodes)
    X = 1.0 - cxi
    rad = 1.0 - 2 * eps * X * t + eps**2 * X**2
    if rad.min() < RADICAND_FLOOR:
        raise SingularLocusError(
            "f_eps radicand %.3e below floor (eps=%r, t=%r)" % (rad.min(), eps, t)
        )
    return float(np.mean(X / np.sqrt(rad)))


def f_eps_at_one(eps):
    """Closed form of f_eps(eps, 1): 2 / (sqrt(1-2 eps) (1 + sqrt(1-2 eps)))."""
    if eps >= 0.5:
        raise ValueError("closed form requires eps < 1/2")
    s = np.sqrt(1.0 - 2.0 * eps)
    return 2.0 / (s * (1.0 + s))


def f_eps_derivative(eps, t, quad=DEFAULT_QUAD):
    """d/dt of f_eps by differentiation under the integral:
    (1/2pi) * integral eps (1-cos xi)^2 (...)^{-3/2} dxi."""
    if abs(eps) >= 0.5:
        raise ValueError("f_eps_derivative requires |eps| < 1/2")
    _, cxi, _ = _xi_nodes(quad.n_nodes)
    X = 1.0 - cxi
    rad = 1.0 - 2 * eps * X * t + eps**2 * X**2
    if rad.min() < RADICAND_FLOOR:
        raise SingularLocusError("f_eps_derivative radicand below floor")
    return float(np.mean(eps * X**2 * rad ** (-1.5)))


def f_eps_eps_derivative(eps, t, quad=DEFAULT_QUAD):
    """d/d(eps) of f_eps at fixed t:
    (1/2pi) * integral (1-cos xi)^2 (t - eps (1-cos xi)) (...)^{-3/2} dxi."""
    if abs(eps) >= 0.5:
        raise ValueError("f_eps_eps_derivative requires |eps| < 1/2")
    _, cxi, _ = _xi_nodes(quad.n_nodes)
    X = 1.0 - cxi
    rad = 1.0 - 2 * eps * X * t + eps**2 * X**2
    if rad.min() < RADICAND_FLOOR:
        raise SingularLocusError("f_eps_eps_derivative radicand below floor")
    return float(np.mean(X**2 * (t - eps * X) * rad ** (-1.5)))


def f_eps_bundle(eps, t, quad=DEFAULT_QUAD):
    """(f_eps, df/dt, df/deps) sharing one radicand evaluation (flow hot path)."""
    if abs(eps) >= 0.5:
        raise ValueError("f_eps_bundle requires |eps| < 1/2")
    _, cxi, _ = _xi_nodes(quad.n_nodes)
    X = 1.0 - cxi
    rad = 1.0 - 2 * eps * X * t + eps**2 * X**2
    if rad.min() < RADICAND_FLOOR:
        raise SingularLocusError(
            "radicand %.3e below floor (eps=%r, t=%r)" % (rad.min(), eps, t)
        )
    s = np.sqrt(rad)
    m32 = 1.0 / (rad * s)
    X2m = X**2 * m32
    F = np.mean(X / s)
    Ft = eps * np.mean(X2m)
    Fe = np.mean(X2m * (t - eps * X))
    return float(F), float(Ft), float(Fe)


def f_eps_minus_one(eps, t, quad=DEFAULT_QUAD):
    """f_eps(eps, t) - 1 without cancellation:
    (1/2pi) * integral X (2 eps X t - eps^2 X^2) / (sqrt(rad) (1 + sqrt(rad))) dxi,
    with X = 1 - cos(xi) and rad the usual radicand.  Exact at eps -> 0."""
    if abs(eps) >= 0.5:
        raise ValueError("f_eps_minus_one requires |eps| < 1/2")
    _, cxi, _ = _xi_nodes(quad.n_nodes)
    X = 1.0 - cxi
    u = 2 * eps * X * t - (eps * X) ** 2
    rad = 1.0 - u
    if rad.min() < RADICAND_FLOOR:
        raise SingularLocusError("f_eps_minus_one radicand below floor")
    s = np.sqrt(rad)
    return float(np.mean(X * u / (s * (1.0 + s))))


def f_eps_minus_one_grid(eps, t, quad=DEFAULT_QUAD, chunk=8192):
    """Broadcasted f_eps_minus_one over arrays of (eps, t)."""
    eps_b, t_b = np.broadcast_arrays(np.asarray(eps, float), np.asarray(t, float))
    if np.max(np.abs(eps_b)) >= 0.5:
        raise ValueError("f_eps_minus_one_grid requires |eps| < 1/2 everywhere")
    _, cxi, _ = _xi_nodes(quad.n_nodes)
    X = 1.0 - cxi
    flat_e = eps_b.ravel()
    flat_t = t_b.ravel()
    out = np.empty(flat_e.shape)
    for lo in range(0, flat_e.size, chunk):
        sl = slice(lo, lo + chunk)
        eX = flat_e[sl, None] * X[None, :]
        u = 2 * eX * flat_t[sl, None] - eX**2
        rad = 1.0 - u
        if rad.min() < RADICAND_FLOOR:
            raise SingularLocusError("f_eps_minus_one_grid radicand below floor")
        s = np.sqrt(rad)
        out[sl] = np.mean(X[None, :] * u / (s * (1.0 + s)), axis=1)
    return out.reshape(eps_b.shape)


def f_eps_grid(eps, t, quad=DEFAULT_QUAD, chunk=8192):
    """Broadcasted f_eps over arrays of (eps, t), chunked to bound memory."""
    eps_b, t_b = np.broadcast_arrays(np.asarray(eps, float), np.asarray(t, float))
    if np.max(np.abs(eps_b)) >= 0.5:
        raise ValueError("f_eps_grid requires |eps| < 1/2 everywhere")
    _, cxi, _ = _xi_nodes(quad.n_nodes)
    X = 1.0 - cxi
    flat_e = eps_b.ravel()
    flat_t = t_b.ravel()
    out = np.empty(flat_e.shape)
    for lo in range(0, flat_e.size, chunk):
        sl = slice(lo, lo + chunk)
        rad = (
            1.0
            - 2.0 * flat_e[sl, None] * X[None, :] * flat_t[sl, None]
            + (flat_e[sl, None] * X[None, :]) ** 2
        )
        if rad.min() < RADICAND_FLOOR:
            raise SingularLocusError("f_eps_grid radicand below floor")
        out[sl] = np.mean(X[None, :] / np.sqrt(rad), axis=1)
    return out.reshape(eps_b.shape)


def singularity_t(eps):
    """The unique real t losing holomorphy: t = eps + 1/(4 eps) (root of
    4 eps^2 - 4 eps t + 1 = 0)."""
    if eps == 0:
        raise ValueError("eps = 0 has no singular t")
    return eps + 1.0 / (4.0 * eps)


def check_renorm_identity(eps, Lambda=1.0, sample_n=100, quad=DEFAULT_QUAD, rng=None):
    """Max over random admissible (G, g) of |u_hat - f_eps(e_hat)|.

    Samples G uniform on (-Lambda, Lambda) and g uniform on (-pi, pi);
    samples whose radicand guard trips are redrawn (their count is second in
    the returned tuple).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    worst = 0.0
    rejected = 0
    done = 0
    while done < sample_n:
        G = rng.uniform(-Lambda, Lambda)
        g = rng.uniform(-np.pi, np.pi)
        try:
            lhs = u_hat(eps, Lambda, G, g, quad)
            rhs = f_eps(eps, e_hat(eps, Lambda, G, g), quad)
        except SingularLocusError:
            rejected += 1
            if rejected > 100 * sample_n:
                raise
            continue
        worst = max(worst, abs(lhs - rhs))
        done += 1
    return worst, rejected
