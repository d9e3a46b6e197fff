"""The averaged potential is a function of the simpler quadratic integral.

u_hat(eps, .) averages the reciprocal distance between the outer body and a
body sweeping a Keplerian ellipse; e_hat is an explicit quadratic in the
same variables.  Numerically their level sets coincide: u_hat = F(e_hat)
with a single renormalizing profile F = f_eps, which even has a closed form
at the squeezed-orbit value t = 1.  This script measures the identity, the
Poisson commutation it implies, and the blow-up locus of the profile.
"""

import numpy as np

from perilib import (
    QuadratureSpec,
    check_renorm_identity,
    e_hat,
    f_eps,
    f_eps_at_one,
    singularity_t,
    u_hat,
)

quad = QuadratureSpec(256)
rng = np.random.default_rng(2024)

print("identity  max |u_hat - f_eps(e_hat)| over 100 random (G, g):")
for eps in (0.1, -0.1, 0.25, -0.25, 0.4, -0.4):
    worst, rejected = check_renorm_identity(eps, 1.0, 100, quad, rng=rng)
    print(f"  eps={eps:+.2f}: {worst:.3e}   (rejected samples: {rejected})")

print("\nclosed form at t = 1:")
for eps in (0.1, 0.2, 0.3, 0.4):
    q = f_eps(eps, 1.0, quad)
    c = f_eps_at_one(eps)
    print(f"  eps={eps}: quadrature {q:.12f}  closed {c:.12f}  diff {q - c:.1e}")

print("\ncommutation |{u_hat, e_hat}| by finite differences (50 points):")
h, eps, worst = 1e-5, 0.3, 0.0
for _ in range(50):
    G = rng.uniform(-0.9, 0.9)
    g = rng.uniform(-np.pi, np.pi)
    du = np.array([
        u_hat(eps, 1, G + h, g, quad) - u_hat(eps, 1, G - h, g, quad),
        u_hat(eps, 1, G, g + h, quad) - u_hat(eps, 1, G, g - h, quad),
    ]) / (2 * h)
    de = np.array([
        e_hat(eps, 1, G + h, g) - e_hat(eps, 1, G - h, g),
        e_hat(eps, 1, G, g + h) - e_hat(eps, 1, G, g - h),
    ]) / (2 * h)
    worst = max(worst, abs(du[0] * de[1] - du[1] * de[0]))
print(f"  max = {worst:.3e}")

print("\napproaching the holomorphy-loss locus t* = eps + 1/(4 eps):")
t_star = singularity_t(0.25)
for k in range(2, 7):
    t = t_star * (1 - 10.0**-k)
    print(f"  t = t*(1 - 1e-{k}): f_eps = {f_eps(0.25, t, quad):9.4f}")
print(f"  (t* = {t_star}; evaluation exactly on the locus is refused)")
