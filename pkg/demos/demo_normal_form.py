"""Desk-scale run of the small-divisor-free normal form.

The drift part -m0^5/(2 y^2) generates no rotation in the angle gamma, so
the usual Fourier-mode division is replaced by an integral along the
non-periodic coordinate x: no small divisors appear at any step.  Each
sweep moves the angle-dependent part of the perturbation one order higher;
the measured norms drop geometrically until truncation noise.
"""

import numpy as np

from perilib import HamiltonianSpec, NormWeights, derive_mass_params
from perilib.normalform import (
    build_secular_perturbation,
    normal_form_steps,
    tf_average_split,
    tf_norm,
)

spec = HamiltonianSpec(2, 1.0, 1.0, derive_mass_params(1.0, 0.02, "m0centric"))
print("building the band-limited perturbation series on its (Gcal, y, x) box...")
series, freqs = build_secular_perturbation(
    spec, eps0=0.45, alpha_minus=1000.0, alpha_plus=16000.0, delta=0.005,
    grid_shape=(16, 16, 20), fourier_cutoff=8,
)
modes = sorted(k[0][0] for k in series.coeffs)
print(f"  Fourier modes kept: {modes}")

w = NormWeights(rho=0.005, s=1.0, delta=1.0, r=np.sqrt(1000.0), xi=np.sqrt(0.45))
result = normal_form_steps(series, freqs, N=3, weights=w)

print("\nstep |   ||f||      ||osc||    hom.residual  contraction")
for s in result.steps:
    print(f"  {s.step}  | {s.f_norm:10.3e} {s.osc_norm:10.3e} "
          f"{s.residual:12.3e} {s.contraction:10.3e}")
final_osc = tf_norm(tf_average_split(result.f_star)[1], w)
print(f"\nremaining angle dependence: {final_osc:.3e} "
      f"({final_osc / result.steps[0].osc_norm:.1e} of the original)")
print(f"normal part ||g*|| = {tf_norm(result.g_star, w):.3e}")
