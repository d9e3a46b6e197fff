"""A full perihelion-libration run while the outer body falls inward.

The stability statement behind this experiment is existential (its absolute
constants are not computable), so the hypothesis checker runs with small
documented surrogate constants; what is genuinely measured is the motion:
within a single radial transit of the outer body the pericenter direction
turns by more than 2 pi, the inner ellipse squeezes through eccentricity
one several times, the adiabatic action barely moves and the outer body
stays far outside the collision radius.
"""

import numpy as np

from perilib import ActionAngleState, HamiltonianSpec, check_libration_theorem, derive_mass_params
from perilib.theorem import run_libration_experiment

beta_bar = 3000.0
kappa = (beta_bar + np.sqrt(beta_bar**2 + 8 * beta_bar)) / 4
spec = HamiltonianSpec(2, 1.0, 1.0, derive_mass_params(1.0, kappa, "m0centric"))
print(f"masses: mu=1, kappa={kappa:.2f} -> beta_bar={spec.masses.beta_bar:.1f}")

report = check_libration_theorem(
    spec, eps0=0.25, delta=0.025, s0=1.0,
    alpha_minus=2.0e4, alpha_plus=3.2e5,
    c_upper=10.0, c_lower=5e-8,
)
print(f"\nhypothesis report (surrogates C*={report.params['C_upper']}, "
      f"C_*={report.params['C_lower']}, measured c0={report.c0:.3f}):")
for iq in report.inequalities:
    print(f"  [{'ok' if iq.holds else 'XX'}] {iq.label}: {iq.lhs:.3e} < {iq.rhs:.3e}")
print(f"  pass={report.passed}, N0={report.N0:.0f}, eta={report.eta:.2e}")

state0 = ActionAngleState(1.0 - 0.025 / 8, 0.3, 2 * np.sqrt(2.0e4) * 1.025, np.pi)
traj, summary = run_libration_experiment(spec, report, state0)
print(f"\nrun of {summary.duration:.3g} time units "
      f"({len(traj.times)} samples, energy drift {traj.energy_drift:.1e}):")
print(f"  pericenter winding: {summary.winding / np.pi:.2f} pi "
      f"(>= 2 pi: {summary.winding >= 2 * np.pi})")
print(f"  squeezes (eccentricity-one passages): {summary.squeezes}")
print(f"  action drift |Gcal - Gcal(0)|: {summary.Gcal_drift:.2e} "
      f"(allowed {0.025 / 2})")
print(f"  min outer radius {summary.r_min:.0f} vs collision radius "
      f"{summary.collision_radius:.0f}")
print(f"  stopped by domain exit: {summary.domain_exit}")
