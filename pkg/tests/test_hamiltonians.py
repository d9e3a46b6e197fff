import numpy as np
import pytest

import perilib.potentials as potentials
from perilib.coords import ActionAngleState, SecularState, derive_mass_params, gg_forward, rr_forward
from perilib.hamiltonians import (
    DomainError,
    HamiltonianSpec,
    gradient,
    h_action_angle,
    h_secular,
    v_radial,
)
from perilib.potentials import QuadratureSpec

QUAD = QuadratureSpec(256)


def make_spec(index=1, mu=1.0, kappa=1.0, frame="jacobi", m0=1.0, Lambda=1.0):
    return HamiltonianSpec(index, m0, Lambda, derive_mass_params(mu, kappa, frame))


class TestSecular:
    def test_reduces_to_radial_potential_on_M0(self):
        for index in (1, 2):
            spec = make_spec(index)
            for r in (8.0, 12.0, 30.0):
                st = SecularState(0.4, 0.0, r, 0.0)
                expect = st.R**2 / (2 * spec.m0) + v_radial(spec, r)
                assert abs(h_secular(spec, st, QUAD) - expect) < 1e-10

    def test_large_r_asymptotics(self):
        spec = make_spec(1)
        r = 1e5
        st = SecularState(0.2, 0.5, r, 1.1)
        kepler_like = st.R**2 / 2 + st.G**2 / (2 * r**2) - 1.0 / r
        # the correction is O(eps/r) = O(1/r^2)
        assert abs(h_secular(spec, st, QUAD) - kepler_like) < 10.0 / r**2

    def test_even_in_G_and_g(self):
        spec = make_spec(2)
        rng = np.random.default_rng(0)
        for _ in range(100):
            R = rng.uniform(-1, 1)
            G = rng.uniform(-0.99, 0.99)
            r = rng.uniform(8, 40)
            g = rng.uniform(-np.pi, np.pi)
            v = h_secular(spec, SecularState(R, G, r, g), QUAD)
            assert abs(v - h_secular(spec, SecularState(R, -G, r, g), QUAD)) < 1e-14
            assert abs(v - h_secular(spec, SecularState(R, G, r, -g), QUAD)) < 1e-14

    def test_f_eps_call_count(self, monkeypatch):
        calls = {"n": 0}
        orig = potentials.f_eps

        def counting(*a, **k):
            calls["n"] += 1
            return orig(*a, **k)

        monkeypatch.setattr(potentials, "f_eps", counting)
        h_secular(make_spec(1), SecularState(0.1, 0.3, 10.0, 0.5), QUAD)
        assert calls["n"] == 2
        calls["n"] = 0
        h_secular(make_spec(2), SecularState(0.1, 0.3, 10.0, 0.5), QUAD)
        assert calls["n"] == 1

    def test_zero_G_removes_centrifugal_term(self):
        # embodiment of |y'|^2 = R^2 + G^2/r^2: with G = 0 the energy is the
        # purely radial one at any g on the invariant manifolds
        spec = make_spec(1)
        a = h_secular(spec, SecularState(0.3, 0.0, 9.0, 0.0), QUAD)
        assert abs(a - (0.3**2 / 2 + v_radial(spec, 9.0))) < 1e-10


class TestRadialPotential:
    def test_asymptotic_coulomb(self):
        spec = make_spec(1)
        for r in (1e4, 1e6):
            assert abs(v_radial(spec, r) * r + spec.m0**2) < 50.0 / r

    def test_divergence_at_branch_radius(self):
        spec = make_spec(1)
        b = spec.masses.beta
        r_branch = 2 * b * spec.a
        vals = [v_radial(spec, r_branch * (1 + d)) for d in (1e-2, 1e-4, 1e-6)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < -1e2

    def test_monotone_increasing(self):
        for index in (1, 2):
            spec = make_spec(index)
            branch = 2 * (spec.masses.beta if index == 1 else spec.masses.beta
                          + spec.masses.beta_bar) * spec.a
            rs = np.geomspace(branch * 1.001, branch * 1e3, 60)
            vals = [v_radial(spec, r) for r in rs]
            assert all(b > a for a, b in zip(vals, vals[1:]))
            assert all(v < 0 for v in vals)

    def test_rejects_below_branch(self):
        spec = make_spec(2)
        with pytest.raises(DomainError):
            v_radial(spec, 2 * (spec.masses.beta + spec.masses.beta_bar) * spec.a)


class TestActionAngle:
    def test_consistency_with_secular(self):
        rng = np.random.default_rng(9)
        for index in (1, 2):
            spec = make_spec(index)
            for _ in range(25):
                Gc = rng.uniform(0.3, 0.999)
                gam = rng.uniform(-np.pi, np.pi)
                y = rng.uniform(3.0, 6.0)
                x = rng.uniform(0.6, 2 * np.pi - 0.6)
                aa = ActionAngleState(Gc, gam, y, x)
                R, r = rr_forward(spec.m0, y, x)
                G, g = gg_forward(spec.Lambda, Gc, gam)
                sec = SecularState(R, G, r, g)
                assert abs(
                    h_action_angle(spec, aa, QUAD) - h_secular(spec, sec, QUAD)
                ) < 1e-10

    def test_chart_center_matches_radial(self):
        spec = make_spec(1)
        y, x = 4.0, 2.0
        aa = ActionAngleState(spec.Lambda, 0.9, y, x)
        R, r = rr_forward(spec.m0, y, x)
        expect = R**2 / (2 * spec.m0) + v_radial(spec, r)
        assert abs(h_action_angle(spec, aa, QUAD) - expect) < 1e-10

    def test_apoapsis_large_y_asymptotics(self):
        spec = make_spec(1)
        y = 50.0
        aa = ActionAngleState(0.8, 0.4, y, np.pi)
        h0 = -spec.m0**5 / (2 * y**2)
        # r = 2 y^2 so the perturbation is O(eps/r) = O(1/r^2)
        assert abs(h_action_angle(spec, aa, QUAD) - h0) < 1e-6


class TestGradient:
    def test_dH_dR_is_kinetic(self):
        spec = make_spec(1)
        st = SecularState(0.7, 0.4, 11.0, 0.9)
        grad = gradient(spec, st, "secular")
        assert abs(grad[0] - st.R / spec.m0) < 1e-14

    def test_vanishes_on_M0(self):
        for index in (1, 2):
            spec = make_spec(index)
            for g0 in (0.0, np.pi):
                st = SecularState(0.2, 0.0, 10.0, g0)
                grad = gradient(spec, st, "secular")
                assert abs(grad[1]) < 1e-12  # dH/dG
                assert abs(grad[3]) < 1e-12  # dH/dg

    def test_secular_analytic_vs_fd(self):
        spec = make_spec(1)
        rng = np.random.default_rng(21)
        for _ in range(50):
            st = SecularState(
                rng.uniform(-1, 1),
                rng.uniform(-0.9, 0.9),
                rng.uniform(8, 30),
                rng.uniform(-np.pi, np.pi),
            )
            ga = gradient(spec, st, "secular", method="analytic")
            gf = gradient(spec, st, "secular", method="fd")
            scale = np.maximum(np.abs(ga), 1e-3)
            assert np.max(np.abs(ga - gf) / scale) < 1e-6

    def test_action_angle_analytic_vs_fd(self):
        spec = make_spec(2)
        rng = np.random.default_rng(22)
        for _ in range(25):
            st = ActionAngleState(
                rng.uniform(0.3, 0.97),
                rng.uniform(-np.pi, np.pi),
                rng.uniform(3.0, 6.0),
                rng.uniform(0.7, 2 * np.pi - 0.7),
            )
            ga = gradient(spec, st, "action-angle", method="analytic")
            gf = gradient(spec, st, "action-angle", method="fd")
            scale = np.maximum(np.abs(ga), 1e-3)
            assert np.max(np.abs(ga - gf) / scale) < 1e-6


def test_spec_validation():
    with pytest.raises(ValueError):
        HamiltonianSpec(3, 1.0, 1.0, derive_mass_params(1, 1))
    with pytest.raises(ValueError):
        HamiltonianSpec(1, -1.0, 1.0, derive_mass_params(1, 1))
