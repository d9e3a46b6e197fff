import numpy as np
import pytest

from perilib.portraits import (
    chain_segments,
    find_equilibria,
    has_rotational_orbits,
    is_closed,
    marching_squares,
    phase_portrait,
    spans_full_angle,
)


class TestEquilibria:
    def test_two_centers_below_half(self):
        eqs = find_equilibria(0.3, 1.0)
        assert len(eqs) == 2
        locs = {(round(e.location[0], 6), round(e.location[1], 6)) for e in eqs}
        assert locs == {(0.0, 0.0), (round(np.pi, 6), 0.0)}
        assert all(e.kind == "center" for e in eqs)
        for e in eqs:
            assert all(abs(ev.real) < 1e-8 for ev in e.eigenvalues)

    def test_saddle_and_axis_pair_above_half(self):
        eqs = find_equilibria(0.7, 1.0)
        assert len(eqs) == 4
        by_loc = {
            (round(e.location[0], 4), round(e.location[1], 4)): e for e in eqs
        }
        origin = by_loc[(0.0, 0.0)]
        assert origin.kind == "saddle"
        assert by_loc[(round(np.pi, 4), 0.0)].kind == "center"
        G0 = np.sqrt(1 - 1 / (4 * 0.7**2))
        assert (0.0, round(G0, 4)) in by_loc
        assert (0.0, round(-G0, 4)) in by_loc
        assert by_loc[(0.0, round(G0, 4))].kind == "center"

    def test_above_one_saddle_persists(self):
        eqs = find_equilibria(1.5, 1.0)
        by_loc = {
            (round(e.location[0], 4), round(e.location[1], 4)): e for e in eqs
        }
        assert by_loc[(0.0, 0.0)].kind == "saddle"

    def test_rejects_transition_eps(self):
        with pytest.raises(ValueError):
            find_equilibria(0.5)
        with pytest.raises(ValueError):
            find_equilibria(1.0)


class TestMarchingSquares:
    def test_circle_contour(self):
        xg = np.linspace(-2, 2, 101)
        yg = np.linspace(-2, 2, 101)
        Z = xg[:, None] ** 2 + yg[None, :] ** 2
        lines = chain_segments(marching_squares(xg, yg, Z, 1.0))
        assert len(lines) == 1
        line = lines[0]
        assert is_closed(line, tol=1e-6)
        radii = [np.hypot(x, y) for x, y in line]
        assert max(abs(r - 1.0) for r in radii) < 2e-3

    def test_two_components(self):
        xg = np.linspace(-3, 3, 121)
        yg = np.linspace(-2, 2, 81)
        Z = (np.abs(xg[:, None]) - 1.5) ** 2 + yg[None, :] ** 2
        lines = chain_segments(marching_squares(xg, yg, Z, 0.25))
        assert len(lines) == 2


class TestPortrait:
    def test_librational_contours_closed_below_half(self):
        lines = phase_portrait(0.3, 1.0, grid=(129, 129), levels=10)
        near_origin = [
            ln
            for _, ln in lines
            if all(abs(g) < 2.0 and abs(G) < 0.9 for g, G in ln) and len(ln) > 8
        ]
        assert near_origin
        assert all(is_closed(ln, tol=1e-6) for ln in near_origin)

    def test_contours_track_their_level(self):
        from perilib.potentials import e_hat

        for eps in (1e-6, 0.3):
            lines = phase_portrait(eps, 1.0, grid=(129, 129), levels=8)
            worst = 0.0
            for lv, ln in lines:
                for g, G in ln:
                    if abs(G) > 0.95:
                        continue  # sqrt edge at |G| = Lambda: infinite slope
                    worst = max(worst, abs(e_hat(eps, 1.0, G, g) - lv))
            # linear edge interpolation on a 129^2 grid
            assert worst < 5e-3

    def test_tiny_eps_contours_mirror_symmetric(self):
        # evenness in g: mirrored points lie on the same level set
        from perilib.potentials import e_hat

        lines = phase_portrait(1e-6, 1.0, grid=(129, 129), levels=8)
        for lv, ln in lines[:6]:
            for g, G in ln[:: max(1, len(ln) // 7)]:
                assert abs(e_hat(1e-6, 1.0, G, -g) - lv) < 5e-3

    def test_separatrix_level_present_above_half(self):
        lines = phase_portrait(0.7, 1.0, grid=(129, 129), levels=6)
        levels = {round(lv, 12) for lv, _ in lines}
        assert round(1.0, 12) in levels  # e_hat(0,0) = 1

    def test_rotation_only_above_one(self):
        assert has_rotational_orbits(1.5)
        assert not has_rotational_orbits(0.3)
        assert not has_rotational_orbits(0.7)

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            phase_portrait(0.3, 1.0, grid=(32, 128))


def test_spans_full_angle():
    line = [(-np.pi, 0.1), (0.0, 0.2), (np.pi, 0.1)]
    assert spans_full_angle(line)
    assert not spans_full_angle([(-1.0, 0.1), (1.0, 0.2)])
