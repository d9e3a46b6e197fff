"""Equilibria and level sets of the rescaled first integral on the (g, G)
cylinder.

The integral e_hat(eps, Lambda, G, g) drives the pericenter dynamics; its
critical points and contour topology reproduce the three regimes
0 < eps < 1/2, 1/2 < eps < 1 and eps > 1 (two centers / extra saddle and
G-axis pair / rotational motions).
"""

from dataclasses import dataclass

import numpy as np

from .potentials import e_hat


@dataclass(frozen=True)
class EquilibriumReport:
    """One critical point of the pericenter flow.

    location is (g, G); kind is "center" (pure-imaginary linearization
    eigenvalues) or "saddle" (real pair); eigenvalues holds the pair of the
    linearized Hamiltonian vector field.
    """

    location: tuple
    kind: str
    eigenvalues: tuple


def _grad_e(eps, Lambda, G, g):
    u = G / Lambda
    root = np.sqrt(max(1e-14, 1.0 - u * u))
    dG = -u * np.cos(g) / (Lambda * root) + 2 * eps * u / Lambda
    dg = -root * np.sin(g)
    return np.array([dG, dg])


def _hess_e(eps, Lambda, G, g):
    u = G / Lambda
    om = max(1e-14, 1.0 - u * u)
    root = np.sqrt(om)
    dGG = (-np.cos(g) / root - u * u * np.cos(g) / om**1.5 + 2 * eps) / Lambda**2
    dGg = u * np.sin(g) / (Lambda * root)
    dgg = -root * np.cos(g)
    return np.array([[dGG, dGg], [dGg, dgg]])


def _classify(eps, Lambda, G, g):
    H = _hess_e(eps, Lambda, G, g)
    det = float(np.linalg.det(H))
    if det > 0:
        lam = np.sqrt(det)
        return "center", (complex(0.0, lam), complex(0.0, -lam))
    lam = np.sqrt(-det)
    return "saddle", (complex(lam, 0.0), complex(-lam, 0.0))


def find_equilibria(eps, Lambda=1.0, grid_n=48, newton_steps=60, tol=1e-12):
    """Critical points of e_hat on the cylinder (g, G) by Newton from a grid.

    eps must avoid the transition values 1/2 and 1 where equilibria are
    degenerate.  Returns EquilibriumReport entries sorted by (g, G).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if abs(eps - 0.5) < 1e-9 or abs(eps - 1.0) < 1e-9:
        raise ValueError("eps at a transition value (1/2 or 1)")
    found = []
    Gmax = Lambda * (1 - 1e-9)
    for g0 in np.linspace(-np.pi, np.pi, grid_n, endpoint=False):
        for G0 in np.linspace(-0.98 * Lambda, 0.98 * Lambda, grid_n):
            z = np.array([G0, g0])
            ok = False
            for _ in range(newton_steps):
                grad = _grad_e(eps, Lambda, z[0], z[1])
                if np.linalg.norm(grad) < tol:
                    ok = True
                    break
                H = _hess_e(eps, Lambda, z[0], z[1])
                try:
                    step = np.linalg.solve(H, grad)
                except np.linalg.LinAlgError:
                    break
                if np.linalg.norm(step) > 0.5 * Lambda:
                    step *= 0.5 * Lambda / np.linalg.norm(step)
                z = z - step
                if abs(z[0]) > Gmax:
                    break
                z[1] = np.angle(np.exp(1j * z[1]))
            if not ok:
                continue
            G, g = float(z[0]), float(np.angle(np.exp(1j * z[1])))
            if abs(G) > 0.999 * Lambda:
                continue
            if any(
                abs(G - e.location[1]) < 1e-6
                and abs(np.angle(np.exp(1j * (g - e.location[0])))) < 1e-6
                for e in found
            ):
                continue
            kind, eig = _classify(eps, Lambda, G, g)
            # canonicalize tiny numerical offsets at the symmetric points
            if abs(G) < 1e-9:
                G = 0.0
            if abs(g) < 1e-9:
                g = 0.0
            if abs(abs(g) - np.pi) < 1e-9:
                g = np.pi
            found.append(EquilibriumReport((g, G), kind, eig))
    found.sort(key=lambda e: (round(e.location[0], 9), round(e.location[1], 9)))
    return found


# ------------------------ marching squares ------------------------

_EDGES = {  # case index -> list of (edge_a, edge_b) segments
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)],
    11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}
# ambiguous saddle cases, resolved by the cell-center value: key -> (edge
# pairs when center >= level, pairs when center < level)
_AMBIG = {
    5: (((0, 1), (2, 3)), ((3, 0), (1, 2))),
    10: (((3, 0), (1, 2)), ((0, 1), (2, 3))),
}


def _edge_key_point(edge, i, j, xg, yg, Z, level):
    """Crossing of the contour with one cell edge.

    Returns (discrete edge id, interpolated point).  Edge ids name the grid
    edge itself ('v': along a vertical line x = xg[i]; 'h': along a
    horizontal line y = yg[j]), so neighboring cells agree on them exactly.
    """
    if edge == 0:  # x = xg[i], y in [yg[j], yg[j+1]]
        a, b = Z[i, j], Z[i, j + 1]
        w = (level - a) / (b - a)
        return ("v", i, j), (xg[i], yg[j] + w * (yg[j + 1] - yg[j]))
    if edge == 2:  # x = xg[i+1]
        a, b = Z[i + 1, j], Z[i + 1, j + 1]
        w = (level - a) / (b - a)
        return ("v", i + 1, j), (xg[i + 1], yg[j] + w * (yg[j + 1] - yg[j]))
    if edge == 3:  # y = yg[j]
        a, b = Z[i, j], Z[i + 1, j]
        w = (level - a) / (b - a)
        return ("h", i, j), (xg[i] + w * (xg[i + 1] - xg[i]), yg[j])
    a, b = Z[i, j + 1], Z[i + 1, j + 1]  # y = yg[j+1]
    w = (level - a) / (b - a)
    return ("h", i, j + 1), (xg[i] + w * (xg[i + 1] - xg[i]), yg[j + 1])


def marching_squares(xg, yg, Z, level):
    """Contour segments of Z(x, y) = level on the rectilinear grid.

    Z is indexed Z[i, j] = Z(xg[i], yg[j]).  Returns a list of segments
    ((key_a, point_a), (key_b, point_b)) with linear interpolation along
    cell edges; the keys identify grid edges for exact chaining.
    """
    segs = []
    # nudge node values lying exactly on the level: keeps every crossing in
    # the open interior of its edge (an O(1e-13) perturbation of the set)
    scale = max(abs(level), float(np.ptp(Z)), 1.0)
    Z = np.where(Z == level, level + 1e-13 * scale, Z)
    above = Z >= level
    for i in range(len(xg) - 1):
        for j in range(len(yg) - 1):
            case = (
                1 * above[i, j]
                + 2 * above[i, j + 1]
                + 4 * above[i + 1, j + 1]
                + 8 * above[i + 1, j]
            )
            if case in (0, 15):
                continue
            if case in _AMBIG:
                center = 0.25 * (
                    Z[i, j] + Z[i, j + 1] + Z[i + 1, j] + Z[i + 1, j + 1]
                )
                edges = _AMBIG[case][0 if center >= level else 1]
            else:
                edges = _EDGES[case]
            for ea, eb in edges:
                segs.append(
                    (
                        _edge_key_point(ea, i, j, xg, yg, Z, level),
                        _edge_key_point(eb, i, j, xg, yg, Z, level),
                    )
                )
    return segs


def chain_segments(segs):
    """Join segments sharing grid edges into polylines (lists of points)."""
    by_end = {}
    for idx, ((ka, _), (kb, _)) in enumerate(segs):
        by_end.setdefault(ka, []).append(idx)
        by_end.setdefault(kb, []).append(idx)
    used = np.zeros(len(segs), dtype=bool)
    polylines = []
    for start in range(len(segs)):
        if used[start]:
            continue
        used[start] = True
        (ka, pa), (kb, pb) = segs[start]
        keys = [ka, kb]
        line = [pa, pb]
        for tip_pos in (1, 0):
            while True:
                tip = keys[-1] if tip_pos else keys[0]
                cands = [c for c in by_end.get(tip, []) if not used[c]]
                if not cands:
                    break
                c = cands[0]
                used[c] = True
                (na, qa), (nb, qb) = segs[c]
                nk, nq = (nb, qb) if na == tip else (na, qa)
                if tip_pos:
                    keys.append(nk)
                    line.append(nq)
                else:
                    keys.insert(0, nk)
                    line.insert(0, nq)
        # closed loop: the two tips sit on the same grid edge
        if len(keys) > 2 and keys[0] == keys[-1]:
            line[-1] = line[0]
        polylines.append(line)
    return polylines


def is_closed(polyline, tol=1e-6):
    a, b = polyline[0], polyline[-1]
    return abs(a[0] - b[0]) < tol and abs(a[1] - b[1]) < tol


def phase_portrait(eps, Lambda=1.0, grid=(128, 128), levels=12):
    """Contour polylines of e_hat on (g, G) in [-pi, pi] x [-Lambda, Lambda].

    Returns a list of (level, polyline) with polylines in (g, G) points.
    Level selection spans the value range and includes the separatrix level
    e_hat(0, 0) = 1 whenever eps > 1/2.
    """
    ng, nG = grid
    if ng < 64 or nG < 64:
        raise ValueError("grid resolution must be at least 64 x 64")
    gg = np.linspace(-np.pi, np.pi, ng)
    GG = np.linspace(-Lambda, Lambda, nG)
    Z = e_hat(eps, Lambda, GG[None, :], gg[:, None])
    lo, hi = Z.min(), Z.max()
    vals = list(np.linspace(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo), levels))
    if eps > 0.5:
        sep = e_hat(eps, Lambda, 0.0, 0.0)
        if lo < sep < hi:
            vals.append(float(sep))
    out = []
    for lv in sorted(vals):
        for line in chain_segments(marching_squares(gg, GG, Z, lv)):
            out.append((float(lv), line))
    return out


def spans_full_angle(polyline, margin=0.05):
    """True if the polyline's g-extent reaches both cylinder seams."""
    gs = [p[0] for p in polyline]
    return min(gs) < -np.pi + margin and max(gs) > np.pi - margin


def has_rotational_orbits(eps, Lambda=1.0, grid=(128, 128), levels=40):
    """Level-line sweep: does any contour wind around the cylinder?"""
    return any(
        spans_full_angle(line) for _, line in phase_portrait(eps, Lambda, grid, levels)
    )
