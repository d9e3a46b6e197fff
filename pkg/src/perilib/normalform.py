"""Desk-scale engine for the small-divisor-free normal form.

Objects are truncated Taylor-Fourier series

    f = sum_{k,h,j} f_{khj}(I, y, x) e^{i k.phi} p^h q^j

with Fourier modes k in the angles, monomials in (p, q), and coefficient
functions tabulated on a tensor Chebyshev grid over an (I, y, x) box.  The
homological equation is solved by integrating along x (no frequency
inversion, hence no small divisors), the new-coordinate push is a time-one
Lie flow, and the iteration drains the angle-dependent part of the
perturbation geometrically.

Norms use the weighted majorant  sum_k,h,j sup|f_khj| e^{s|k|} delta^{|h|+|j|}
with the sup taken over the real tensor grid: a documented proxy for the
complex-polydisc sup (an optional complexified evaluation is available for
stress checks).
"""

import itertools
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import chebyshev as ch


class ShapeError(ValueError):
    """Series with incompatible shapes/boxes were combined."""


class ContractionError(RuntimeError):
    """A Lie series or normal-form step lost its measured contraction."""


@dataclass(frozen=True)
class NormWeights:
    """Analyticity widths weighting the majorant norm."""

    rho: float = 1.0
    s: float = 1.0
    delta: float = 1.0
    r: float = 1.0
    xi: float = 1.0

    def __post_init__(self):
        if min(self.rho, self.s, self.delta, self.r, self.xi) <= 0:
            raise ValueError("all norm weights must be strictly positive")


PLAIN_WEIGHTS = NormWeights(1.0, 1e-12, 1.0, 1.0, 1.0)  # ~ sum of coefficient sups


class TFSeries:
    """Truncated Taylor-Fourier series with Chebyshev-grid coefficients.

    coeffs maps (k, h, j) keys (tuples of ints: len n_angles, m_pq, m_pq) to
    complex arrays over the (I_1..I_n, y, x) grid.  A real function has
    coeff(-k, h, j) = conj(coeff(k, h, j)).
    """

    def __init__(self, n_angles, m_pq, fourier_cutoff, pq_degree, box, grid_shape,
                 coeffs=None):
        if len(box) != n_angles + 2 or len(grid_shape) != n_angles + 2:
            raise ShapeError("box/grid_shape must cover the I..., y, x axes")
        self.n_angles = n_angles
        self.m_pq = m_pq
        self.fourier_cutoff = fourier_cutoff
        self.pq_degree = pq_degree
        self.box = tuple((float(a), float(b)) for a, b in box)
        self.grid_shape = tuple(int(g) for g in grid_shape)
        self.coeffs = {}
        if coeffs:
            for key, arr in coeffs.items():
                self._check_key(key)
                arr = np.asarray(arr, dtype=complex)
                if arr.shape != self.grid_shape:
                    raise ShapeError("coefficient grid %r != %r" % (arr.shape, self.grid_shape))
                self.coeffs[key] = arr

    # ---------------- basic structure ----------------

    def _check_key(self, key):
        k, h, j = key
        if len(k) != self.n_angles or len(h) != self.m_pq or len(j) != self.m_pq:
            raise ShapeError("bad key %r" % (key,))
        if any(abs(ki) > self.fourier_cutoff for ki in k):
            raise ShapeError("Fourier index beyond cutoff in %r" % (key,))
        if sum(h) + sum(j) > self.pq_degree:
            raise ShapeError("pq degree beyond cutoff in %r" % (key,))

    def same_shape(self, other):
        return (
            self.n_angles == other.n_angles
            and self.m_pq == other.m_pq
            and self.box == other.box
            and self.grid_shape == other.grid_shape
        )

    def shell(self, coeffs=None):
        return TFSeries(
            self.n_angles,
            self.m_pq,
            self.fourier_cutoff,
            self.pq_degree,
            self.box,
            self.grid_shape,
            coeffs,
        )

    def grids(self):
        return [ch.nodes(g, lo, hi) for g, (lo, hi) in zip(self.grid_shape, self.box)]

    def copy(self):
        return self.shell({k: v.copy() for k, v in self.coeffs.items()})

    def zero_key(self):
        return (
            (0,) * self.n_angles,
            (0,) * self.m_pq,
            (0,) * self.m_pq,
        )

    # ---------------- algebra ----------------

    def __add__(self, other):
        if not self.same_shape(other):
            raise ShapeError("adding incompatible series")
        out = {k: v.copy() for k, v in self.coeffs.items()}
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v.copy()
        res = self.shell()
        res.fourier_cutoff = max(self.fourier_cutoff, other.fourier_cutoff)
        res.pq_degree = max(self.pq_degree, other.pq_degree)
        res.coeffs = out
        return res

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, scalar):
        return self.shell({k: v * scalar for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def prune(self, floor=0.0):
        """Drop coefficients with sup below floor (cleans accumulated zeros)."""
        self.coeffs = {
            k: v for k, v in self.coeffs.items() if np.max(np.abs(v)) > floor
        }
        return self

    def sup(self):
        if not self.coeffs:
            return 0.0
        return max(float(np.max(np.abs(v))) for v in self.coeffs.values())

    # ---------------- evaluation ----------------

    def evaluate(self, I, phi, y, x, p=(), q=()):
        """Pointwise value at scalar coordinates (I and phi are sequences of
        length n_angles; p, q of length m_pq)."""
        I = np.atleast_1d(I)
        phi = np.atleast_1d(phi)
        out = 0.0 + 0.0j
        pts = list(I) + [y, x]
        for (k, h, j), arr in self.coeffs.items():
            c = arr
            for axis in range(len(self.grid_shape)):
                coef = ch.vals_to_coeffs(c, 0)
                c = ch.clenshaw(coef, 0, [pts[axis]], *self.box[axis])[..., 0]
            val = complex(c)
            val *= np.exp(1j * np.dot(k, phi))
            for hi, pi in zip(h, p):
                val *= pi**hi
            for ji, qi in zip(j, q):
                val *= qi**ji
            out += val
        return out.real if abs(out.imag) < 1e-9 * max(1.0, abs(out)) else out


def tf_build(fun, box, grid_shape, n_angles=1, fourier_cutoff=8, n_phi=64,
             m_pq=0, pq_degree=0, coeff_floor_rel=1e-14):
    """Sample a pointwise evaluator into a TFSeries (FFT in the angles at
    Chebyshev nodes in the grid variables).

    fun receives broadcast meshes (I_1, ..., I_n, phi_1, ..., phi_n, y, x).
    Only angle-sampled construction is supported here, so m_pq must be 0;
    series with monomial content are assembled directly from coefficients.
    """
    if m_pq != 0 or pq_degree != 0:
        raise NotImplementedError("sampled construction covers the m = 0 case")
    if n_phi < 2 * fourier_cutoff + 2:
        raise ValueError("n_phi must resolve the requested cutoff")
    grids = [ch.nodes(g, lo, hi) for g, (lo, hi) in zip(grid_shape, box)]
    phis = [2 * np.pi * np.arange(n_phi) / n_phi] * n_angles
    n = n_angles
    mesh_axes = grids[:n] + phis + grids[n:]
    mesh = np.meshgrid(*mesh_axes, indexing="ij")
    vals = fun(*mesh)
    vals = np.asarray(vals, dtype=complex) + np.zeros(mesh[0].shape, complex)
    angle_axes = tuple(range(n, 2 * n))
    F = np.fft.fftn(vals, axes=angle_axes) / n_phi**n
    if not np.all(np.isfinite(F)):
        raise ArithmeticError("evaluator returned non-finite values on the grid")
    series = TFSeries(n, 0, fourier_cutoff, 0, box, grid_shape)
    scale = float(np.max(np.abs(F))) or 1.0
    for k in itertools.product(range(-fourier_cutoff, fourier_cutoff + 1), repeat=n):
        idx = tuple(slice(None) for _ in range(n)) + tuple(ki % n_phi for ki in k)
        arr = F[idx]
        if np.max(np.abs(arr)) > coeff_floor_rel * scale:
            series.coeffs[(k, (), ())] = np.ascontiguousarray(arr)
    return series


def tf_average_split(f):
    """(average, oscillatory) parts: the average keeps exactly the keys with
    k = 0 and h = j; their sum is f and re-splitting the average is a fixed
    point."""
    avg = f.shell()
    osc = f.shell()
    zero = (0,) * f.n_angles
    for key, arr in f.coeffs.items():
        k, h, j = key
        if k == zero and h == j:
            avg.coeffs[key] = arr.copy()
        else:
            osc.coeffs[key] = arr.copy()
    return avg, osc


def tf_norm(f, w=PLAIN_WEIGHTS):
    """Weighted majorant norm: sum_k,h,j sup_grid |f_khj| e^{s|k|} delta^{|h|+|j|}."""
    total = 0.0
    for (k, h, j), arr in f.coeffs.items():
        total += (
            float(np.max(np.abs(arr)))
            * math.exp(w.s * sum(abs(ki) for ki in k))
            * w.delta ** (sum(h) + sum(j))
        )
    return total


def tf_sup_complexified(f, w, n_probe=12):
    """Stress-test sup: coefficients continued to complex I, y, x points at
    the widths (rho, r, xi) by Chebyshev evaluation; angles/monomial weights
    as in tf_norm.  A sampled lower bound of the polydisc norm."""
    total = 0.0
    widths = [w.rho] * f.n_angles + [w.r, w.xi]
    probes = []
    for (lo, hi), width in zip(f.box, widths):
        base = np.linspace(lo, hi, n_probe)
        probes.append(np.concatenate([base + 1j * width, base - 1j * width, base]))
    for (k, h, j), arr in f.coeffs.items():
        c = arr
        for axis in range(len(f.grid_shape)):
            # consume the leading grid axis, appending the probe axis last
            c = ch.clenshaw(ch.vals_to_coeffs(c, 0), 0, probes[axis], *f.box[axis])
        total += (
            float(np.max(np.abs(c)))
            * math.exp(w.s * sum(abs(ki) for ki in k))
            * w.delta ** (sum(h) + sum(j))
        )
    return total


# ---------------- calculus ----------------


def d_angle(f, i=0):
    """d/d(phi_i): multiplies each mode by i k_i."""
    out = f.shell()
    for (k, h, j), arr in f.coeffs.items():
        if k[i] != 0:
            out.coeffs[(k, h, j)] = 1j * k[i] * arr
    return out


def d_grid(f, axis):
    """Spectral derivative along grid axis (0..n-1: I_i, n: y, n+1: x)."""
    lo, hi = f.box[axis]
    out = f.shell()
    for key, arr in f.coeffs.items():
        out.coeffs[key] = ch.differentiate(arr, axis, lo, hi)
    return out


def d_I(f, i=0):
    return d_grid(f, i)


def d_y(f):
    return d_grid(f, f.n_angles)


def d_x(f):
    return d_grid(f, f.n_angles + 1)


def d_p(f, i=0):
    out = f.shell()
    for (k, h, j), arr in f.coeffs.items():
        if h[i] > 0:
            h2 = tuple(hv - (1 if idx == i else 0) for idx, hv in enumerate(h))
            key2 = (k, h2, j)
            prev = out.coeffs.get(key2)
            term = h[i] * arr
            out.coeffs[key2] = term if prev is None else prev + term
    return out


def d_q(f, i=0):
    out = f.shell()
    for (k, h, j), arr in f.coeffs.items():
        if j[i] > 0:
            j2 = tuple(jv - (1 if idx == i else 0) for idx, jv in enumerate(j))
            key2 = (k, h, j2)
            prev = out.coeffs.get(key2)
            term = j[i] * arr
            out.coeffs[key2] = term if prev is None else prev + term
    return out


def tf_product(f, g, fourier_cutoff=None, pq_degree=None):
    """Mode-convolution product with de-aliased grid multiplication,
    truncated back to the requested cutoffs (defaults: the operands' max)."""
    if not f.same_shape(g):
        raise ShapeError("multiplying incompatible series")
    K = fourier_cutoff if fourier_cutoff is not None else max(
        f.fourier_cutoff, g.fourier_cutoff
    )
    P = pq_degree if pq_degree is not None else max(f.pq_degree, g.pq_degree)
    # refine every coefficient once, multiply on the fine grid, project once
    fine_f = {k: ch.refine(v) for k, v in f.coeffs.items()}
    fine_g = {k: ch.refine(v) for k, v in g.coeffs.items()}
    acc = {}
    for (k1, h1, j1), a in fine_f.items():
        for (k2, h2, j2), b in fine_g.items():
            k = tuple(x + y for x, y in zip(k1, k2))
            if any(abs(ki) > K for ki in k):
                continue
            h = tuple(x + y for x, y in zip(h1, h2))
            j = tuple(x + y for x, y in zip(j1, j2))
            if sum(h) + sum(j) > P:
                continue
            key = (k, h, j)
            prod = a * b
            if key in acc:
                acc[key] += prod
            else:
                acc[key] = prod
    out = TFSeries(f.n_angles, f.m_pq, K, P, f.box, f.grid_shape)
    for key, arr in acc.items():
        out.coeffs[key] = ch.coarsen(arr, f.grid_shape)
    return out.prune()


def poisson_bracket(f, g, fourier_cutoff=None, pq_degree=None):
    """{f, g} = sum_i (d_I f d_phi g - d_I g d_phi f)
              + sum_i (d_p f d_q g - d_p g d_q f)
              + (d_y f d_x g - d_y g d_x f),
    with exact mode arithmetic in (k, h, j), spectral differentiation on the
    Chebyshev grids, and truncation back to the shape."""
    if not f.same_shape(g):
        raise ShapeError("bracket of incompatible series")
    terms = []
    for i in range(f.n_angles):
        terms.append((d_I(f, i), d_angle(g, i)))
        terms.append((d_I(g, i) * -1.0, d_angle(f, i)))
    for i in range(f.m_pq):
        terms.append((d_p(f, i), d_q(g, i)))
        terms.append((d_p(g, i) * -1.0, d_q(f, i)))
    terms.append((d_y(f), d_x(g)))
    terms.append((d_y(g) * -1.0, d_x(f)))
    out = None
    for a, b in terms:
        if not a.coeffs or not b.coeffs:
            continue
        t = tf_product(a, b, fourier_cutoff, pq_degree)
        out = t if out is None else out + t
    if out is None:
        out = f.shell()
        out.fourier_cutoff = fourier_cutoff or f.fourier_cutoff
        out.pq_degree = pq_degree or f.pq_degree
    return out.prune()


# ---------------- frequencies and the NQP primitive ----------------


@dataclass(frozen=True)
class FrequencyData:
    """Frequencies of the drift part, tabulated on the (I..., y) grid.

    omega_y must be bounded away from zero on the box; omega_I (one array
    per angle; may be identically zero) and omega_J (one per monomial pair)
    enter the mode eigenvalue lambda_khj = (h - j) . omega_J + i k . omega_I.
    """

    omega_y: np.ndarray
    omega_I: tuple = ()
    omega_J: tuple = ()

    @classmethod
    def tabulate(cls, box, grid_shape, omega_y, omega_I=(), omega_J=()):
        """Evaluate callables of (*I, y) on the grid of a series shape."""
        axes = [ch.nodes(g, lo, hi) for g, (lo, hi) in zip(grid_shape[:-1], box[:-1])]
        mesh = np.meshgrid(*axes, indexing="ij")
        wy = np.asarray(omega_y(*mesh), dtype=float) + np.zeros(mesh[0].shape)
        wI = tuple(
            np.asarray(w(*mesh), dtype=float) + np.zeros(mesh[0].shape)
            for w in omega_I
        )
        wJ = tuple(
            np.asarray(w(*mesh), dtype=float) + np.zeros(mesh[0].shape)
            for w in omega_J
        )
        if np.min(np.abs(wy)) < 1e-14:
            raise ValueError("omega_y vanishes on the box")
        return cls(wy, wI, wJ)


def mode_eigenvalue(freqs, k, h, j):
    """lambda_khj = (h - j) . omega_J + i k . omega_I on the (I..., y) grid."""
    lam = np.zeros_like(freqs.omega_y, dtype=complex)
    for ji, (hv, jv) in enumerate(zip(h, j)):
        if hv != jv:
            lam += (hv - jv) * freqs.omega_J[ji]
    for ai, kv in enumerate(k):
        if kv != 0 and freqs.omega_I:
            lam += 1j * kv * freqs.omega_I[ai]
    return lam


def nqp_primitive(f_osc, freqs, basepoint=None, n_cc=33):
    """Small-divisor-free solution of the homological equation.

    For each oscillatory mode,
        phi_khj(I, y, x) =
            (1/omega_y) int_b^x f_khj(I, y, tau) e^{(lambda/omega_y)(tau-x)} dtau
    by Clenshaw-Curtis quadrature along tau at every x node, Chebyshev-
    interpolating f along x.  The basepoint b defaults to the lower edge of
    the x box (any choice differs by a homogeneous solution and still solves
    the equation).  Requires the average part of f_osc to vanish.
    """
    avg, osc = tf_average_split(f_osc)
    if avg.sup() > 1e-13 * max(1.0, f_osc.sup()):
        raise ValueError("nqp_primitive needs a zero-average input")
    lo, hi = f_osc.box[-1]
    if basepoint is None:
        basepoint = lo
    if not lo - 1e-12 <= basepoint <= hi + 1e-12:
        raise ValueError("basepoint outside the x box")
    xs = ch.nodes(f_osc.grid_shape[-1], lo, hi)
    out = f_osc.shell()
    inv_wy = 1.0 / freqs.omega_y
    for (k, h, j), arr in osc.coeffs.items():
        lam = mode_eigenvalue(freqs, k, h, j)
        mu = lam * inv_wy  # (I..., y)
        cx = ch.vals_to_coeffs(arr, arr.ndim - 1)
        phi = np.empty_like(arr)
        for c, xc in enumerate(xs):
            if abs(xc - basepoint) < 1e-15:
                phi[..., c] = 0.0
                continue
            tau, wq = ch.clenshaw_curtis(n_cc, basepoint, xc)
            fvals = ch.clenshaw(cx, arr.ndim - 1, tau, lo, hi)  # (I..., y, n_cc)
            expf = np.exp(mu[..., None] * (tau - xc))
            phi[..., c] = inv_wy * np.sum(wq * fvals * expf, axis=-1)
        out.coeffs[(k, h, j)] = phi
    return out


def homological_residual(phi, f_osc, freqs):
    """Residual series omega_y d_x(phi) + lambda phi - f_osc (gridwise)."""
    res = phi.shell()
    n = phi.n_angles
    dphi = d_x(phi)
    keys = set(phi.coeffs) | set(f_osc.coeffs) | set(dphi.coeffs)
    zero = np.zeros(phi.grid_shape, complex)
    for key in keys:
        k, h, j = key
        lam = mode_eigenvalue(freqs, k, h, j)
        r = (
            freqs.omega_y[..., None] * dphi.coeffs.get(key, zero)
            + lam[..., None] * phi.coeffs.get(key, zero)
            - f_osc.coeffs.get(key, zero)
        )
        res.coeffs[key] = r
    return res


# ---------------- Lie flows and the iteration ----------------


@dataclass
class LieReport:
    orders: int
    term_norms: list
    ratio: float
    tail_bound: float


def lie_transform(H, phi, max_order=16, weights=PLAIN_WEIGHTS, rel_floor=1e-16):
    """Time-one Lie flow sum_{j<=max_order} L_phi^j H / j!.

    The measured geometric ratio of successive term norms must stay below 1
    (broken contraction raises ContractionError); the reported tail bound is
    last_term * ratio / (1 - ratio).
    """
    term = H
    total = H.copy()
    norms = [tf_norm(H, weights)]
    base = norms[0] if norms[0] > 0 else 1.0
    ratio = 0.0
    for order in range(1, max_order + 1):
        term = poisson_bracket(phi, term) * (1.0 / order)
        n = tf_norm(term, weights)
        norms.append(n)
        total = total + term
        if n <= rel_floor * base:
            break
        if norms[-2] > 0:
            ratio = max(ratio if order > 1 else 0.0, n / norms[-2])
        if order >= 2 and norms[-1] > norms[-2] and norms[-2] > norms[-3]:
            raise ContractionError(
                "Lie series diverging: term norms %r" % (norms[-3:],)
            )
    tail = norms[-1] * ratio / (1 - ratio) if ratio < 1 else math.inf
    if ratio >= 1 and norms[-1] > rel_floor * base:
        raise ContractionError("measured Lie contraction factor %.3f >= 1" % ratio)
    return total.prune(), LieReport(len(norms) - 1, norms, ratio, tail)


def _lie_tail_sum(phi, seed, start_divisor, max_order, weights, rel_floor=1e-16):
    """sum_{j>=0} L_phi^j (seed) / (j + start_divisor)! ... generic tail used
    for Phi_2(h) and Phi_1(g): terms L^j(seed) with factorial (j+offset)!/
    offset-adjusted coefficients."""
    # terms: seed/(d0)! with d0 = start_divisor, then {phi, seed}/(d0+1)!, ...
    term = seed
    total = seed * (1.0 / math.factorial(start_divisor))
    base = tf_norm(seed, weights) or 1.0
    prev = base
    for order in range(1, max_order + 1):
        term = poisson_bracket(phi, term)
        n = tf_norm(term, weights)
        total = total + term * (1.0 / math.factorial(order + start_divisor))
        if n <= rel_floor * base:
            break
        if n > prev and order >= 2:
            break
        prev = n
    return total.prune()


def build_secular_perturbation(spec, eps0, alpha_minus, alpha_plus, delta,
                               grid_shape=(8, 8, 16), fourier_cutoff=8,
                               n_phi=64, quad=None):
    """Band-limited series of the action-angle perturbation of the reduced
    Hamiltonian on the libration domain.

    The box is (Gcal, y, x) in (Lambda - delta, Lambda) x
    (2 sqrt(m0^3 alpha-), sqrt(m0^3 alpha+)) x
    (2 sqrt(eps0), 2 pi - 2 sqrt(eps0)); the full energy is
    -m0^5/(2 y^2) + the returned series, and the matching drift frequencies
    are omega_y = m0^5/y^3 with omega_I identically zero.

    Returns (series, FrequencyData).
    """
    from .kepler import xi_prime_array
    from .potentials import DEFAULT_QUAD, f_eps_minus_one_grid

    quad = quad or DEFAULT_QUAD
    m0, Lam = spec.m0, spec.Lambda
    box = [
        (Lam - delta, Lam),
        (2 * math.sqrt(m0**3 * alpha_minus), math.sqrt(m0**3 * alpha_plus)),
        (2 * math.sqrt(eps0), 2 * np.pi - 2 * math.sqrt(eps0)),
    ]

    def fun(Gc, gam, y, x):
        xi = xi_prime_array(x)
        r = y**2 / m0**3 * (1 - np.cos(xi))
        eps = spec.eps_of_r(r)
        c2g = np.cos(gam) ** 2
        u = Gc / Lam
        pert = eps * (Lam**2 - Gc**2) / (2 * Lam**2) * c2g
        for c, s in spec.terms():
            es = s * eps
            t = u + es * (1.0 - u**2) * c2g
            pert = pert - c * f_eps_minus_one_grid(es, t, quad)
        return m0**2 / r * pert

    series = tf_build(fun, box, grid_shape, n_angles=1,
                      fourier_cutoff=fourier_cutoff, n_phi=n_phi)
    freqs = FrequencyData.tabulate(
        box, grid_shape, lambda I, y: m0**5 / y**3,
        omega_I=[lambda I, y: np.zeros_like(y)],
    )
    return series, freqs


# ---------------- serialization ----------------


def series_to_dict(f):
    """JSON-ready structure: shape header + flat coefficient arrays in
    row-major grid order (floats survive the round trip bit-for-bit via
    repr, comfortably within the 1e-15 relative contract)."""
    return {
        "n_angles": f.n_angles,
        "m_pq": f.m_pq,
        "fourier_cutoff": f.fourier_cutoff,
        "pq_degree": f.pq_degree,
        "box": [list(b) for b in f.box],
        "grid_shape": list(f.grid_shape),
        "coeffs": [
            {
                "k": list(k),
                "h": list(h),
                "j": list(j),
                "re": arr.real.ravel(order="C").tolist(),
                "im": arr.imag.ravel(order="C").tolist(),
            }
            for (k, h, j), arr in sorted(f.coeffs.items())
        ],
    }


def series_from_dict(d):
    out = TFSeries(
        d["n_angles"],
        d["m_pq"],
        d["fourier_cutoff"],
        d["pq_degree"],
        [tuple(b) for b in d["box"]],
        tuple(d["grid_shape"]),
    )
    shape = out.grid_shape
    for entry in d["coeffs"]:
        arr = (
            np.asarray(entry["re"], dtype=float)
            + 1j * np.asarray(entry["im"], dtype=float)
        ).reshape(shape, order="C")
        out.coeffs[(tuple(entry["k"]), tuple(entry["h"]), tuple(entry["j"]))] = arr
    return out


def save_series(f, path):
    """Write the series as structured JSON text (atomic replace)."""
    payload = json.dumps(series_to_dict(f))
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_series(path):
    with open(path) as fh:
        return series_from_dict(json.load(fh))


@dataclass
class NormalFormStep:
    step: int
    f_norm: float
    osc_norm: float
    residual: float
    contraction: float


@dataclass
class NormalFormResult:
    g_star: "TFSeries"
    f_star: "TFSeries"
    steps: list = field(default_factory=list)

    def osc_norms(self):
        return [s.osc_norm for s in self.steps]


def normal_form_steps(f, freqs, N, weights=PLAIN_WEIGHTS, basepoint=None,
                      max_order=14, residual_rtol=None):
    """Iterate the homological step N times.

    Each step splits f into average + oscillatory parts, solves the
    homological equation for the generator by nqp_primitive, pushes the
    Hamiltonian through the time-one flow and accumulates the average into
    the normal part g.  The drift-part bracket {phi, h} is replaced by its
    defining identity -(oscillatory part), so h never needs differencing.
    Returns the accumulated g*, the final remainder f*, and per-step norms.

    weights may be one NormWeights or a schedule (sequence, one per step).
    """
    schedule = list(weights) if isinstance(weights, (list, tuple)) else [weights] * max(N, 1)
    if len(schedule) < N:
        schedule = schedule + [schedule[-1]] * (N - len(schedule))
    g = f.shell()
    fj = f.copy()
    steps = []
    for step in range(N):
        w = schedule[step]
        avg, osc = tf_average_split(fj)
        osc_norm = tf_norm(osc, w)
        f_norm = tf_norm(fj, w)
        if osc_norm == 0.0:
            g = (g + avg).prune()
            fj = fj.shell()
            steps.append(NormalFormStep(step, f_norm, 0.0, 0.0, 0.0))
            break
        phi = nqp_primitive(osc, freqs, basepoint)
        res = homological_residual(phi, osc, freqs)
        rel_res = res.sup() / max(osc.sup(), 1e-300)
        if residual_rtol is not None and rel_res > residual_rtol:
            raise ContractionError(
                "homological residual %.3e above tolerance at step %d"
                % (rel_res, step)
            )
        g_new = (g + avg).prune()
        # regroup H = h + g_new + osc, then e^{L_phi} H = h + g_new
        #   + Phi_2(h) + Phi_1(g_new) + Phi_1(osc)  with
        #   Phi_2(h)  = -sum_{j>=1} L^j(osc)/(j+1)!
        #             = osc - sum_{j>=0} L^j(osc)/(j+1)!   (identity L(h) = -osc)
        #   Phi_1(g') = sum_{j>=0} L^j({phi, g'})/(j+1)!
        #   Phi_1(osc) = e^{L}(osc) - osc
        f_next = osc + _lie_tail_sum(phi, osc, 1, max_order, w) * -1.0
        bracket_g = poisson_bracket(phi, g_new)
        if bracket_g.coeffs:
            f_next = f_next + _lie_tail_sum(phi, bracket_g, 1, max_order, w)
        lie_osc, _ = lie_transform(osc, phi, max_order, w)
        f_next = f_next + (lie_osc - osc)
        fj = f_next.prune(1e-300)
        contraction = tf_norm(tf_average_split(fj)[1], w) / osc_norm if osc_norm else 0.0
        steps.append(NormalFormStep(step, f_norm, osc_norm, rel_res, contraction))
        g = g_new
    return NormalFormResult(g, fj, steps)
