"""Periodic coefficients: discriminant, bands and gaps, Lyapunov exponent,
capacity, density of zeros, Floquet fibers and band-edge growth."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cmv import periodized_cmv
from .numerics import (
    NumericFailure,
    RangeError,
    ValidationError,
    det_lu,
    eig_dense,
    match_multisets,
)
from .szego import check_alphas, ortho_values, rhos

TWO_PI = 2 * np.pi
GAP_TOL = 1e-9


def _period(alphas_p, even=True):
    a = check_alphas(np.atleast_1d(np.asarray(alphas_p, dtype=complex)))
    if a.size == 0:
        raise ValidationError("empty period")
    if even and a.size % 2:
        raise ValidationError(f"period {a.size} is odd; use period_double first")
    return a


def period_double(alphas):
    """(α_0, α_1, ...) -> (α_0, 0, α_1, 0, ...): coefficients of μ(e^{2iθ})."""
    a = _period(alphas, even=False)
    out = np.zeros(2 * a.size, dtype=complex)
    out[::2] = a
    return out


def _transfer_with_derivative(a, z):
    """Entries of T_p(z) and dT_p/dz, vectorized over z."""
    z = np.asarray(z, dtype=complex)
    one, nil = np.ones_like(z), np.zeros_like(z)
    T = [one, nil, nil, one]
    dT = [nil, nil, nil, nil]
    for alpha, rho in zip(a, rhos(a)):
        t11, t12, t21, t22 = T
        d11, d12, d21, d22 = dT
        ac = np.conj(alpha)
        # A = [[z, -ᾱ], [-α z, 1]]/ρ and dA/dz = [[1, 0], [-α, 0]]/ρ
        n11 = (z * t11 - ac * t21) / rho
        n12 = (z * t12 - ac * t22) / rho
        n21 = (-alpha * z * t11 + t21) / rho
        n22 = (-alpha * z * t12 + t22) / rho
        e11 = (t11 + z * d11 - ac * d21) / rho
        e12 = (t12 + z * d12 - ac * d22) / rho
        e21 = (-alpha * t11 - alpha * z * d11 + d21) / rho
        e22 = (-alpha * t12 - alpha * z * d12 + d22) / rho
        T = [n11, n12, n21, n22]
        dT = [e11, e12, e21, e22]
    return T, dT


def discriminant(alphas_p, z):
    """Δ(z) = z^{-p/2} Tr T_p(z)."""
    a = _period(alphas_p)
    z = np.asarray(z, dtype=complex)
    if (z == 0).any():
        raise ValidationError("discriminant is undefined at z = 0")
    T, _ = _transfer_with_derivative(a, z)
    out = z ** (-(a.size // 2)) * (T[0] + T[3])
    return out if out.ndim else complex(out)


def discriminant_dtheta(alphas_p, theta):
    """∂Δ(e^{iθ})/∂θ, real, from the product rule on the transfer matrices."""
    a = _period(alphas_p)
    z = np.exp(1j * np.asarray(theta, dtype=float))
    T, dT = _transfer_with_derivative(a, z)
    h = a.size // 2
    tr, dtr = T[0] + T[3], dT[0] + dT[3]
    dz = -h * z ** (-h - 1) * tr + z ** (-h) * dtr
    out = np.real(1j * z * dz)
    return out if out.ndim else float(out)


def _delta_real(a, theta):
    return np.real(discriminant(a, np.exp(1j * np.asarray(theta, dtype=float))))


# ---------------------------------------------------------------------------
# bands


@dataclass
class BandSet:
    """Bands as arcs [lo, hi] (hi may exceed 2π when a band wraps).

    edge_tags[i] = (Δ at lo, Δ at hi), each ±2. gaps[i] follows band i.
    """

    period: int
    arcs: list
    edge_tags: list
    gaps: list
    masses: list = field(default_factory=list)

    @property
    def total_measure(self):
        return float(sum(hi - lo for lo, hi in self.arcs))

    @property
    def open_gaps(self):
        return [g for g in self.gaps if g["open"]]

    def rows(self):
        out = []
        for i, ((lo, hi), (tl, th)) in enumerate(zip(self.arcs, self.edge_tags)):
            out.append({
                "band_index": i,
                "theta_lo": lo,
                "theta_hi": hi,
                "mass": self.masses[i] if self.masses else float("nan"),
                "edge_delta_lo": tl,
                "edge_delta_hi": th,
                "gap_open": self.gaps[i]["open"],
            })
        return out


def band_edges(alphas_p):
    """Angles where Δ = +2 and Δ = -2: spectra of E_p(1) and E_p(-1)."""
    a = _period(alphas_p)
    out = []
    for beta, tag in ((1.0, 2), (-1.0, -2)):
        E, _, _ = periodized_cmv(a, beta)
        ev = eig_dense(E)
        out.extend((float(np.angle(z)) % TWO_PI, tag) for z in ev)
    return out


def bands(alphas_p, tol=GAP_TOL, n_nodes=256):
    """Bands from the Floquet edges.

    Sorted around the circle, the 2p edges alternate band / gap; a band joins
    edges with opposite Δ tags, a gap edges with equal tags. A gap is closed
    when its two edges coincide to ``tol``.
    """
    a = _period(alphas_p)
    p = a.size
    edges = sorted(band_edges(a))
    ang = np.array([t for t, _ in edges] + [edges[0][0] + TWO_PI])
    tag = [g for _, g in edges] + [edges[0][1]]
    for off in (0, 1):
        pairs = [(off + 2 * i, off + 2 * i + 1) for i in range(p)]
        if all(tag[i % (2 * p)] != tag[j % (2 * p)] for i, j in pairs):
            break
    else:
        raise NumericFailure("band edges do not alternate in Δ; cannot pair them")

    def at(i):
        return ang[i % (2 * p)] + TWO_PI * (i // (2 * p)), tag[i % (2 * p)]

    arcs, tags = [], []
    for i, j in pairs:
        (lo, tl), (hi, th) = at(i), at(j)
        arcs.append((float(lo), float(hi)))
        tags.append((tl, th))
    mids = np.array([(lo + hi) / 2 for lo, hi in arcs])
    if (np.abs(_delta_real(a, mids)) > 2 + 1e-8).any():
        raise NumericFailure("band midpoint with |Δ| > 2")
    gaps = []
    for k in range(p):
        lo = arcs[k][1]
        hi = arcs[(k + 1) % p][0] + (TWO_PI if k == p - 1 else 0.0)
        width = hi - lo
        gaps.append({"lo": lo, "hi": hi, "width": float(width), "open": bool(width > tol), "delta": tags[k][1]})
    bs = BandSet(p, arcs, tags, gaps)
    bs.masses = [band_mass(a, lo, hi, n_nodes) for lo, hi in arcs]
    return bs


def merged_arcs(bs):
    """Bands glued across closed gaps (a closed circle comes back as [(0, 2π)])."""
    if not bs.open_gaps:
        return [(0.0, TWO_PI)]
    start = next(k for k, g in enumerate(bs.gaps) if g["open"])
    out = []
    cur = None
    for s in range(bs.period):
        k = (start + 1 + s) % bs.period
        lo, hi = bs.arcs[k]
        if cur is None:
            cur = [lo, hi]
        else:
            shift = round((cur[1] - lo) / TWO_PI) * TWO_PI
            cur[1] = hi + shift
        if bs.gaps[k]["open"]:
            out.append(tuple(cur))
            cur = None
    return out


# ---------------------------------------------------------------------------
# density of states


def _dos_values(a, theta):
    d = _delta_real(a, theta)
    dd = discriminant_dtheta(a, theta)
    gap = 4 - d ** 2
    ok = gap > 1e-12
    den = np.sqrt(np.where(ok, gap, 1.0))
    v = np.where(ok, 2.0 / a.size * np.abs(dd) / den, 0.0)
    # bounded ratio next to a closed gap; take the nearest resolvable node
    if v.ndim and not ok.all() and ok.any():
        v[~ok] = np.interp(theta[~ok], theta[ok], v[ok])
    return v


def dos(alphas_p, theta):
    """Density V(θ) of the zero-counting limit, dν = V dθ/2π.

    V = (2/p) |∂Δ/∂θ| / sqrt(4 - Δ²) on the bands, which gives each band mass 1/p.
    """
    a = _period(alphas_p)
    th = np.asarray(theta, dtype=float)
    d = _delta_real(a, th)
    if (np.abs(d) > 2 + 1e-12).any():
        raise RangeError("θ lies in a gap (|Δ| > 2)")
    out = _dos_values(a, th)
    return out if out.ndim else float(out)


def _band_nodes(lo, hi, n_nodes):
    # θ = lo + (hi - lo)(1 - cos t)/2 absorbs the square-root edge singularities
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    t = np.pi * (t + 1) / 2
    w = w * np.pi / 2
    theta = lo + (hi - lo) * (1 - np.cos(t)) / 2
    jac = (hi - lo) * np.sin(t) / 2
    return theta, w * jac


def band_mass(alphas_p, lo, hi, n_nodes=256):
    a = _period(alphas_p)
    th, w = _band_nodes(lo, hi, n_nodes)
    return float(np.sum(w * _dos_values(a, th)) / TWO_PI)


def dos_quadrature(alphas_p, bs=None, n_nodes=256):
    """Nodes θ_i and weights of dν over all bands."""
    a = _period(alphas_p)
    bs = bs or bands(a, n_nodes=n_nodes)
    ths, ws = [], []
    for lo, hi in bs.arcs:
        th, w = _band_nodes(lo, hi, n_nodes)
        ths.append(th % TWO_PI)
        ws.append(w * _dos_values(a, th) / TWO_PI)
    return np.concatenate(ths), np.concatenate(ws)


# ---------------------------------------------------------------------------
# Lyapunov exponent and capacity


def lyapunov(alphas_p, z, flag=False):
    """γ(z) = ½ log|z| + (1/p) log|Δ/2 + sqrt(Δ²/4 - 1)|, larger branch.

    With flag=True returns (γ, at_edge) where at_edge marks |Δ² - 4| < 1e-12.
    """
    a = _period(alphas_p)
    z = complex(z)
    if z == 0:
        raise ValidationError("Lyapunov exponent is undefined at z = 0")
    d = discriminant(a, z)
    s = np.sqrt(d * d / 4 - 1)
    m = max(abs(d / 2 + s), abs(d / 2 - s))
    g = 0.5 * np.log(abs(z)) + np.log(m) / a.size
    if flag:
        return float(g), bool(abs(d * d - 4) < 1e-12)
    return float(g)


def transfer_growth(alphas_p, z, n=2000):
    """(1/n) log ‖T_n(z)‖ for the periodic sequence, with renormalization."""
    a = _period(alphas_p, even=False)
    z = complex(z)
    rho = rhos(a)
    M = np.eye(2, dtype=complex)
    acc = 0.0
    for k in range(n):
        al = a[k % a.size]
        A = np.array([[z, -np.conj(al)], [-al * z, 1.0]]) / rho[k % a.size]
        M = A @ M
        s = np.abs(M).max()
        acc += np.log(s)
        M /= s
    return float((acc + np.log(np.linalg.norm(M, 2))) / n)


def capacity(alphas_p):
    """Logarithmic capacity of the bands: ∏ ρ_j^{1/p} = ∏ (1 - |α_j|²)^{1/(2p)}."""
    a = _period(alphas_p)
    return float(np.exp(np.sum(np.log1p(-np.abs(a) ** 2)) / (2 * a.size)))


def capacity_printed(alphas_p):
    """∏ (1 - |α_j|²)^{1/p}, kept for comparison."""
    return capacity(alphas_p) ** 2


@dataclass
class PotentialReport:
    z: np.ndarray
    potential: np.ndarray
    predicted: np.ndarray
    predicted_printed: np.ndarray

    @property
    def max_error(self):
        return float(np.abs(self.potential - self.predicted).max())

    @property
    def max_error_printed(self):
        return float(np.abs(self.potential - self.predicted_printed).max())


def potential_check(alphas_p, zs, n_nodes=256):
    """∫ log|z - e^{iθ}|^{-1} dν(θ) against -(γ(z) + log C_B).

    Points on the circle must avoid the bands (the integrand is singular there).
    """
    a = _period(alphas_p)
    th, w = dos_quadrature(a, n_nodes=n_nodes)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    pot = np.array([-np.sum(w * np.log(np.abs(z - np.exp(1j * th)))) for z in zs])
    g = np.array([lyapunov(a, z) for z in zs])
    return PotentialReport(zs, pot, -(g + np.log(capacity(a))), -(g + np.log(capacity_printed(a))))


# ---------------------------------------------------------------------------
# Floquet fibers


def _trace_poly(a):
    """Coefficients (low to high) of Tr T_p(z) as a polynomial of degree p."""
    P = np.polynomial.polynomial
    T = [np.array([1.0 + 0j]), np.array([0j]), np.array([0j]), np.array([1.0 + 0j])]
    for alpha, rho in zip(a, rhos(a)):
        t11, t12, t21, t22 = T
        zt11, zt12 = P.polymulx(t11), P.polymulx(t12)
        T = [
            P.polysub(zt11, np.conj(alpha) * t21) / rho,
            P.polysub(zt12, np.conj(alpha) * t22) / rho,
            P.polysub(t21, alpha * zt11) / rho,
            P.polysub(t22, alpha * zt12) / rho,
        ]
    tr = P.polyadd(T[0], T[3])
    out = np.zeros(a.size + 1, dtype=complex)
    out[: len(tr)] = tr[: a.size + 1]
    return out


@dataclass
class PeriodizedReport:
    betas: np.ndarray
    eig_mismatch: np.ndarray
    prefactors: np.ndarray
    prod_rho: float
    printed_prefactor: float

    @property
    def max_mismatch(self):
        return float(self.eig_mismatch.max())

    @property
    def prefactor(self):
        return complex(np.mean(self.prefactors))

    @property
    def prefactor_error(self):
        """Spread of the fitted constant around ∏ ρ_j."""
        return float(np.abs(self.prefactors - self.prod_rho).max())

    @property
    def printed_prefactor_error(self):
        return float(np.abs(self.prefactors - self.printed_prefactor).max())


def periodized_det_check(alphas_p, betas, zs=None):
    """Eigenvalues of E_p(β) against the roots of z^{p/2}(Δ(z) - β - 1/β), and
    the constant c in det(z - E_p(β)) = c z^{p/2} (Δ(z) - β - 1/β)."""
    a = _period(alphas_p)
    p = a.size
    if p > 64:
        raise ValidationError("period must be <= 64")
    betas = np.atleast_1d(np.asarray(betas, dtype=complex))
    if (np.abs(np.abs(betas) - 1) > 1e-12).any():
        raise ValidationError("β must be unimodular")
    if zs is None:
        zs = 1.5 * np.exp(1j * (0.3 + TWO_PI * np.arange(5) / 5))
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    tr = _trace_poly(a)
    mismatch, consts = [], []
    for beta in betas:
        E, _, _ = periodized_cmv(a, beta)
        ev = eig_dense(E)
        poly = tr.copy()
        poly[p // 2] -= (beta + 1 / beta)
        roots = np.roots(poly[::-1])
        mismatch.append(match_multisets(ev, roots))
        for z in zs:
            lhs = det_lu(z * np.eye(p) - E)
            rhs = z ** (p // 2) * (discriminant(a, z) - beta - 1 / beta)
            consts.append(lhs / rhs)
    prod_rho = float(np.prod(rhos(a)))
    printed = float(np.prod(1 - np.abs(a) ** 2) ** (1 / (2 * p)))
    return PeriodizedReport(betas, np.array(mismatch), np.array(consts), prod_rho, printed)


# ---------------------------------------------------------------------------
# gaps and Borg-type checks


@dataclass
class GapReport:
    widths: np.ndarray
    tags: list
    open: np.ndarray
    tol: float

    @property
    def n_open(self):
        return int(self.open.sum())

    @property
    def all_closed(self):
        return not self.open.any()


def gap_report(alphas_p, tol=GAP_TOL):
    bs = bands(alphas_p, tol, n_nodes=16)
    w = np.array([g["width"] for g in bs.gaps])
    return GapReport(w, [g["delta"] for g in bs.gaps], w > tol, tol)


@dataclass
class BorgReport:
    all_closed: bool
    max_abs_alpha: float
    borg_ok: bool
    half_period: Optional[str]
    directional_ok: Optional[bool]
    max_directional_width: Optional[float]


def borg_checks(alphas_p, tol=GAP_TOL):
    """All gaps closed only for α ≡ 0; a repeated half period closes every
    Δ = -2 gap, an antirepeated one every Δ = +2 gap."""
    a = _period(alphas_p)
    rep = gap_report(a, tol)
    mx = float(np.abs(a).max())
    ok = (not rep.all_closed) or mx <= 1e-9
    q = a.size // 2
    kind = target = None
    if np.allclose(a[q:], a[:q], rtol=0, atol=1e-15):
        kind, target = "repeated", -2
    elif np.allclose(a[q:], -a[:q], rtol=0, atol=1e-15):
        kind, target = "antirepeated", 2
    if kind is None:
        return BorgReport(rep.all_closed, mx, ok, None, None, None)
    widths = [w for w, t in zip(rep.widths, rep.tags) if t == target]
    worst = float(max(widths, default=0.0))
    return BorgReport(rep.all_closed, mx, ok, kind, worst <= tol, worst)


# ---------------------------------------------------------------------------
# band-edge growth


@dataclass
class EdgeGrowthReport:
    edge: float
    edge_growth_exponent: float
    resonance: bool
    distances: np.ndarray
    interior_sup: np.ndarray
    interior_slope: float
    linear_constant: float


def _loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def band_edge_growth(alphas_p, edge, n_max=2000, distances=None, bs=None):
    """Growth of |φ_n| at a band edge and just inside the band.

    At the edge the exponent of n in sup_{k≤n} |φ_k| is fitted (≈ 0 means a
    resonance, ≈ 1 linear growth). Inside the band sup_{k≤n_max} |φ_k(z)| is
    fitted against the distance d to the edge (expected slope -½), and
    max_k |φ_k|/(k+1) over all samples is reported as the linear constant.
    """
    a = _period(alphas_p)
    bs = bs or bands(a, n_nodes=16)
    edge = float(edge) % TWO_PI
    inward = None
    for lo, hi in bs.arcs:
        if abs((lo - edge + np.pi) % TWO_PI - np.pi) < 1e-9:
            inward, width = 1.0, hi - lo
        elif abs((hi - edge + np.pi) % TWO_PI - np.pi) < 1e-9:
            inward, width = -1.0, hi - lo
        if inward is not None:
            break
    if inward is None:
        raise ValidationError("edge is not a band edge")
    seq = np.resize(a, n_max)
    phi, _ = ortho_values(seq, n_max, np.exp(1j * edge))
    sup = np.maximum.accumulate(np.abs(phi))
    ks = np.arange(n_max // 10, n_max + 1)
    expo = _loglog_slope(ks, sup[ks])
    if distances is None:
        distances = width * np.geomspace(1e-1, 1e-4, 7)
    distances = np.asarray(distances, dtype=float)
    zs = np.exp(1j * (edge + inward * distances))
    phi_in, _ = ortho_values(seq, n_max, zs)
    mod = np.abs(phi_in)
    sup_in = mod.max(axis=0)
    lin = float((mod / (np.arange(n_max + 1)[:, None] + 1)).max())
    return EdgeGrowthReport(edge, expo, expo < 0.5, distances, sup_in, _loglog_slope(distances, sup_in), lin)
