"""Diagnostics: Jitomirskaya–Last norms and the |F| sandwich, zeros near an
isolated mass point, mass points in gaps of perturbed periodic coefficients,
and the arc-Rakhmanov trend."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import CircleGrid, RangeError, ValidationError
from .szego import as_alphas, ortho_values, support_length

JL_CONSTANT = 6.65


# ---------------------------------------------------------------------------
# Jitomirskaya–Last


def jl_norm(a, x):
    """‖a‖_x with ‖a‖_x² = Σ_{j ≤ [x]} |a_j|² + (x - [x]) |a_{[x]+1}|²."""
    a = np.asarray(a)
    x = float(x)
    if x < 0:
        raise ValidationError("x must be >= 0")
    k = int(math.floor(x))
    frac = x - k
    if k >= a.size or (frac > 0 and k + 1 >= a.size):
        raise RangeError(f"x = {x} needs {k + 2 if frac else k + 1} terms, have {a.size}")
    s = np.sum(np.abs(a[: k + 1]) ** 2)
    if frac:
        s += frac * abs(a[k + 1]) ** 2
    return float(np.sqrt(s))


def _jl_x(phi, psi, r):
    """Solve (1 - r) ‖φ‖_x ‖ψ‖_x = √2 for x by bisection."""
    target = math.sqrt(2)
    M = phi.size - 1

    def prod(x):
        return (1 - r) * jl_norm(phi, x) * jl_norm(psi, x)

    if prod(0.0) >= target:
        return 0.0
    if prod(M) < target:
        raise RangeError("sequence too short for x(r)")
    lo, hi = 0.0, float(M)
    # the product is nondecreasing and strictly increasing wherever φ, ψ ≠ 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if prod(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@dataclass
class JLReport:
    z: complex
    r: float
    x: float
    norm_phi: float
    norm_psi: float
    F_abs: float
    ratio: float
    A: float
    F_quadrature: Optional[float] = None

    @property
    def lower(self):
        return self.ratio / self.A

    @property
    def upper(self):
        return self.ratio * self.A

    @property
    def holds(self):
        return self.lower <= self.F_abs <= self.upper

    @property
    def margin(self):
        """min of |F|/lower and upper/|F|; >= 1 when the sandwich holds."""
        return min(self.F_abs / self.lower, self.upper / self.F_abs)


def _caratheodory(a, w):
    from .schur import schur_from_gammas

    zf = w * schur_from_gammas(a, w)
    return (1 + zf) / (1 - zf)


def jl_sandwich(alphas, z, r, length=None, A=JL_CONSTANT, grid=None):
    """x(r), the norms and |F(rz)| against ‖ψ‖_x/‖φ‖_x.

    The coefficients are used as a finite sequence of ``length`` (default: the
    support, or an estimate from r), so F comes from the rational Schur
    function. For supports up to 64 an independent quadrature value of F over
    the Bernstein–Szegő weight is attached.
    """
    z = complex(z)
    if abs(abs(z) - 1) > 1e-12:
        raise ValidationError("z must lie on the unit circle")
    if not 0 <= r < 1:
        raise ValidationError("r must lie in [0, 1)")
    L = support_length(alphas)
    need = int(8 * math.sqrt(2) / (1 - r)) + 16
    n = length or max(need, (L or 0) + 2)
    if L is None and length is None:
        n = need
    a = as_alphas(alphas, n)
    phi, _ = ortho_values(a, n, z)
    psi, _ = ortho_values(a, n, z, second_kind=True)
    try:
        x = _jl_x(phi, psi, r)
    except RangeError:
        raise RangeError(f"need more than {n} coefficients for r = {r}; try length >= {4 * n}") from None
    nphi, npsi = jl_norm(phi, x), jl_norm(psi, x)
    w = r * z
    F = abs(complex(_caratheodory(a[: support_length(a)], w)))
    Fq = None
    Ls = support_length(a)
    if Ls <= 64:
        from .measures import measure_from_alphas

        grid = grid or CircleGrid(max(4096, 1 << int(math.ceil(math.log2(64 / (1 - r))))))
        mu = measure_from_alphas(a[:Ls], Ls, grid)
        e = grid.points
        Fq = float(abs(np.mean((e + w) / (e - w) * mu.weight)))
    return JLReport(z, r, x, nphi, npsi, F, npsi / nphi, A, Fq)


# ---------------------------------------------------------------------------
# zeros near an isolated mass point


def arc_atom_measure(gap_center=1.0, a=0.6, atom_mass=0.2, grid=None):
    """Smooth weight on {|arg(z/c)| ≥ 2 arcsin a} plus an atom at c.

    The weight exp(-1/(cos h - cos φ)) (φ the angle from c, h = 2 arcsin a)
    vanishes to all orders at the arc ends, so its Fourier data are exact to
    rounding on a fine grid.
    """
    from .measures import CircleMeasure

    grid = grid or CircleGrid(1 << 14)
    c = complex(gap_center)
    phase = float(np.angle(c))
    h = 2 * math.asin(a)
    phi = np.angle(np.exp(1j * (grid.theta - phase)))
    s = math.cos(h) - np.cos(phi)
    w = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    w *= (1 - atom_mass) / w.mean()
    return CircleMeasure(w, [(phase, atom_mass)]), h


def _hull_contains(points, zs, slack):
    from scipy.spatial import ConvexHull

    hull = ConvexHull(np.column_stack([points.real, points.imag]))
    A, b = hull.equations[:, :2], hull.equations[:, 2]
    vals = np.column_stack([zs.real, zs.imag]) @ A.T + b
    return vals.max(axis=1) <= slack


@dataclass
class IsolatedPointReport:
    z0: complex
    delta: float
    ns: np.ndarray
    counts: np.ndarray
    distances: np.ndarray
    slope: float
    in_hull: bool
    max_count: int = field(init=False)

    def __post_init__(self):
        self.max_count = int(self.counts.max(initial=0))


def isolated_point_zeros(measure, z0, ns, support_points=None, skip=10):
    """Zeros of Φ_n for μ = (a.c. part away from z0) + atom at z0.

    ``support_points`` samples supp(μ) for the hull tests (default: grid
    points where the weight is positive, plus z0). δ is the distance from z0
    to the hull of the rest of the support.
    """
    from .schur import alphas_from_measure
    from .szego import zeros

    z0 = complex(z0)
    ns = np.asarray(list(ns), dtype=int)
    nmax = int(ns.max())
    grid = measure.grid
    if support_points is None:
        support_points = grid.points[measure.weight > 0]
    support_points = np.asarray(support_points, dtype=complex)
    rest = support_points[np.abs(support_points - z0) > 1e-12]
    if rest.size < 3:
        raise ValidationError("the a.c. part needs support away from z0")
    # distance from z0 to the hull of the rest
    from scipy.spatial import ConvexHull

    hull = ConvexHull(np.column_stack([rest.real, rest.imag]))
    A, b = hull.equations[:, :2], hull.equations[:, 2]
    outside = A @ np.array([z0.real, z0.imag]) + b
    if outside.max() <= 0:
        raise ValidationError("z0 lies inside the hull of the rest of the support")
    delta = float(np.min(np.abs(rest - z0)))
    if delta < 4 * 2 * np.pi / grid.n_points:
        raise ValidationError("z0 is not isolated from the rest of the support")
    verts = rest[hull.vertices]
    for i in range(len(verts)):
        p, q = verts[i], verts[(i + 1) % len(verts)]
        t = np.clip(((z0 - p) * np.conj(q - p)).real / abs(q - p) ** 2, 0, 1)
        delta = min(delta, abs(z0 - (p + t * (q - p))))

    alphas = alphas_from_measure(measure, nmax)
    counts, dists, inside = [], [], True
    step = 2 * np.pi / grid.n_points
    slack = 1e-8 + step ** 2 / 8
    full = np.concatenate([support_points, [z0]])
    for n in ns:
        zs = zeros(alphas, int(n))
        d = np.abs(zs - z0)
        counts.append(int(np.sum(d < delta / 3)))
        dists.append(float(d.min()))
        inside &= bool(_hull_contains(full, zs, slack).all())
    counts, dists = np.array(counts), np.array(dists)
    # past rounding level the distance no longer carries the rate
    keep = (ns >= skip) & (dists > 1e-13)
    slope = float(np.polyfit(ns[keep], np.log(dists[keep]), 1)[0]) if keep.sum() >= 2 else float("nan")
    return IsolatedPointReport(z0, delta, ns, counts, dists, slope, inside)


# ---------------------------------------------------------------------------
# mass points in gaps


@dataclass
class GapMassReport:
    sizes: tuple
    points: list
    weights: list
    gap_of: list
    counts: dict
    sums: dict
    stable: bool


def _spectral_data(alphas, n):
    from .cmv import unitary_cmv

    U = unitary_cmv(alphas, n)
    ev, vec = np.linalg.eig(U)
    vec = vec / np.linalg.norm(vec, axis=0)
    return ev, np.abs(vec[0]) ** 2


def gap_masspoints(alphas_p, delta_alpha=(), sizes=(256, 512), weight_min=1e-8, move_max=1e-6, edge_margin=1e-8):
    """Stable eigenvalues in open gaps of the periodic base after a finitely
    supported perturbation.

    An eigenvalue of the size-n unitary truncation counts when it sits in an
    open gap, its first-coordinate weight exceeds ``weight_min`` and an
    eigenvalue of the size-2n truncation lies within ``move_max``. Also
    Σ dist(z_j, bands)^q for q = 1/2, 1, p - 1/2.
    """
    from .periodic import bands

    base = np.atleast_1d(np.asarray(alphas_p, dtype=complex))
    p = base.size
    bs = bands(base, n_nodes=16)
    d = np.atleast_1d(np.asarray(delta_alpha, dtype=complex))
    n1, n2 = sizes
    if n2 <= n1:
        raise ValidationError("second truncation must be larger")

    def seq(n):
        s = np.resize(base, n).astype(complex)
        s[: min(d.size, n)] += d[:n]
        if (np.abs(s) >= 1).any():
            raise ValidationError("perturbed coefficients leave the disk")
        return s

    gaps = [g for g in bs.gaps if g["open"]]

    def which_gap(z):
        th = float(np.angle(z)) % (2 * np.pi)
        for k, g in enumerate(gaps):
            lo, hi = g["lo"], g["hi"]
            t = (th - lo) % (2 * np.pi) + lo
            if lo + edge_margin < t < hi - edge_margin:
                return k
        return None

    def candidates(n):
        ev, wt = _spectral_data(seq(n), n)
        raw = sorted(((z, w, which_gap(z)) for z, w in zip(ev, wt)), key=lambda t: np.angle(t[0]))
        # a boundary state at the far end can hybridize with a gap eigenvalue;
        # the pair splits by an exponentially small amount and shares its weight
        merged = []
        for z, w, k in raw:
            if k is None:
                continue
            if merged and abs(merged[-1][0] - z) < move_max:
                z0, w0, _ = merged[-1]
                merged[-1] = ((z0 * w0 + z * w) / (w0 + w), w0 + w, k)
            else:
                merged.append((z, w, k))
        return [c for c in merged if c[1] > weight_min], ev

    c1, _ = candidates(n1)
    c2, ev2 = candidates(n2)
    pts, wts, gidx = [], [], []
    stable = True
    for z, w, k in c1:
        if np.abs(ev2 - z).min() < move_max:
            pts.append(complex(z))
            wts.append(float(w))
            gidx.append(k)
        else:
            stable = False
    matched2 = sum(1 for z, _, _ in c2 if pts and np.abs(np.array(pts) - z).min() < move_max)
    if matched2 != len(c2):
        stable = False
    counts = {k: gidx.count(k) for k in range(len(gaps))}
    edges = np.exp(1j * np.array([e for g in gaps for e in (g["lo"], g["hi"])])) if gaps else np.zeros(0)
    dist = np.array([np.abs(edges - z).min() for z in pts]) if pts else np.zeros(0)
    sums = {q: float(np.sum(dist ** q)) for q in (0.5, 1.0, p - 0.5)}
    return GapMassReport(tuple(sizes), pts, wts, gidx, counts, sums, stable)


# ---------------------------------------------------------------------------
# arc-Rakhmanov trend


@dataclass
class TrendReport:
    modulus_gap: np.ndarray
    product_gap: np.ndarray
    checkpoints: dict
    modulus_slope: Optional[float]
    product_slope: Optional[float]


def _slope(v, lo):
    n = np.arange(v.size)
    keep = (n >= lo) & (np.abs(v) > 0)
    if keep.sum() < 3:
        return None
    return float(np.polyfit(np.log(n[keep] + 1), np.log(np.abs(v[keep])), 1)[0])


def arc_rakhmanov_trend(alphas, a, lam=1.0, n_max=1000, checkpoints=(10, 50, 100, 500)):
    """|α_n| - a and conj(α_{n+1}) α_n - a² λ along n, with log–log slopes."""
    lam = complex(lam)
    al = as_alphas(alphas, n_max + 1)
    mod = np.abs(al[:n_max]) - a
    prod = np.conj(al[1:]) * al[:n_max] - a * a * lam
    cps = {int(n): (float(mod[n]), complex(prod[n])) for n in checkpoints if n < n_max}
    return TrendReport(mod, prod, cps, _slope(mod, 10), _slope(prod, 10))
