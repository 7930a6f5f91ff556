"""Probability measures on the circle: a sampled weight plus finitely many atoms.

Also the Bernstein–Szegő approximants, the entropy and its Gibbs variational
form, the Szegő sum rule, the higher-order (1 - cos θ) sum rule and the
relative Szegő function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import CircleGrid, ValidationError
from .szego import as_alphas, norms, ortho_values, rhos

MAX_BS_ORDER = 64
MAX_AUTO_GRID = 1 << 20


@dataclass
class CircleMeasure:
    """w(θ) dθ/2π sampled on a uniform grid, plus atoms [(θ_k, m_k)]."""

    weight: np.ndarray
    atoms: list = field(default_factory=list)

    def __post_init__(self):
        self.weight = np.asarray(self.weight, dtype=float)
        CircleGrid(len(self.weight))
        if (self.weight < 0).any():
            raise ValidationError("weight must be nonnegative")
        self.atoms = [(float(t) % (2 * np.pi), float(m)) for t, m in self.atoms]
        if any(m < 0 for _, m in self.atoms):
            raise ValidationError("atom masses must be nonnegative")
        angles = [t for t, _ in self.atoms]
        if len(set(angles)) != len(angles):
            raise ValidationError("atom angles must be distinct")

    @property
    def grid(self):
        return CircleGrid(len(self.weight))

    @property
    def total_mass(self):
        return float(self.weight.mean() + sum(m for _, m in self.atoms))

    def check_normalized(self, tol=1e-10):
        if abs(self.total_mass - 1) > tol:
            raise ValidationError(f"measure is not normalized (total mass {self.total_mass:.17g})")
        return self

    def integrate(self, f):
        """∫ f dμ for a callable f(θ) or samples on the grid."""
        if callable(f):
            vals = f(self.grid.theta)
            at = sum(m * f(np.array(t)) for t, m in self.atoms)
        else:
            vals = np.asarray(f)
            th = self.grid.theta
            per = np.append(vals, vals[0])
            ths = np.append(th, 2 * np.pi)
            at = sum(m * (np.interp(t, ths, per.real) + 1j * np.interp(t, ths, np.imag(per))) for t, m in self.atoms)
        return complex(np.mean(vals * self.weight) + at)

    def to_json(self):
        return json.dumps({
            "grid_size": len(self.weight),
            "weight": [float(x) for x in self.weight],
            "atoms": [{"theta": t, "mass": m} for t, m in self.atoms],
        })

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if len(d["weight"]) != d["grid_size"]:
            raise ValidationError("weight length does not match grid_size")
        return cls(np.array(d["weight"], dtype=float), [(a["theta"], a["mass"]) for a in d.get("atoms", [])])


def resolving_grid(alphas, n, floor=4096):
    """Grid fine enough for 1/|φ_n|²: its Fourier data decay like r^k with r
    the largest zero modulus, so N ≈ 40/(1 - r) leaves aliasing near rounding."""
    from .szego import zeros

    if n == 0:
        return CircleGrid(floor)
    r = float(np.abs(zeros(alphas, n)).max(initial=0.0))
    need = 40.0 / max(1 - r, 1e-12)
    N = floor
    while N < need and N < MAX_AUTO_GRID:
        N *= 2
    return CircleGrid(N)


def measure_from_alphas(alphas, n, grid=None):
    """Bernstein–Szegő approximant: w = 1/|φ_n(e^{iθ})|², no atoms.

    Without a grid one is chosen by ``resolving_grid``.
    """
    if n > MAX_BS_ORDER:
        raise ValidationError(f"Bernstein-Szego order {n} exceeds {MAX_BS_ORDER}")
    grid = grid or resolving_grid(alphas, n)
    phi, _ = ortho_values(alphas, n, grid.points)
    return CircleMeasure(1.0 / np.abs(phi[n]) ** 2)


def entropy(measure):
    """∫ log w dθ/2π; -inf when the weight vanishes at a grid point."""
    w = measure.weight
    if (w <= 0).any():
        return float("-inf")
    return float(np.mean(np.log(w)))


def gibbs_functional(measure, f):
    """∫ f dμ - 1 - ∫ log f dθ/2π for f > 0 (callable or grid samples)."""
    vals = f(measure.grid.theta) if callable(f) else np.asarray(f, dtype=float)
    if (vals <= 0).any():
        raise ValidationError("Gibbs test function must be positive")
    return float(measure.integrate(f).real - 1 - np.mean(np.log(vals)))


@dataclass
class SumRuleReport:
    left: float
    right: float

    @property
    def ratio(self):
        return self.left / self.right


def sum_rule_report(alphas, n, grid=None):
    """∏_{j<n}(1-|α_j|²) against exp(∫ log w_n) for the order-n approximant."""
    left = float(norms(alphas, n)[-1])
    right = float(np.exp(entropy(measure_from_alphas(alphas, n, grid))))
    return SumRuleReport(left, right)


@dataclass
class HigherSumRuleReport:
    printed_left: float
    validated_left: float
    right: float
    sum_abs2: float
    sum_diff2: float

    @property
    def printed_ratio(self):
        return self.printed_left / self.right

    @property
    def validated_ratio(self):
        return self.validated_left / self.right

    @property
    def predicted_discrepancy(self):
        """printed/validated = exp(Σ_j |α_{j+1} - α_j|²)."""
        return float(np.exp(self.sum_diff2))


def higher_sum_rule_report(alphas, n, grid=None):
    """Both sides of the (1 - cos θ) sum rule for the order-n approximant.

    Coefficient side, validated form:
        exp(-½|α_0|² - Re α_0 - ½ Σ_{j≥0} |α_{j+1} - α_j|²) ∏ (1-|α_j|²) e^{|α_j|²}
    with α_j = 0 for j ≥ n. The printed form carries +½ Σ instead of -½ Σ
    and overshoots by exp(Σ |α_{j+1} - α_j|²).
    Quadrature side: exp(∫ (1 - cos θ) log w dθ/2π).
    """
    grid = grid or CircleGrid(8192)
    a = as_alphas(alphas, n + 1)
    a[n] = 0.0
    diff2 = float(np.sum(np.abs(np.diff(a)) ** 2))
    abs2 = float(np.sum(np.abs(a) ** 2))
    base = -0.5 * abs(a[0]) ** 2 - a[0].real + np.sum(np.log1p(-np.abs(a) ** 2) + np.abs(a) ** 2)
    printed = float(np.exp(base + 0.5 * diff2))
    validated = float(np.exp(base - 0.5 * diff2))
    mu = measure_from_alphas(a[:n], n, grid)
    right = float(np.exp(np.mean((1 - np.cos(grid.theta)) * np.log(mu.weight))))
    return HigherSumRuleReport(printed, validated, right, abs2, diff2)


@dataclass
class RelativeSzegoReport:
    z: np.ndarray
    value: np.ndarray
    boundary_error: float
    tail_errors: np.ndarray
    min_modulus: float


def _relative_szego_values(a, z):
    from .schur import schur_from_gammas

    f = schur_from_gammas(a, z)
    f1 = schur_from_gammas(a[1:], z)
    return (1 - np.conj(a[0]) * f) / rhos(a[:1])[0] * (1 - z * f1) / (1 - z * f)


def relative_szego(alphas, z, grid=None, n_tail=None):
    """(δ_0 D)(z) = (1 - conj(α_0) f)/ρ_0 · (1 - z f_1)/(1 - z f) for finitely
    supported α, with the boundary check |δ_0 D|² = w/w_1 and the ratio
    φ*_{n-1}(z; μ_1)/φ*_n(z; μ) as n grows."""
    from .szego import support_length

    grid = grid or CircleGrid()
    L = support_length(alphas)
    if L is None:
        raise ValidationError("relative Szego function needs finitely supported coefficients")
    L = max(L, 1)
    a = as_alphas(alphas, L)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if (np.abs(zs) >= 1).any():
        raise ValidationError("points must lie in the open unit disk")
    val = _relative_szego_values(a, zs)

    w = measure_from_alphas(a, L, grid).weight
    w1 = measure_from_alphas(a[1:], L - 1, grid).weight
    bval = _relative_szego_values(a, grid.points)
    keep = w1 > 1e-8
    boundary = float(np.abs(np.abs(bval[keep]) ** 2 - (w / w1)[keep]).max())

    n_tail = n_tail or L + 4
    ph, ps = ortho_values(a, n_tail, zs)
    ph1, ps1 = ortho_values(a[1:], n_tail, zs)
    tails = np.array([np.abs(ps1[n - 1] / ps[n] - val).max() for n in range(1, n_tail + 1)])
    return RelativeSzegoReport(zs, val, boundary, tails, float(np.abs(val).min()))


def shifted_norm_ratio(alphas, k, n):
    """‖Φ_n(ν)‖² / ‖Φ_{n+k}(μ)‖² where ν has coefficients α_{j+k}, and the
    limit exp(∫ log(x/w)) predicted from the Bernstein–Szegő weights."""
    from .szego import support_length

    L = support_length(alphas)
    if L is None:
        raise ValidationError("needs finitely supported coefficients")
    a = as_alphas(alphas, max(L, n + k))
    lhs = norms(a[k:], n)[-1] / norms(a, n + k)[-1]
    x = measure_from_alphas(a[k:], max(L - k, 0))
    w = measure_from_alphas(a, L)
    rhs = float(np.exp(entropy(x) - entropy(w)))
    return float(lhs), rhs
