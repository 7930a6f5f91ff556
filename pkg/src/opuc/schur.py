"""Schur functions, the Schur algorithm, Carathéodory functions and moments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import (
    CircleGrid,
    NumericFailure,
    ValidationError,
    fourier_array,
    horner,
    series_div,
)
from .szego import as_alphas, ortho_values

TERMINAL = 1 - 1e-12


class TrivialMeasureError(NumericFailure):
    """Moment data are (numerically) those of a finitely supported measure."""


class SchurFunction:
    """Analytic self-map of the disk."""

    def __call__(self, z):
        raise NotImplementedError

    def taylor(self, n):
        raise NotImplementedError

    def step(self):
        raise NotImplementedError


class RationalSchur(SchurFunction):
    """Finite continued fraction: f_j = (γ_j + z f_{j+1}) / (1 + conj(γ_j) z f_{j+1}).

    The tail past the last parameter is 0; a unimodular last parameter ends
    the fraction with that constant.
    """

    def __init__(self, gammas):
        g = np.atleast_1d(np.asarray(gammas, dtype=complex))
        if g.size and (np.abs(g[:-1]) >= 1).any():
            raise ValidationError("only the last Schur parameter may be unimodular")
        if g.size and abs(g[-1]) > 1 + 1e-12:
            raise ValidationError("Schur parameters must lie in the closed disk")
        self.gammas = g

    def __call__(self, z):
        return schur_from_gammas(self.gammas, z)

    def taylor(self, n):
        return _rational_taylor(self.gammas, n)

    def step(self):
        if self.gammas.size == 0:
            return 0j, RationalSchur([]), False
        g0 = complex(self.gammas[0])
        if abs(g0) >= TERMINAL:
            return g0, None, True
        return g0, RationalSchur(self.gammas[1:]), False


class SeriesSchur(SchurFunction):
    """Schur function held as Taylor coefficients (optionally with boundary samples)."""

    def __init__(self, coeffs, boundary=None):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.boundary = boundary

    def __call__(self, z):
        return horner(self.coeffs, z)

    def taylor(self, n):
        out = np.zeros(n, dtype=complex)
        m = min(n, len(self.coeffs))
        out[:m] = self.coeffs[:m]
        return out

    def step(self):
        s = self.coeffs
        if s.size == 0:
            return 0j, SeriesSchur([]), False
        g0 = complex(s[0])
        if abs(g0) >= TERMINAL:
            return g0, None, True
        n = len(s) - 1
        num = s[1:]
        den = -np.conj(g0) * s
        den[0] += 1.0
        return g0, SeriesSchur(series_div(num, den, n)), False


def _rational_taylor(gammas, n):
    f = np.zeros(n, dtype=complex)
    for g in gammas[::-1]:
        zf = np.concatenate([[0], f[:-1]])
        den = np.conj(g) * zf
        den[0] += 1.0
        num = zf.copy()
        num[0] += g
        f = series_div(num, den, n)
    return f


def schur_from_gammas(gammas, z):
    """Evaluate the continued fraction backwards from a zero tail."""
    z = np.asarray(z, dtype=complex)
    f = np.zeros_like(z)
    for g in np.atleast_1d(np.asarray(gammas, dtype=complex))[::-1]:
        f = (g + z * f) / (1 + np.conj(g) * z * f)
    return f if f.ndim else complex(f)


def schur_step(f):
    """(γ_0, f_1, terminal): γ_0 = f(0) and z f_1 = (f - γ_0)/(1 - conj(γ_0) f)."""
    return f.step()


def schur_params(f, n):
    """First n Schur parameters (fewer if the algorithm terminates)."""
    out = []
    cur = f
    for _ in range(n):
        g, cur, terminal = cur.step()
        out.append(g)
        if terminal:
            break
    return np.array(out, dtype=complex)


def _value(fun, z):
    return fun(z) if callable(fun) else fun


def caratheodory_from_schur(f, z):
    """F = (1 + z f)/(1 - z f)."""
    zf = z * _value(f, z)
    return (1 + zf) / (1 - zf)


class CaratheodoryFunction:
    """F(z) = 1 + 2 Σ c_n z^n built from moments c_n."""

    def __init__(self, moments):
        c = np.asarray(moments, dtype=complex)
        self.taylor = np.concatenate([[1.0], 2 * c[1:]])

    def __call__(self, z):
        return horner(self.taylor, z)

    def schur(self):
        """Taylor data of f with F = (1 + z f)/(1 - z f)."""
        t = self.taylor
        n = len(t) - 1
        num = t[1:] / 2
        den = t / 2
        den[0] = 1.0
        return SeriesSchur(series_div(num, den, n))


def schur_from_caratheodory(F, z):
    """f = (F - 1)/(z (F + 1)); at z = 0 the limit F'(0)/2."""
    if z == 0:
        if not isinstance(F, CaratheodoryFunction):
            raise ValidationError("z = 0 needs Taylor data (a CaratheodoryFunction)")
        return complex(F.taylor[1] / 2)
    Fz = _value(F, z)
    return (Fz - 1) / (z * (Fz + 1))


def moments(measure, n):
    """c_k = ∫ e^{-ikθ} dμ for k = 0..n."""
    c = fourier_array(measure.weight, n)
    for th, m in measure.atoms:
        c = c + m * np.exp(-1j * np.arange(n + 1) * th)
    if abs(c[0] - 1) > 1e-10:
        raise ValidationError(f"measure is not normalized (total mass {c[0].real:.17g})")
    return c


def alphas_from_moments(c, n=None, margin=1e-10):
    """Levinson recursion: α_k from moments c_0..c_{n}.

    ⟨1, z Φ_k⟩ = Σ_j Φ_k[j] conj(c_{j+1}) = conj(α_k) ‖Φ_k‖², then Φ_{k+1}
    from the Szegő recursion.
    """
    c = np.asarray(c, dtype=complex)
    if n is None:
        n = len(c) - 1
    if n > len(c) - 1:
        raise ValidationError(f"need moments c_0..c_{n}")
    if abs(c[0] - 1) > 1e-10:
        raise ValidationError("moments are not normalized (c_0 != 1)")
    cc = np.conj(c)
    Phi = np.ones(1, dtype=complex)
    nrm = 1.0
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        inner = np.dot(Phi, cc[1:k + 2])
        ak = np.conj(inner) / nrm
        if abs(ak) >= 1 or nrm * (1 - abs(ak) ** 2) <= margin:
            raise TrivialMeasureError(
                f"positivity margin lost at step {k}: measure is (numerically) finitely supported",
                partial=out[:k].copy(),
            )
        out[k] = ak
        nxt = np.zeros(k + 2, dtype=complex)
        nxt[1:] = Phi
        nxt[: k + 1] -= np.conj(ak) * np.conj(Phi[::-1])
        Phi = nxt
        nrm *= 1 - abs(ak) ** 2
    return out


@dataclass
class GeronimusReport:
    alphas: np.ndarray
    gammas: np.ndarray

    @property
    def max_error(self):
        return float(np.abs(self.gammas - self.alphas).max(initial=0.0))


def geronimus_report(alphas, n, grid=None):
    """Schur parameters of the Bernstein–Szegő measure of order n+2, computed
    from its moments, against the Verblunsky coefficients."""
    from .measures import measure_from_alphas

    grid = grid or CircleGrid()
    a = as_alphas(alphas, n + 2)
    mu = measure_from_alphas(a, n + 2, grid)
    F = CaratheodoryFunction(moments(mu, n + 8))
    gam = schur_params(F.schur(), n)
    return GeronimusReport(a[:n], gam)


@dataclass
class KhrushchevReport:
    z: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def max_error(self):
        return float(np.abs(self.lhs - self.rhs).max())


def khrushchev_check(alphas, n, zs, grid=None, order=None, terms=256):
    """Schur function of |φ_n|² dμ against (φ_n/φ_n*) f(z; α_n, α_{n+1}, ...).

    μ is the Bernstein–Szegő measure of the given order (default: the
    support length of the coefficients, at least n + 1).
    """
    from .measures import CircleMeasure, measure_from_alphas
    from .szego import support_length

    grid = grid or CircleGrid()
    L = order or max(support_length(alphas) or 0, n + 1)
    a = as_alphas(alphas, L)
    mu = measure_from_alphas(a, L, grid)
    phi, _ = ortho_values(a, n, grid.points)
    nu = CircleMeasure(np.abs(phi[n]) ** 2 * mu.weight)
    f_nu = CaratheodoryFunction(moments(nu, terms)).schur()
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    lhs = f_nu(zs)
    ph, ps = ortho_values(a, n, zs)
    rhs = ph[n] / ps[n] * schur_from_gammas(a[n:], zs)
    return KhrushchevReport(zs, lhs, np.asarray(rhs))


def alphas_from_measure(measure, n):
    """α_0..α_{n-1} from the quadrature nodes of the measure.

    The orthonormal φ_k are built on the nodes by Arnoldi (z φ_k orthogonalized
    twice against φ_0..φ_k), then conj(α_k) = ∫ z φ_k dμ / ∫ φ_k* dμ with
    φ_k* = z^k conj(φ_k) on the circle. Far better conditioned than Levinson
    when the support has gaps and the norms decay quickly.
    """
    th = measure.grid.theta
    z = np.concatenate([np.exp(1j * th), [np.exp(1j * t) for t, _ in measure.atoms]])
    m = np.concatenate([measure.weight / len(th), [mass for _, mass in measure.atoms]])
    if abs(m.sum() - 1) > 1e-10:
        raise ValidationError(f"measure is not normalized (total mass {m.sum():.17g})")
    keep = m > 0
    z, m = z[keep], m[keep]
    if n >= z.size:
        raise TrivialMeasureError(f"only {z.size} support nodes for {n} coefficients")
    Q = np.zeros((n + 1, z.size), dtype=complex)
    Q[0] = 1.0
    zk = np.ones_like(z)
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        q = Q[k]
        ac = np.sum(m * z * q) / np.sum(m * zk * np.conj(q))
        if abs(ac) >= 1:
            raise TrivialMeasureError(f"|alpha_{k}| >= 1: measure is (numerically) finitely supported",
                                      partial=out[:k].copy())
        out[k] = np.conj(ac)
        w = z * q
        for _ in range(2):
            w = w - Q[: k + 1].T @ (Q[: k + 1].conj() @ (m * w))
        Q[k + 1] = w / np.sqrt(np.sum(m * np.abs(w) ** 2))
        zk = zk * z
    return out
