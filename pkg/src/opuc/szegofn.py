"""Szegő function from Taylor data of log D, trace and determinant formulas,
and the Nevai–Totik decay analysis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .measures import entropy, measure_from_alphas
from .numerics import NumericFailure, ValidationError, eig_dense, fourier_array, horner, series_exp
from .szego import VerblunskySeq, as_alphas, support_length


class SzegoConditionError(NumericFailure):
    pass


@dataclass
class SzegoFunction:
    """log D(z) = ½ w_0 + Σ_{n≥1} w_n z^n."""

    w: np.ndarray
    source: str = "from-measure"
    func: Optional[Callable] = None

    @property
    def log_taylor(self):
        t = np.array(self.w, dtype=complex)
        t[0] *= 0.5
        return t

    def __call__(self, z):
        if self.func is not None:
            return self.func(z)
        return np.exp(horner(self.log_taylor, z))

    @property
    def D0(self):
        return float(np.exp(0.5 * self.w[0].real))

    def taylor(self, sign=1, n=None):
        """Taylor coefficients of D (sign=+1) or 1/D (sign=-1)."""
        n = n or len(self.w)
        return series_exp(sign * self.log_taylor, n)

    def boundary(self, n_points):
        """D on the grid of n_points via the truncated series."""
        spec = np.zeros(n_points, dtype=complex)
        t = self.log_taylor
        m = min(len(t), n_points // 2)
        spec[:m] = t[:m]
        return np.exp(np.fft.ifft(spec) * n_points)


def szego_D(measure, N=256):
    if entropy(measure) == float("-inf"):
        raise SzegoConditionError("log w is not integrable (weight vanishes on the grid)")
    w = fourier_array(np.log(measure.weight), N)
    w[0] = w[0].real
    return SzegoFunction(w, "from-measure")


def closed_form_D(log_taylor, func=None, source="closed-form"):
    """SzegoFunction from Taylor coefficients of log D itself.

    ``func`` (optional) evaluates D exactly, including outside the disk where
    the series diverges.
    """
    t = np.array(log_taylor, dtype=complex)
    t[0] *= 2
    return SzegoFunction(t, source, func)


def trace_w(alphas, n, truncation=None):
    """w_n = conj(Tr(C^n - C_0^n))/n on a truncation of sufficient size."""
    from .cmv import truncated_cmv

    L = support_length(alphas)
    if L is None:
        if truncation is None:
            raise ValidationError("infinite sequences need an explicit truncation")
        L = 0
    need = L + 2 * n + 4
    T = truncation or need
    if T < need:
        raise ValidationError(f"truncation {T} too small for n = {n}; need >= {need}")
    C = truncated_cmv(alphas, T)
    C0 = truncated_cmv(np.zeros(0), T)
    Cn = np.linalg.matrix_power(C, n)
    C0n = np.linalg.matrix_power(C0, n)
    return complex(np.conj(np.trace(Cn - C0n)) / n)


def w1_from_alphas(alphas, n):
    a = as_alphas(alphas, n)
    return complex(a[0] - np.sum(a[1:] * np.conj(a[:-1])))


@dataclass
class DetFormulaReport:
    z: complex
    ratio: complex
    det: complex
    det2: complex
    w1: complex
    trace_A: complex

    @property
    def det_error(self):
        return abs(self.det - self.ratio)

    @property
    def det2_printed_error(self):
        """Error of det₂(...) e^{+z w_1}."""
        return abs(self.det2 * np.exp(self.z * self.w1) - self.ratio)

    @property
    def det2_error(self):
        """Error of det₂(...) e^{-z w_1}."""
        return abs(self.det2 * np.exp(-self.z * self.w1) - self.ratio)

    @property
    def det2_trace_error(self):
        """Error of det₂(1 + A) e^{Tr A}, which equals det(1 + A) identically."""
        return abs(self.det2 * np.exp(self.trace_A) - self.ratio)


def det_formula_check(alphas, z, truncation=64, N=256, grid=None):
    """D(0)/D(z) from the Bernstein–Szegő weight against determinants of the
    finite-rank perturbation (1 - z conj C)(1 - z conj C_0)^{-1} - 1."""
    from .cmv import truncated_cmv

    L = support_length(alphas)
    if L is None:
        raise ValidationError("determinant formulas need finitely supported coefficients")
    if truncation < L + 8:
        raise ValidationError(f"truncation {truncation} too small; need >= {L + 8}")
    z = complex(z)
    D = szego_D(measure_from_alphas(alphas, L, grid), N)
    ratio = complex(D.D0 / D(z))
    T = truncation
    I = np.eye(T)
    Cb = np.conj(truncated_cmv(alphas, T))
    C0b = np.conj(truncated_cmv(np.zeros(0), T))
    A = (I - z * Cb) @ np.linalg.inv(I - z * C0b) - I
    lam = eig_dense(A)
    det = complex(np.prod(1 + lam))
    det2 = complex(np.prod((1 + lam) * np.exp(-lam)))
    return DetFormulaReport(z, ratio, det, det2, w1_from_alphas(alphas, L), complex(np.sum(lam)))


@dataclass
class NevaiTotikReport:
    A: float
    A_root: float
    combined: np.ndarray
    combined_printed: np.ndarray
    alpha_abs: np.ndarray
    decay_rate: Optional[float]
    printed_decay_rate: Optional[float]
    window: tuple
    applicable: bool
    pole_b: Optional[complex] = None
    pole_C: Optional[complex] = None
    fitted_b: Optional[complex] = None
    fitted_C: Optional[complex] = None
    fitted_C_printed: Optional[complex] = None


def _fit_rate(values, window, floor=1e-300):
    lo, hi = window
    idx = np.arange(lo, min(hi, len(values)))
    v = np.abs(values[idx])
    keep = v > floor
    if keep.sum() < 3:
        return None
    slope = np.polyfit(idx[keep], np.log(v[keep]), 1)[0]
    return float(np.exp(slope))


def single_pole_constant(D, b, h=1e-6):
    """[lim_{z→1/b} (1 - z b) D(z)^{-1}] · conj(D(conj b)).

    The limit is taken by averaging over a small circle around 1/b, so D must
    be evaluable there (a closed form with ``func``).
    """
    if D.func is None and abs(b) < 1:
        raise ValidationError("the pole constant needs D in closed form outside the unit disk")
    zs = (1 / b) * (1 + h * np.exp(2j * np.pi * np.arange(8) / 8))
    lim = np.mean((1 - zs * b) / D(zs))
    return complex(lim * np.conj(D(np.conj(b))))


def _median(x):
    return complex(np.median(x.real) + 1j * np.median(x.imag))


def nevai_totik_report(alphas, N=80, D=None, window=(10, 40), pole=None, floor=1e-280):
    """Decay analysis for geometrically decaying coefficients.

    With d_{j,±1} the Taylor coefficients of D^{±1}:
        combined_n         = α_n + Σ_{j≥n+1} d_{j,-1} conj(d_{j-n-1,1})
        combined_printed_n = α_n + Σ_{j≥n}   d_{j,-1} conj(d_{j-n,1})
    The first cancels the leading geometric term of α_n; the second does not.
    ``D`` may be a closed-form SzegoFunction; otherwise it is computed from a
    Bernstein–Szegő weight of order min(N, 64). ``pole=b`` adds the
    single-pole comparison α_n ≈ -C b^{n+1}.
    """
    a = as_alphas(alphas, N)
    absa = np.abs(a)
    lo = min(window[0], N - 3)
    tail = np.arange(lo, N)
    nz = tail[absa[tail] > floor]
    A_root = float(max((absa[j] ** (1.0 / (j + 1)) for j in nz), default=0.0))
    alpha_rate = _fit_rate(a, window, floor)
    applicable = alpha_rate is not None and alpha_rate < 1
    if D is None:
        D = szego_D(measure_from_alphas(a, min(N, 64)), 4 * N)
    M = 4 * N
    dm = D.taylor(-1, M)
    dp = D.taylor(+1, M)
    combined = np.array([a[n] + np.sum(dm[n + 1:M] * np.conj(dp[: M - n - 1])) for n in range(N)])
    printed = np.array([a[n] + np.sum(dm[n:M] * np.conj(dp[: M - n])) for n in range(N)])
    rep = NevaiTotikReport(
        A=alpha_rate or 0.0, A_root=A_root, combined=combined, combined_printed=printed,
        alpha_abs=absa, decay_rate=_fit_rate(combined, window, floor),
        printed_decay_rate=_fit_rate(printed, window, floor),
        window=tuple(window), applicable=applicable,
    )
    if pole is not None:
        b = complex(pole)
        rep.pole_b = b
        rep.pole_C = single_pole_constant(D, b)
        j = np.arange(window[0], min(window[1], N - 1))
        rep.fitted_b = _median(a[j + 1] / a[j])
        rep.fitted_C = _median(-a[j] / b ** (j + 1))
        rep.fitted_C_printed = _median(-a[j] / b ** j)
    return rep
