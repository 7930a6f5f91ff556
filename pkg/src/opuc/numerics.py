"""Numeric plumbing shared by the rest of the package.

Circle grids and FFT based Fourier coefficients, a dense complex eigenvalue
solver (Householder reduction to Hessenberg form followed by Wilkinson-shifted
QR sweeps), partial-pivot LU determinants, Schatten norms and a few truncated
power-series helpers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

MAX_DIM = 1024


class ValidationError(ValueError):
    """Bad input: wrong shape, out-of-range parameter, invalid coefficient."""


class RangeError(ValidationError):
    pass


class NumericFailure(RuntimeError):
    """A numerical procedure did not reach its tolerance."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class EigenFailure(NumericFailure):
    pass


def max_workers():
    """Thread cap taken from OPUC_THREADS (default 1)."""
    raw = os.environ.get("OPUC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class CircleGrid:
    n_points: int = 4096

    def __post_init__(self):
        n = self.n_points
        if n < 16 or n & (n - 1):
            raise ValidationError(f"grid size must be a power of two >= 16, got {n}")

    @property
    def theta(self):
        return 2 * np.pi * np.arange(self.n_points) / self.n_points

    @property
    def points(self):
        return np.exp(1j * self.theta)

    def mean(self, samples):
        """Quadrature for the normalized integral over dtheta/2pi."""
        return np.mean(samples, axis=-1)


def fourier_coeffs(samples, k_min, k_max):
    """Map k -> (1/N) sum_j samples_j exp(-i k theta_j) for k_min <= k <= k_max."""
    samples = np.asarray(samples)
    n = samples.shape[-1]
    if max(abs(k_min), abs(k_max)) >= n / 2:
        raise RangeError(f"|k| must be < {n // 2} for a grid of {n} points")
    spec = np.fft.fft(samples) / n
    return {k: complex(spec[k % n]) for k in range(k_min, k_max + 1)}


def fourier_array(samples, k_max):
    """Coefficients c_0..c_kmax as an array (same convention as fourier_coeffs)."""
    samples = np.asarray(samples)
    n = samples.shape[-1]
    if k_max >= n / 2:
        raise RangeError(f"k_max must be < {n // 2} for a grid of {n} points")
    return np.fft.fft(samples)[: k_max + 1] / n


def synthesize(coeffs, n_points):
    """Inverse of fourier_coeffs: sum_k c_k exp(i k theta_j) on the grid."""
    spec = np.zeros(n_points, dtype=complex)
    for k, c in coeffs.items():
        spec[k % n_points] += c
    return np.fft.ifft(spec) * n_points


# ---------------------------------------------------------------------------
# dense linear algebra


def _as_square(M):
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] > MAX_DIM:
        raise ValidationError(f"dimension {A.shape[0]} exceeds cap {MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    return A


def hessenberg(M):
    """Unitary similarity to upper Hessenberg form by Householder reflections."""
    A = _as_square(M)
    n = A.shape[0]
    tiny = np.finfo(float).tiny
    for k in range(n - 2):
        x = A[k + 1:, k]
        scale = np.abs(x).max() if x.size else 0.0
        if scale < tiny:
            # subnormal or zero column: already reduced to working precision
            A[k + 1:, k] = 0.0
            continue
        v = x / scale
        alpha = np.linalg.norm(v)
        phase = v[0] / abs(v[0]) if abs(v[0]) >= tiny else 1.0
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        A[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ A[k + 1:, k:])
        A[:, k + 1:] -= 2.0 * np.outer(A[:, k + 1:] @ v, v.conj())
        A[k + 2:, k] = 0.0
    return A


def _wilkinson(a, b, c, d):
    tr_half = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = tr_half + disc, tr_half - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_sweep(B, mu):
    m = B.shape[0]
    idx = np.arange(m)
    B[idx, idx] -= mu
    rots = []
    for k in range(m - 1):
        a, b = B[k, k], B[k + 1, k]
        big = max(abs(a), abs(b))
        if big < np.finfo(float).tiny:
            c, s = 1.0, 0.0
        else:
            a, b = a / big, b / big
            r = np.hypot(abs(a), abs(b))
            c, s = a / r, b / r
        rows = B[k:k + 2, k:]
        top = c.conjugate() * rows[0] + np.conj(s) * rows[1]
        bot = -s * rows[0] + c * rows[1]
        rows[0], rows[1] = top, bot
        rots.append((c, s))
    for k, (c, s) in enumerate(rots):
        hi = min(k + 3, m)
        cols = B[:hi, k:k + 2]
        left = c * cols[:, 0] + s * cols[:, 1]
        right = -np.conj(s) * cols[:, 0] + np.conj(c) * cols[:, 1]
        cols[:, 0], cols[:, 1] = left, right
    B[idx, idx] += mu


def eig_dense(M, max_iter=None):
    """Eigenvalues (with multiplicity) of a dense complex matrix.

    Raises EigenFailure, with the eigenvalues found so far in ``partial``,
    if the iteration cap is hit.
    """
    H = hessenberg(M)
    n = H.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    eps = np.finfo(float).eps
    if max_iter is None:
        max_iter = 40 * n + 40
    found = np.zeros(n, dtype=complex)
    hi = n - 1
    its = 0
    since_deflate = 0
    while hi >= 0:
        if hi == 0:
            found[0] = H[0, 0]
            break
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            scale = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if scale == 0.0:
                scale = np.abs(H[: hi + 1, : hi + 1]).max()
            if sub <= eps * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            found[hi] = H[hi, hi]
            hi -= 1
            since_deflate = 0
            continue
        if its >= max_iter:
            raise EigenFailure(
                f"QR iteration did not converge in {max_iter} sweeps",
                partial=found[hi + 1:].copy(),
            )
        its += 1
        since_deflate += 1
        if since_deflate % 11 == 0:
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1]) * np.exp(1j * since_deflate)
        else:
            mu = _wilkinson(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        _qr_sweep(H[lo:hi + 1, lo:hi + 1], mu)
    return found


def det_lu(M):
    """Determinant by Gaussian elimination with partial pivoting."""
    A = _as_square(M)
    n = A.shape[0]
    det = 1.0 + 0.0j
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        piv = A[p, k]
        if piv == 0:
            return 0.0j
        if p != k:
            A[[k, p]] = A[[p, k]]
            det = -det
        det *= piv
        if k + 1 < n:
            l = A[k + 1:, k] / piv
            A[k + 1:, k + 1:] -= np.outer(l, A[k, k + 1:])
    return complex(det)


def schatten_norm(M, p):
    """Schatten p-norm; p = np.inf gives the operator norm."""
    s = np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s ** p) ** (1.0 / p))


def match_multisets(a, b):
    """Max distance between two equal-size point sets under the best pairing."""
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValidationError("multisets differ in size")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


# ---------------------------------------------------------------------------
# truncated power series (coefficient arrays, ascending powers)


def series_mul(a, b, n):
    return np.convolve(a[:n], b[:n])[:n]


def series_div(num, den, n):
    src = np.asarray(num, dtype=complex)[:n]
    num = np.zeros(n, dtype=complex)
    num[: len(src)] = src
    den = np.asarray(den, dtype=complex)
    if den[0] == 0:
        raise ValidationError("series division by a series vanishing at 0")
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        m = min(k, len(den) - 1)
        acc = num[k] - np.dot(den[1:m + 1], out[k - 1::-1][:m]) if m else num[k]
        out[k] = acc / den[0]
    return out


def series_exp(h, n):
    """exp of a power series h (h[0] may be nonzero)."""
    h = np.pad(np.asarray(h, dtype=complex)[:n], (0, max(0, n - len(h))))
    g = np.zeros(n, dtype=complex)
    g[0] = np.exp(h[0])
    kh = np.arange(n) * h
    for k in range(1, n):
        g[k] = np.dot(kh[1:k + 1], g[k - 1::-1]) / k
    return g


def horner(coeffs, z):
    """Evaluate sum_k coeffs[k] z^k (vectorized over z)."""
    return np.polyval(np.asarray(coeffs)[::-1], z)
