"""CMV matrices in LM-factored form and the identities built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import ValidationError, det_lu, eig_dense, schatten_norm
from .szego import (
    VerblunskySeq,
    as_alphas,
    check_alphas,
    monic,
    ortho_values,
    rhos,
    support_length,
)


def theta_block(alpha):
    """The 2×2 unitary [[conj α, ρ], [ρ, -α]]."""
    rho = np.sqrt(max(0.0, 1.0 - abs(alpha) ** 2))
    return np.array([[np.conj(alpha), rho], [rho, -alpha]], dtype=complex)


def _factor(alpha_at, g0, size, parity):
    """Block-diagonal factor on global indices g0..g0+size-1.

    Blocks Θ_g sit on (g, g+1) for every g of the given parity; blocks that
    stick out of the window are cut.
    """
    F = np.zeros((size, size), dtype=complex)
    start = g0 if (g0 % 2) == parity else g0 - 1
    for g in range(start, g0 + size, 2):
        th = theta_block(alpha_at(g))
        for r in range(2):
            for c in range(2):
                i, j = g - g0 + r, g - g0 + c
                if 0 <= i < size and 0 <= j < size:
                    F[i, j] = th[r, c]
    return F


def _window(alpha_at, g0, size):
    L = _factor(alpha_at, g0, size, 0)
    M = _factor(alpha_at, g0, size, 1)
    return L, M


def _half_line_alpha(a):
    def at(g):
        if g == -1:
            return -1.0
        if g < 0 or g >= len(a):
            return 0.0
        return a[g]

    return at


def truncated_cmv(alphas, n):
    """Top-left n×n block C^(n) of the half-line CMV matrix."""
    a = as_alphas(alphas, n + 2)
    L, M = _window(_half_line_alpha(a), 0, n + 2)
    return (L @ M)[:n, :n]


def unitary_cmv(alphas, n, last=1.0):
    """n×n unitary CMV matrix: α_0..α_{n-2} followed by a unimodular α_{n-1}."""
    if abs(abs(last) - 1.0) > 1e-12:
        raise ValidationError("boundary coefficient must be unimodular")
    a = np.zeros(n + 2, dtype=complex)
    a[: n - 1] = as_alphas(alphas, n - 1)
    a[n - 1] = last
    L, M = _window(_half_line_alpha(a), 0, n + 2)
    return (L @ M)[:n, :n]


def periodized_cmv(alphas_p, beta):
    """Floquet fiber E_p(β) = L_p M_p(β) for an even period p."""
    a = check_alphas(np.asarray(alphas_p, dtype=complex))
    p = len(a)
    if p < 2 or p % 2:
        raise ValidationError("periodized CMV needs an even period >= 2")
    rho = rhos(a)
    L = np.zeros((p, p), dtype=complex)
    for j in range(0, p, 2):
        L[j:j + 2, j:j + 2] = theta_block(a[j])
    M = np.zeros((p, p), dtype=complex)
    for j in range(1, p - 2, 2):
        M[j:j + 2, j:j + 2] = theta_block(a[j])
    M[0, 0] = -a[p - 1]
    M[0, p - 1] += rho[p - 1] / beta
    M[p - 1, 0] += rho[p - 1] * beta
    M[p - 1, p - 1] = np.conj(a[p - 1])
    return L @ M, L, M


@dataclass
class CMVOperator:
    """CMV operator stored as its two block-diagonal factors.

    L and M may be padded beyond the window; the operator is the n×n block of
    L M starting at index ``lo``.
    """

    variant: str
    alphas: np.ndarray
    n: int
    L: np.ndarray = field(repr=False)
    M: np.ndarray = field(repr=False)
    lo: int = 0
    beta: Optional[complex] = None
    offset: int = 0

    @property
    def matrix(self):
        s = slice(self.lo, self.lo + self.n)
        return (self.L @ self.M)[s, s]

    def apply(self, v):
        w = np.zeros(self.L.shape[0], dtype=complex)
        w[self.lo:self.lo + self.n] = v
        return (self.L @ (self.M @ w))[self.lo:self.lo + self.n]

    def dump(self):
        C = self.matrix
        return {
            "variant": self.variant,
            "n": self.n,
            "offset": self.offset,
            "beta": None if self.beta is None else [self.beta.real, self.beta.imag],
            "alphas": [[z.real, z.imag] for z in self.alphas],
            "matrix_re": C.real.tolist(),
            "matrix_im": C.imag.tolist(),
        }


def build_cmv(alphas, n, variant="half", beta=None, offset=0, left=None):
    """CMV operator of dimension n.

    variant "half": truncation C^(n); "unitary": C^(n) closed off by a
    unimodular last coefficient; "extended": window offset..offset+n-1 of the
    two-sided operator (α_j for j < 0 from ``left`` = (α_{-1}, α_{-2}, ...),
    or from the period for periodic sequences); "periodized": E_p(β) with
    p = n.
    """
    if variant == "periodized":
        if beta is None:
            raise ValidationError("periodized variant needs beta")
        a = as_alphas(alphas, n)
        _, L, M = periodized_cmv(a, beta)
        return CMVOperator("periodized", a, n, L, M, beta=complex(beta))
    if variant in ("half", "unitary"):
        a = as_alphas(alphas, n + 2)
        if variant == "unitary":
            a = a.copy()
            a[n - 1] = 1.0
        L, M = _window(_half_line_alpha(a), 0, n + 2)
        return CMVOperator(variant, a[:n], n, L, M)
    if variant == "extended":
        right = as_alphas(alphas, max(0, offset + n + 2))
        period = alphas.period if isinstance(alphas, VerblunskySeq) else None
        base = alphas.take(period) if period else None
        lft = np.asarray(left if left is not None else [], dtype=complex)

        def at(g):
            if g >= 0:
                return right[g] if g < len(right) else 0.0
            if period:
                return base[g % period]
            k = -g - 1
            return lft[k] if k < len(lft) else 0.0

        L, M = _window(at, offset - 2, n + 4)
        a = np.array([at(g) for g in range(offset, offset + n)], dtype=complex)
        return CMVOperator("extended", a, n, L, M, lo=2, offset=offset)
    raise ValidationError(f"unknown CMV variant {variant!r}")


# ---------------------------------------------------------------------------
# identities


def char_poly_check(alphas, n, zs):
    """max |det(z - C^(n)) - Φ_n(z)| / max(1, |z|^n) over the sample points."""
    C = truncated_cmv(alphas, n)
    P = monic(alphas, n)
    worst = 0.0
    for z in np.atleast_1d(zs):
        d = det_lu(z * np.eye(n) - C)
        worst = max(worst, abs(d - P(z)) / max(1.0, abs(z) ** n))
    return worst


def schatten_distance(alphas, betas, p, truncation=None):
    """‖C(α) - C(β)‖_p and the bound 6 (Σ|α_j-β_j|^p + |ρ_j-σ_j|^p)^{1/p}."""
    la, lb = support_length(alphas), support_length(betas)
    if la is None or lb is None:
        if truncation is None:
            raise ValidationError("infinite sequences need an explicit truncation")
        la = lb = truncation
    T = truncation or (max(la, lb) + 4)
    a, b = as_alphas(alphas, T), as_alphas(betas, T)
    diff = truncated_cmv(a, T) - truncated_cmv(b, T)
    lhs = schatten_norm(diff, p)
    da = np.abs(a - b)
    dr = np.abs(rhos(a) - rhos(b))
    if np.isinf(p):
        rhs = 6.0 * max(da.max(initial=0.0), dr.max(initial=0.0))
    else:
        rhs = 6.0 * (np.sum(da ** p) + np.sum(dr ** p)) ** (1.0 / p)
    return lhs, rhs


@dataclass
class CesaroTable:
    k: np.ndarray
    zero_moments: np.ndarray
    trace_moments: np.ndarray
    cesaro_moments: np.ndarray
    other_cesaro: Optional[np.ndarray] = None

    @property
    def trace_vs_zeros(self):
        return float(np.abs(self.zero_moments - self.trace_moments).max())

    @property
    def zeros_vs_cesaro(self):
        return np.abs(self.zero_moments - self.cesaro_moments)

    @property
    def cesaro_difference(self):
        if self.other_cesaro is None:
            return None
        return np.abs(self.cesaro_moments - self.other_cesaro)


def _cesaro(alphas, n, k_max):
    C = truncated_cmv(alphas, n + 2 * k_max + 2)
    out = []
    P = np.eye(C.shape[0], dtype=complex)
    for _ in range(k_max):
        P = P @ C
        out.append(np.trace(P[:n, :n]) / n)
    return np.array(out)


def zeros_vs_cesaro(alphas, n, k_max=4, betas=None):
    """Moments of the zero counting measure of Φ_n three ways: from the zeros,
    from traces of powers of C^(n), and from Cesàro averages of diagonal
    entries of powers of the full C."""
    from .szego import zeros

    zs = zeros(alphas, n)
    Cn = truncated_cmv(alphas, n)
    ks = np.arange(1, k_max + 1)
    zero_m = np.array([np.mean(zs ** k) for k in ks])
    tr = []
    P = np.eye(n, dtype=complex)
    for _ in ks:
        P = P @ Cn
        tr.append(np.trace(P) / n)
    other = _cesaro(betas, n, k_max) if betas is not None else None
    return CesaroTable(ks, zero_m, np.array(tr), _cesaro(alphas, n, k_max), other)


# ---------------------------------------------------------------------------
# resolvent


def _weyl_pair(a, L, z, F, m_max):
    """(v_m, u_m) = (F φ_m + ψ_m, F φ_m* - ψ_m*) for m = 0..m_max.

    Past the support the decaying solution has u_m = 0 and v_m = z v_{m-1};
    imposing that exactly keeps the large odd-index terms from amplifying
    rounding noise.
    """
    v = np.zeros(m_max + 1, dtype=complex)
    u = np.zeros(m_max + 1, dtype=complex)
    v[0], u[0] = F + 1.0, F - 1.0
    rho = rhos(a)
    for m in range(m_max):
        if m >= L:
            v[m + 1] = z * v[m]
            u[m + 1] = 0.0
        else:
            v[m + 1] = (z * v[m] - np.conj(a[m]) * u[m]) / rho[m]
            u[m + 1] = (u[m] - a[m] * z * v[m]) / rho[m]
    if L <= m_max:
        u[L:] = 0.0
    return v, u


def resolvent_matrix(alphas, z, size):
    """[(C - z)^{-1}]_{kl} for k, l < size from the closed form in terms of
    the CMV bases, the second-kind bases and the Carathéodory function."""
    from .schur import schur_from_gammas

    L = support_length(alphas)
    if L is None:
        raise ValidationError("closed-form resolvent needs finitely supported coefficients")
    z = complex(z)
    if not 0 < abs(z) < 1:
        raise ValidationError("resolvent point must satisfy 0 < |z| < 1")
    a = as_alphas(alphas, max(L, size) + 1)
    f = schur_from_gammas(a[:L], z)
    F = (1 + z * f) / (1 - z * f)
    phi, phs = ortho_values(a, size, z)
    v, u = _weyl_pair(a, L, z, F, size)
    idx = np.arange(size)
    half = (idx + 1) // 2
    even = idx % 2 == 0
    chi = np.where(even, z ** (-half) * phs[idx], z ** (-half + 1) * phi[idx])
    x = np.where(even, z ** (-half) * phi[idx], z ** (-half) * phs[idx])
    pk = np.where(even, z ** (-half) * v[idx], z ** (-half) * u[idx])
    pil = np.where(even, z ** (-half) * u[idx], z ** (-half + 1) * v[idx])
    K, Lx = np.meshgrid(idx, idx, indexing="ij")
    lower = (K > Lx) | ((K == Lx) & ~even[K])
    G = np.where(lower, chi[None, :] * pk[:, None], pil[None, :] * x[:, None])
    return G / (2 * z)


def resolvent_entry(alphas, z, k, l):
    return complex(resolvent_matrix(alphas, z, max(k, l) + 1)[k, l])


def resolvent_residual(alphas, z, size=256, margin=4):
    """max |((C - z) G - I)_{kl}| over k, l < size - margin."""
    G = resolvent_matrix(alphas, z, size)
    C = truncated_cmv(alphas, size)
    R = (C - z * np.eye(size)) @ G - np.eye(size)
    m = size - margin
    return float(np.abs(R[:m, :m]).max())


# ---------------------------------------------------------------------------
# rank-two perturbations


def _cara_block(U, Q, z):
    n = U.shape[0]
    X = np.linalg.solve(U - z * np.eye(n), Q)
    return Q.conj().T @ (U + z * np.eye(n)) @ X


def _schur_block(G, z):
    I = np.eye(G.shape[0])
    return np.linalg.solve(G + I, G - I) / z


def rank_two_check(U, Q, Lam, zs):
    """Compare g for V = U(1-P) + UΛP against Λ^{-1} g_0, P = QQ*.

    Returns the sup over z of the operator-norm difference.
    """
    U = np.asarray(U, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    Lam = np.asarray(Lam, dtype=complex)
    P = Q @ Q.conj().T
    V = U @ (np.eye(U.shape[0]) - P) + U @ Q @ Lam @ Q.conj().T
    worst = 0.0
    Linv = np.linalg.inv(Lam)
    for z in np.atleast_1d(zs):
        g = _schur_block(_cara_block(V, Q, z), z)
        g0 = _schur_block(_cara_block(U, Q, z), z)
        worst = max(worst, np.linalg.norm(g - Linv @ g0, 2))
    return float(worst)


# ---------------------------------------------------------------------------
# wave operators and gap tests


def wave_operator_diag(alphas, n_max, vector=None, step=8, size=None):
    """‖(C^n C_0^{-n} - C^{n+m} C_0^{-(n+m)}) v‖ for n = 1..n_max, m = step.

    Uses unitary completions large enough that the boundary is never reached.
    """
    need = 4 * (n_max + step) + 8
    L = support_length(alphas)
    T = size or (need + (L or 0))
    if T < need:
        raise ValidationError(f"truncation {T} too small; need >= {need}")
    C = unitary_cmv(alphas, T)
    C0 = unitary_cmv(np.zeros(0), T)
    v = np.zeros(T, dtype=complex)
    if vector is None:
        v[0] = 1.0
    else:
        vec = np.asarray(vector, dtype=complex)
        v[: len(vec)] = vec
    C0h = C0.conj().T
    w = [v]
    for _ in range(n_max + step):
        w.append(C0h @ w[-1])
    out = []
    for n in range(1, n_max + 1):
        a = np.linalg.matrix_power(C, n) @ w[n]
        b = np.linalg.matrix_power(C, n + step) @ w[n + step]
        out.append(np.linalg.norm(a - b))
    return np.array(out)


def wave_packet(alphas, theta0, length, taper=True):
    """Approximate eigenvector at e^{iθ0}: conj χ_j(e^{iθ0}) with a smooth window."""
    z = np.exp(1j * theta0)
    phi, phs = ortho_values(alphas, length, z)
    idx = np.arange(length)
    half = (idx + 1) // 2
    chi = np.where(idx % 2 == 0, z ** (-half) * phs[idx], z ** (-half + 1) * phi[idx])
    w = np.sin(np.pi * (idx + 1) / (length + 1)) ** 2 if taper else np.ones(length)
    return np.conj(chi) * w


@dataclass
class GapCertificate:
    violated: bool
    min_value: float
    witness: Optional[int]
    values: np.ndarray


def gap_certificate(alphas, theta0, eps, vectors):
    """Evaluate Re(e^{-iθ0}<ψ,(e^{iθ0} - C)ψ>) - 2 sin²(ε/2)‖ψ‖² per trial vector.

    A negative value certifies spectrum inside the arc (θ0 - ε, θ0 + ε).
    """
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    m = max(len(v) for v in vecs)
    C = truncated_cmv(alphas, m)
    vals = []
    for v in vecs:
        psi = np.zeros(m, dtype=complex)
        psi[: len(v)] = v
        nrm = np.vdot(psi, psi).real
        form = nrm - np.exp(-1j * theta0) * np.vdot(psi, C @ psi)
        vals.append(form.real - 2 * np.sin(eps / 2) ** 2 * nrm)
    vals = np.array(vals)
    bad = np.flatnonzero(vals < 0)
    return GapCertificate(bool(bad.size), float(vals.min()), int(bad[0]) if bad.size else None, vals)
