"""Szegő recursion: monic and orthonormal polynomials, second-kind polynomials,
transfer matrices, zeros and the rotation density of arg Φ_n on the circle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import CircleGrid, RangeError, ValidationError, eig_dense, horner

ALPHA_BOUND = 1.0 - 1e-12


class InvalidCoefficientError(ValidationError):
    pass


@dataclass(frozen=True)
class VerblunskySeq:
    """Coefficients α_0, α_1, ... as a finite prefix plus a tail rule.

    tail is "zeros" (α_j = 0 past the prefix), "periodic" (the prefix is one
    period, repeated) or "generator" (``generator(n)`` returns α_0..α_{n-1}).
    """

    prefix: tuple = ()
    tail: str = "zeros"
    generator: Optional[Callable] = field(default=None, compare=False)
    model: Optional[dict] = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(complex(a) for a in self.prefix))
        if self.tail not in ("zeros", "periodic", "generator"):
            raise ValidationError(f"unknown tail {self.tail!r}")
        if self.tail == "periodic" and not self.prefix:
            raise ValidationError("periodic tail needs a non-empty period")
        if self.tail == "generator" and self.generator is None:
            raise ValidationError("generator tail needs a generator")
        check_alphas(np.array(self.prefix, dtype=complex))

    @property
    def period(self):
        return len(self.prefix) if self.tail == "periodic" else None

    def take(self, n):
        n = int(n)
        if self.tail == "generator":
            out = np.asarray(self.generator(n), dtype=complex)[:n]
            if len(out) < n:
                raise ValidationError(f"generator produced {len(out)} < {n} coefficients")
            return check_alphas(out)
        pre = np.array(self.prefix, dtype=complex)
        if self.tail == "periodic":
            return np.resize(pre, n) if n else pre[:0]
        out = np.zeros(n, dtype=complex)
        m = min(n, len(pre))
        out[:m] = pre[:m]
        return out

    def shifted(self, k=1):
        """The sequence α_k, α_{k+1}, ..."""
        if self.tail == "generator":
            gen = self.generator
            return VerblunskySeq(tail="generator", generator=lambda n: gen(n + k)[k:], model=self.model)
        if self.tail == "periodic":
            p = len(self.prefix)
            rot = self.prefix[k % p:] + self.prefix[: k % p]
            return VerblunskySeq(rot, "periodic", model=self.model)
        return VerblunskySeq(self.prefix[k:], "zeros", model=self.model)

    def support_length(self):
        """Length of the finite support, or None for infinite tails."""
        if self.tail != "zeros":
            return None
        nz = np.flatnonzero(np.array(self.prefix, dtype=complex))
        return int(nz[-1]) + 1 if nz.size else 0


def check_alphas(a):
    a = np.asarray(a, dtype=complex)
    if a.size and not np.all(np.isfinite(a)):
        raise InvalidCoefficientError("non-finite Verblunsky coefficient")
    if a.size and np.abs(a).max() > ALPHA_BOUND:
        j = int(np.argmax(np.abs(a)))
        raise InvalidCoefficientError(f"|alpha_{j}| = {abs(a[j]):.17g} is not < 1")
    return a


def as_alphas(alphas, n):
    """First n coefficients of a VerblunskySeq or array-like (zero padded)."""
    if isinstance(alphas, VerblunskySeq):
        return alphas.take(n)
    a = check_alphas(np.atleast_1d(np.asarray(alphas, dtype=complex)))
    out = np.zeros(n, dtype=complex)
    m = min(n, len(a))
    out[:m] = a[:m]
    return out


def support_length(alphas):
    if isinstance(alphas, VerblunskySeq):
        return alphas.support_length()
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))
    nz = np.flatnonzero(a)
    return int(nz[-1]) + 1 if nz.size else 0


def rhos(a):
    return np.sqrt(1.0 - np.abs(a) ** 2)


@dataclass(frozen=True)
class CirclePolynomial:
    coeffs: np.ndarray
    kind: str = "monic"

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        return horner(self.coeffs, z)

    def derivative(self):
        c = self.coeffs
        return CirclePolynomial(c[1:] * np.arange(1, len(c)), "derivative")


def star(P):
    """P*(z) = z^n conj(P(1/conj z)): conjugate and reverse the coefficients."""
    kind = P.kind[:-5] if P.kind.endswith(" star") else P.kind + " star"
    return CirclePolynomial(np.conj(np.asarray(P.coeffs, dtype=complex))[::-1], kind)


@dataclass
class SzegoPolys:
    alphas: np.ndarray
    Phi: list
    Phi_star: list
    phi: list
    psi: list
    norms2: np.ndarray

    @property
    def phi_star(self):
        return [star(p) for p in self.phi]

    @property
    def psi_star(self):
        return [star(p) for p in self.psi]


def _monic_family(a):
    n = len(a)
    Phi = [np.ones(1, dtype=complex)]
    for k in range(n):
        P = Phi[-1]
        nxt = np.zeros(k + 2, dtype=complex)
        nxt[1:] = P
        nxt[: k + 1] -= np.conj(a[k]) * np.conj(P[::-1])
        Phi.append(nxt)
    return Phi


def norms(alphas, n):
    """‖Φ_k‖², k = 0..n, as the running product of 1 - |α_j|²."""
    a = as_alphas(alphas, n)
    return np.concatenate([[1.0], np.cumprod(1.0 - np.abs(a) ** 2)])


def szego_polys(alphas, n):
    a = as_alphas(alphas, n)
    Phi = _monic_family(a)
    Psi = _monic_family(-a)
    nn = norms(a, n)
    root = np.sqrt(nn)
    return SzegoPolys(
        alphas=a,
        Phi=[CirclePolynomial(c, "monic") for c in Phi],
        Phi_star=[CirclePolynomial(np.conj(c[::-1]), "monic star") for c in Phi],
        phi=[CirclePolynomial(c / r, "orthonormal") for c, r in zip(Phi, root)],
        psi=[CirclePolynomial(c / r, "second kind") for c, r in zip(Psi, root)],
        norms2=nn,
    )


def monic(alphas, n):
    return CirclePolynomial(_monic_family(as_alphas(alphas, n))[-1], "monic")


def ortho_values(alphas, n, z, second_kind=False):
    """Values of φ_k(z), φ_k*(z) for k = 0..n, each of shape (n+1,) + z.shape.

    With second_kind=True the recursion runs on -α, giving ψ_k and ψ_k*.
    """
    a = as_alphas(alphas, n)
    if second_kind:
        a = -a
    z = np.asarray(z, dtype=complex)
    rho = rhos(a)
    phi = np.empty((n + 1,) + z.shape, dtype=complex)
    phs = np.empty_like(phi)
    phi[0] = 1.0
    phs[0] = 1.0
    for k in range(n):
        phi[k + 1] = (z * phi[k] - np.conj(a[k]) * phs[k]) / rho[k]
        phs[k + 1] = (phs[k] - a[k] * z * phi[k]) / rho[k]
    return phi, phs


@dataclass(frozen=True)
class TransferMatrix:
    matrix: np.ndarray
    n: int
    z: complex

    @property
    def det(self):
        T = self.matrix
        return complex(T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0])


def step_matrix(alpha, z):
    rho = np.sqrt(1.0 - abs(alpha) ** 2)
    return np.array([[z, -np.conj(alpha)], [-alpha * z, 1.0]], dtype=complex) / rho


def transfer(alphas, n, z):
    a = as_alphas(alphas, n)
    T = np.eye(2, dtype=complex)
    for k in range(n):
        T = step_matrix(a[k], z) @ T
    return TransferMatrix(T, n, complex(z))


def _backward_error(coeffs, zs):
    num = np.abs(horner(coeffs, zs))
    den = horner(np.abs(coeffs), np.abs(zs))
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def _aberth(coeffs, z0, iters=200):
    dcoeffs = coeffs[1:] * np.arange(1, len(coeffs))
    z = np.array(z0, dtype=complex)
    for _ in range(iters):
        p = horner(coeffs, z)
        dp = horner(dcoeffs, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            corr = w / (1.0 - w * np.sum(1.0 / diff, axis=1))
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.all(np.abs(corr) <= 1e-15 * np.maximum(np.abs(z), 1e-300)):
            break
    return z


def zeros(alphas, n, polish=True):
    """Zeros of Φ_n as eigenvalues of the n×n truncated CMV matrix.

    The eigenvalues are checked against the monic coefficients through a
    componentwise backward error; when that is poor (strongly non-normal
    truncations) a simultaneous Aberth iteration started from the eigenvalues
    refines them.
    """
    from .cmv import truncated_cmv

    a = as_alphas(alphas, n)
    if n == 0:
        return np.zeros(0, dtype=complex)
    ev = eig_dense(truncated_cmv(a, n))
    if not polish:
        return ev
    coeffs = _monic_family(a)[-1]
    err = _backward_error(coeffs, ev).max()
    if err <= 1e-10:
        return ev
    refined = _aberth(coeffs, ev)
    if _backward_error(coeffs, refined).max() < err:
        return refined
    return ev


@dataclass
class RotationReport:
    theta: np.ndarray
    density: np.ndarray
    poisson_side: np.ndarray
    identity_gap: float
    integral: float
    total_argument: float
    min_increment: float


def rotation_density(alphas, n, grid=None):
    """Density (1/2πn) d arg Φ_n(e^{iθ})/dθ against ½·(averaged Poisson kernel
    of the zeros) + ½·(1/2π)."""
    grid = grid or CircleGrid()
    if n < 1:
        raise ValidationError("n must be >= 1")
    N = grid.n_points
    if N < 64 * n:
        raise RangeError(f"grid of {N} points too coarse for degree {n} (need >= {64 * n})")
    a = as_alphas(alphas, n)
    P = monic(a, n)
    z = grid.points
    vals = P(z)
    dvals = P.derivative()(z)
    inc = np.angle(np.roll(vals, -1) / vals)
    if np.abs(inc).max() >= np.pi / 2:
        raise RangeError("phase step per grid cell reaches pi/2; refine the grid")
    darg = np.real(z * dvals / vals)
    density = darg / (2 * np.pi * n)
    zs = zeros(a, n)
    r = np.abs(zs)[:, None]
    phase = np.angle(zs)[:, None]
    th = grid.theta[None, :]
    kern = (1 - r ** 2) / (1 + r ** 2 - 2 * r * np.cos(th - phase))
    poisson = kern.mean(axis=0) / (2 * np.pi)
    side = 0.5 * poisson + 0.5 / (2 * np.pi)
    return RotationReport(
        theta=grid.theta,
        density=density,
        poisson_side=side,
        identity_gap=float(np.abs(density - side).max()),
        integral=float(2 * np.pi * density.mean()),
        total_argument=float(inc.sum()),
        min_increment=float(inc.min()),
    )
