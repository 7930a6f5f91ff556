"""Coefficient families: constant, sparse, random decaying, Fibonacci, sparse
high barriers, single-pole Szegő functions, and Aleksandrov rotations."""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .numerics import ValidationError, max_workers
from .szego import VerblunskySeq, as_alphas

MAX_MODULUS = 1 - 1e-6


def _unimodular(lam, name="lambda"):
    lam = complex(lam)
    if abs(abs(lam) - 1) > 1e-12:
        raise ValidationError(f"{name} must be unimodular (|{name}| = {abs(lam):.17g})")
    return lam


# ---------------------------------------------------------------------------
# constant coefficients


@dataclass(frozen=True)
class GapArc:
    """Open arc {|arg(z/center)| < half_width}; its complement is the predicted
    essential support."""

    center: complex
    half_width: float

    @property
    def support_measure(self):
        return 2 * np.pi - 2 * self.half_width

    def in_support(self, theta):
        d = np.angle(np.exp(1j * np.asarray(theta)) / self.center)
        return np.abs(d) >= self.half_width


def gen_constant(a, lam=1.0):
    """α_n = a λ̄^{n+1}: the rotation of α ≡ a that sends the gap to λ.

    Then conj(α_{n+1}) α_n = a² λ, and the essential support is the arc
    |arg(λ̄ z)| ≥ 2 arcsin a.
    """
    a = float(a)
    if not 0 < a < 1:
        raise ValidationError("a must lie in (0, 1)")
    lam = _unimodular(lam)
    lb = np.conj(lam)

    def gen(n):
        return a * lb ** np.arange(1, n + 1)

    arc = GapArc(lam, 2 * math.asin(a))
    if lam == 1:
        seq = VerblunskySeq((a,), "periodic", model={"name": "Constant", "a": a, "lambda": [1.0, 0.0]})
    else:
        seq = VerblunskySeq(tail="generator", generator=gen,
                            model={"name": "Constant", "a": a, "lambda": [lam.real, lam.imag]})
    return seq, arc


# ---------------------------------------------------------------------------
# sparse


def _series_regime(values, start=1, l_max=64):
    """Fit |v_l|² ~ l^{-s}; s > 1 means Σ|α|² < ∞."""
    ls = np.arange(start, l_max + 1)
    v = np.abs(np.array([complex(values(int(l))) for l in ls])) ** 2
    if not v.any():
        return "zero", float("inf")
    keep = v > 0
    tail = keep & (ls >= max(start, l_max // 4))
    s = -np.polyfit(np.log(ls[tail]), np.log(v[tail]), 1)[0]
    if s > 1 + 1e-6:
        return "square-summable", float(s)
    if v[-1] < v[np.flatnonzero(tail)[0]]:
        return "divergent, tending to zero", float(s)
    return "not tending to zero", float(s)


def gen_sparse(positions, values, min_ratio=1.5, start=1):
    """α_{n_l} = v_l, zero elsewhere.

    positions and values are callables of l = start, start + 1, ... (or lists,
    indexed from l = 1). n_{l+1}/n_l must stay >= min_ratio > 1.
    """
    if min_ratio <= 1:
        raise ValidationError("min_ratio must exceed 1")
    pos = positions if callable(positions) else (lambda l, p=list(positions): p[l - 1] if l <= len(p) else None)
    val = values if callable(values) else (lambda l, v=list(values): v[l - 1] if l <= len(v) else 0.0)

    def gen(n):
        out = np.zeros(n, dtype=complex)
        prev = None
        l = start
        while True:
            nl = pos(l)
            if nl is None or nl >= n:
                break
            nl = int(nl)
            if prev is not None and (nl <= prev or nl < min_ratio * prev):
                raise ValidationError(f"sparse schedule violates n_(l+1)/n_l >= {min_ratio} at l = {l}")
            v = complex(val(l))
            if abs(v) > MAX_MODULUS:
                raise ValidationError(f"|alpha_{nl}| = {abs(v)} exceeds {MAX_MODULUS}")
            out[nl] = v
            prev = nl
            l += 1
        return out

    if callable(values):
        regime, s = _series_regime(val, start, max(64, 4 * start))
    elif len(values) >= start + 3:
        regime, s = _series_regime(val, start, len(values))
    else:
        regime, s = "finite", float("inf")
    return VerblunskySeq(tail="generator", generator=gen,
                         model={"name": "Sparse", "regime": regime, "decay_exponent": s})


# ---------------------------------------------------------------------------
# random decaying


def _phases(seed, lo, hi):
    """Phases for indices lo..hi-1: element j of the Philox stream keyed by
    seed, so each value depends on (seed, j) only."""
    bg = np.random.Philox(key=seed)
    bg.advance(lo // 4)
    raw = bg.random_raw(hi - (lo // 4) * 4)[lo % 4:]
    return 2 * np.pi * (raw >> np.uint64(11)).astype(float) * 2.0 ** -53


def gen_random_decay(Gamma, gamma, J0=0, seed=0):
    """α_j = Γ j^{-γ} e^{iφ_j} for j > J0 (zero before), φ_j uniform and
    determined by (seed, j) alone."""
    Gamma, gamma = float(Gamma), float(gamma)
    if Gamma < 0 or gamma <= 0:
        raise ValidationError("need Gamma >= 0 and gamma > 0")
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValidationError("seed must be a 64-bit unsigned integer")
    J0 = int(J0)
    if Gamma > 0:
        # smallest J with Γ j^{-γ} <= 1 - 1e-6 for all j > J
        need = math.ceil((Gamma / MAX_MODULUS) ** (1 / gamma))
        while need > 1 and Gamma * (need - 1) ** (-gamma) <= MAX_MODULUS:
            need -= 1
        while Gamma * need ** (-gamma) > MAX_MODULUS:
            need += 1
        if need - 1 > J0:
            warnings.warn(f"Gamma j^-gamma >= 1 for small j; shifting J0 from {J0} to {need - 1}")
            J0 = need - 1

    def chunk(js):
        return _phases(seed, int(js[0]), int(js[-1]) + 1)

    def gen(n):
        out = np.zeros(n, dtype=complex)
        js = np.arange(J0 + 1, n)
        if Gamma == 0 or js.size == 0:
            return out
        parts = np.array_split(js, max(1, min(max_workers(), js.size // 4096 or 1)))
        if len(parts) > 1:
            with ThreadPoolExecutor(len(parts)) as ex:
                phases = np.concatenate(list(ex.map(chunk, parts)))
        else:
            phases = chunk(js)
        out[J0 + 1:] = Gamma * js.astype(float) ** (-gamma) * np.exp(1j * phases)
        return out

    return VerblunskySeq(tail="generator", generator=gen,
                         model={"name": "RandomDecay", "Gamma": Gamma, "gamma": gamma, "J0": J0, "seed": seed})


# ---------------------------------------------------------------------------
# Fibonacci


def _floor_inv_golden(n):
    # floor(n/φ) = floor((sqrt(5n²) - n)/2), exact in integers
    return (math.isqrt(5 * n * n) - n) // 2


def fibonacci_letters(length):
    """0/1 word: 1 at j when floor((j+2)/φ) - floor((j+1)/φ) = 1 (golden rotation coding)."""
    return np.array([_floor_inv_golden(j + 2) - _floor_inv_golden(j + 1) for j in range(length)], dtype=int)


def fibonacci_word(k):
    """F_k by concatenation, F_1 = "a", F_2 = "ab", F_{k+1} = F_k F_{k-1}."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    prev, cur = "a", "ab"
    if k == 1:
        return prev
    for _ in range(k - 2):
        prev, cur = cur, cur + prev
    return cur


def gen_fibonacci(alpha, beta, length=None):
    alpha, beta = complex(alpha), complex(beta)
    if max(abs(alpha), abs(beta)) > MAX_MODULUS:
        raise ValidationError("Fibonacci letters must lie in the disk")
    if alpha == beta:
        warnings.warn("alpha == beta: the Fibonacci sequence is constant")

    def gen(n):
        return np.where(fibonacci_letters(n) == 1, alpha, beta).astype(complex)

    return VerblunskySeq(tail="generator", generator=gen,
                         model={"name": "Fibonacci", "alpha": [alpha.real, alpha.imag], "beta": [beta.real, beta.imag]})


def fibonacci_approximant(alpha, beta, k):
    """One period of the periodic approximant built from F_k (doubled when odd)."""
    from .periodic import period_double

    w = np.array([alpha if c == "a" else beta for c in fibonacci_word(k)], dtype=complex)
    return period_double(w) if w.size % 2 else w


# ---------------------------------------------------------------------------
# sparse high barriers


def barrier_positions(limit, growth=None):
    """Positions L_n < limit, L_n = 2^{n^n} unless ``growth(n)`` overrides."""
    g = growth or (lambda n: 2 ** (n ** n))
    out = []
    n = 1
    while (L := int(g(n))) < limit:
        if out and L <= out[-1]:
            raise ValidationError("barrier positions must increase")
        out.append(L)
        n += 1
    return out


def gen_high_barrier(a, growth=None):
    """|α_{L_n}| = (1 - ρ²)^{1/2} with ρ = L_n^{-(1-a)/(2a)}; α_j = 0 elsewhere."""
    a = float(a)
    if not 0 < a < 1:
        raise ValidationError("a must lie in (0, 1)")
    expo = (1 - a) / (2 * a)

    def gen(n):
        out = np.zeros(n, dtype=complex)
        for L in barrier_positions(n, growth):
            rho = float(L) ** (-expo)
            out[L] = min(math.sqrt(1 - rho * rho), MAX_MODULUS)
        return out

    return VerblunskySeq(tail="generator", generator=gen, model={"name": "HighBarrier", "a": a})


# ---------------------------------------------------------------------------
# Aleksandrov rotation and the single-pole family


def aleksandrov_rotate(alphas, lam):
    lam = _unimodular(lam)
    if isinstance(alphas, VerblunskySeq):
        if alphas.tail == "generator":
            g = alphas.generator
            return VerblunskySeq(tail="generator", generator=lambda n: lam * g(n), model=alphas.model)
        return VerblunskySeq(tuple(lam * np.array(alphas.prefix)), alphas.tail, model=alphas.model)
    return VerblunskySeq(tuple(lam * as_alphas(alphas, len(np.atleast_1d(alphas)))))


def single_pole_D(b):
    """D(z) = (1 - b z)/sqrt(1 + |b|²): D^{-1} has one pole, at 1/b."""
    from .szegofn import closed_form_D

    b = complex(b)
    s = 1 + abs(b) ** 2
    m = 512
    lt = np.zeros(m, dtype=complex)
    lt[0] = -0.5 * math.log(s)
    k = np.arange(1, m)
    lt[1:] = -(b ** k) / k
    return closed_form_D(lt, func=lambda z: (1 - b * np.asarray(z)) / math.sqrt(s), source="single-pole")


@dataclass
class SinglePoleModel:
    seq: VerblunskySeq
    b: complex
    D: object = field(repr=False)
    predicted_ratio: complex
    predicted_C: complex


def gen_single_pole(b, N=80):
    """Coefficients of w = |D|² from its exact moments c_0 = 1,
    c_1 = -b/(1 + |b|²), c_k = 0 for k >= 2.

    Predicted: α_{n+1}/α_n → b and α_n ≈ -C b^{n+1} with C the pole constant.
    """
    from .schur import alphas_from_moments
    from .szegofn import single_pole_constant

    b = complex(b)
    if abs(b) >= 1:
        raise ValidationError("need |b| < 1")
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0
    c[1] = -b / (1 + abs(b) ** 2)
    a = alphas_from_moments(c, N, margin=0.0)
    D = single_pole_D(b)
    C = single_pole_constant(D, b) if b != 0 else 0j
    seq = VerblunskySeq(tuple(a), model={"name": "SinglePoleD", "b": [b.real, b.imag]})
    return SinglePoleModel(seq, b, D, b, C)


# ---------------------------------------------------------------------------
# JSON model specs


MODELS = ("Constant", "FinSupported", "SinglePoleD", "Sparse", "RandomDecay", "Fibonacci", "HighBarrier")
_PARAMS = {
    "Constant": {"a", "lambda"},
    "FinSupported": {"alphas"},
    "SinglePoleD": {"b"},
    "Sparse": {"positions", "values", "min_ratio", "start"},
    "RandomDecay": {"Gamma", "gamma", "J0"},
    "Fibonacci": {"alpha", "beta"},
    "HighBarrier": {"a", "growth_base"},
}


def parse_complex(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValidationError(f"complex value must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, dict):
        return complex(float(x.get("re", 0.0)), float(x.get("im", 0.0)))
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    return complex(x)


@dataclass
class ModelSpec:
    model: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    length: int = 64

    def __post_init__(self):
        names = {m.lower(): m for m in MODELS}
        key = str(self.model).lower().replace("_", "").replace("-", "")
        if key not in names:
            raise ValidationError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        self.model = names[key]
        extra = set(self.params) - _PARAMS[self.model]
        if extra:
            raise ValidationError(f"unknown parameters for {self.model}: {sorted(extra)}")
        if int(self.length) < 0:
            raise ValidationError("length must be >= 0")
        self.length = int(self.length)
        self.seed = int(self.seed)

    def to_json(self):
        return json.dumps({"model": self.model, "params": self.params, "seed": self.seed, "length": self.length},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text) if isinstance(text, str) else dict(text)
        extra = set(d) - {"model", "params", "seed", "length"}
        if extra:
            raise ValidationError(f"unknown ModelSpec fields: {sorted(extra)}")
        if "model" not in d:
            raise ValidationError("ModelSpec needs a model")
        return cls(d["model"], d.get("params", {}), d.get("seed", 0), d.get("length", 64))


def _sparse_rule(spec, kind):
    if isinstance(spec, list):
        return spec
    if not isinstance(spec, dict) or "rule" not in spec:
        raise ValidationError(f"sparse {kind} must be a list or a rule object")
    rule = spec["rule"]
    if kind == "positions":
        base = int(spec.get("base", 2))
        if rule == "power":
            return lambda l: base ** l
        if rule == "power_square":
            return lambda l: base ** (l * l)
    else:
        s = float(spec.get("exponent", 1.0))
        scale = float(spec.get("scale", 1.0))
        if rule == "inv_power":
            return lambda l: scale * l ** (-s)
    raise ValidationError(f"unknown sparse {kind} rule {rule!r}")


def generate(spec):
    """VerblunskySeq for a ModelSpec (coefficients via ``.take(spec.length)``)."""
    if not isinstance(spec, ModelSpec):
        spec = ModelSpec.from_json(spec)
    p = spec.params
    m = spec.model
    if m == "Constant":
        return gen_constant(p.get("a", 0.5), parse_complex(p.get("lambda", 1.0)))[0]
    if m == "FinSupported":
        return VerblunskySeq(tuple(parse_complex(x) for x in p.get("alphas", [])))
    if m == "SinglePoleD":
        return gen_single_pole(parse_complex(p.get("b", 0.5)), max(spec.length, 1)).seq
    if m == "Sparse":
        return gen_sparse(_sparse_rule(p.get("positions", {"rule": "power"}), "positions"),
                          _sparse_rule(p.get("values", {"rule": "inv_power"}), "values"),
                          float(p.get("min_ratio", 1.5)), int(p.get("start", 2)))
    if m == "RandomDecay":
        return gen_random_decay(p.get("Gamma", 0.5), p.get("gamma", 0.5), p.get("J0", 0), spec.seed)
    if m == "Fibonacci":
        return gen_fibonacci(parse_complex(p.get("alpha", 0.5)), parse_complex(p.get("beta", -0.5)))
    base = p.get("growth_base")
    return gen_high_barrier(p.get("a", 0.5), None if base is None else (lambda n, b=int(base): b ** n))
