"""Named self-check suites, one per verified identity, runnable from the CLI."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from .numerics import CircleGrid


@dataclass
class Assertion:
    suite: str
    name: str
    value: float
    limit: float
    passed: bool
    seconds: float = 0.0


def _random_alphas(rng, n, bound=0.8):
    return bound * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def _le(suite, name, value, limit):
    value = float(value)
    return Assertion(suite, name, value, float(limit), bool(value <= limit))


def _ge(suite, name, value, limit):
    value = float(value)
    return Assertion(suite, name, value, float(limit), bool(value >= limit))


def det_identity(seed=101):
    from .cmv import char_poly_check

    rng = np.random.default_rng(seed)
    zs = 2 * np.exp(2j * np.pi * np.arange(64) / 64)
    worst = max(char_poly_check(_random_alphas(rng, n), n, zs) for n in range(1, 13))
    return [_le("det-identity", "max |det(z-C)-Phi_n|/|z|^n on |z|=2", worst, 1e-9)]


def geronimus(seed=102):
    from .measures import resolving_grid
    from .numerics import ValidationError
    from .schur import geronimus_report

    rng = np.random.default_rng(seed)
    a = _random_alphas(rng, 8)
    out = []
    for label, grid in (("grid 4096", CircleGrid(4096)), ("resolving grid", resolving_grid(a, 8))):
        try:
            err = geronimus_report(a, 8, grid).max_error
        except ValidationError:
            err = np.inf
        out.append(_le("geronimus", f"max |gamma_j - alpha_j|, {label}", err, 1e-6))
    return out


def sum_rules(seed=103):
    from .measures import higher_sum_rule_report, sum_rule_report

    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in range(1, 11):
        rep = sum_rule_report(_random_alphas(rng, n), n)
        worst = max(worst, abs(rep.ratio - 1))
    out = [_le("sum-rules", "Szego sum rule relative error, n <= 10", worst, 1e-8)]
    single = higher_sum_rule_report([0.5], 1, CircleGrid(8192))
    out.append(_le("sum-rules", "single alpha_0 = 0.5: validated form relative error",
                   abs(single.validated_ratio - 1), 1e-6))
    out.append(_ge("sum-rules", "single alpha_0 = 0.5: printed form relative error (must be large)",
                   abs(single.printed_ratio - 1), 1e-3))
    worst = 0.0
    for _ in range(20):
        L = int(rng.integers(1, 9))
        rep = higher_sum_rule_report(_random_alphas(rng, L, 0.7), L, CircleGrid(8192))
        worst = max(worst, abs(rep.validated_ratio - 1))
    out.append(_le("sum-rules", "higher-order sum rule, 20 sequences", worst, 1e-6))
    return out


def moment_round_trip(seed=105):
    from .measures import measure_from_alphas
    from .schur import alphas_from_moments, moments

    rng = np.random.default_rng(seed)
    a = _random_alphas(rng, 8)
    back = alphas_from_moments(moments(measure_from_alphas(a, 8), 8), 8)
    return [_le("moments", "alpha -> moments -> alpha", np.abs(back - a).max(), 1e-8)]


def periodized(seed=106):
    from .periodic import periodized_det_check

    rng = np.random.default_rng(seed)
    out = []
    for p in (2, 4, 6):
        rep = periodized_det_check(_random_alphas(rng, p), np.exp(2j * np.pi * rng.random(20)))
        out.append(_le("periodized", f"p={p}: eigenvalues vs roots of Delta = beta + 1/beta", rep.max_mismatch, 1e-8))
        out.append(_le("periodized", f"p={p}: prefactor equals prod rho_j", rep.prefactor_error, 1e-10))
    return out


def bands_doubled():
    from .periodic import bands, period_double

    bs = bands(period_double([0.5]))
    out = [_le("bands", "total band measure vs 2pi - 4 arcsin 0.5",
               abs(bs.total_measure - (2 * np.pi - 4 * np.arcsin(0.5))), 1e-6)]
    out.append(_le("bands", "band masses vs 1/p", max(abs(m - 0.5) for m in bs.masses), 1e-6))
    return out


def trace():
    from .measures import measure_from_alphas
    from .szegofn import szego_D, trace_w

    D = szego_D(measure_from_alphas([0.5], 1))
    ns = np.arange(1, 9)
    exact = 0.5 ** ns / ns
    four = max(abs(D.w[n] - e) for n, e in zip(ns, exact))
    tr = max(abs(trace_w([0.5], int(n)) - e) for n, e in zip(ns, exact))
    return [_le("trace", "Fourier route w_n", four, 1e-8), _le("trace", "trace route w_n", tr, 1e-8)]


def resolvent():
    from .cmv import resolvent_entry, resolvent_residual

    res = resolvent_residual([0.5], 0.3 + 0.2j, 256)
    z = 0.3 + 0.2j
    g00 = abs(resolvent_entry([], z, 0, 0))
    g01 = abs(resolvent_entry([], z, 0, 1) - 1)
    return [_le("resolvent", "interior residual, truncation 256", res, 1e-8),
            _le("resolvent", "alpha = 0: |G_00|", g00, 1e-12),
            _le("resolvent", "alpha = 0: |G_01 - 1|", g01, 1e-12)]


def rank_two(seed=110):
    from .cmv import rank_two_check, unitary_cmv

    rng = np.random.default_rng(seed)
    U = unitary_cmv(_random_alphas(rng, 8), 8)
    Q = np.linalg.qr(rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2)))[0]
    Lam = np.diag([np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 5)])
    zs = 0.95 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
    return [_le("rank-two", "sup ||g - Lambda^-1 g_0||", rank_two_check(U, Q, Lam, zs), 1e-10)]


def jitomirskaya_last(seed=111):
    from .analysis import jl_sandwich
    from .models import gen_random_decay

    seqs = {"zero": [0.0], "single": [0.5], "decaying": gen_random_decay(0.5, 0.7, 0, seed)}
    out = []
    for name, a in seqs.items():
        worst = np.inf
        for r in (0.5, 0.9, 0.99):
            for th in 2 * np.pi * np.arange(16) / 16:
                worst = min(worst, jl_sandwich(a, np.exp(1j * th), r).margin)
        out.append(_ge("jl", f"{name}: min sandwich margin (>= 1 holds)", worst, 1.0))
    return out


def mhaskar_saff():
    from .szego import zeros

    n = 200
    zs = zeros(0.5 ** np.arange(1, n + 1), n)
    mom = max(abs(np.mean(zs ** k)) for k in range(1, 5))
    return [_le("mhaskar-saff", "max_k |mean z^k| over zeros", mom, 0.05),
            _le("mhaskar-saff", "|mean |z| - 0.5|", abs(np.mean(np.abs(zs)) - 0.5), 0.02)]


def rotation(seed=113):
    from .szego import rotation_density

    rng = np.random.default_rng(seed)
    dev, mass = 0.0, 0.0
    for n in range(1, 9):
        rep = rotation_density(_random_alphas(rng, n), n, CircleGrid(4096))
        dev = max(dev, rep.identity_gap)
        mass = max(mass, abs(rep.total_argument - 2 * np.pi * n))
    return [_le("rotation", "sup |density - Poisson side|", dev, 1e-4),
            _le("rotation", "|total argument - 2 pi n|", mass, 1e-6)]


def isolated_point():
    from .analysis import arc_atom_measure, isolated_point_zeros

    mu, _ = arc_atom_measure(1.0, 0.6, 0.2)
    rep = isolated_point_zeros(mu, 1.0, range(5, 61))
    late = rep.counts[rep.ns >= 30]
    return [_le("isolated-point", "max |count - 1| for n >= 30", np.abs(late - 1).max(), 0),
            _le("isolated-point", "log-distance slope", rep.slope, 0.0),
            _ge("isolated-point", "zeros inside hull (1 = yes)", float(rep.in_hull), 1.0)]


def fibonacci():
    from .models import fibonacci_approximant
    from .periodic import bands

    meas = [bands(fibonacci_approximant(0.5, -0.5, k), n_nodes=16).total_measure for k in (2, 3, 4)]
    step = min(meas[0] - meas[1], meas[1] - meas[2])
    return [Assertion("fibonacci", "min decrease of total band measure (periods 2, 6, 10)",
                      float(step), 0.0, bool(step > 0))]


def borg(seed=116):
    from .periodic import borg_checks, gap_report

    rng = np.random.default_rng(seed)
    closes = 0
    for _ in range(100):
        a = _random_alphas(rng, 4, 0.9)
        if gap_report(a).all_closed and np.abs(a).max() > 1e-9:
            closes += 1
    rep = borg_checks([0.4, 0.3j, 0.4, 0.3j])
    return [_le("borg", "random period-4 draws closing every gap with alpha != 0", closes, 0),
            _le("borg", "(a,b,a,b): widest Delta = -2 gap", rep.max_directional_width, 1e-9)]


SUITES = {
    "det-identity": det_identity,
    "geronimus": geronimus,
    "sum-rules": sum_rules,
    "moments": moment_round_trip,
    "periodized": periodized,
    "bands": bands_doubled,
    "trace": trace,
    "resolvent": resolvent,
    "rank-two": rank_two,
    "jl": jitomirskaya_last,
    "mhaskar-saff": mhaskar_saff,
    "rotation": rotation,
    "isolated-point": isolated_point,
    "fibonacci": fibonacci,
    "borg": borg,
}


def run_suite(name):
    from .numerics import ValidationError

    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        if n not in SUITES:
            raise ValidationError(f"unknown suite {n!r}; choose from all, {', '.join(SUITES)}")
        t = time.perf_counter()
        res = SUITES[n]()
        dt = time.perf_counter() - t
        for r in res:
            r.seconds = dt
        out.extend(res)
    return out


def as_rows(results):
    return [asdict(r) for r in results]
