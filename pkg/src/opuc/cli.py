"""Command line front end.

    opuc zeros --alphas 0.5 --n 1
    opuc bands --model constant --a 0.5 --doubled
    opuc check all
    opuc run --config scenario.json
    opuc <module> <operation> [flags]

Tables go to --out (default stdout) as CSV with '#' metadata lines or as JSON.
Exit status: 0 ok, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .numerics import CircleGrid, NumericFailure, ValidationError

MODULE_OPS = {
    "szego": ("zeros", "polys", "transfer", "rotation"),
    "schur": ("params", "geronimus", "khrushchev", "moments"),
    "measures": ("sum-rule", "higher-sum-rule", "relative-szego", "entropy"),
    "szegofn": ("trace", "det", "nevai-totik"),
    "cmv": ("matrix", "char-poly", "resolvent", "schatten", "cesaro"),
    "periodic": ("bands", "discriminant", "lyapunov", "capacity", "dos", "periodized", "gaps", "borg", "edge-growth"),
    "models": ("generate",),
    "analysis": ("jl", "isolated", "gap-masspoints", "trend"),
}
CONFIG_KEYS = {"command", "op", "model", "alphas", "params", "format", "out", "seed", "grid", "tol", "n",
               "z", "r", "beta", "a", "lambda", "b", "doubled", "period", "length", "suite"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _complex(text):
    t = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise ValidationError(f"not a complex number: {text!r}") from None


def _complex_list(text):
    if isinstance(text, (list, tuple)):
        from .models import parse_complex

        return [parse_complex(x) for x in text]
    return [_complex(x) for x in str(text).split(",") if x.strip()]


# ---------------------------------------------------------------------------
# output


def _flatten(row):
    out = {}
    for k, v in row.items():
        if isinstance(v, (complex, np.complexfloating)):
            out[k + "_re"], out[k + "_im"] = float(v.real), float(v.imag)
        elif isinstance(v, (bool, np.bool_)):
            out[k] = bool(v)
        elif isinstance(v, (np.integer,)):
            out[k] = int(v)
        elif isinstance(v, (float, np.floating)):
            out[k] = float(v)
        else:
            out[k] = v
    return out


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(rows, meta, fmt):
    rows = [_flatten(r) for r in rows]
    if fmt == "json":
        return json.dumps({"metadata": _jsonable(meta), "rows": _jsonable(rows)}, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    for k in sorted(meta):
        buf.write(f"# {k}: {json.dumps(_jsonable(meta[k]), sort_keys=True)}\n")
    if rows:
        cols = list(rows[0])
        for r in rows[1:]:
            cols += [c for c in r if c not in cols]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r.get(c, "")) for c in cols])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# inputs


def _sequence(args, need_finite=False):
    from .models import ModelSpec, generate
    from .szego import VerblunskySeq

    if args.alphas is not None and args.model is not None:
        raise ValidationError("give either --alphas or --model, not both")
    if args.alphas is not None:
        return VerblunskySeq(tuple(_complex_list(args.alphas)))
    if args.model is None:
        raise ValidationError("need --alphas or --model")
    params = json.loads(args.params) if isinstance(args.params, str) else dict(args.params or {})
    for key, flag in (("a", args.a), ("b", args.b)):
        if flag is not None:
            params[key] = flag
    if args.lam is not None:
        params["lambda"] = [args.lam.real, args.lam.imag]
    return generate(ModelSpec(args.model, params, args.seed, args.length))


def _period(args):
    from .periodic import period_double

    seq = _sequence(args)
    if args.period:
        a = seq.take(args.period)
    elif seq.period:
        a = np.array(seq.prefix, dtype=complex)
    elif seq.tail == "zeros" and seq.prefix:
        a = np.array(seq.prefix, dtype=complex)
    else:
        raise ValidationError("need --period for a non-periodic model")
    if args.doubled or a.size % 2:
        if not args.doubled:
            raise ValidationError(f"period {a.size} is odd; pass --doubled")
        a = period_double(a)
    return a


def _grid(args):
    return CircleGrid(args.grid) if args.grid else None


def _n(args, default=None):
    if args.n is None:
        if default is None:
            raise ValidationError("need --n")
        return default
    if args.n < 0:
        raise ValidationError("--n must be >= 0")
    return args.n


def _zs(args, default):
    return [complex(z) for z in (_complex_list(args.z) if args.z is not None else default)]


# ---------------------------------------------------------------------------
# operations


def op_szego(args):
    from .szego import rotation_density, szego_polys, transfer, zeros

    seq = _sequence(args)
    n = _n(args)
    if args.op == "zeros":
        return [{"index": i, "zero": z} for i, z in enumerate(zeros(seq, n))]
    if args.op == "polys":
        P = szego_polys(seq, n)
        return [{"degree": k, "power": j, "Phi": c, "phi": P.phi[k].coeffs[j], "psi": P.psi[k].coeffs[j]}
                for k in range(n + 1) for j, c in enumerate(P.Phi[k].coeffs)]
    if args.op == "transfer":
        rows = []
        for z in _zs(args, [1.0]):
            T = transfer(seq, n, z).matrix
            rows.append({"z": z, "t11": T[0, 0], "t12": T[0, 1], "t21": T[1, 0], "t22": T[1, 1]})
        return rows
    rep = rotation_density(seq, n, _grid(args))
    return [{"theta": t, "density": d, "poisson_side": p} for t, d, p in zip(rep.theta, rep.density, rep.poisson_side)]


def op_schur(args):
    from .measures import measure_from_alphas
    from .schur import CaratheodoryFunction, geronimus_report, khrushchev_check, moments, schur_params
    from .szego import as_alphas, support_length

    seq = _sequence(args)
    n = _n(args, 8)
    if args.op == "geronimus":
        rep = geronimus_report(seq, n, _grid(args))
        return [{"j": j, "alpha": a, "gamma": g} for j, (a, g) in enumerate(zip(rep.alphas, rep.gammas))]
    if args.op == "khrushchev":
        rep = khrushchev_check(seq, n, _zs(args, [0.3, 0.2j, -0.5 + 0.1j]), _grid(args))
        return [{"z": z, "lhs": l, "rhs": r} for z, l, r in zip(rep.z, rep.lhs, rep.rhs)]
    L = support_length(seq)
    if L is None or L > 64:
        raise ValidationError("needs a finitely supported sequence of length <= 64")
    mu = measure_from_alphas(as_alphas(seq, L), L, _grid(args))
    c = moments(mu, n)
    if args.op == "moments":
        return [{"k": k, "moment": v} for k, v in enumerate(c)]
    g = schur_params(CaratheodoryFunction(moments(mu, n + 8)).schur(), n)
    return [{"j": j, "gamma": v} for j, v in enumerate(g)]


def op_measures(args):
    from .measures import entropy, higher_sum_rule_report, measure_from_alphas, relative_szego, sum_rule_report
    from .szego import support_length

    seq = _sequence(args)
    n = _n(args, support_length(seq) or 8)
    if args.op == "sum-rule":
        rep = sum_rule_report(seq, n, _grid(args))
        return [{"n": n, "product": rep.left, "exp_entropy": rep.right, "ratio": rep.ratio}]
    if args.op == "higher-sum-rule":
        rep = higher_sum_rule_report(seq, n, _grid(args))
        return [{"n": n, "validated_left": rep.validated_left, "printed_left": rep.printed_left,
                 "right": rep.right, "validated_ratio": rep.validated_ratio, "printed_ratio": rep.printed_ratio,
                 "predicted_discrepancy": rep.predicted_discrepancy}]
    if args.op == "entropy":
        return [{"n": n, "entropy": entropy(measure_from_alphas(seq, n, _grid(args)))}]
    rep = relative_szego(seq, _zs(args, [0.0, 0.5, 0.3j]), _grid(args))
    return [{"z": z, "value": v, "boundary_error": rep.boundary_error} for z, v in zip(rep.z, rep.value)]


def op_szegofn(args):
    from .measures import measure_from_alphas
    from .szegofn import det_formula_check, nevai_totik_report, szego_D, trace_w
    from .szego import support_length

    seq = _sequence(args)
    L = support_length(seq)
    if args.op == "trace":
        n = _n(args, 8)
        if L is None or L > 64:
            raise ValidationError("needs a finitely supported sequence of length <= 64")
        D = szego_D(measure_from_alphas(seq, L, _grid(args)), max(256, 2 * n))
        return [{"n": k, "fourier": complex(D.w[k]), "trace": trace_w(seq, k)} for k in range(1, n + 1)]
    if args.op == "det":
        rows = []
        for z in _zs(args, [0.3, 0.5j]):
            rep = det_formula_check(seq, z)
            rows.append({"z": z, "ratio": rep.ratio, "det": rep.det, "det2": rep.det2, "w1": rep.w1,
                         "det_error": rep.det_error, "det2_trace_error": rep.det2_trace_error,
                         "det2_printed_error": rep.det2_printed_error})
        return rows
    n = _n(args, 80)
    D = None
    pole = None
    if args.model and args.model.lower().replace("_", "") == "singlepoled":
        from .models import single_pole_D

        pole = complex(args.b if args.b is not None else 0.5)
        D = single_pole_D(pole)
    rep = nevai_totik_report(seq, n, D, pole=pole)
    return [{"n": k, "alpha": rep.alpha_abs[k], "combined": rep.combined[k], "combined_printed": rep.combined_printed[k]}
            for k in range(n)]


def op_cmv(args):
    from .cmv import build_cmv, char_poly_check, resolvent_matrix, schatten_distance, zeros_vs_cesaro

    seq = _sequence(args)
    n = _n(args, 8)
    if args.op == "matrix":
        variant = "periodized" if args.beta is not None else "half"
        op = build_cmv(seq, n, variant, beta=args.beta)
        C = op.matrix
        return [{"row": i, "col": j, "value": C[i, j]} for i in range(n) for j in range(n)]
    if args.op == "char-poly":
        zs = _zs(args, list(2 * np.exp(2j * np.pi * np.arange(64) / 64)))
        return [{"n": n, "max_error": char_poly_check(seq, n, zs)}]
    if args.op == "resolvent":
        z = _zs(args, [0.3 + 0.2j])[0]
        G = resolvent_matrix(seq, z, n)
        return [{"row": i, "col": j, "value": G[i, j]} for i in range(n) for j in range(n)]
    if args.op == "schatten":
        lhs, rhs = schatten_distance(seq, [], 2)
        return [{"p": 2, "distance": lhs, "bound": rhs}]
    t = zeros_vs_cesaro(seq, n)
    return [{"k": int(k), "zeros": z, "trace": tr, "cesaro": c}
            for k, z, tr, c in zip(t.k, t.zero_moments, t.trace_moments, t.cesaro_moments)]


def op_periodic(args):
    from . import periodic as P

    a = _period(args)
    tol = args.tol if args.tol is not None else P.GAP_TOL
    if args.op == "bands":
        bs = P.bands(a, tol)
        rows = bs.rows()
        args._meta.update({"period": a.size, "total_band_measure": bs.total_measure, "open_gaps": len(bs.open_gaps)})
        return rows
    if args.op == "discriminant":
        grid = CircleGrid(args.grid or 256)
        d = P.discriminant(a, grid.points)
        return [{"theta": t, "delta": v.real, "imag": v.imag} for t, v in zip(grid.theta, d)]
    if args.op == "lyapunov":
        return [{"z": z, "gamma": P.lyapunov(a, z), "transfer_growth": P.transfer_growth(a, z, 2000)}
                for z in _zs(args, [2.0, 0.5])]
    if args.op == "capacity":
        return [{"capacity": P.capacity(a), "printed_form": P.capacity_printed(a)}]
    if args.op == "dos":
        th, w = P.dos_quadrature(a)
        return [{"theta": t, "density": P.dos(a, t)} for t in th[:: max(1, th.size // 256)]]
    if args.op == "periodized":
        betas = [args.beta] if args.beta is not None else list(np.exp(2j * np.pi * np.arange(8) / 8))
        rep = P.periodized_det_check(a, betas)
        args._meta.update({"prefactor": rep.prefactor, "prod_rho": rep.prod_rho, "printed_prefactor": rep.printed_prefactor})
        return [{"beta": b, "eig_mismatch": m} for b, m in zip(rep.betas, rep.eig_mismatch)]
    if args.op == "gaps":
        rep = P.gap_report(a, tol)
        return [{"gap": i, "width": w, "delta": t, "open": bool(o)} for i, (w, t, o) in enumerate(zip(rep.widths, rep.tags, rep.open))]
    if args.op == "borg":
        return [_jsonable(vars(P.borg_checks(a, tol)))]
    bs = P.bands(a, tol, n_nodes=16)
    rep = P.band_edge_growth(a, bs.arcs[0][0], bs=bs)
    return [{"edge": rep.edge, "edge_growth_exponent": rep.edge_growth_exponent, "resonance": rep.resonance,
             "interior_slope": rep.interior_slope, "linear_constant": rep.linear_constant}]


def op_models(args):
    seq = _sequence(args)
    return [{"j": j, "alpha": v} for j, v in enumerate(seq.take(args.length))]


def op_analysis(args):
    from . import analysis as A

    if args.op == "isolated":
        mu, _ = A.arc_atom_measure(1.0, args.a or 0.6, 0.2)
        rep = A.isolated_point_zeros(mu, 1.0, range(5, _n(args, 60) + 1))
        return [{"n": int(n), "count": int(c), "distance": d} for n, c, d in zip(rep.ns, rep.counts, rep.distances)]
    if args.op == "gap-masspoints":
        rep = A.gap_masspoints(_period(args), _complex_list(args.params) if isinstance(args.params, str) and not args.params.startswith("{") else ())
        return [{"point": z, "weight": w, "gap": g} for z, w, g in zip(rep.points, rep.weights, rep.gap_of)]
    seq = _sequence(args)
    if args.op == "jl":
        rows = []
        for z in _zs(args, list(np.exp(2j * np.pi * np.arange(16) / 16))):
            rep = A.jl_sandwich(seq, z, args.r if args.r is not None else 0.9)
            rows.append({"z": rep.z, "r": rep.r, "x": rep.x, "F_abs": rep.F_abs, "ratio": rep.ratio, "margin": rep.margin})
        return rows
    rep = A.arc_rakhmanov_trend(seq, args.a or 0.5, args.lam or 1.0, _n(args, 1000))
    return [{"n": n, "modulus_gap": m, "product_gap": p} for n, (m, p) in sorted(rep.checkpoints.items())]


OPS = {"szego": op_szego, "schur": op_schur, "measures": op_measures, "szegofn": op_szegofn, "cmv": op_cmv,
       "periodic": op_periodic, "models": op_models, "analysis": op_analysis}


def op_check(args):
    from .checks import as_rows, run_suite

    rows = as_rows(run_suite(args.suite))
    args._failed = not all(r["passed"] for r in rows)
    return rows


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--model")
    p.add_argument("--alphas")
    p.add_argument("--params", help="model parameters as JSON")
    p.add_argument("--n", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, default=64)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--tol", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=_complex)
    p.add_argument("--lam", type=_complex)
    p.add_argument("--z", help="comma separated complex points")
    p.add_argument("--r", type=float)
    p.add_argument("--beta", type=_complex)
    p.add_argument("--period", type=int)
    p.add_argument("--doubled", action="store_true")


def build_parser():
    parser = _Parser(prog="opuc", description="Orthogonal polynomials on the unit circle toolkit")
    parser.add_argument("--version", action="version", version=f"opuc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for mod, ops in MODULE_OPS.items():
        p = sub.add_parser(mod)
        p.add_argument("op", choices=ops)
        _common(p)
    for short in ("zeros", "bands"):
        _common(sub.add_parser(short))
    c = sub.add_parser("check")
    c.add_argument("suite")
    c.add_argument("--out")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    r = sub.add_parser("run")
    r.add_argument("--config", required=True)
    return parser


def _from_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"config is not valid JSON: {e}") from None
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    extra = set(cfg) - CONFIG_KEYS
    if extra:
        raise ValidationError(f"unknown config fields: {sorted(extra)}")
    if "command" not in cfg:
        raise ValidationError("config needs a command")
    argv = [cfg["command"]]
    if cfg["command"] in MODULE_OPS:
        argv.append(cfg.get("op", ""))
    if cfg["command"] == "check":
        argv.append(cfg.get("suite", "all"))
    flag = {"lambda": "lam"}
    for k, v in cfg.items():
        if k in ("command", "op", "suite"):
            continue
        if k == "doubled":
            if v:
                argv.append("--doubled")
            continue
        if isinstance(v, (list, dict)) and k in ("alphas",):
            v = ",".join(str(complex(*x) if isinstance(x, list) else x) for x in v)
        elif isinstance(v, (list, dict)):
            v = json.dumps(v)
        elif isinstance(v, complex):
            v = str(v)
        argv += [f"--{flag.get(k, k)}", str(v)]
    return argv


def _execute(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _execute(_from_config(args.config))
    args._meta = {}
    args._failed = False
    if args.command == "check":
        rows = op_check(args)
        meta = {"version": __version__, "command": "check", "suite": args.suite}
    else:
        if args.command == "zeros":
            args.op = "zeros"
            rows = op_szego(args)
        elif args.command == "bands":
            args.op = "bands"
            rows = op_periodic(args)
        else:
            rows = OPS[args.command](args)
        meta = {"version": __version__, "command": args.command, "op": args.op, "seed": args.seed,
                "grid": args.grid or CircleGrid().n_points, "tol": args.tol}
    meta.update(args._meta)
    text = render(rows, meta, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if args._failed else 0


def main(argv=None):
    try:
        return _execute(sys.argv[1:] if argv is None else argv)
    except ValidationError as e:
        print(f"opuc: error: {e}", file=sys.stderr)
        return 1
    except NumericFailure as e:
        print(f"opuc: numerical failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
