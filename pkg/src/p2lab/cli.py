"""Command-line front end: ``p2lab <subcommand> [flags]``.

Every subcommand writes either CSV (header row, LF line endings) or a single
JSON object with keys "params", "results" and "diagnostics".  In CSV mode the
diagnostics go to stderr as ``# key: value`` lines.

Exit codes: 0 success, 1 a hard acceptance criterion failed (verify),
2 bad input or unmet precondition, 3 internal invariant violation.
"""
import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from p2lab import errors
from p2lab.polyform import QuadraticPoly, require_admissible, shift_to_G

DEFAULT_SEED = 20240229


def rational(text):
    """Exact rational from '16/15', '0.2' or '3'."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def number(text):
    """Integer given as '1000000', '1e6' or '10**6'."""
    t = text.strip()
    try:
        if "**" in t:
            b, e = t.split("**")
            return int(b) ** int(e)
        v = Fraction(t) if "e" not in t.lower() else Fraction(float(t))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v.denominator != 1:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def _poly(args):
    g = QuadraticPoly.parse(args.poly)
    require_admissible(g)
    return shift_to_G(g) if args.shifted else g


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if hasattr(v, "item"):
        return v.item()
    return v


def _cell(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit(fmt, params, rows, diagnostics=None, out=None):
    out = out or sys.stdout
    diagnostics = diagnostics or {}
    if fmt == "json":
        obj = {
            "params": {k: _jsonable(v) for k, v in params.items()},
            "results": [{k: _jsonable(v) for k, v in r.items()} for r in rows],
            "diagnostics": {k: _jsonable(v) for k, v in diagnostics.items()},
        }
        out.write(json.dumps(obj, sort_keys=False) + "\n")
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows:
        keys = list(rows[0])
        w.writerow(keys)
        for r in rows:
            w.writerow([_cell(r[k]) for k in keys])
    out.write(buf.getvalue())
    for k, v in diagnostics.items():
        sys.stderr.write(f"# {k}: {v}\n")


# ---------------------------------------------------------------------------
# subcommands; each returns (params, rows, diagnostics[, exit code])

def cmd_rho(a):
    from p2lab import localroots
    P = _poly(a)
    ds = a.d or list(range(1, a.dmax + 1))
    return {"poly": str(P), "d": ds if a.d else f"1..{a.dmax}"}, \
        [{"d": d, "rho": localroots.rho(P, d)} for d in ds], {}


def cmd_roots(a):
    from p2lab import localroots
    P = _poly(a)
    rs = localroots.roots_mod(P, a.d)
    return {"poly": str(P), "d": a.d}, [{"d": a.d, "root": r} for r in rs.roots], {"rho": rs.rho}


def cmd_gamma(a):
    from p2lab import characters
    P = _poly(a)
    est, pmax = characters.gamma_estimate(P, a.tol)
    return {"poly": str(P), "tol": a.tol}, \
        [{"poly": str(P), "gamma": est.value, "error": est.error, "truncation_prime": pmax}], {}


def cmd_singular(a):
    from p2lab import characters
    P = _poly(a)
    L = characters.context_for(P).L1
    rows = [{"q": q, "curly_G": characters.curly_G(P, q), "L1": L.value,
             "singular_series": characters.singular_series(P, q)} for q in a.q]
    return {"poly": str(P), "q": a.q}, rows, {"L1_error": L.error}


def cmd_mertens(a):
    from p2lab import characters
    P = _poly(a)
    gamma = characters.gamma_g(P)
    rows = [{"z": z, "V": characters.mertens_V(P, z),
             "ratio": characters.mertens_ratio(P, z, gamma)} for z in a.z]
    return {"poly": str(P), "z": a.z}, rows, {"gamma": gamma}


def cmd_nagel(a):
    from p2lab import characters
    P = _poly(a)
    rows = []
    for t in a.t:
        L, Ps = characters.nagel_sums(P, t)
        rows.append({"t": t, "L": L, "P": Ps, "L_minus_log_t": L - math.log(t),
                     "P_minus_loglog_t": Ps - math.log(math.log(t))})
    diag = {}
    if a.t0 is not None and a.t1 is not None:
        diag["max_deviation"] = characters.nagel_max_deviation(P, a.t0, a.t1)
    return {"poly": str(P), "t": a.t}, rows, diag


def cmd_sieve_fns(a):
    from p2lab import sievefn
    rows = [{"s": s, "F": sievefn.F_of(s), "f": sievefn.f_of(s)} for s in a.s]
    res = sievefn.dde_residual(sievefn.build_grid())
    return {"s": a.s}, rows, {"dde_residual": res.max}


def cmd_constant(a):
    from p2lab import sievefn
    al, ga = float(a.alpha), float(a.gamma)
    wv = sievefn.W_constant(al, ga, a.bracket)
    row = {"alpha": a.alpha, "gamma": a.gamma, "W": wv.W, "ratio": wv.ratio,
           "exceeds_1_over_154": wv.W > sievefn.TWO_EC * ga / 154}
    diag = {}
    if a.dual:
        t = sievefn.W_from_integrals(al, ga)
        diag = {"four_term_ratio": t.ratio, "dual_path_difference": abs(t.ratio - wv.ratio)}
    return {"alpha": a.alpha, "gamma": a.gamma, "bracket": a.bracket}, [row], diag


def _sequence(a, P):
    from p2lab import sievelab
    return sievelab.build_sequence(P, a.x, workers=a.workers)


def cmd_count_p2(a):
    from p2lab import sievelab
    P = _poly(a)
    res = sievelab.count_P2(_sequence(a, P))
    return {"poly": str(P), "x": a.x, "workers": a.workers}, \
        [{"x": res.x, "count": res.count, "count_distinct": res.count_distinct,
          "threshold": res.threshold, "ratio": res.ratio}], {}


def cmd_weights(a):
    from p2lab import sievelab
    P = _poly(a)
    params = sievelab.weight_params(P, a.x, z=a.z, lam=None if a.lam is None else float(a.lam))
    ws = sievelab.W_weighted(_sequence(a, P), params)
    return {"poly": str(P), "x": a.x, "z": params.z, "lambda": params.lam, "lambda_rule": params.lambda_rule}, \
        [{"W_direct": ws.W_direct, "W_decomposed": ws.W_decomposed, "rel_diff": ws.rel_diff, "S": ws.S}], {}


def cmd_dispersion(a):
    from p2lab import sievelab
    P = _poly(a)
    d = sievelab.dispersion_moment(_sequence(a, P), a.M, a.N, eps=float(a.eps))
    return {"poly": str(P), "x": a.x, "M": a.M, "N": a.N}, \
        [{"M": d.M, "N": d.N, "moment": d.moment, "bound": d.bound, "bound_ratio": d.bound_ratio}], {}


def cmd_gauss(a):
    from p2lab import analytic
    rep = analytic.correspondence_check(a.dmax)
    return {"dmax": a.dmax}, [{"dmax": rep.D_max, "ok": rep.ok, "moduli": rep.moduli,
                               "pairs": rep.pairs, "first_failure": rep.first_failure or ""}], {}


def cmd_kloosterman(a):
    from p2lab import analytic
    rows = analytic.hooley_ratio_scan(a.smax, a.hmax, samples=a.samples, seed=a.seed)
    out = [{"s": r.s, "h": r.h, "max_ratio": r.max_ratio, "complete_sum": r.complete_sum,
            "ramanujan": r.ramanujan} for r in rows]
    worst = max((abs(r.complete_sum - r.ramanujan) for r in rows), default=0.0)
    return {"smax": a.smax, "hmax": a.hmax, "samples": a.samples, "seed": a.seed}, out, \
        {"max_complete_vs_ramanujan": worst}


def cmd_smooth(a):
    from p2lab import analytic
    sa = analytic.smooth_build(float(a.alpha), float(a.beta), float(a.width), a.order)
    rep = analytic.smooth_verify(sa, a.grid)
    return {"alpha": a.alpha, "beta": a.beta, "width": a.width, "order": a.order}, \
        [{"points": rep.points, "ok": rep.ok, "coeffs_ok": rep.coeffs_ok,
          "max_excess": rep.max_excess, "tail": rep.tail, "worst_t": rep.worst_t}], {}


def cmd_equidist(a):
    from p2lab import analytic
    P = _poly(a)
    M1 = a.M1 if a.M1 is not None else 2 * a.M
    r = analytic.equidist_count(P, a.q, a.d, a.mu, a.omega, float(a.alpha), float(a.beta), a.M, M1)
    return {"poly": str(P), "q": a.q, "d": a.d, "mu": a.mu, "omega": a.omega,
            "alpha": a.alpha, "beta": a.beta, "M": a.M, "M1": M1}, \
        [{"count": r.count, "main_term": r.main_term, "rel_dev": r.rel_dev}], \
        {"main_term_phi_q_over_q": r.main_term_derived}


def cmd_verify(a):
    from p2lab.verify import verify_all
    rep = verify_all(a.scale, seed=a.seed, workers=a.workers)
    if a.format == "text":
        sys.stdout.write(rep.render())
        return 0 if rep.ok else 1
    rows = [{"criterion": c.number, "status": "PASS" if c.passed else "FAIL",
             "title": c.title, "detail": c.detail} for c in rep.criteria]
    diag = {f"d{i:02d}": d for i, d in enumerate(rep.diagnostics, 1)}
    return {"scale": a.scale, "seed": a.seed}, rows, diag, (0 if rep.ok else 1)


# ---------------------------------------------------------------------------

def build_parser():
    def common(formats=("csv", "json")):
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--format", choices=formats, default="csv")
        c.add_argument("--workers", type=int, default=1)
        c.add_argument("--seed", type=int, default=DEFAULT_SEED)
        return c

    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument("--poly", default="1,0,1", help="coefficients a,b,c of g (default 1,0,1)")
    poly.add_argument("--shifted", action="store_true", help="use G(n) = g(sn + t)")

    p = argparse.ArgumentParser(prog="p2lab", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="cmd", metavar="subcommand", required=True)

    def add(name, fn, helptext, with_poly=True, formats=("csv", "json")):
        sp = sub.add_parser(name, parents=[common(formats)] + ([poly] if with_poly else []), help=helptext,
                            description=helptext)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("rho", cmd_rho, "root counts rho(d); columns d,rho")
    sp.add_argument("--d", type=number, nargs="+")
    sp.add_argument("--dmax", type=number, default=30)
    sp = add("roots", cmd_roots, "roots of P mod d; columns d,root")
    sp.add_argument("--d", type=number, required=True)
    sp = add("gamma", cmd_gamma, "density constant Gamma; columns poly,gamma,error,truncation_prime")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp = add("singular", cmd_singular, "singular series; columns q,curly_G,L1,singular_series")
    sp.add_argument("--q", type=number, nargs="+", default=[1])
    sp = add("mertens", cmd_mertens, "Mertens product V(z); columns z,V,ratio")
    sp.add_argument("--z", type=float, nargs="+", default=[1e2, 1e4, 1e6])
    sp = add("nagel", cmd_nagel, "Nagel sums; columns t,L,P,L_minus_log_t,P_minus_loglog_t")
    sp.add_argument("--t", type=float, nargs="+", default=[1e4, 1e6])
    sp.add_argument("--t0", type=float)
    sp.add_argument("--t1", type=float)
    sp = add("sieve-fns", cmd_sieve_fns, "sieve functions; columns s,F,f", with_poly=False)
    sp.add_argument("--s", type=float, nargs="+", default=[2.0, 3.0, 4.0, 5.0, 6.0])
    sp = add("constant", cmd_constant,
             "the constant W; columns alpha,gamma,W,ratio,exceeds_1_over_154", with_poly=False)
    sp.add_argument("--alpha", type=rational, default=Fraction(16, 15))
    sp.add_argument("--gamma", type=rational, default=Fraction(1, 5))
    sp.add_argument("--bracket", choices=("product", "literal"), default="product")
    sp.add_argument("--dual", action="store_true", help="also evaluate the four-term form")
    sp = add("count-p2", cmd_count_p2, "P2 count; columns x,count,count_distinct,threshold,ratio")
    sp.add_argument("--x", type=number, required=True)
    sp = add("weights", cmd_weights, "weighted sum W(A, z); columns W_direct,W_decomposed,rel_diff,S")
    sp.add_argument("--x", type=number, required=True)
    sp.add_argument("--z", type=number)
    sp.add_argument("--lam", type=rational)
    sp = add("dispersion", cmd_dispersion, "second moment of B(x; m, N); columns M,N,moment,bound,bound_ratio")
    sp.add_argument("--x", type=number, required=True)
    sp.add_argument("--M", type=number, required=True)
    sp.add_argument("--N", type=number, required=True)
    sp.add_argument("--eps", type=rational, default=Fraction(1, 5))
    sp = add("gauss", cmd_gauss, "pair/root correspondence; columns dmax,ok,moduli,pairs,first_failure",
             with_poly=False)
    sp.add_argument("--dmax", type=number, default=10**4)
    sp = add("kloosterman", cmd_kloosterman,
             "incomplete Kloosterman scan; columns s,h,max_ratio,complete_sum,ramanujan", with_poly=False)
    sp.add_argument("--smax", type=number, default=50)
    sp.add_argument("--hmax", type=number, default=5)
    sp.add_argument("--samples", type=number, default=4)
    sp = add("smooth", cmd_smooth, "smoothing check; columns points,ok,coeffs_ok,max_excess,tail,worst_t",
             with_poly=False)
    sp.add_argument("--alpha", type=rational, default=Fraction(1, 5))
    sp.add_argument("--beta", type=rational, default=Fraction(7, 10))
    sp.add_argument("--width", type=rational, default=Fraction(1, 20))
    sp.add_argument("--order", type=number, default=1000)
    sp.add_argument("--grid", type=number, default=10**4)
    sp = add("equidist", cmd_equidist, "equidistribution count; columns count,main_term,rel_dev")
    sp.add_argument("--q", type=number, default=1)
    sp.add_argument("--d", type=number, default=1)
    sp.add_argument("--mu", type=number, default=0)
    sp.add_argument("--omega", type=number, default=0)
    sp.add_argument("--alpha", type=rational, default=Fraction(0))
    sp.add_argument("--beta", type=rational, default=Fraction(1))
    sp.add_argument("--M", type=number, required=True)
    sp.add_argument("--M1", type=number)
    sp = add("verify", cmd_verify, "acceptance battery; columns criterion,status,title,detail",
             with_poly=False, formats=("csv", "json", "text"))
    sp.add_argument("--scale", choices=("smoke", "desk"), default="smoke")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.workers < 1:
        sys.stderr.write("p2lab: error: --workers must be >= 1\n")
        return 2
    try:
        res = args.fn(args)
    except errors.DomainError as e:
        sys.stderr.write(f"p2lab: error: {e}\n")
        return 2
    except errors.InvariantError as e:
        sys.stderr.write(f"p2lab: invariant violated: {e}\n")
        return 3
    if isinstance(res, int):
        return res
    params, rows, diag = res[:3]
    code = res[3] if len(res) > 3 else 0
    params = {"subcommand": args.cmd, **params}
    if "seed" not in params:
        params["seed"] = args.seed
    emit(args.format, params, rows, diag)
    return code


def entry():  # pragma: no cover
    sys.exit(main())
