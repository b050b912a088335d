"""Command line interface: verification suites, catalogs and the growth scan.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from modzeta import expsum, lfunc, selberg, verify
from modzeta.arith import check_discriminant, fundamental_decomposition, is_discriminant, square_divisor_splits
from modzeta.pell import pell4_fundamental
from modzeta.quadforms import class_data, h_narrow

CACHE_ENV = "MODZETA_CACHE_DIR"
CACHE_FILE = "lcache.csv"

GROWTH_HEADER = ["T", "sigma", "x", "re", "im", "abs", "err_pole", "err_line", "bound_old", "bound_new"]
EXPSUM_HEADER = ["k", "q2", "T", "N", "re", "im", "abs", "bound", "ratio", "branch"]

CATALOG_CAPS = {"geodesics": 100_000, "classdata": 1_000_000, "pell": 1_000_000, "lvalue": 10_000_000}


class UsageError(Exception):
    pass


def exponent_new(sigma: float) -> float:
    """Growth exponent for Z'/Z(sigma + iT) in the strip, without the epsilon."""
    if not 0.5 < sigma < 1:
        raise ValueError("sigma must lie in (1/2, 1)")
    if sigma <= 5 / 8:
        return 19 / 9 - 20 / 9 * sigma
    return 52 / 27 * (1 - sigma)


def exponent_old(sigma: float) -> float:
    return 2 - 2 * sigma


@dataclass(frozen=True)
class GrowthScanRow:
    T: float
    sigma: float
    x: float
    re: float
    im: float
    abs: float
    err_pole: float
    err_line: float
    bound_old: float
    bound_new: float

    def values(self) -> list[float]:
        return [getattr(self, f.name) for f in fields(self)]


def _fmt(v) -> str:
    return f"{v:.15g}" if isinstance(v, float) else str(v)


def t_grid(tmin: float, tmax: float, points: int, grid: str) -> list[float]:
    if points < 2:
        return [tmin]
    if grid == "log":
        return [float(v) for v in np.geomspace(tmin, tmax, points)]
    return [float(v) for v in np.linspace(tmin, tmax, points)]


def cutoffs(T: float, policy: str) -> list[float]:
    if policy == "auto":
        return [T ** (20 / 9)]
    if policy == "pair":
        x = T ** (20 / 9)
        return [x, 4 * x]
    if policy.startswith("fixed:"):
        return [float(policy.split(":", 1)[1])]
    raise UsageError(f"unknown x policy {policy!r}")


def growth_row(sigma: float, T: float, x: float) -> GrowthScanRow:
    r = selberg.logderiv_strip_estimate(selberg.StripPoint(sigma, T, x))
    return GrowthScanRow(
        T, sigma, x, r.value.real, r.value.imag, abs(r.value),
        r.heuristic_err_pole, r.heuristic_err_line,
        T ** exponent_old(sigma), T ** exponent_new(sigma),
    )


def fit_slope(Ts: list[float], values: list[float]) -> tuple[float, float]:
    """Least-squares slope of log(value) on log(T) with its standard error."""
    lx, ly = np.log(Ts), np.log(values)
    n = len(lx)
    if n < 2:
        return math.nan, math.nan
    A = np.vstack([lx, np.ones(n)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    if n < 3:
        return float(coef[0]), math.nan
    resid = ly - A @ coef
    s2 = float(resid @ resid) / (n - 2)
    sxx = float(((lx - lx.mean()) ** 2).sum())
    return float(coef[0]), math.sqrt(s2 / sxx)


def growth_scan(sigma, tmin, tmax, grid="log", points=30, x_policy="pair", threads=None):
    """Rows in grid order plus the JSON-ready summary."""
    if not 0.5 < sigma < 1:
        raise UsageError(f"sigma={sigma} must lie in (1/2, 1)")
    if not 10 <= tmin < tmax:
        raise UsageError("need 10 <= tmin < tmax")
    Ts = t_grid(tmin, tmax, points, grid)
    jobs = [(T, x) for T in Ts for x in cutoffs(T, x_policy)]
    x_top = max(x for _, x in jobs)
    selberg.trace_table().ensure(selberg.trace_limit(math.sqrt(x_top) + 1 / math.sqrt(x_top)), threads)
    workers = threads or os.cpu_count() or 1
    with ThreadPoolExecutor(workers) as pool:
        rows = list(pool.map(lambda job: growth_row(sigma, *job), jobs))
    primary = [r for r in rows if r.x == cutoffs(r.T, x_policy)[0]]
    upper = primary[len(primary) // 2 :]
    slope, stderr = fit_slope([r.T for r in upper], [r.abs for r in upper])
    flagged = [r.T for r in rows if r.abs > r.bound_old * r.T**0.3]
    summary = {
        "slope": _json_float(slope),
        "slope_stderr": _json_float(stderr),
        "sigma": sigma,
        "exponent_new": exponent_new(sigma),
        "exponent_old": exponent_old(sigma),
        "n_points": len(Ts),
        "flagged": flagged,
    }
    if x_policy == "pair":
        summary["pair_inconsistent"] = _pair_inconsistencies(rows)
    return rows, summary


def _pair_inconsistencies(rows: list[GrowthScanRow]) -> list[float]:
    bad = []
    for a, b in zip(rows[::2], rows[1::2]):
        gap = math.hypot(a.re - b.re, a.im - b.im)
        if gap > a.err_pole + a.err_line + b.err_pole + b.err_line:
            bad.append(a.T)
    return bad


def _json_float(v: float):
    return None if math.isnan(v) else v


def _open_cache(cache_dir: str | None):
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    if not cache_dir:
        return None
    cache = lfunc.LCache(Path(cache_dir) / CACHE_FILE)
    lfunc.set_default_cache(cache)
    selberg.reset_trace_table(cache)
    return cache


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    limits = {k: v for k, v in (("tmax", args.tmax), ("cmax", args.cmax), ("dmax", args.dmax)) if v is not None}
    reports = []
    for name in names:
        kwargs = dict(verify.QUICK[name]) if args.quick else {}
        params = verify.SUITES[name].__code__.co_varnames
        kwargs.update({k: v for k, v in limits.items() if k in params})
        rep = verify.run_suite(name, **kwargs)
        if not args.details:
            rep.details = [d for d in rep.details if not d.get("ok", True)][:20]
        reports.append(rep.to_dict())
    ok = all(r["passed"] for r in reports)
    out = reports[0] if len(reports) == 1 else {"suites": reports, "passed": ok}
    json.dump(out, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    return 0 if ok else 1


def cmd_growth_scan(args) -> int:
    rows, summary = growth_scan(args.sigma, args.tmin, args.tmax, args.grid, args.points, args.x_policy, args.threads)
    if args.format == "json":
        json.dump({"rows": [dict(zip(GROWTH_HEADER, r.values())) for r in rows], "summary": summary}, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(GROWTH_HEADER)
        for r in rows:
            w.writerow([_fmt(v) for v in r.values()])
        sys.stdout.write("# " + json.dumps(summary) + "\n")
    return 0


def _catalog_rows(what: str, bound: int):
    if what == "geodesics":
        yield ["t", "N", "log_eps", "decomposition", "L1", "sum_h_log_eps1", "sqrt_disc_L1"]
        if bound <= 3:
            return
        for tc in selberg.trace_classes(float(bound)):
            lhs = math.fsum(h_narrow(D) * pell4_fundamental(D).log_eps1 for D, _ in tc.decomposition)
            dec = ";".join(f"{D}:{u}" for D, u in tc.decomposition)
            yield [tc.t, tc.norm, tc.log_eps_t, dec, tc.L1, lhs, math.sqrt(tc.t * tc.t - 4) * tc.L1]
        return
    discs = [D for D in range(5, bound + 1) if is_discriminant(D)]
    if what == "pell":
        yield ["D", "t", "u", "log_eps1"]
        for D in discs:
            pf = pell4_fundamental(D)
            yield [D, pf.t, pf.u, pf.log_eps1]
    elif what == "classdata":
        yield ["D", "h_narrow", "n_reduced", "cycle_lengths", "h_log_eps1", "sqrt_D_L1"]
        for D in discs:
            cd = class_data(D)
            D0, f = fundamental_decomposition(D)
            rhs = math.sqrt(D) * lfunc.l1_fundamental(D0) * lfunc.euler_correction(D0, f)
            lens = ";".join(str(len(c)) for c in cd.cycles)
            yield [D, cd.h_narrow, len(cd.reduced_forms), lens, cd.h_narrow * pell4_fundamental(D).log_eps1, rhs]
    elif what == "lvalue":
        yield ["D", "D0", "f", "n_splits", "L1_total"]
        for D in discs:
            D0, f = fundamental_decomposition(D)
            yield [D, D0, f, len(square_divisor_splits(D)), lfunc.l_value_D(D)]


def cmd_catalog(args) -> int:
    bound = args.tmax if args.what == "geodesics" else args.dmax
    if bound is None:
        raise UsageError(f"catalog {args.what} needs --{'tmax' if args.what == 'geodesics' else 'dmax'}")
    if bound > CATALOG_CAPS[args.what]:
        raise UsageError(f"bound {bound} exceeds cap {CATALOG_CAPS[args.what]} for {args.what}")
    w = csv.writer(sys.stdout, lineterminator="\n")
    for row in _catalog_rows(args.what, bound):
        w.writerow([_fmt(v) for v in row])
    return 0


def cmd_classdata(args) -> int:
    check_discriminant(args.disc)
    cd = class_data(args.disc)
    out = {
        "D": cd.D,
        "h_narrow": cd.h_narrow,
        "reduced_forms": [[f.a, f.b, f.c] for f in cd.reduced_forms],
        "cycles": [[[f.a, f.b, f.c] for f in c] for c in cd.cycles],
    }
    print(json.dumps(out))
    return 0


def cmd_pell(args) -> int:
    pf = pell4_fundamental(args.disc)
    print(json.dumps({"D": pf.D, "t": pf.t, "u": pf.u, "log_eps1": pf.log_eps1}))
    return 0


def cmd_expsum_scan(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(EXPSUM_HEADER)
    for k, q2, T, N in expsum.envelope_grid(Ts=args.T, q2s=args.q2, ks=args.k):
        rec = expsum.record(k, q2, T, N)
        z = rec.value
        w.writerow([_fmt(v) for v in (k, q2, float(T), float(N), z.real, z.imag, abs(z), rec.bound, rec.ratio, rec.branch)])
    return 0


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(v) for v in text.split(",") if v]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker pool size (default: logical cores)")
    common.add_argument("--cache-dir", default=argparse.SUPPRESS, help=f"L-value cache directory (env {CACHE_ENV})")
    p = argparse.ArgumentParser(prog="modzeta", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=[*verify.SUITES, "all"])
    v.add_argument("--tmax", type=int)
    v.add_argument("--cmax", type=int)
    v.add_argument("--dmax", type=int)
    v.add_argument("--quick", action="store_true", help="reduced limits")
    v.add_argument("--details", action="store_true", help="keep per-case details for passing cases")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("growth-scan", parents=[common], help="strip estimates of Z'/Z along a vertical line")
    g.add_argument("--sigma", type=float, required=True)
    g.add_argument("--tmin", type=float, default=50.0)
    g.add_argument("--tmax", type=float, default=500.0)
    g.add_argument("--grid", choices=["linear", "log"], default="log")
    g.add_argument("--points", type=int, default=30)
    g.add_argument("--x-policy", default="pair", help="auto | pair | fixed:<x>")
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    g.set_defaults(func=cmd_growth_scan)

    c = sub.add_parser("catalog", parents=[common], help="tabulate geodesics, class data, Pell units or L-values")
    c.add_argument("what", choices=list(CATALOG_CAPS))
    c.add_argument("--tmax", type=int, help="traces 3 <= t < tmax (geodesics)")
    c.add_argument("--dmax", type=int, help="discriminants up to dmax")
    c.set_defaults(func=cmd_catalog)

    cd = sub.add_parser("classdata", parents=[common], help="reduced forms and rho-cycles of one discriminant")
    cd.add_argument("--disc", type=int, required=True)
    cd.set_defaults(func=cmd_classdata)

    pe = sub.add_parser("pell", parents=[common], help="fundamental solution of t^2 - D u^2 = 4")
    pe.add_argument("--disc", type=int, required=True)
    pe.set_defaults(func=cmd_pell)

    e = sub.add_parser("expsum-scan", parents=[common], help="exponential sums against the van der Corput envelope")
    e.add_argument("--T", type=_csv_list(float), default=[1e2, 1e3, 1e4])
    e.add_argument("--q2", type=_csv_list(int), default=[1, 2, 5])
    e.add_argument("--k", type=_csv_list(int), default=[0, 1, 2])
    e.set_defaults(func=cmd_expsum_scan)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = getattr(args, "threads", None)
    cache = _open_cache(getattr(args, "cache_dir", None))
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"modzeta: error: {exc}", file=sys.stderr)
        return 2
    finally:
        if cache is not None:
            cache.save()


if __name__ == "__main__":
    sys.exit(main())
