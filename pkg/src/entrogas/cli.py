"""Command-line surface of the toolkit.

Every computation is reachable as a subcommand; randomized commands take a
seed (default 0) and are byte-reproducible.  Stdout carries data only, stderr
carries diagnostics.  Exit codes: 0 success, 2 argument error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import analytic
from .core import (
    BranchKind,
    DomainError,
    EntrogasError,
    Infeasible,
    InvalidParams,
    NoBirth,
    NoConvergence,
    NoCrossing,
    NoSignChange,
    OrderTooLarge,
    OutOfBranch,
)
from .finiten import (
    FiniteNConfig,
    find_birth,
    find_crossing,
    mu_theory_curve,
    profile_mu,
    solve_point,
)
from .sampler import (
    Histogram,
    ks_distance,
    metropolis_run,
    mp_cdf,
    sample_induced,
    semicircle_cdf,
)
from .core import purity as spectrum_purity


@dataclass
class RunConfig:
    """Parsed invocation: one subcommand plus its parameter map."""

    subcommand: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    fmt: str = "csv"
    output: Optional[str] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        params = {k: v for k, v in vars(args).items() if k != "handler"}
        seed = int(getattr(args, "seed", 0) or 0)
        if seed < 0:
            raise InvalidParams("seed must be a nonnegative integer")
        return cls(subcommand=args.subcommand, params=params, seed=seed,
                   fmt=getattr(args, "format", "csv"),
                   output=getattr(args, "output", None))


def _threads() -> int:
    env = os.environ.get("ENTROGAS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def _pmap(fn: Callable, xs: Sequence) -> list:
    """Map over grid points, parallel when allowed; order is preserved so
    parallelism never changes output bytes."""
    k = _threads()
    if k == 1 or len(xs) < 4:
        return [fn(x) for x in xs]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, xs))


def parse_grid(text: str) -> np.ndarray:
    """Parse a min:max:count grid; strictly monotone unless count is 1."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be min:max:count, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1 or (count > 1 and not hi > lo) or (count == 1 and hi != lo):
        raise ValueError(f"grid {text!r} is not strictly monotone")
    return np.linspace(lo, hi, count)


def _fmt_val(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_out(header: list[str], rows: list[list], fmt: str,
              output: Optional[str]) -> None:
    if fmt == "json":
        objs = [
            {k: (None if isinstance(v, float) and math.isnan(v) else v)
             for k, v in zip(header, row)}
            for row in rows
        ]
        _emit(json.dumps(objs, indent=None) + "\n", output)
        return
    lines = [",".join(header)]
    lines += [",".join(_fmt_val(v) for v in row) for row in rows]
    _emit("\n".join(lines) + "\n", output)


def _branch_kind(group: str, beta: float) -> BranchKind:
    if group == "stable":
        return analytic.stable_branch(beta, alpha=3)
    if group == "metastable":
        return analytic.metastable_branch(beta)
    if group == "separable":
        if beta >= 0.0:
            raise OutOfBranch("separable sea exists for beta < 0 only")
        return BranchKind.SeparableSea
    raise ValueError(f"unknown branch group {group!r}")


def cmd_critical(args) -> int:
    cs = analytic.critical_points()
    fields = {"beta_plus": cs.beta_plus, "beta_g": cs.beta_g,
              "beta_minus": cs.beta_minus, "mu_minus": cs.mu_minus}
    if args.format == "csv":
        _emit(",".join(fields) + "\n"
              + ",".join(repr(v) for v in fields.values()) + "\n", args.output)
    else:
        _emit(json.dumps(fields) + "\n", args.output)
    return 0


def cmd_scan(args) -> int:
    if args.steps < 1 or (args.steps > 1 and not args.beta_max > args.beta_min):
        print("error: empty or non-monotone beta range", file=sys.stderr)
        return 2
    betas = np.linspace(args.beta_min, args.beta_max, args.steps)

    def one(beta: float) -> list:
        try:
            kind = _branch_kind(args.branch, beta)
            pt = analytic.thermo(beta, kind)
            return [beta, kind.name, pt.m, pt.delta, pt.u, pt.s, pt.betaf,
                    pt.mu, pt.m - pt.delta, pt.m + pt.delta, ""]
        except OutOfBranch as exc:
            return [beta, "", None, None, None, None, None, None, None, None,
                    str(exc)]

    rows = _pmap(one, [float(b) for b in betas])
    header = ["beta", "kind", "m", "delta", "u", "s", "betaf", "mu",
              "lambda_min", "lambda_max", "error"]
    _rows_out(header, rows, args.format, args.output)
    return 0 if any(r[1] for r in rows) else 2


def cmd_density(args) -> int:
    if args.points < 2:
        print("error: need at least 2 points", file=sys.stderr)
        return 2
    kind = _branch_kind(args.branch, args.beta)
    pt = analytic.thermo(args.beta, kind)
    k = np.arange(args.points)
    x = np.sort(np.cos(math.pi * (k + 0.5) / args.points))
    rho = analytic.density(pt, x) / pt.delta
    lam = pt.m + pt.delta * x
    rows = [[float(l), float(r)] for l, r in zip(lam, rho)]
    _rows_out(["lambda", "rho"], rows, args.format, args.output)
    return 0


def _curve_rows(values: Iterable[float], n: int, fn: Callable[[float, int], float],
                colname: str) -> list[list]:
    rows = []
    for pi in values:
        try:
            rows.append([float(pi), fn(float(pi), n)])
        except DomainError as exc:
            print(f"warning: skipped pi={pi}: {exc}", file=sys.stderr)
    return rows


def cmd_entropy_curve(args) -> int:
    grid = parse_grid(args.grid)
    rows = _curve_rows(grid, args.n, analytic.entropy_of_purity, "s")
    _rows_out(["pi", "s"], rows, args.format, args.output)
    return 0 if rows else 2


def cmd_volume(args) -> int:
    grid = parse_grid(args.grid)
    rows = _curve_rows(grid, args.n, analytic.volume_of_purity, "log_volume")
    _rows_out(["pi", "log_volume"], rows, args.format, args.output)
    return 0 if rows else 2


def cmd_finite_n(args) -> int:
    modes = [args.beta_grid is not None, args.profile_mu is not None,
             args.crossing, args.birth]
    if sum(modes) != 1:
        print("error: pick exactly one of --beta-grid, --profile-mu, "
              "--crossing, --birth", file=sys.stderr)
        return 2
    if args.crossing:
        beta = find_crossing(args.n, seed=args.seed)
        _emit(json.dumps({"n": args.n, "beta_crossing": beta}) + "\n",
              args.output)
        return 0
    if args.birth:
        beta = find_birth(args.n, seed=args.seed)
        _emit(json.dumps({"n": args.n, "beta_birth": beta}) + "\n", args.output)
        return 0
    if args.profile_mu is not None:
        if args.beta is None:
            print("error: --profile-mu needs --beta", file=sys.stderr)
            return 2
        grid = parse_grid(args.profile_mu)
        cfg = FiniteNConfig(n=args.n, beta=args.beta, seed=args.seed)
        pts = profile_mu(cfg, grid)
        rows = [[p.mu, p.betaf_n, p.converged, p.grad_norm] for p in pts]
        _rows_out(["mu", "betaf_n", "converged", "grad_norm"], rows,
                  args.format, args.output)
        return 0
    grid = parse_grid(args.beta_grid)
    rows = []
    for beta in grid:
        cfg = FiniteNConfig(n=args.n, beta=float(beta), seed=args.seed)
        res = solve_point(cfg)
        best = res.minima[res.global_index]
        try:
            mu_th = mu_theory_curve(args.n, float(beta))
        except OutOfBranch:
            mu_th = math.nan
        rows.append([float(beta), best.mu, best.betaf_n, best.settled.name,
                     mu_th])
    _rows_out(["beta", "mu", "betaf_n", "basin", "mu_theory"], rows,
              args.format, args.output)
    return 0


def cmd_sample(args) -> int:
    bins = args.bins
    lo, hi = args.range
    if args.induced:
        spectra = sample_induced(args.n, args.count, args.seed)
        vals = np.concatenate([s.values for s in spectra]) * args.n
        hist = Histogram.from_samples(vals, bins=bins, range_=(lo, hi))
        pis = np.array([spectrum_purity(s) for s in spectra])
        maxes = np.array([s.values.max() for s in spectra])
        stats = {
            "n": args.n, "mode": "induced", "samples": args.count,
            "seed": args.seed, "purity_mean": float(pis.mean()),
            "purity_var": float(pis.var()), "acceptance_rate": None,
            "mean_lambda_max": float(maxes.mean()),
            "ks": ks_distance(hist, mp_cdf),
        }
    else:
        ref = None
        if args.alpha == 3 and args.beta >= 2.0:
            ref = lambda y: semicircle_cdf(y, args.beta)
        elif args.beta == 0.0:
            ref = mp_cdf
        st = metropolis_run(args.n, args.beta, args.alpha, args.sweeps,
                            args.seed, bins=bins, hist_range=(lo, hi),
                            chains=args.chains, reference_cdf=ref)
        hist = st.histogram
        stats = {
            "n": args.n, "mode": "metropolis", "beta": args.beta,
            "alpha": args.alpha, "sweeps": args.sweeps, "seed": args.seed,
            "chains": args.chains, "samples": st.samples,
            "purity_mean": st.purity_mean, "purity_var": st.purity_var,
            "acceptance_rate": st.acceptance_rate,
            "mean_lambda_max": st.mean_lambda_max, "ks": st.ks,
        }
    if args.format == "json":
        payload = dict(stats)
        payload["edges"] = [float(e) for e in hist.edges]
        payload["counts"] = [int(c) for c in hist.counts]
        _emit(json.dumps(payload) + "\n", args.output)
    else:
        lines = ["bin_left,bin_right,count"]
        for i in range(len(hist.counts)):
            lines.append(f"{float(hist.edges[i])!r},{float(hist.edges[i + 1])!r},"
                         f"{int(hist.counts[i])}")
        _emit("\n".join(lines) + "\n", args.output)
        print(json.dumps(stats), file=sys.stderr)
    return 0


def cmd_series(args) -> int:
    coeffs = analytic.planar_map_series(args.order)
    _emit(" ".join(str(c) for c in coeffs) + "\n", args.output)
    return 0


def _add_common(p: argparse.ArgumentParser, fmt_default: str = "csv") -> None:
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    p.add_argument("--output", "-o", default=None, help="write stdout payload to file")
    p.add_argument("--config", default=None, help="key=value file; flags win")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="entrogas",
        description="Statistical mechanics of bipartite entanglement: "
                    "analytic branches, landscapes, finite-N minima, sampling.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("critical", help="critical couplings as JSON")
    _add_common(p, fmt_default="json")
    p.set_defaults(handler=cmd_critical)

    p = sub.add_parser("scan", help="thermodynamics along a beta grid")
    p.add_argument("--beta-min", type=float, required=True)
    p.add_argument("--beta-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--branch", choices=("stable", "metastable", "separable"),
                   default="stable")
    _add_common(p)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("density", help="eigenvalue density of one branch")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--branch", choices=("stable", "metastable", "separable"),
                   default="stable")
    p.add_argument("--points", type=int, default=256)
    _add_common(p)
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("entropy-curve", help="entropy versus purity at finite n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", required=True, help="pi grid min:max:count")
    _add_common(p)
    p.set_defaults(handler=cmd_entropy_curve)

    p = sub.add_parser("volume", help="log isopurity volume versus purity")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", required=True, help="pi grid min:max:count")
    _add_common(p)
    p.set_defaults(handler=cmd_volume)

    p = sub.add_parser("finite-n", help="finite-n basin minima and transitions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta-grid", default=None, help="beta grid min:max:count")
    p.add_argument("--profile-mu", default=None, help="mu grid min:max:count")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--crossing", action="store_true")
    p.add_argument("--birth", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(handler=cmd_finite_n)

    p = sub.add_parser("sample", help="Metropolis or induced-measure sampling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--alpha", type=int, choices=(2, 3), default=3)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--induced", action="store_true",
                   help="draw exact induced-measure spectra instead")
    p.add_argument("--count", type=int, default=1000,
                   help="spectra to draw with --induced")
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--range", type=float, nargs=2, default=(0.0, 5.0),
                   metavar=("LO", "HI"))
    _add_common(p, fmt_default="json")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("series", help="planar-map counting series")
    p.add_argument("--order", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_series)

    return ap


def _apply_config(argv: list[str]) -> list[str]:
    """Inject key=value pairs from --config as flags unless already given."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv
    path = argv[i + 1]
    extra: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, _, val = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            if flag not in argv:
                extra += [flag, val.strip()]
    return argv + extra


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        RunConfig.from_args(args)
        return args.handler(args)
    except (OrderTooLarge, OutOfBranch, DomainError, InvalidParams, Infeasible,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NoConvergence, NoCrossing, NoBirth, NoSignChange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EntrogasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
