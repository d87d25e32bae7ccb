"""Command-line front end: sweep a t-grid and write CSV or JSON tables.

Exit status: 0 on success, 1 on numeric or validation failure, 2 on usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .channels import PauliVector, depolarizing_f, qubit_f, qubit_matel_means, qubit_variance_curves, typicality
from .channels import variance_matel_gue_avg
from .ensemble import RngStream
from .errors import DegeneratePointError, GueNoiseError, NumericError
from .montecarlo import sff_mc_curve
from .sff import MAX_ANALYTIC_N, T0_POWER, sff_curve

COMMANDS = ("sff", "channel", "variance", "typicality", "qubit", "validate")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guenoise", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mc=False):
        p.add_argument("--n", type=int, required=True, help="Hilbert-space dimension")
        p.add_argument("--t-min", type=float, default=None, help="first grid time (default 1e-2 geometric, 0 linear)")
        p.add_argument("--t-max", type=float, default=None, help="last grid time (default 10 n)")
        p.add_argument("--points", type=int, default=256)
        p.add_argument("--grid", choices=("linear", "geometric"), default="geometric",
                       help="geometric grids also include t = 0")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default="-", help="output path, '-' for stdout")
        p.add_argument("--seed", type=int, default=0)
        if mc:
            p.add_argument("--samples", type=int, default=None, help="Monte Carlo samples (default 1e5, 1e4 for n > 16)")

    p = sub.add_parser("sff", help="spectral form factor curve")
    common(p, mc=True)
    p.add_argument("--kind", choices=("r2", "r41", "r4", "mc"), default="r2")
    p.add_argument("--p", type=int, default=1, help="power of Z(t) for --kind mc")
    p.add_argument("--q", type=int, nargs="*", default=[], help="merged-delta counts for --kind mc")

    p = sub.add_parser("channel", help="depolarizing strength f(t)")
    common(p)

    for name, helptext in (("variance", "GUE-averaged element variance"), ("typicality", "element typicality")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--row", type=int, default=0)
        p.add_argument("--col", type=int, default=1)
        if name == "variance":
            p.add_argument("--sigma-a", type=float, default=1.0)

    p = sub.add_parser("qubit", help="single-qubit closed forms")
    common(p)
    p.add_argument("--quantity", choices=("f", "var-diag", "var-offdiag", "mean-offdiag"), default="f")
    p.add_argument("--pauli", type=float, nargs=4, default=(0.0, 0.0, 0.0, 1.0), metavar=("A0", "AX", "AY", "AZ"))

    p = sub.add_parser("validate", help="analytic-versus-Monte-Carlo suite")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default="-")
    return parser


def make_grid(args) -> np.ndarray:
    t_max = 10.0 * args.n if args.t_max is None else args.t_max
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if args.grid == "geometric":
        t_min = 1e-2 if args.t_min is None else args.t_min
        if t_min <= 0:
            raise UsageError("geometric grids need --t-min > 0")
        if not t_min < t_max:
            raise UsageError("--t-min must be smaller than --t-max")
        return np.concatenate([[0.0], np.geomspace(t_min, t_max, args.points)])
    t_min = 0.0 if args.t_min is None else args.t_min
    if not t_min < t_max:
        raise UsageError("--t-min must be smaller than --t-max")
    return np.linspace(t_min, t_max, args.points)


def default_samples(n):
    return 100_000 if n <= 16 else 10_000


def compute(args):
    """Return (kind label, column names, column arrays, extra metadata)."""
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    grid = make_grid(args)
    if args.command == "sff":
        if args.kind == "mc":
            samples = args.samples or default_samples(n)
            if samples < 2:
                raise UsageError("--samples must be at least 2")
            est = sff_mc_curve(args.p, tuple(args.q), grid, n, samples, RngStream(args.seed))
            power = 2 * args.p - sum(args.q)
            label = f"mc(p={args.p},q={tuple(args.q)})"
            return label, ["t", "value", "std_error", f"value/N^{power}"], [grid, est.mean, est.std_error, est.mean / float(n) ** power], {"samples": samples}
        if n > MAX_ANALYTIC_N:
            raise UsageError(f"analytic form factors support n <= {MAX_ANALYTIC_N}; use --kind mc")
        curve = sff_curve(args.kind, grid, n)
        power = T0_POWER[args.kind]
        return args.kind, ["t", "value", f"value/N^{power}"], [grid, curve.values, curve.normalized()], {}
    if args.command == "channel":
        if n < 2:
            raise UsageError("channel needs --n >= 2")
        return "f", ["t", "value"], [grid, np.array([depolarizing_f(t, n).f for t in grid])], {}
    if args.command in ("variance", "typicality"):
        if n < 2 or not (0 <= args.row < n and 0 <= args.col < n):
            raise UsageError("need --n >= 2 and 0 <= --row, --col < n")
        if args.command == "variance":
            if args.sigma_a <= 0:
                raise UsageError("--sigma-a must be positive")
            vals = [variance_matel_gue_avg(args.row, args.col, t, n, args.sigma_a) for t in grid]
            return "variance", ["t", "value"], [grid, np.array(vals)], {}
        vals, degenerate = [], []
        for i, t in enumerate(grid):
            try:
                vals.append(typicality(args.row, args.col, t, n))
            except DegeneratePointError:
                vals.append(float("nan"))
                degenerate.append(float(t))
        return "typicality", ["t", "value"], [grid, np.array(vals)], {"degenerate_t": degenerate}
    if args.command == "qubit":
        a = PauliVector(args.pauli[0], tuple(args.pauli[1:]))
        if args.quantity == "f":
            vals = qubit_f(grid)
        elif args.quantity == "mean-offdiag":
            vals = np.array([qubit_matel_means(a, t)[1] for t in grid])
        else:
            j = 0 if args.quantity == "var-diag" else 1
            vals = np.array([qubit_variance_curves(a, t)[j] for t in grid])
        return f"qubit-{args.quantity}", ["t", "value"], [grid, vals], {}
    raise UsageError(f"unknown command {args.command}")


def render(fmt, kind, args, names, cols, extra) -> str:
    if fmt == "csv":
        lines = [",".join(names)]
        for row in zip(*cols):
            lines.append(",".join("%.17g" % v for v in row))
        return "\n".join(lines) + "\n"
    obj = {
        "kind": kind,
        "n": args.n,
        "grid": getattr(args, "grid", None),
        "seed": args.seed,
        "version": __version__,
        "columns": {name: [float(v) for v in col] for name, col in zip(names, cols)},
    }
    obj.update(extra)
    return json.dumps(obj, allow_nan=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".guenoise-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_validate(args) -> int:
    from .validation import run_suite

    if args.n < 1:
        raise UsageError("--n must be >= 1")
    samples = args.samples or default_samples(args.n)
    if samples < 2:
        raise UsageError("--samples must be at least 2")
    results = run_suite(args.n, samples, args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    if args.format == "csv":
        text = "check,passed,detail\n" + "".join(f'"{r.name}",{int(r.passed)},"{r.detail}"\n' for r in results)
    else:
        text = json.dumps({"kind": "validate", "n": args.n, "grid": None, "seed": args.seed, "version": __version__,
                           "samples": samples, "checks": [r.__dict__ for r in results]}) + "\n"
    write_atomic(args.output, text)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return run_validate(args)
        kind, names, cols, extra = compute(args)
        write_atomic(args.output, render(args.format, kind, args, names, cols, extra))
        return 0
    except UsageError as exc:
        parser.error(str(exc))
    except (NumericError, DegeneratePointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        if getattr(exc, "diagnostics", None):
            print(f"diagnostics: {exc.diagnostics}", file=sys.stderr)
        return 1
    except GueNoiseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
