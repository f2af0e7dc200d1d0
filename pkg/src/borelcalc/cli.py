"""Command-line interface: ``borelcalc {borel,solve,zeros,fft-solve,demo}``.

Exit codes: 0 success, 1 usage or input format, 2 domain precondition,
3 numerical failure.  Every float is written with 17 significant digits, so
output files are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from typing import List, Optional

import numpy as np

from . import demos
from .borel import borel_exppoly, borel_taylor
from .errors import AtomOnZero, BadRange, BorelcalcError, FormatError, InputError
from .expfun import ExpPoly, TaylorRep
from .fftsolve import SampledSignal, estimate_decay_abscissas, fft_solve, make_strip_config
from .numerics import Circle
from .solver import general_solution, homogeneous_basis, solve_particular_atomic, solve_particular_contour
from .symbols import PolySymbol, make_symbol
from .zeros import density_report, find_zeros, write_density_csv

log = logging.getLogger("borelcalc")


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _g(v) -> str:
    return format(float(v), ".17g")


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_g(v) if isinstance(v, (float, np.floating)) else v for v in row])


# --- file formats -------------------------------------------------------------

def _pair(v, what) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(a, (int, float)) for a in v):
        return complex(v[0], v[1])
    raise FormatError(f"{what}: expected a number or [re, im], got {v!r}")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc


def load_exppoly(path) -> ExpPoly:
    """``{"atoms": [{"zeta": [re, im], "poly": [[re, im], ...]}, ...]}``."""
    data = _load_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("atoms"), list):
        raise FormatError(f"{path}: expected an object with an 'atoms' list")
    atoms = []
    for a in data["atoms"]:
        if not isinstance(a, dict) or "zeta" not in a or not isinstance(a.get("poly"), list):
            raise FormatError(f"{path}: each atom needs 'zeta' and a 'poly' list")
        atoms.append((_pair(a["zeta"], "zeta"), [_pair(c, "poly") for c in a["poly"]]))
    return ExpPoly.from_atoms(atoms)


def load_taylor(path) -> TaylorRep:
    """``{"coeffs": [[re, im], ...], "tau": t}``."""
    data = _load_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("coeffs"), list) or "tau" not in data:
        raise FormatError(f"{path}: expected an object with 'coeffs' and 'tau'")
    return TaylorRep(np.array([_pair(c, "coeffs") for c in data["coeffs"]]), float(data["tau"]))


def load_symbol_coeffs(path) -> PolySymbol:
    """``{"coeffs": [[re, im], ...]}``, optionally with ``"truncated": false``."""
    data = _load_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("coeffs"), list):
        raise FormatError(f"{path}: expected an object with a 'coeffs' list")
    return PolySymbol([_pair(c, "coeffs") for c in data["coeffs"]], bool(data.get("truncated", True)))


def dump_exppoly(f: ExpPoly) -> dict:
    return {"atoms": [{"zeta": [lam.real, lam.imag], "poly": [[c.real, c.imag] for c in p]}
                      for lam, p in f.atoms]}


# --- argument handling --------------------------------------------------------

def _strip(text):
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'xi_minus,xi_plus', got {text!r}")
    return (a, b)


def _grid(text):
    try:
        a, b, n = text.split(",")
        return (float(a), float(b), int(n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b,n', got {text!r}")


def _common(p: argparse.ArgumentParser, inputs=("exppoly", "taylor")) -> None:
    p.add_argument("--spec", help="JSON file with default values for any option")
    p.add_argument("--symbol", help="symbol expression in z, e.g. '2*z*cosh(z)'")
    p.add_argument("--symbol-coeffs", help="JSON file with Taylor coefficients of the symbol")
    for name in inputs:
        p.add_argument(f"--{name}", help=f"input function ({name} file)")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--tol", type=float, help="tolerance (> 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="borelcalc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("borel", help="sample the Borel transform on a circle")
    _common(p)
    p.add_argument("--radius", type=float, help="circle radius (default: type + 1)")
    p.add_argument("--points", type=int, default=None, help="number of samples (default 64)")

    p = sub.add_parser("solve", help="particular solution of phi(d/dx) f = g on a grid")
    _common(p)
    p.add_argument("--radius", type=float, help="starting radius of the contour search")
    p.add_argument("--center", type=float, help="use the circle of --radius about this center as given")
    p.add_argument("--tau", type=float, help="also report the homogeneous basis for |zeta| <= tau")
    p.add_argument("--method", choices=("auto", "atomic", "contour"), default=None)
    p.add_argument("--grid", type=_grid, help="output grid 'a,b,n' (default -3,3,61)")

    p = sub.add_parser("zeros", help="zeros of the symbol in a disk")
    _common(p, inputs=())
    p.add_argument("--radius", type=float, help="disk radius")
    p.add_argument("--density-out", help="write counting functions to this CSV")
    p.add_argument("--interval", type=float, help="interval length for the Levinson margin")

    p = sub.add_parser("fft-solve", help="solve from sampled data with the strip FFT formula")
    _common(p, inputs=("samples",))
    p.add_argument("--strip", type=_strip, help="'xi_minus,xi_plus' (default: from the abscissas)")
    p.add_argument("--y0", type=float, help="half-height of the excluded band (default 2)")
    p.add_argument("--y-max", type=float, help="top of the strip scan")

    p = sub.add_parser("demo", help="run a named reproduction")
    p.add_argument("name", choices=("divergence", "heat", "density"))
    p.add_argument("--spec", help="JSON file with default values for any option")
    p.add_argument("--out", help="output CSV path")
    return parser


def _apply_spec(parser: argparse.ArgumentParser, argv: List[str]) -> argparse.Namespace:
    """Parse flags; values from ``--spec`` fill in whatever the flags left unset."""
    args = parser.parse_args(argv)
    if getattr(args, "spec", None):
        spec = _load_json(args.spec)
        if not isinstance(spec, dict):
            raise FormatError("spec file must hold a JSON object")
        for key, value in spec.items():
            key = key.replace("-", "_")
            if not hasattr(args, key):
                raise UsageError(f"unknown option {key!r} in spec file")
            if getattr(args, key) is None:
                setattr(args, key, tuple(value) if isinstance(value, list) else value)
    if getattr(args, "tol", None) is not None and not args.tol > 0:
        raise UsageError("--tol must be positive")
    return args


def _symbol(args):
    if bool(args.symbol) == bool(args.symbol_coeffs):
        raise UsageError("give exactly one of --symbol and --symbol-coeffs")
    return make_symbol(args.symbol) if args.symbol else load_symbol_coeffs(args.symbol_coeffs)


def _input(args, names):
    given = [n for n in names if getattr(args, n, None)]
    if len(given) != 1:
        raise UsageError("give exactly one input source: " + ", ".join("--" + n for n in names))
    n = given[0]
    path = getattr(args, n)
    return {"exppoly": load_exppoly, "taylor": load_taylor, "samples": SampledSignal.from_csv}[n](path)


def _type_of(g) -> float:
    return g.type if isinstance(g, ExpPoly) else g.tau


# --- commands -----------------------------------------------------------------

def cmd_borel(args) -> int:
    g = _input(args, ("exppoly", "taylor"))
    B = borel_exppoly(g) if isinstance(g, ExpPoly) else borel_taylor(g, tol=args.tol or 1e-10)
    R = args.radius if args.radius is not None else _type_of(g) + 1.0
    if not R > _type_of(g):
        raise BadRange(f"radius {R} must exceed the type {_type_of(g)}")
    n = args.points or 64
    theta = 2 * np.pi * np.arange(n) / n
    z = R * np.exp(1j * theta)
    b = np.asarray(B(z))
    rows = [(t, zz.real, zz.imag, v.real, v.imag) for t, zz, v in zip(theta, z, b)]
    _emit(args.out, ["theta", "re_zeta", "im_zeta", "re", "im"], rows)
    return 0


def cmd_solve(args) -> int:
    phi = _symbol(args)
    g = _input(args, ("exppoly", "taylor"))
    a, b, n = args.grid or (-3.0, 3.0, 61)
    x = np.linspace(a, b, int(n))
    method = args.method or "auto"
    lines = []
    if method in ("auto", "atomic") and isinstance(g, ExpPoly) and args.center is None:
        try:
            f = solve_particular_atomic(phi, g)
            vals = np.asarray(f(x))
            lines += ["method: atomic", "particular: " + json.dumps(dump_exppoly(f))]
            method = "atomic"
        except AtomOnZero:
            if method == "atomic":
                raise
            method = "contour"
    elif method == "atomic":
        raise UsageError("--method atomic needs an --exppoly input")
    if method in ("auto", "contour"):
        contour = Circle(args.center, args.radius) if args.center is not None else None
        if contour is not None and args.radius is None:
            raise UsageError("--center needs --radius")
        if args.tau is not None:
            rep = general_solution(phi, g, args.tau, args.radius, grid=x)
        else:
            rep = solve_particular_contour(phi, g, None if contour else args.radius, contour, grid=x,
                                           tol=args.tol or 1e-12)
        vals = rep.values(x)
        c = rep.contour_used
        lines += ["method: contour",
                  f"contour: circle center={_g(np.real(c.center))} radius={_g(c.radius)}",
                  f"residual: {_g(rep.residual)}"]
        lines += [f"warning: {w}" for w in rep.warnings]
    if args.tau is not None:
        basis = homogeneous_basis(phi, args.tau)
        lines.append(f"homogeneous basis ({len(basis)}):")
        lines += ["  " + json.dumps(dump_exppoly(e)) for e in basis]
    print("\n".join(lines))
    _emit(args.out, ["x", "re", "im"], [(xi, v.real, v.imag) for xi, v in zip(x, vals)])
    return 0


def cmd_zeros(args) -> int:
    phi = _symbol(args)
    if args.radius is None:
        raise UsageError("--radius is required")
    Z = find_zeros(phi, args.radius)
    print(f"disk radius: {_g(Z.disk_radius)}")
    print(f"zeros (with multiplicity): {Z.total}")
    if args.out:
        Z.to_csv(args.out)
    else:
        for z, m in Z.zeros:
            print(f"{_g(z.real)},{_g(z.imag)},{m}")
    if args.density_out or args.interval is not None:
        pts = Z.expanded()
        at_origin = np.abs(pts) < 1e-12 * max(1.0, Z.disk_radius)
        if at_origin.any():
            print("note: zero at the origin excluded from the counting functions")
        r = np.geomspace(1.0, Z.disk_radius, 32)
        rep = density_report(pts[~at_origin], r, args.interval)
        print(f"min N/r: {_g(rep.lower_slope)}")
        if rep.exponent_estimate is not None:
            print(f"exponent of convergence: {_g(rep.exponent_estimate)}")
        if rep.levinson_margin is not None:
            print(f"levinson margin: {_g(rep.levinson_margin)}")
        for note in rep.notes:
            print(f"note: {note}")
        if args.density_out:
            write_density_csv(args.density_out, rep)
    return 0


def cmd_fft_solve(args) -> int:
    phi = _symbol(args)
    g = _input(args, ("samples",))
    xm, xp = args.strip if args.strip else (None, None)
    cfg = make_strip_config(phi, g, xm, xp, args.y0 if args.y0 is not None else 2.0, args.y_max)
    sol = fft_solve(phi, g, cfg)
    ab = estimate_decay_abscissas(g)
    print(f"X_plus: {_g(cfg.X_plus)}")
    print(f"X_minus: {_g(cfg.X_minus)}")
    print(f"strip: {_g(cfg.xi_minus)},{_g(cfg.xi_plus)}")
    print(f"Y0: {_g(cfg.Y0)}  Y_max: {_g(cfg.Y_max)}")
    print(f"epsilon: {_g(cfg.epsilon)}")
    for w in ab.warnings + sol.warnings:
        print(f"warning: {w}")
    s = sol.signal
    if args.out:
        s.to_csv(args.out)
    return 0


def cmd_demo(args) -> int:
    if args.name == "divergence":
        t = demos.divergence_table()
        print("K  L1([-2,2]) norm of the partial sum")
        for K, v in zip(t.orders, t.l1_norms):
            print(f"{K}  {_g(v)}")
        print(f"growth K={t.orders[0]} -> K={t.orders[-1]}: {_g(t.l1_norms[-1] / t.l1_norms[0])}")
        _emit(args.out, ["K", "l1_norm"], [(K, float(v)) for K, v in zip(t.orders, t.l1_norms)], quiet=True)
    elif args.name == "heat":
        t = demos.heat_table()
        print(f"exp(t z^2) applied to cos x vs exp(-t) cos x, max error {_g(t.max_error)}")
        rows = [(float(tt), float(x), float(v.real), float(e.real))
                for tt, vs, es in zip(t.times, t.values, t.exact) for x, v, e in zip(t.x, vs, es)]
        _emit(args.out, ["t", "x", "value", "exact"], rows, quiet=True)
    else:
        d = demos.density_table()
        print(f"bound N(r) >= C r - {_g(d.offset)} with C = {_g(d.constant)}: min margin {_g(d.margin)}")
        print(f"min N(r)/r: {_g(np.min(d.N / d.r))}")
        print(f"exponent of convergence: {_g(d.kappa)}")
        print(f"verdict: {d.verdict}")
        rows = [(float(r), int(n), float(N), float(N / r)) for r, n, N in zip(d.r, d.n, d.N)]
        _emit(args.out, ["r", "n", "N", "N_over_r"], rows, quiet=True)
    return 0


def _emit(path, header, rows, quiet=False) -> None:
    if path:
        _write_rows(path, header, rows)
    elif not quiet:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_g(v) if isinstance(v, (float, np.floating)) else v for v in row])


COMMANDS = {"borel": cmd_borel, "solve": cmd_solve, "zeros": cmd_zeros,
            "fft-solve": cmd_fft_solve, "demo": cmd_demo}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_spec(parser, argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except BorelcalcError as exc:
        print(f"borelcalc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:
        # argparse exits on --help (0) and on usage errors (1)
        return exc.code if isinstance(exc.code, int) else 1


if __name__ == "__main__":
    sys.exit(main())
