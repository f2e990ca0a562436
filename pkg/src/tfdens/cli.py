"""Command-line front end.

Exit codes: 0 success, 1 validation error (bad input, unknown flag),
2 numerical non-convergence.
"""

import argparse
import json
import sys
import warnings
from dataclasses import asdict

import numpy as np

from . import coulomb, envelopes, harness, kernels, selfcheck, tf_core
from .errors import ShootingError, TFDensError

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")


def _write_csv(path, header, columns):
    fh = _open_out(path)
    try:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def _json_out(obj):
    json.dump(obj, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(f"not JSON serializable: {type(v)}")


def _info(**kw):
    sys.stderr.write(json.dumps(kw, default=_jsonable) + "\n")


def cmd_tf_solve(args):
    u = tf_core.solve_tf_universal(tol=args.tol, xmax=args.xmax, n_nodes=args.nodes, tail_mode=args.tail_mode)
    _write_csv(args.output, ("x", "phi", "dphi"), (u.grid, u.phi, u.dphi))
    _info(slope0=u.slope0, residual=u.residual(), restarts=list(u.restarts),
          sommerfeld_ratio_at_xmax=float(u.xmax**3 * u.phi[-1] / 144.0), backend=kernels.BACKEND)
    return EXIT_OK


def _radii(args, scale):
    return np.geomspace(args.rmin * scale, args.rmax * scale, args.points)


def cmd_tf_density(args):
    atom = tf_core.AtomSpec(args.Z, q=args.q)
    u = tf_core.solve_tf_universal()
    r = _radii(args, tf_core.tf_length(args.Z, args.q))
    _write_csv(args.output, ("r", "rho"), (r, tf_core.tf_density(atom, u)(r)))
    return EXIT_OK


def cmd_bohr(args):
    fill = coulomb.ShellFilling(args.K, args.q, args.Z)
    nu = coulomb.coulomb_chemical_potential(fill)
    r = _radii(args, 2.0 * args.K**2 / fill.Z)
    rb = coulomb.bohr_density(fill)(r)
    rs = coulomb.semiclassical_density(fill.Z, nu, args.q)(r)
    _write_csv(args.output, ("r", "rho_bohr", "rho_sc"), (r, rb, rs))
    _info(K=args.K, q=args.q, Z=fill.Z, N=fill.N, nu=nu, support_radius=fill.Z / -nu, surrogate=harness.SURROGATE)
    return EXIT_OK


def cmd_envelope(args):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rec = envelopes.envelope_record(args.a, args.Z, args.delta, args.eps, args.C, args.f_variant,
                                        args.u_l1, args.mes)
    _json_out(rec)
    return EXIT_OK


def cmd_compare(args):
    recs = harness.compare(args.K, args.q, args.radius_rule, args.region, args.p or [1.0], args.tol)
    _json_out([asdict(r) for r in recs])
    return EXIT_OK if all(r.converged for r in recs) else EXIT_NUMERIC


def cmd_sweep(args):
    spec = harness.SweepSpec.from_json(args.spec)
    if args.output:
        spec = harness.SweepSpec(**{**asdict(spec), "output_path": args.output})
    records = harness.run_sweep(spec)
    if not spec.output_path:
        sys.stdout.write(harness.records_to_csv(records))
    return EXIT_OK if all(r.converged for r in records) else EXIT_NUMERIC


def cmd_selfcheck(args):
    failed = 0
    for name, ok, detail in selfcheck.run_all():
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
    print(f"{failed} failed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def build_parser():
    p = _Parser(prog="tfdens", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("tf-solve", help="tabulate the universal Thomas-Fermi function")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--xmax", type=float, default=100.0)
    s.add_argument("--nodes", type=int, default=4000)
    s.add_argument("--tail-mode", choices=("matched", "sommerfeld"), default="matched")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_tf_solve)

    for name, func, helptext in (("tf-density", cmd_tf_density, "Thomas-Fermi density of a neutral atom"),
                                 ("bohr", cmd_bohr, "non-interacting and semiclassical densities")):
        s = sub.add_parser(name, help=helptext)
        if name == "tf-density":
            s.add_argument("Z", type=float)
        else:
            s.add_argument("K", type=int)
        s.add_argument("q", type=int, nargs="?", default=2)
        if name == "bohr":
            s.add_argument("--Z", type=float, default=None, help="nuclear charge (default: neutral)")
        s.add_argument("--rmin", type=float, default=1e-3, help="in units of the natural length")
        s.add_argument("--rmax", type=float, default=10.0)
        s.add_argument("--points", type=int, default=200)
        s.add_argument("-o", "--output")
        s.set_defaults(func=func)

    s = sub.add_parser("envelope", help="all error envelopes at (a, Z) as JSON")
    s.add_argument("a", type=float)
    s.add_argument("Z", type=float)
    s.add_argument("--delta", type=float, default=0.0)
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--f-variant", choices=envelopes.F_VARIANTS, default="paper")
    s.add_argument("--u-l1", type=float, default=None)
    s.add_argument("--mes", type=float, default=None)
    s.set_defaults(func=cmd_envelope)

    s = sub.add_parser("compare", help="one Bohr atom against its semiclassical density")
    s.add_argument("K", type=int)
    s.add_argument("q", type=int, nargs="?", default=2)
    s.add_argument("--radius-rule", default="tf:1.0", help="fixed:A | tf:S (a=S Z^-1/3) | nuclear:T (a=T/Z)")
    s.add_argument("--region", choices=harness.REGION_KINDS, default="annulus")
    s.add_argument("-p", type=float, action="append")
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="run a sweep from a JSON spec, emit CSV")
    s.add_argument("--spec", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("selfcheck", help="run the invariant suite")
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ShootingError as exc:
        print(f"tfdens: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TFDensError, ValueError, OSError) as exc:
        print(f"tfdens: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
