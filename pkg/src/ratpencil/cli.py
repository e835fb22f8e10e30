"""Command-line interface: ``ratpencil <command> ...``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

from . import io
from .errors import InvalidInputError, NumericalFailure
from .experiments import NoiseSpec, NoiseTarget, compare_aaa, run_experiment, write_csv
from .rational import fourier_closed_form, recover, recover_from_samples, sample_unit_circle
from .sensitivity import rational_sensitivity_report

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _emit_json(obj, out):
    if out in (None, "-"):
        sys.stdout.write(io.dumps(obj) + "\n")
    else:
        io.save_json(obj, out)


def _emit_csv(reports, out):
    write_csv(reports, sys.stdout if out in (None, "-") else out)


def cmd_generate(args):
    r = io.rational_from_json(io.load_json(args.function))
    if args.samples:
        data = io.samples_to_json(sample_unit_circle(r, args.n))
    else:
        data = io.window_to_json(fourier_closed_form(r, args.n))
    _emit_json(data, args.out)


def cmd_recover(args):
    data = io.data_from_json(io.load_json(args.data))
    L = data.N if args.l is None else args.l
    if hasattr(data, "neg"):
        est = recover(data, L, args.m1, args.m2)
    else:
        est = recover_from_samples(data, L, args.m1, args.m2)
    _emit_json(io.rational_to_json(est), args.out)


def cmd_sensitivity(args):
    r = io.rational_from_json(io.load_json(args.function))
    _emit_json(io.sensitivity_to_json(rational_sensitivity_report(r)), args.out)


def _noise(args, target):
    return NoiseSpec(args.sigma, args.trials, args.seed, target)


def cmd_experiment(args):
    r = io.rational_from_json(io.load_json(args.function))
    rep = run_experiment(r, args.n, _noise(args, args.target), L=args.l, m1=args.m1, m2=args.m2,
                         workers=args.workers)
    _emit_csv(rep, args.out)


def cmd_compare_aaa(args):
    r = io.rational_from_json(io.load_json(args.function))
    reps = compare_aaa(r, args.n, _noise(args, NoiseTarget.SAMPLES), L=args.l, m1=args.m1, m2=args.m2,
                       workers=args.workers)
    _emit_csv(reps, args.out)


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ratpencil", description="Rational function recovery from Fourier data via Hankel pencils.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="Fourier coefficients or unit-circle samples of a function")
    g.add_argument("--function", required=True, help="rational function JSON")
    g.add_argument("--n", type=int, required=True, help="window size N")
    kind = g.add_mutually_exclusive_group()
    kind.add_argument("--samples", action="store_true", help="4N unit-circle samples")
    kind.add_argument("--coeffs", action="store_true", help="exact coefficients k=±1..±2N (default)")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("recover", help="recover poles and residues from a data file")
    r.add_argument("--data", required=True, help="output of 'generate'")
    r.add_argument("--l", type=int, default=None, help="pencil width L (default N)")
    r.add_argument("--m1", type=_nonneg_int, default=None, help="number of poles inside the unit disk")
    r.add_argument("--m2", type=_nonneg_int, default=None, help="number of poles outside")
    r.add_argument("--out", default="-")
    r.set_defaults(func=cmd_recover)

    s = sub.add_parser("sensitivity", help="pole sensitivity report")
    s.add_argument("--function", required=True)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sensitivity)

    for name, func, doc in (("experiment", cmd_experiment, "noisy recovery statistics"),
                            ("compare-aaa", cmd_compare_aaa, "Hankel pencil vs AAA on noisy samples")):
        e = sub.add_parser(name, help=doc)
        e.add_argument("--function", required=True)
        e.add_argument("--n", type=int, required=True)
        e.add_argument("--l", type=int, default=None, help="pencil width L (default N)")
        e.add_argument("--m1", type=_nonneg_int, default=None)
        e.add_argument("--m2", type=_nonneg_int, default=None)
        e.add_argument("--sigma", type=float, required=True)
        e.add_argument("--trials", type=int, default=10)
        e.add_argument("--seed", type=_nonneg_int, default=0)
        e.add_argument("--workers", type=int, default=1)
        if name == "experiment":
            e.add_argument("--target", choices=[t.value for t in NoiseTarget], default="coefficients")
        e.add_argument("--out", default="-")
        e.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
