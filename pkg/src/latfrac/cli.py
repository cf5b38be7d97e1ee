"""Command-line entry point: ``latfrac <command> [<subcommand>] [flags]``.

Exit codes: 0 success, 1 an experiment (or atom check) failed its
assertions, 2 bad input or an invalid spec.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments as ex
from .atoms import Atom, make_atom, validate_atom
from .errors import LatfracError, SpecError
from .hardy import DilationGrid, hardy_maximal, hp_quasinorm
from .lattice import CubeWindow, FractionalSpec, LatticeSequence, load_json, validate_spec
from .operators import apply_riesz, apply_T, fractional_maximal, fractional_maximal_fast
from .report import ExperimentReport

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _write(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(args, obj) -> None:
    _write(args, json.dumps(obj, indent=1) + "\n")


def _load_spec(args) -> tuple[FractionalSpec, float | None]:
    if getattr(args, "spec", None):
        return FractionalSpec.from_json(load_json(args.spec)), None
    if getattr(args, "preset", None):
        return ex.preset(args.preset)
    raise SpecError("give --spec FILE or --preset NAME")


def _load_sequence(args) -> LatticeSequence:
    if not args.input:
        raise SpecError("--input FILE is required")
    return LatticeSequence.from_json(load_json(args.input))


def _window(args, n: int) -> CubeWindow | None:
    if args.window_radius is None:
        if args.window_center is not None:
            raise SpecError("--window-center needs --window-radius")
        return None
    center = args.window_center if args.window_center is not None else [0] * n
    if len(center) != n:
        raise SpecError(f"--window-center has {len(center)} coordinates, expected {n}")
    return CubeWindow(tuple(center), args.window_radius)


def _grid(args) -> DilationGrid:
    return DilationGrid(args.t_min, args.t_max, args.per_octave)


def _emit_report(args, rep: ExperimentReport) -> int:
    _write(args, rep.to_csv() if args.format == "csv" else json.dumps(rep.to_json(), indent=1) + "\n")
    for name, ok in rep.checks.items():
        if not ok:
            print(f"latfrac: check {name} failed", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# operations


def cmd_apply(args) -> int:
    spec, _ = _load_spec(args)
    b = _load_sequence(args)
    res = apply_T(spec, b, _window(args, spec.n), args.q)
    _dump(args, res.to_json())
    return EXIT_OK


def cmd_riesz(args) -> int:
    if args.alpha is None:
        raise SpecError("--alpha is required")
    b = _load_sequence(args)
    res = apply_riesz(b, args.alpha, _window(args, b.n), args.q)
    _dump(args, res.to_json())
    return EXIT_OK


def cmd_maximal(args) -> int:
    b = _load_sequence(args)
    alpha = args.alpha or 0.0
    out = _window(args, b.n)
    if out is None:
        box = b.bounding_window() or CubeWindow.origin(b.n, 0)
        out = CubeWindow(box.center, 2 * box.radius + 8)
    fn = fractional_maximal if args.brute else fractional_maximal_fast
    _dump(args, fn(b, alpha, out).to_json())
    return EXIT_OK


def cmd_atom_gen(args) -> int:
    if args.p is None:
        raise SpecError("--p is required")
    if args.window_radius is None:
        raise SpecError("--window-radius (the cube radius N) is required")
    n = len(args.window_center) if args.window_center is not None else args.n
    cube = _window(args, n)
    atoms = [make_atom(cube, args.p, args.seed + k, args.family) for k in range(args.count)]
    if args.count == 1:
        _dump(args, atoms[0].to_json())
    else:
        _dump(args, {"seeds": [a.seed for a in atoms], "digests": [a.digest() for a in atoms], "atoms": [a.to_json() for a in atoms]})
    return EXIT_OK


def cmd_atom_check(args) -> int:
    obj = load_json(args.input) if args.input else None
    if obj is None:
        raise SpecError("--input FILE is required")
    items = obj["atoms"] if isinstance(obj, dict) and "atoms" in obj else [obj]
    reports = []
    for item in items:
        if "coefficients" in item:
            a = Atom.from_json(item)
            rep = validate_atom(a)
        else:
            for key in ("p", "cube"):
                if key not in item and (key != "p" or args.p is None):
                    raise SpecError(f"atom file is missing field {key!r}")
            seq = LatticeSequence.from_json(item)
            rep = validate_atom(seq, CubeWindow.from_json(item["cube"]), item.get("p", args.p), exact=args.exact)
        reports.append({"valid": rep.valid, "exact": rep.exact, "sup_norm": rep.sup_norm, "sup_limit": rep.sup_limit, "violations": rep.violations})
    _dump(args, reports[0] if len(reports) == 1 else reports)
    return EXIT_OK if all(r["valid"] for r in reports) else EXIT_FAILED


def cmd_hardy_maximal(args) -> int:
    b = _load_sequence(args)
    _dump(args, {**hardy_maximal(b, _grid(args), _window(args, b.n)).to_json(), "grid": _grid(args).to_json()})
    return EXIT_OK


def cmd_hardy_norm(args) -> int:
    if args.p is None:
        raise SpecError("--p is required")
    b = _load_sequence(args)
    _dump(args, hp_quasinorm(b, args.p, _grid(args), _window(args, b.n)).to_json())
    return EXIT_OK


def cmd_spec_validate(args) -> int:
    spec, _ = _load_spec(args)
    rep = validate_spec(spec)
    _dump(args, {"valid": rep.valid, "violations": rep.violations, "fingerprint": spec.fingerprint()})
    return EXIT_OK if rep.valid else EXIT_INPUT


# ---------------------------------------------------------------------------
# experiments


def _spec_and_p(args):
    spec, preset_p = _load_spec(args)
    p = args.p if args.p is not None else preset_p
    if p is None:
        raise SpecError("--p is required with --spec")
    return spec, p


def cmd_exp_tail(args) -> int:
    return _emit_report(args, ex.exp_tail(args.n_list, args.eps, args.N))


def cmd_exp_lplq(args) -> int:
    spec, _ = _load_spec(args)
    p = args.p if args.p is not None else 2.0
    return _emit_report(args, ex.exp_lplq(spec, p, args.trials, args.radii, args.seed))


def cmd_exp_atom_uniform(args) -> int:
    spec, p = _spec_and_p(args)
    return _emit_report(args, ex.exp_atom_uniform(spec, p, args.count, args.N, args.seed))


def cmd_exp_maximal_bound(args) -> int:
    p = args.p if args.p is not None else 1.5
    alpha = args.alpha if args.alpha is not None else 0.5
    return _emit_report(args, ex.exp_maximal_bound(p, alpha, args.trials, args.radii, args.seed, n=args.n))


def cmd_exp_domination(args) -> int:
    spec, p = _spec_and_p(args)
    return _emit_report(args, ex.exp_domination(spec, p, args.atoms, args.samples, args.seed, args.N))


def cmd_exp_regions(args) -> int:
    spec, _ = _load_spec(args)
    p = args.p if args.p is not None else 2.0
    return _emit_report(args, ex.exp_regions(spec, args.trials, args.seed, p))


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, spec=False, seq=False, window=False, grid=False, report=False):
    p.add_argument("--out", help="output file (default: standard output)")
    if spec:
        p.add_argument("--spec", help="operator spec JSON file")
        p.add_argument("--preset", choices=sorted(ex.PRESETS), help="built-in operator preset")
    if seq:
        p.add_argument("--input", help="sequence JSON file")
    if window:
        p.add_argument("--window-center", type=_ints, help="comma-separated center of the output cube")
        p.add_argument("--window-radius", type=int, help="radius of the output cube")
    if grid:
        p.add_argument("--t-min", type=float, default=2.0**-4)
        p.add_argument("--t-max", type=float, default=2.0**10)
        p.add_argument("--per-octave", type=int, default=16)
    if report:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latfrac", description="Discrete fractional operators on Z^n and their verification experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", help="evaluate T_{alpha,m} b on a window")
    _common(p, spec=True, seq=True, window=True)
    p.add_argument("--q", type=float, help="also certify the l^q tail outside the window")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("riesz", help="discrete Riesz potential")
    _common(p, seq=True, window=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--q", type=float)
    p.set_defaults(func=cmd_riesz)

    p = sub.add_parser("maximal", help="centered fractional maximal function")
    _common(p, seq=True, window=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--brute", action="store_true", help="use the definitional path instead of prefix sums")
    p.set_defaults(func=cmd_maximal)

    atom = sub.add_parser("atom", help="atom generation and checking").add_subparsers(dest="sub", required=True)
    p = atom.add_parser("gen", help="generate seeded atoms on a cube")
    _common(p, window=True)
    p.add_argument("--p", type=float)
    p.add_argument("--n", type=int, default=1, help="dimension when --window-center is omitted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--family", choices=("uniform", "smooth"), default="uniform")
    p.set_defaults(func=cmd_atom_gen)
    p = atom.add_parser("check", help="validate an atom file or corpus")
    _common(p, seq=True)
    p.add_argument("--p", type=float)
    p.add_argument("--exact", action="store_true", help="exact rational moment check for plain sequences")
    p.set_defaults(func=cmd_atom_check)

    hardy = sub.add_parser("hardy", help="Hardy-space maximal function").add_subparsers(dest="sub", required=True)
    p = hardy.add_parser("maximal")
    _common(p, seq=True, window=True, grid=True)
    p.set_defaults(func=cmd_hardy_maximal)
    p = hardy.add_parser("norm")
    _common(p, seq=True, window=True, grid=True)
    p.add_argument("--p", type=float)
    p.set_defaults(func=cmd_hardy_norm)

    spec = sub.add_parser("spec", help="operator spec utilities").add_subparsers(dest="sub", required=True)
    p = spec.add_parser("validate")
    _common(p, spec=True)
    p.set_defaults(func=cmd_spec_validate)

    exp = sub.add_parser("exp", help="verification experiments").add_subparsers(dest="sub", required=True)
    p = exp.add_parser("tail")
    _common(p, report=True)
    p.add_argument("--n-list", type=_ints, default=[1, 2, 3])
    p.add_argument("--eps", type=_floats, default=[0.5, 1.0, 2.0])
    p.add_argument("--N", type=_ints, default=[1, 2, 4, 8, 16])
    p.set_defaults(func=cmd_exp_tail)

    p = exp.add_parser("lplq")
    _common(p, spec=True, report=True)
    p.add_argument("--p", type=float)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--radii", type=_ints, default=[8, 16, 32, 64])
    p.set_defaults(func=cmd_exp_lplq)

    p = exp.add_parser("atom-uniform")
    _common(p, spec=True, report=True)
    p.add_argument("--p", type=float)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--N", type=_ints, default=[1, 2, 4, 8, 16, 32])
    p.set_defaults(func=cmd_exp_atom_uniform)

    p = exp.add_parser("maximal-bound")
    _common(p, report=True)
    p.add_argument("--p", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--radii", type=_ints, default=[8, 16, 32, 64])
    p.set_defaults(func=cmd_exp_maximal_bound)

    p = exp.add_parser("domination")
    _common(p, spec=True, report=True)
    p.add_argument("--p", type=float)
    p.add_argument("--atoms", type=int, default=1280)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--N", type=_ints, default=list(range(1, 33)))
    p.set_defaults(func=cmd_exp_domination)

    p = exp.add_parser("regions")
    _common(p, spec=True, report=True)
    p.add_argument("--p", type=float)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_exp_regions)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (LatfracError, OSError, KeyError, TypeError) as exc:
        print(f"latfrac: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
