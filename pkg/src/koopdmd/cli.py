"""``koopdmd`` command-line interface.

Subcommands: ``fit``, ``predict``, ``spectrum``, ``demo``.

Exit codes: 0 success, 2 input error (bad arguments, malformed or irregular
CSV, unreadable files, indices off the sampling grid), 3 numerical failure
(rank selection, SVD/eigen failures, zero eigenvalues where they cannot be
inverted). Results go to stdout or ``--output``; warnings and errors go to
stderr only.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import dmd, systems
from .dmd import ModeKind
from .errors import InputError, NumericalError
from .io import format_trajectories, load_model, read_trajectories, save_model
from .koopman import KoopmanModel, fit_koopman, parse_dictionary, predict_koopman
from .numerics import format_rank_policy, parse_rank_policy
from .svg import spectrum_svg

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _matrix(text: str) -> np.ndarray:
    rows = [_floats(r) for r in text.split(";")]
    if len({len(r) for r in rows}) != 1:
        raise argparse.ArgumentTypeError("matrix rows must have equal length")
    return np.array(rows)


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _lifted(model):
    return model.lifted_model if isinstance(model, KoopmanModel) else model


def cmd_fit(args) -> int:
    paths = list(args.inputs) + list(args.input or [])
    if not paths:
        raise InputError("no input files given")
    data, digest = read_trajectories(paths, args.select_indices)
    policy = parse_rank_policy(args.rank)
    mode_kind = ModeKind.parse(args.modes)
    if args.dict is None:
        model = dmd.fit(data, policy, mode_kind)
    else:
        model = fit_koopman(data, parse_dictionary(args.dict, data.n), policy, mode_kind)
    inner = _lifted(model)
    provenance = {
        "input_sha256": digest,
        "inputs": [str(p) for p in paths],
        "rank_policy": format_rank_policy(policy),
        "mode_kind": mode_kind.value,
        "dictionary": args.dict or "none",
        "select_indices": args.select_indices,
    }
    save_model(model, args.output, provenance)
    report = dmd.spectrum_report(inner)
    lines = [
        f"model: {args.output} ({'koopman' if isinstance(model, KoopmanModel) else 'dmd'})",
        f"trajectories: {len(data.trajectories)}  n: {data.n}  delta_k: {data.delta_k!r}"
        f"  start_index: {data.start_index!r}",
    ]
    if isinstance(model, KoopmanModel):
        lines.append(f"lifted dimension p: {model.p}  observables: {', '.join(model.dictionary.names())}")
    lines += [
        f"rank r: {inner.r}",
        "eigenvalues: " + ", ".join(_fmt_complex(z) for z in inner.eigenvalues),
        f"dominant |lambda|: {report.entries[report.dominant].modulus:.12g}",
        f"stability: {report.flag.value}",
        f"fit residual: {inner.diagnostics['fit_residual']:.6e}",
    ]
    print("\n".join(lines))
    return EXIT_OK


def _fmt_complex(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def cmd_predict(args) -> int:
    model = load_model(args.model)
    inner = _lifted(model)
    continuous = args.mode == "continuous"
    if not continuous:
        for index in args.at:
            steps = dmd.steps_from_index(inner, index)
            if abs(steps - round(steps)) > 1e-9 * max(1.0, abs(steps)):
                raise InputError(
                    f"index {index!r} is {steps:.6g} sampling steps from the start, not a whole"
                    " step; use --mode continuous"
                )
    n = model.n
    rows = [",".join(["index"] + [f"x{i + 1}" for i in range(n)] + ["imag_residual"])]
    for index in args.at:
        if isinstance(model, KoopmanModel):
            pred = predict_koopman(model, index, continuous)
        else:
            pred = dmd.predict_at(model, index, continuous)
        rows.append(",".join(repr(float(v)) for v in (index, *pred.state, pred.imag_residual)))
    _emit("\n".join(rows) + "\n", args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    model = load_model(args.model)
    inner = _lifted(model)
    report = dmd.spectrum_report(inner)
    out = [report.table(), f"stability: {report.flag.value}",
           f"conditioning max|lambda|/min|lambda|: {report.conditioning:.6g}"]
    out += [f"note: {n}" for n in report.notes]
    print("\n".join(out))
    if args.svg:
        Path(args.svg).write_text(spectrum_svg(inner.eigenvalues, title=str(args.model)))
    return EXIT_OK


def cmd_demo(args) -> int:
    fam = args.family
    if fam == "linear":
        if args.matrix is not None:
            A = args.matrix
        elif args.eigs is not None:
            A = np.diag(args.eigs)
        else:
            raise InputError("demo linear needs --eigs or --matrix")
        x0 = args.x0 if args.x0 is not None else [1.0] * A.shape[0]
        spec = systems.linear_discrete(A, x0, args.steps, args.dk, args.start)
    elif fam == "continuous":
        x0 = args.x0 if args.x0 is not None else [1.0] * args.matrix.shape[0]
        spec = systems.linear_continuous(args.matrix, x0, args.steps, args.dk, args.start)
    elif fam == "randomwalk":
        spec = systems.noisy_random_walk(args.sigma, args.seed, args.x0 or [0.0], args.steps,
                                         args.dk, args.start)
    elif fam == "slowmanifold":
        spec = systems.slow_manifold(args.lam, args.mu, args.x0 or [1.0, 0.0], args.steps,
                                     args.dk, args.start)
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown family {fam}")
    comments = [f"demo {fam}: {spec!r}"]
    if fam == "randomwalk":
        comments.append(f"rng: {systems.RNG_ALGORITHM} seed={args.seed}")
    _emit(format_trajectories(systems.generate(spec), comments), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="koopdmd", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit a DMD or Koopman model to trajectory CSV files")
    f.add_argument("inputs", nargs="*", help="trajectory CSV files")
    f.add_argument("--input", action="append", help="additional trajectory CSV (repeatable)")
    f.add_argument("--rank", default="tol:1e-10", help="fixed:r | tol:tau | energy:eta")
    f.add_argument("--modes", default="auto", choices=["exact", "projected", "auto"])
    f.add_argument("--dict", default=None, help="identity | monomial:d[,const][,std]")
    f.add_argument("--select-indices", type=_floats, default=None,
                   help="keep only rows with these indices (comma-separated)")
    f.add_argument("--output", "-o", required=True, help="model file to write")
    f.set_defaults(func=cmd_fit)

    pr = sub.add_parser("predict", help="predict states at given indices")
    pr.add_argument("model")
    pr.add_argument("--at", type=_floats, required=True, help="indices in original units")
    pr.add_argument("--mode", default="discrete", choices=["discrete", "continuous"])
    pr.add_argument("--output", "-o", default=None)
    pr.set_defaults(func=cmd_predict)

    s = sub.add_parser("spectrum", help="print the eigenvalue table")
    s.add_argument("model")
    s.add_argument("--svg", default=None, help="also write a unit-circle plot")
    s.set_defaults(func=cmd_spectrum)

    d = sub.add_parser("demo", help="write synthetic trajectory CSV")
    d.add_argument("family", choices=["linear", "continuous", "randomwalk", "slowmanifold"])
    d.add_argument("--eigs", type=_floats, default=None, help="diagonal generator (linear)")
    d.add_argument("--matrix", type=_matrix, default=None, help="rows split by ';', e.g. '0,1;-1,0'")
    d.add_argument("--x0", type=_floats, default=None)
    d.add_argument("--steps", type=int, default=20)
    d.add_argument("--dk", type=float, default=1.0)
    d.add_argument("--start", type=float, default=0.0)
    d.add_argument("--sigma", type=float, default=0.01)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--lambda", dest="lam", type=float, default=0.9)
    d.add_argument("--mu", type=float, default=0.5)
    d.add_argument("--output", "-o", default=None)
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_INPUT
        except NumericalError as exc:
            print(f"numerical error: {exc}", file=sys.stderr)
            code = EXIT_NUMERIC
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_INPUT
    for w in caught:
        print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
