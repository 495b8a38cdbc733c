"""Command-line interface: ``slpca <command> [options]``.

Exit codes: 0 on success, 1 for numerical or model failures, 2 for usage errors.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import synth
from .axes import ProjectionBasis, axis_correlations, estimate_axes
from .data import DataMatrix, center_standardize, load_csv, write_csv
from .errors import InputError, NumericalError, SlpcaError
from .model import ModelFamily, RegressionSpec, fit, reconstruct, sample, select
from .modelfile import load_model, save_model
from .regress import AdditiveRegression, component_curve


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _read_input(args) -> DataMatrix:
    header = {"auto": None, "yes": True, "no": False}[args.header]
    return load_csv(args.input, has_header=header, delimiter=args.delimiter)


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", required=True, help="CSV data file")
    p.add_argument("--header", choices=("auto", "yes", "no"), default="auto",
                   help="whether the first line is a header (default: detect)")
    p.add_argument("--delimiter", choices=(",", ";"), default=",")


def _add_axes_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("pca", "contiguity"), default="pca")
    p.add_argument("--k", type=int, default=3, help="neighbours for contiguity analysis")
    p.add_argument("--standardize", action="store_true",
                   help="divide centered columns by their standard deviation")


def save_axes(path, axes: ProjectionBasis) -> None:
    np.savetxt(path, axes.axes, fmt="%.17g",
               header=f"slpca axes source={axes.source} p={axes.p} d_max={axes.d_max}")


def load_axes(path) -> ProjectionBasis:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"file not found: {path}")
    source = "user"
    first = path.read_text(encoding="utf-8").splitlines()[:1]
    if first and "source=" in first[0]:
        source = first[0].split("source=")[1].split()[0]
    return ProjectionBasis(np.atleast_2d(np.loadtxt(path, comments="#")), source=source)


def _working_axes(args, data: DataMatrix, d_max: int) -> ProjectionBasis:
    if getattr(args, "axes_file", None):
        axes = load_axes(args.axes_file)
        if axes.p != data.p:
            raise InputError(f"axes file has dimension {axes.p}, data has {data.p} columns")
        return axes
    centered, _ = center_standardize(data, args.standardize)
    return estimate_axes(centered, args.method, d_max, args.k)


def cmd_simulate(args) -> int:
    if args.kind == "helix":
        data = synth.gen_helix(args.n, args.sigma_x, args.sigma, args.seed)
    else:
        sd = np.asarray(args.sd_xy, dtype=float)
        data = synth.gen_hat(args.n, np.diag(sd ** 2), args.sigma, args.seed)
    write_csv(args.output, data)
    variances = data.values.var(axis=0)
    print(f"n\t{data.n}")
    print(f"p\t{data.p}")
    for name, v in zip(data.column_names, variances):
        print(f"var({name})\t{v:.6g}")
    return 0


def cmd_axes(args) -> int:
    data = _read_input(args)
    centered, _ = center_standardize(data, args.standardize)
    d_max = args.d_max or data.p
    axes = estimate_axes(centered, args.method, d_max, args.k)
    if args.output:
        save_axes(args.output, axes)
    X = centered.values @ axes.axes.T
    corr = axis_correlations(X, data)
    print("axis\t" + "\t".join(data.column_names) + "\tprojected_variance")
    for i in range(d_max):
        cells = "\t".join(f"{c:.10f}" for c in corr[i])
        print(f"Proj_{i + 1}\t{cells}\t{X[:, i].var():.6g}")
    return 0


def _print_fit_report(model) -> None:
    print(f"d\t{model.d}")
    print(f"kind\t{model.kind}")
    print(f"m\t{_fmt(model.m)}")
    print(f"axes_source\t{model.axes_source}")
    print(f"n\t{model.n_train}")
    print(f"gamma\t{model.gamma}")
    print(f"log_likelihood\t{_fmt(model.log_likelihood)}")
    print(f"bic\t{_fmt(model.bic)}")
    print(f"sigma2\t{_fmt(model.sigma2)}")
    print(f"degenerate\t{str(model.degenerate).lower()}")
    for j, v in enumerate(np.diag(np.atleast_2d(model.sigma_x))):
        print(f"projected_variance_{j + 1}\t{_fmt(v)}")


def cmd_fit(args) -> int:
    data = _read_input(args)
    axes = _working_axes(args, data, args.d)
    spec = RegressionSpec(args.kind, args.m if args.kind == "spline" else None, args.degree)
    model = fit(data, axes, args.d, spec, args.standardize)
    save_model(model, args.model_out)
    _print_fit_report(model)
    return 0


def _parse_m_list(text: str) -> tuple:
    values = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-")
            values.extend(range(int(lo), int(hi) + 1))
        elif part:
            values.append(int(part))
    return tuple(values)


def cmd_select(args) -> int:
    data = _read_input(args)
    kinds = tuple(k.strip() for k in args.kinds.split(",") if k.strip())
    for k in kinds:
        if k not in ("linear", "spline"):
            raise InputError(f"unknown regression kind {k!r}")
    try:
        m_values = _parse_m_list(args.m_list) if args.m_list else ()
    except ValueError:
        raise InputError(f"cannot parse --m-list {args.m_list!r}") from None
    if "spline" in kinds and not m_values:
        raise InputError("--m-list is required when spline candidates are requested")
    family = ModelFamily(args.d_max, kinds, m_values, args.degree, args.method, args.k)
    axes = _working_axes(args, data, args.d_max)
    report = select(data, family, args.standardize, axes=axes)
    with Path(args.report).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["d", "kind", "m", "gamma", "log_likelihood", "bic", "sigma2", "selected",
                    "error"])
        for i, r in enumerate(report.rows):
            w.writerow([r.d, r.kind, _fmt(r.m), _fmt(r.gamma), _fmt(r.log_likelihood),
                        _fmt(r.bic), _fmt(r.sigma2), int(i == report.selected),
                        r.error or ""])
    if report.selected is None:
        raise NumericalError("every candidate model failed; see the report for details")
    best = report.best
    if args.model_out:
        save_model(best, args.model_out)
    row = report.rows[report.selected]
    print(f"selected\td={row.d}\tkind={row.kind}\tm={_fmt(row.m)}\tbic={_fmt(row.bic)}"
          f"\tsigma2={_fmt(row.sigma2)}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    data = _read_input(args)
    if data.p != model.p:
        raise InputError(f"data has {data.p} columns, model expects {model.p}")
    yhat = reconstruct(model, data)
    norms = np.linalg.norm(data.values - yhat.values, axis=1)
    names = tuple(f"hat_{c}" for c in model.column_names) + ("residual_norm",)
    write_csv(args.output, DataMatrix(np.column_stack([yhat.values, norms]), names))
    print(f"n\t{data.n}")
    print(f"mean_squared_residual\t{_fmt(float(np.mean(norms ** 2)))}")
    return 0


def cmd_sample(args) -> int:
    model = load_model(args.model)
    data = sample(model, args.n, args.seed)
    write_csv(args.output, data)
    print(f"n\t{data.n}")
    print(f"p\t{data.p}")
    return 0


def cmd_curves(args) -> int:
    model = load_model(args.model)
    reg = model.regression
    if not isinstance(reg, AdditiveRegression):
        raise InputError("component curves need an additive spline model; this model is linear")
    if args.grid < 1:
        raise InputError("--grid must be >= 1")
    q = model.p - model.d
    with Path(args.output).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["axis", "t"] + [f"component_{i + 1}" for i in range(q)])
        for j, b in enumerate(reg.bases):
            if args.grid == 1:
                grid = np.array([0.5 * (b.lo + b.hi)])
            else:
                grid = np.linspace(b.lo, b.hi, args.grid)
            values = component_curve(reg, j, grid)
            for t, row in zip(grid, values):
                w.writerow([j + 1, _fmt(t)] + [_fmt(v) for v in row])
    print("intercept\t" + "\t".join(_fmt(v) for v in reg.intercept))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slpca", description="Semi-linear PCA models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic data set")
    p.add_argument("kind", choices=("helix", "hat"))
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--sigma", type=float, default=None,
                   help="noise sd (default 1 for helix, 0.5 for hat)")
    p.add_argument("--sigma-x", type=float, default=3.0, help="helix latent sd")
    p.add_argument("--sd-xy", type=float, nargs=2, default=(1.8, 1.5), metavar=("SX", "SY"),
                   help="hat latent standard deviations")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("axes", help="estimate projection axes")
    _add_input(p)
    _add_axes_options(p)
    p.add_argument("--d-max", type=int, default=None)
    p.add_argument("--output", "-o", default=None, help="axes text file")
    p.set_defaults(func=cmd_axes)

    p = sub.add_parser("fit", help="fit one model")
    _add_input(p)
    _add_axes_options(p)
    p.add_argument("--axes-file", default=None, help="use axes from a file written by 'axes'")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kind", choices=("linear", "spline"), default="spline")
    p.add_argument("--m", type=int, default=None, help="number of B-spline basis functions")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="BIC selection over dimensions and control points")
    _add_input(p)
    _add_axes_options(p)
    p.add_argument("--axes-file", default=None)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--kinds", default="linear,spline")
    p.add_argument("--m-list", default=None, help="e.g. '6,7,8,9' or '9-14'")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--report", required=True, help="TSV output, one row per candidate")
    p.add_argument("--model-out", default=None)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("predict", help="reconstruct points with a fitted model")
    p.add_argument("--model", required=True)
    _add_input(p)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sample", help="draw points from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("curves", help="export additive component curves as TSV")
    p.add_argument("--model", required=True)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_curves)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.sigma is None:
        args.sigma = 1.0 if args.kind == "helix" else 0.5
    if args.command == "fit" and args.kind == "spline" and args.m is None:
        parser.error("--m is required for spline models")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"slpca: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, SlpcaError) as exc:
        print(f"slpca: numerical error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"slpca: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
