"""Command-line front end: fit paths from CSV, export plot tables, run benchmarks.

Exit codes: 0 success, 1 usage/parameter error, 2 data/parse error,
3 flagged non-convergence under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .data import generate_synthetic, load_csv
from .exceptions import DataError, ParameterError, SparsePathError
from .objectives import ObjectiveSpec, loss_value
from .regularizers import RegularizerSpec, penalty_total
from .solver import PathConfig, fit_path

FAMILY_BY_FLAG = {
    "gaussian": "gaussian",
    "binomial": "binomial",
    "poisson": "poisson",
    "sqrtlasso": "scaled_gaussian",
}


class _Parser(argparse.ArgumentParser):
    # usage problems are parameter errors (exit 1), not data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def _fmt(v: float) -> str:
    return repr(float(v))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparsepath", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("--method", choices=("l1", "mcp", "scad"), default="l1")
        p.add_argument("--family", choices=tuple(FAMILY_BY_FLAG), default="gaussian")
        p.add_argument("--type-gaussian", "--type_gaussian", dest="type_gaussian",
                       choices=("naive", "covariance"), default=None)
        p.add_argument("--gamma", type=float, default=None,
                       help="concavity parameter for mcp/scad (rejected for l1)")
        p.add_argument("--nlambda", type=int, default=100)
        p.add_argument("--lambda-min-ratio", "--lambda_min_ratio", dest="lambda_min_ratio",
                       type=float, default=0.05)
        p.add_argument("--prec", type=float, default=1e-4)

    fit = sub.add_parser("fit", help="fit a regularization path from a CSV file")
    add_model_flags(fit)
    fit.add_argument("--input", required=True, help="CSV file with response and features")
    fit.add_argument("--output", required=True, help="output prefix; writes PREFIX.csv and PREFIX.json")
    fit.add_argument("--response", default="0", help="response column index or header name")
    fit.add_argument("--has-header", "--has_header", dest="has_header", action="store_true")
    fit.add_argument("--strict", action="store_true",
                     help="exit 3 if any path point is flagged non-convergent")

    plot = sub.add_parser("plot", help="turn a fit output pair into a wide path table")
    plot.add_argument("--fit", required=True, help="prefix passed to `fit --output`")
    plot.add_argument("--output", required=True, help="wide-format CSV to write")
    plot.add_argument("--svg", default=None, help="optional solution-path rendering")

    bench = sub.add_parser("bench", help="synthetic-data timing benchmark")
    add_model_flags(bench)
    bench.add_argument("--n", type=int, default=500)
    bench.add_argument("--d", type=int, default=5000)
    bench.add_argument("--sparsity", type=int, default=10)
    bench.add_argument("--rho", type=float, default=0.5)
    bench.add_argument("--noise-sd", dest="noise_sd", type=float, default=1.0)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--repetitions", type=int, default=10)
    bench.add_argument("--max-cells", dest="max_cells", type=int, default=20_000_000,
                       help="guardrail on n*d")
    bench.add_argument("--output", default=None, help="optional JSON report path")
    return parser


def _specs_from_args(args) -> tuple[ObjectiveSpec, RegularizerSpec, PathConfig]:
    if args.method == "l1" and args.gamma is not None:
        raise ParameterError("--gamma is not accepted for method=l1")
    family = FAMILY_BY_FLAG[args.family]
    if args.type_gaussian is not None and family != "gaussian":
        raise ParameterError("--type-gaussian is only accepted for --family gaussian")
    objective = ObjectiveSpec(family=family, gaussian_update=args.type_gaussian)
    reg = RegularizerSpec(kind=args.method, gamma=args.gamma)
    config = PathConfig(nlambda=args.nlambda, lambda_min_ratio=args.lambda_min_ratio,
                        prec=args.prec)
    return objective, reg, config


def _write_fit_outputs(prefix: str, fit, objective: ObjectiveSpec, reg: RegularizerSpec,
                       config: PathConfig, n: int, d: int) -> None:
    csv_path = prefix + ".csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("lambda_index,lambda,feature,coefficient\n")
        coo = fit.beta_path.tocoo()
        order = np.lexsort((coo.row, coo.col))
        for pos in order:
            k, j, v = int(coo.col[pos]), int(coo.row[pos]), float(coo.data[pos])
            fh.write(f"{k},{_fmt(fit.lambdas[k])},{fit.feature_names[j]},{_fmt(v)}\n")
    sidecar = {
        "version": __version__,
        "config": {
            "method": reg.kind,
            "gamma": None if reg.kind == "l1" else reg.gamma,
            "family": objective.family,
            "type_gaussian": objective.gaussian_update,
            "nlambda": config.nlambda,
            "lambda_min_ratio": config.lambda_min_ratio,
            "prec": config.prec,
        },
        "n": n,
        "d": d,
        "feature_names": fit.feature_names,
        "lambdas": [float(v) for v in fit.lambdas],
        "intercepts": [float(v) for v in fit.intercepts],
        "sigmas": None if fit.sigmas is None else [float(v) for v in fit.sigmas],
        "kkt_residuals": [float(v) for v in fit.kkt_residuals],
        "inner_sweep_counts": [int(v) for v in fit.inner_sweep_counts],
        "middle_round_counts": [int(v) for v in fit.middle_round_counts],
        "newton_step_counts": [int(v) for v in fit.newton_step_counts],
        "kkt_scan_counts": [int(v) for v in fit.kkt_scan_counts],
        "converged": [bool(v) for v in fit.converged],
        "dropped_columns": [int(v) for v in fit.dropped_columns],
    }
    with open(prefix + ".json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_fit(args) -> int:
    objective, reg, config = _specs_from_args(args)
    response = args.response
    if isinstance(response, str):
        try:
            response = int(response)
        except ValueError:
            pass
    dataset = load_csv(args.input, has_header=args.has_header, response_column=response)
    fit = fit_path(dataset, objective, reg, config)
    _write_fit_outputs(args.output, fit, objective, reg, config, dataset.n, dataset.d)
    n_flagged = int(np.sum(~fit.converged))
    nnz_final = int(fit.beta_path.getcol(fit.n_lambdas - 1).nnz)
    print(f"fit: {fit.n_lambdas} path points, family={objective.family}, method={reg.kind}")
    print(f"fit: nonzeros at smallest lambda: {nnz_final}; max KKT residual: "
          f"{float(np.max(fit.kkt_residuals)):.3e}; flagged non-convergent: {n_flagged}")
    print(f"fit: wrote {args.output}.csv and {args.output}.json")
    if args.strict and n_flagged:
        print(f"error: {n_flagged} path point(s) flagged non-convergent", file=sys.stderr)
        return 3
    return 0


def _read_fit_outputs(prefix: str):
    try:
        with open(prefix + ".json", encoding="utf-8") as fh:
            sidecar = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read fit sidecar {prefix}.json: {e}") from None
    rows = []
    with open(prefix + ".csv", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "lambda_index,lambda,feature,coefficient":
            raise DataError(f"{prefix}.csv: unexpected header {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise DataError(f"{prefix}.csv line {line_no}: expected 4 fields")
            try:
                rows.append((int(parts[0]), float(parts[1]), parts[2], float(parts[3])))
            except ValueError:
                raise DataError(f"{prefix}.csv line {line_no}: malformed numeric field") from None
    return sidecar, rows


def cmd_plot(args) -> int:
    sidecar, rows = _read_fit_outputs(args.fit)
    lambdas = sidecar["lambdas"]
    features: list[str] = []
    values: dict[str, dict[int, float]] = {}
    for k, _lam, feat, coef in rows:
        if not 0 <= k < len(lambdas):
            raise DataError(f"{args.fit}.csv: lambda_index {k} out of range")
        if feat not in values:
            features.append(feat)
            values[feat] = {}
        values[feat][k] = coef
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["lambda"] + features) + "\n")
        for k, lam in enumerate(lambdas):
            cells = [_fmt(lam)] + [_fmt(values[f].get(k, 0.0)) for f in features]
            fh.write(",".join(cells) + "\n")
    print(f"plot: wrote {args.output} ({len(lambdas)} rows, {len(features)} feature columns)")
    if args.svg:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("plot: matplotlib unavailable, skipped SVG rendering", file=sys.stderr)
            return 0
        fig, ax = plt.subplots(figsize=(6, 4))
        for feat in features:
            series = [values[feat].get(k, 0.0) for k in range(len(lambdas))]
            ax.plot(lambdas, series, lw=1)
        ax.set_xscale("log")
        ax.invert_xaxis()
        ax.set_xlabel("lambda")
        ax.set_ylabel("coefficient")
        fig.tight_layout()
        fig.savefig(args.svg, format="svg")
        plt.close(fig)
        print(f"plot: wrote {args.svg}")
    return 0


def cmd_bench(args) -> int:
    if args.n < 2 or args.d < 1:
        raise ParameterError("bench requires n >= 2 and d >= 1")
    if args.n * args.d > args.max_cells:
        raise ParameterError(
            f"n*d = {args.n * args.d} exceeds the guardrail of {args.max_cells}; raise --max-cells")
    if args.repetitions < 1:
        raise ParameterError("repetitions must be >= 1")
    objective, reg, config = _specs_from_args(args)
    dataset, _ = generate_synthetic(args.n, args.d, args.sparsity, args.rho,
                                    family=objective.family, noise_sd=args.noise_sd,
                                    seed=args.seed)

    # warm up the compiled kernels so timings measure the algorithm, not the JIT
    warm, _ = generate_synthetic(20, 10, 2, 0.0, family=objective.family, seed=args.seed)
    fit_path(warm, objective, reg, PathConfig(nlambda=3, prec=args.prec))

    def run(screen: bool):
        times = []
        fit = None
        for _ in range(args.repetitions):
            t0 = time.perf_counter()
            fit = fit_path(dataset, objective, reg, config, screen=screen)
            times.append(time.perf_counter() - t0)
        return fit, np.asarray(times)

    fit_s, t_s = run(screen=True)
    fit_n, t_n = run(screen=False)

    k_last = fit_s.n_lambdas - 1
    lam_last = float(fit_s.lambdas[k_last])
    beta_orig = fit_s.beta_path.getcol(k_last).toarray().ravel()
    beta_std = beta_orig * fit_s.column_scales
    sigma_last = None if fit_s.sigmas is None else float(fit_s.sigmas[k_last])
    objective_value = loss_value(objective, dataset, beta_orig, float(fit_s.intercepts[k_last]),
                                 sigma_last) + penalty_total(reg, beta_std, lam_last)
    report = {
        "n": args.n, "d": args.d, "sparsity": args.sparsity, "rho": args.rho,
        "seed": args.seed, "repetitions": args.repetitions,
        "family": objective.family, "method": reg.kind,
        "nlambda": config.nlambda, "lambda_min_ratio": config.lambda_min_ratio,
        "prec": config.prec,
        "screened": {
            "mean_seconds": float(np.mean(t_s)), "sd_seconds": float(np.std(t_s)),
            "total_kkt_scans": int(np.sum(fit_s.kkt_scan_counts)),
            "flagged": int(np.sum(~fit_s.converged)),
        },
        "no_screening": {
            "mean_seconds": float(np.mean(t_n)), "sd_seconds": float(np.std(t_n)),
            "total_kkt_scans": int(np.sum(fit_n.kkt_scan_counts)),
            "flagged": int(np.sum(~fit_n.converged)),
        },
        "speedup_ratio": float(np.mean(t_n) / np.mean(t_s)),
        "final_lambda_objective": float(objective_value),
        "final_lambda_nonzeros": int(np.count_nonzero(beta_orig)),
        "max_l_inf_gap_between_modes": float(
            np.max(np.abs(fit_s.coefficients() - fit_n.coefficients()))
            if fit_s.n_lambdas == fit_n.n_lambdas else np.nan),
    }
    print(f"bench: n={args.n} d={args.d} s={args.sparsity} rho={args.rho} "
          f"family={objective.family} method={reg.kind} reps={args.repetitions} "
          f"nlambda={config.nlambda}")
    scr, nos = report["screened"], report["no_screening"]
    print(f"bench: screened      {scr['mean_seconds']:.3f}s +/- {scr['sd_seconds']:.3f}s  "
          f"(kkt scans: {scr['total_kkt_scans']}, flagged: {scr['flagged']})")
    print(f"bench: no-screening  {nos['mean_seconds']:.3f}s +/- {nos['sd_seconds']:.3f}s  "
          f"(kkt scans: {nos['total_kkt_scans']}, flagged: {nos['flagged']})")
    print(f"bench: speedup ratio {report['speedup_ratio']:.2f}x; "
          f"final-lambda objective {report['final_lambda_objective']:.6f}; "
          f"nonzeros {report['final_lambda_nonzeros']}")
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"bench: wrote {args.output}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "fit":
            return cmd_fit(args)
        if args.command == "plot":
            return cmd_plot(args)
        return cmd_bench(args)
    except ParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SparsePathError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
