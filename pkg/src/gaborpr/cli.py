"""Command line entry point: ``gaborpr {gen,audit,measure,recover,experiment}``."""

import argparse
import json
import sys
from pathlib import Path

from .generators import load_spec
from .harness import ExperimentConfig, MaskSpec, audit_report, build_mask, run_experiment, write_results
from .io import read_measurements, read_signal, write_measurements, write_signal
from .recovery import SolverOptions, sgpr, sgpr_fourier_sparse
from .tfcore import measure_intensities


def _parse_ks(text):
    try:
        ks = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text!r}")
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("sparsities must be positive integers")
    return ks


def _load_mask(text):
    text = text.strip()
    if text in ("full", "fig1a", "fig1b", "explicit", "sizes") and not Path(text).exists():
        return MaskSpec(mode=text) if text == "full" else MaskSpec.from_dict({"mode": text})
    if text.startswith("{"):
        return MaskSpec.from_dict(json.loads(text))
    return MaskSpec.from_dict(json.loads(Path(text).read_text()))


def _write_json(obj, out):
    text = json.dumps(obj, indent=2) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen(args):
    g = load_spec(args.spec).build()
    write_signal(args.out, g)
    print(f"wrote generator of length {g.shape[0]} to {args.out}")


def cmd_audit(args):
    report = audit_report(load_spec(args.spec), args.k)
    _write_json(report, args.out)
    if args.out not in (None, "-"):
        verdicts = {"full": report["full"]["verdict"], "nonvanishing": report["nonvanishing"]["verdict"]}
        verdicts.update({f"sparse(k={k})": r["verdict"] for k, r in report["sparse"].items()})
        print(", ".join(f"{key}: {v}" for key, v in verdicts.items()))


def cmd_measure(args):
    g = read_signal(args.gen)
    x = read_signal(args.signal)
    mask = build_mask(g.shape[0], _load_mask(args.mask), args.seed)
    meas = measure_intensities(x, g, mask.indices())
    write_measurements(args.out, meas)
    print(f"wrote {len(meas)} measurements to {args.out}")


def cmd_recover(args):
    g = read_signal(args.gen)
    meas = read_measurements(args.measurements, g.shape[0])
    opts = SolverOptions(bp_max_iterations=args.bp_max_iter, bp_tolerance=args.bp_tol,
                         eig_method=args.eig_method)
    solve = sgpr_fourier_sparse if args.fourier_sparse else sgpr
    xhat, state = solve(g, meas, None, opts)
    write_signal(args.out, xhat)
    if args.diagnostics:
        out = Path(args.out)
        diag = out.with_name(out.stem + ".diagnostics.json")
        diag.write_text(json.dumps(state.to_dict(include_grids=args.grids), indent=2) + "\n")
        print(f"wrote diagnostics to {diag}")
    for flag in state.flags:
        print(f"warning: {flag}", file=sys.stderr)
    print(f"wrote estimate to {args.out}")


def cmd_experiment(args):
    cfg = ExperimentConfig.from_json(args.config)
    overrides = {}
    if args.n_jobs is not None:
        overrides["n_jobs"] = args.n_jobs
    if args.no_timing:
        overrides["timing"] = False
    if overrides:
        cfg = ExperimentConfig(**{**cfg.__dict__, **overrides})
    result = run_experiment(cfg)
    meta = write_results(result, args.out)
    for row in result.summary:
        print(f"k={row.k:3d}  successes={row.successes}/{row.trials}  rate={float(row.rate):.3f}  "
              f"mean error={row.mean_error:.3e}")
    print(f"wrote {args.out} and {meta}")


def build_parser():
    parser = argparse.ArgumentParser(prog="gaborpr", description="Phase retrieval from Gabor intensities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="construct a generator signal file")
    p.add_argument("--spec", required=True, help="catalog name, inline JSON or JSON file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("audit", help="injectivity audit of a generator")
    p.add_argument("--spec", required=True)
    p.add_argument("--k", type=_parse_ks, default=[1], help="sparsities, e.g. 1,2,3")
    p.add_argument("--out", default=None, help="report path (stdout if omitted)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("measure", help="emit Gabor intensities of a signal")
    p.add_argument("--gen", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--mask", default="full", help="'full', inline JSON or JSON file")
    p.add_argument("--seed", type=int, default=0, help="seed for random masks")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("recover", help="run SGPR on a measurement file")
    p.add_argument("--gen", required=True)
    p.add_argument("--measurements", required=True)
    p.add_argument("--fourier-sparse", action="store_true")
    p.add_argument("--diagnostics", action="store_true", help="write <out>.diagnostics.json")
    p.add_argument("--grids", action="store_true", help="include intermediate grids in diagnostics")
    p.add_argument("--bp-max-iter", type=int, default=2000)
    p.add_argument("--bp-tol", type=float, default=1e-6)
    p.add_argument("--eig-method", choices=("eigh", "jacobi"), default="eigh")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("experiment", help="seeded success-rate sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n-jobs", type=int, default=None)
    p.add_argument("--no-timing", action="store_true", help="leave the ms column empty")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"gaborpr {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
