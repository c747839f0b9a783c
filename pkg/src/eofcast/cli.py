"""Command line entry point: ``eofcast <stage> --config cfg.json``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical
failure.
"""
import argparse
import logging
import sys

from . import pipeline
from .config import load_config, write_schema
from .errors import ConfigError, DataError, NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


def _parser():
    parser = argparse.ArgumentParser(prog="eofcast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name, help, seed_required=False):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output directory (overrides 'out')")
        p.add_argument("--data", help="tidy CSV or field directory (overrides 'data')")
        p.add_argument("--seed", type=int, required=seed_required)
        p.add_argument("--k", type=int, help="number of clusters")
        p.add_argument("--horizon", type=int)
        p.add_argument("--threshold", type=float, help="explained-variance threshold")
        p.add_argument("--jobs", type=int, help="parallel cluster jobs")
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    stage("ingest", "read the input data into the output directory")
    stage("cluster", "DTW + Ward clustering and grid-region assignment")
    stage("coherence", "var(SAI) and DOF per cluster and altitude class")
    stage("decompose", "per-cluster EOF decomposition of the training window")
    stage("forecast", "Wavelet-ANN forecast of the leading EOFs and reconstruction")
    stage("evaluate", "medoid accuracy, figure data and report")
    stage("run", "run the full pipeline", seed_required=True)
    demo = sub.add_parser("demo-data", help="write the bundled synthetic dataset and config")
    demo.add_argument("directory")
    schema = sub.add_parser("schema", help="write the configuration JSON schema")
    schema.add_argument("path", nargs="?", default="-")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "schema":
        if args.path == "-":
            import json
            from .config import SCHEMA
            print(json.dumps(SCHEMA, indent=2))
        else:
            write_schema(args.path)
        return EXIT_OK

    if args.command == "demo-data":
        from .synthetic import write_demo
        print(write_demo(args.directory))
        return EXIT_OK

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {"out": args.out, "data": args.data, "seed": args.seed, "k": args.k,
                 "horizon": args.horizon, "threshold": args.threshold, "jobs": args.jobs}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "run":
            report = pipeline.run_pipeline(cfg)
            for r in report.clusters:
                a = r.accuracy
                print(f"cluster {r.cluster}: {r.n_grid_points} points, K={r.k_used} "
                      f"({r.explained_variance:.3f} var), MAE {a.mae:.4g}, RMSE {a.rmse:.4g}")
        else:
            pipeline.run_stage(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
