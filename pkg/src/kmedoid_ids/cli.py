"""Command-line runner.

Subcommands::

    ingest    parse + encode (+ sample) -> dataset.csv / dataset.json
    cluster   standardize + cluster     -> standardization.json, clustering.json
    evaluate  label + score             -> verdicts.csv, metrics.json, metrics.csv
    run       all of the above plus manifest.json
    compare   every selected method on the same data -> comparison.{json,csv,txt}

Exit status: 0 success, 2 config error, 3 data error, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import pipeline
from .errors import IDSError

log = logging.getLogger("kmedoid_ids")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config (JSON) or a run manifest")
    common.add_argument("--seed", type=int, help="override the config's seed")
    common.add_argument("--out", help="override the output directory")
    common.add_argument("--quiet", action="store_true", help="only report errors")

    parser = argparse.ArgumentParser(prog="kmedoid-ids", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", parents=[common], help="parse and encode a KDD99 file")

    p = sub.add_parser("cluster", parents=[common], help="standardize and cluster")
    p.add_argument("--dataset", help="dataset.json sidecar from a previous ingest")
    p.add_argument("--method", choices=pipeline.METHODS)

    p = sub.add_parser("evaluate", parents=[common], help="label clusters and compute metrics")
    p.add_argument("--dataset", help="dataset.json sidecar (default: <out>/dataset.json)")
    p.add_argument("--clustering", help="clustering.json (default: <out>/clustering.json)")

    p = sub.add_parser("run", parents=[common], help="full pipeline")
    p.add_argument("--method", choices=pipeline.METHODS)

    p = sub.add_parser("compare", parents=[common], help="side-by-side method comparison")
    p.add_argument("--method", choices=pipeline.METHODS, action="append",
                   help="repeat to select several (default: all)")
    return parser


def _config(args) -> pipeline.ExperimentConfig:
    cfg = pipeline.ExperimentConfig.load(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["output_dir"] = str(Path(args.out).resolve())
    method = getattr(args, "method", None)
    if isinstance(method, str):
        changes["method"] = method
    return replace(cfg, **changes) if changes else cfg


def _cmd_ingest(cfg, args):
    ds = pipeline.ingest(cfg)
    return {"dataset": pipeline.save_ingested(cfg, ds)}


def _cmd_cluster(cfg, args):
    ds = pipeline.load_or_ingest(cfg, args.dataset)
    paths = {}
    if args.dataset is None:
        paths["dataset"] = pipeline.save_ingested(cfg, ds)
    std, params = pipeline.standardize(ds)
    result = pipeline.run_method(cfg, std, cfg.method)
    paths["standardization"] = cfg.out_dir / "standardization.json"
    params.save(paths["standardization"])
    paths["clustering"] = cfg.out_dir / pipeline.OUTPUT_FILES["clustering"]
    pipeline.write_clustering(paths["clustering"], cfg, result, std)
    return paths


def _cmd_evaluate(cfg, args):
    ds = pipeline.load_or_ingest(cfg, args.dataset or cfg.out_dir / "dataset.json")
    method, result = pipeline.read_clustering(args.clustering or cfg.out_dir / "clustering.json", ds)
    verdicts, instances = pipeline.label(cfg, result, ds)
    report = pipeline.score(cfg, method, ds, verdicts, instances)
    return pipeline.write_evaluation(cfg.out_dir, instances, report, verdicts)


def _cmd_run(cfg, args):
    return pipeline.run_pipeline(cfg)


def _cmd_compare(cfg, args):
    paths = pipeline.compare_methods(cfg, args.method or pipeline.METHODS)
    if not args.quiet:
        sys.stdout.write(paths["table"].read_text(encoding="utf-8"))
    return paths


COMMANDS = {
    "ingest": _cmd_ingest,
    "cluster": _cmd_cluster,
    "evaluate": _cmd_evaluate,
    "run": _cmd_run,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        paths = COMMANDS[args.command](cfg, args)
    except IDSError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    for role, path in paths.items():
        log.info("wrote %s: %s", role, path)
    return 0
