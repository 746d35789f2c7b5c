"""Command-line entry point.

One JSON config file drives everything; flags override individual config
values. Stages can run individually (each reads only its documented inputs
and upstream artifacts) or end to end with ``run``. Exit codes: 0 success,
2 config error, 3 input error, 4 stage failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .pipeline import (
    EXIT_CONFIG,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_STAGE,
    STAGES,
    ConfigError,
    InputError,
    PipelineRun,
    RunConfig,
    StaleArtifactError,
    simulate,
)

logger = logging.getLogger(__name__)

_OVERRIDE_FLAGS = [
    ("--out", "output_dir", str, "output directory (also via NARRANET_OUTPUT_DIR)"),
    ("--master-seed", "master_seed", int, "master seed all module seeds derive from"),
    ("--min-cooc", "min_cooc", int, "seed co-occurrence threshold for contextual groups"),
    ("--k-override", "k_override", int, "fixed sub-node count per group"),
    ("--kmeans-seed", "kmeans_seed", int, "explicit clustering seed (else derived)"),
    ("--distance", "distance", str, "k-means distance: euclidean or cosine"),
    ("--min-edge-weight", "min_edge_weight", int, "edge weight threshold"),
    ("--runs", "runs", int, "number of community-detection runs"),
    ("--tau-core", "tau_core", float, "co-assignment threshold for community cores"),
    ("--tau-relax", "tau_relax", float, "relaxed threshold for peripheral members"),
    ("--community-seed", "community_seed", int, "explicit community-detection seed (else derived)"),
    ("--width", "width", int, "news window width in days"),
    ("--shift", "shift", int, "news window shift in days"),
    ("--top-tfidf", "top_tfidf", int, "per-window TF-IDF entity cutoff"),
    ("--top-freq", "top_freq", int, "constant high-frequency entity cutoff"),
    ("--baseline-samples", "baseline_samples", int, "random communities per baseline"),
    ("--baseline-size", "baseline_size", int, "words per random community"),
    ("--metric-seed", "metric_seed", int, "explicit coverage-baseline seed (else derived)"),
    ("--max-lag", "max_lag", int, "cross-correlation lag bound in days"),
    ("--workers", "workers", int, "parallel workers for community runs"),
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narranet",
        description="Estimate narrative-framework networks and their news entanglement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in list(STAGES) + ["run", "simulate"]:
        p = sub.add_parser(command, help=f"run the {command} stage" if command in STAGES else None)
        p.add_argument("-c", "--config", required=True, help="JSON config file")
        p.add_argument("--force", action="store_true", help="ignore stale upstream artifacts")
        p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        for flag, dest, typ, help_text in _OVERRIDE_FLAGS:
            p.add_argument(flag, dest=dest, type=typ, default=None, help=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {
        dest: getattr(args, dest)
        for _, dest, _, _ in _OVERRIDE_FLAGS
        if getattr(args, dest, None) is not None
    }
    try:
        config = RunConfig.from_file(args.config, overrides)
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_CONFIG
    except InputError as exc:
        logger.error("input error: %s", exc)
        return EXIT_INPUT

    try:
        if args.command == "simulate":
            paths = simulate(config, config.output_dir)
            for name, path in sorted(paths.items()):
                print(f"{name}: {path}")
            return EXIT_OK
        run = PipelineRun(config)
        if args.command == "run":
            manifest = run.run_all()
            print(f"manifest: {manifest}")
            return EXIT_OK
        run.check_upstream(args.command, force=args.force)
        outputs = getattr(run, f"stage_{args.command}")()
        for path in outputs:
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_CONFIG
    except InputError as exc:
        logger.error("input error in stage %s: %s", args.command, exc)
        return EXIT_INPUT
    except StaleArtifactError as exc:
        logger.error("%s", exc)
        return EXIT_STAGE
    except Exception as exc:  # stage failures keep the stage name visible
        logger.error("stage %s failed: %s", args.command, exc)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
