# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""
Command-line entry point: ``ehr-scaling <command> [options]``.

Commands:
 synth      Generate a synthetic events file.
 tokenize   Turn an events file into a token stream, vocabulary, labels and stats.
 stats      Recompute the statistics table of a tokenized corpus.
 train      Train one model (early stopping, or a fixed FLOPs budget).
 isoflop    Run, fit and plot the fixed-compute sweep.
 simulate   Score held-out patients with one checkpoint.
 evaluate   Score checkpoints and write metrics, ROC curves and scaling plots.
 report     FLOPs tables, and refits of a finished sweep.

Exit code is 0 only when every output was written (and, with ``--verify``,
its digest re-checked); any error prints one diagnostic line and exits 1.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import torch

from pipeline_cli import __version__
from pipeline_cli import commands
from pipeline_cli.manifest import OutputLockedError, RunManifest, output_lock, verify_manifest
from pipeline_cli.render import apply_progress, apply_seed, config_help, json_breaker
from zero_shot_evaluator.config import TASKS

logger = logging.getLogger("pipeline_cli")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
RUN_LOG = "run.log"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehr-scaling",
        description="Compute-optimal scaling and zero-shot evaluation of EHR timeline models.",
        epilog="Config sections and their defaults:\n" + config_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON config file (sections as in the epilog).")
    common.add_argument("--seed", type=int, default=None, help="Seed for every seeded section; beats the config file.")
    common.add_argument("--out", type=Path, default=Path("out"), help="Output directory (default: ./out).")
    common.add_argument("--threads", type=int, default=None, help="torch intra-op threads.")
    common.add_argument("--verify", action="store_true", help="Re-check output digests after writing.")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--quiet", action="store_true", help="Warnings only, no progress bars.")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="Generate a synthetic events file.")

    p = sub.add_parser("tokenize", parents=[common], help="Tokenize an events file.")
    p.add_argument("events", type=Path, help="JSON Lines events file.")

    p = sub.add_parser("stats", parents=[common], help="Per-split statistics of a corpus.")
    p.add_argument("corpus", type=Path, help="Directory written by 'tokenize'.")

    p = sub.add_parser("train", parents=[common], help="Train one model.")
    p.add_argument("corpus", type=Path)
    p.add_argument("--budget", type=float, default=None, help="Training FLOPs; omit for early stopping.")
    p.add_argument("--name", default="model", help="Checkpoint file stem.")

    p = sub.add_parser("isoflop", parents=[common], help="Run the fixed-compute sweep.")
    p.add_argument("corpus", type=Path)

    p = sub.add_parser("simulate", parents=[common], help="Score held-out patients with one checkpoint.")
    p.add_argument("checkpoint", type=Path)
    p.add_argument("corpus", type=Path)
    p.add_argument("--task", choices=TASKS, action="append", help="Repeatable; default: every task.")
    p.add_argument("--split", default="test", choices=["train", "validation", "test"])

    p = sub.add_parser("evaluate", parents=[common], help="Metrics and plots for checkpoints.")
    p.add_argument("corpus", type=Path)
    p.add_argument("checkpoints", type=Path, nargs="+")
    p.add_argument("--split", default="test", choices=["train", "validation", "test"])

    p = sub.add_parser("report", parents=[common], help="FLOPs tables and sweep refits.")
    p.add_argument("--corpus", type=Path, default=None, help="Corpus whose vocabulary sizes the grid.")
    p.add_argument("--vocab-size", type=int, default=None)
    p.add_argument("--points", type=Path, default=None, help="isoflop_points.csv of a finished sweep.")
    return parser


def _setup_logging(level: str, quiet: bool, out_dir: Path) -> logging.Handler:
    logging.basicConfig(level=logging.WARNING if quiet else getattr(logging, level), format=LOG_FORMAT, force=True)
    handler = logging.FileHandler(out_dir / RUN_LOG, mode="a", encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    return handler


def _dispatch(args: argparse.Namespace, cfg) -> List[Path]:
    out = args.out
    if args.command == "synth":
        return commands.cmd_synth(cfg, out)
    if args.command == "tokenize":
        return commands.cmd_tokenize(cfg, args.events, out)
    if args.command == "stats":
        return commands.cmd_stats(cfg, args.corpus, out)
    if args.command == "train":
        return commands.cmd_train(cfg, args.corpus, out, args.budget, args.name)
    if args.command == "isoflop":
        return commands.cmd_isoflop(cfg, args.corpus, out)
    if args.command == "simulate":
        return commands.cmd_simulate(cfg, args.checkpoint, args.corpus, out, args.task or list(TASKS), args.split)
    if args.command == "evaluate":
        return commands.cmd_evaluate(cfg, args.checkpoints, args.corpus, out, args.split)
    if args.command == "report":
        return commands.cmd_report(cfg, out, args.corpus, args.vocab_size, args.points)
    raise ValueError(f"unknown command {args.command!r}")


def run(args: argparse.Namespace) -> int:
    """Execute a parsed command line; return the exit code."""
    out_dir: Path = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    handler = _setup_logging(args.log_level, args.quiet, out_dir)
    try:
        with output_lock(out_dir):
            cfg = apply_progress(apply_seed(json_breaker(args.config), args.seed), not args.quiet and sys.stderr.isatty())
            if args.threads:
                torch.set_num_threads(args.threads)
            manifest = RunManifest(
                command=args.command, config_digest=cfg.digest(), seed=args.seed, tool_version=__version__
            )
            previous = manifest.path_in(out_dir)
            previous = RunManifest.load(previous) if previous.exists() else None

            for path in _dispatch(args, cfg):
                manifest.record(out_dir, path)
            manifest.finish()
            manifest.save(out_dir)

            if args.verify:
                bad = verify_manifest(manifest, out_dir)
                if previous is not None and previous.config_digest == manifest.config_digest:
                    bad += [rel for rel, d in manifest.outputs.items() if previous.outputs.get(rel, d) != d]
                if bad:
                    logger.error("digest mismatch: %s", ", ".join(sorted(set(bad))))
                    return 1
                logger.info("verified %d artifacts", len(manifest.outputs))
            logger.info("%s: wrote %d artifacts to %s", args.command, len(manifest.outputs), out_dir)
        return 0
    except (ValueError, TypeError, KeyError, FloatingPointError, OSError, OutputLockedError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(build_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
