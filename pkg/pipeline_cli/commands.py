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
Implementations of the CLI subcommands.

Each ``cmd_*`` function reads its inputs, writes its artifacts under
``out_dir`` and returns the paths written, which the caller records in the
run manifest.

Corpus directory layout (written by `cmd_tokenize`)::

    tokens.bin      binary token stream
    vocab.txt       id<TAB>token
    patients.csv    patient_id, split, offset, length, labels
    stats.csv       per-split timeline statistics
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import pandas as pd

from pipeline_cli.render import RunConfig
from scaling_law_generator.checkpoint import load_checkpoint, save_checkpoint, save_loss_curve
from scaling_law_generator.config import default_grid
from scaling_law_generator.isoflop import (
    analyze_sweep,
    fits_table,
    load_manifest,
    make_trainer,
    power_law_table,
    run_sweep,
)
from scaling_law_generator.model import MicroLlama, count_params
from scaling_law_generator.physics import flops_table, training_flops_per_token, tokens_for_budget
from scaling_law_generator.plotter import plot_isoflop_figure, plot_loss_curve, save_svg
from scaling_law_generator.train import train
from timeline_generator.binning import fit_binners
from timeline_generator.corpus import SPLIT_NAMES, segment_corpus, split_patients
from timeline_generator.models import PatientTimeline, TokenStream
from timeline_generator.read import load_events, save_events
from timeline_generator.stats import compute_stats, save_stats_csv
from timeline_generator.stream import load_patient_table, load_stream, patient_table, save_patient_table, save_stream
from timeline_generator.synth import generate_synthetic_cohort
from timeline_generator.tokenizer import build_corpus_vocabulary, build_timeline
from timeline_generator.vocab import Vocabulary
from zero_shot_evaluator.io import save_cohort_csv, save_metrics_csv
from zero_shot_evaluator.labels import icu_mortality_label, readmission_label
from zero_shot_evaluator.metrics import cohort_metrics, loss_vs_metric_regression, size_vs_metric_regression
from zero_shot_evaluator.plot import plot_metric_vs, plot_roc
from zero_shot_evaluator.rollout import score_cohort

logger = logging.getLogger(__name__)

EVENTS_FILE = "events.jsonl"
STREAM_FILE = "tokens.bin"
VOCAB_FILE = "vocab.txt"
PATIENTS_FILE = "patients.csv"
STATS_FILE = "stats.csv"
LABEL_COLUMNS = {"icu_mortality": "mortality_label", "readmission_30d": "readmission_label"}


# ── corpus files ─────────────────────────────────────────────────────────────
@dataclass
class Corpus:
    """A tokenized corpus read back from disk (token ages are not stored)."""

    vocab: Vocabulary
    patients: pd.DataFrame
    timelines: Dict[str, List[PatientTimeline]]

    def labels(self, task: str) -> Dict[str, Optional[int]]:
        col = self.patients[LABEL_COLUMNS[task]]
        return {pid: (None if pd.isna(v) else int(v)) for pid, v in zip(self.patients["patient_id"], col)}


def load_corpus(corpus_dir: Path) -> Corpus:
    """Read the files written by `cmd_tokenize`.

    Raises:
        ValueError: If stream, vocabulary and patient table disagree.
    """
    corpus_dir = Path(corpus_dir)
    vocab = Vocabulary.load(corpus_dir / VOCAB_FILE)
    stream = load_stream(corpus_dir / STREAM_FILE)
    table = load_patient_table(corpus_dir / PATIENTS_FILE)
    if stream.vocab_size != len(vocab):
        raise ValueError(f"stream declares {stream.vocab_size} tokens, vocabulary holds {len(vocab)}")
    segments = stream.segments()
    if len(segments) != len(table):
        raise ValueError(f"{len(segments)} stream segments for {len(table)} patient rows")
    timelines: Dict[str, List[PatientTimeline]] = {name: [] for name in SPLIT_NAMES}
    for row, seg in zip(table.itertuples(index=False), segments):
        if len(seg) != row.length:
            raise ValueError(f"patient {row.patient_id}: table length {row.length}, stream holds {len(seg)}")
        timelines.setdefault(row.split, []).append(PatientTimeline(patient_id=row.patient_id, tokens=seg))
    return Corpus(vocab=vocab, patients=table, timelines=timelines)


def _split_examples(corpus: Corpus, max_len: int, min_len: int):
    return {name: segment_corpus(tls, max_len, min(min_len, max_len)) for name, tls in corpus.timelines.items()}


def model_id(checkpoint: Path) -> str:
    name = Path(checkpoint).name
    return name[: -len(".ckpt")] if name.endswith(".ckpt") else name


# ── commands ─────────────────────────────────────────────────────────────────
def cmd_synth(cfg: RunConfig, out_dir: Path) -> List[Path]:
    """Write a synthetic events file."""
    cohort = generate_synthetic_cohort(cfg.cohort)
    path = Path(out_dir) / EVENTS_FILE
    save_events(cohort, path)
    return [path]


def cmd_tokenize(cfg: RunConfig, events_path: Path, out_dir: Path) -> List[Path]:
    """Split patients, fit binners on the training split, build stream, vocabulary, labels and stats."""
    tk = cfg.tokenizer
    out_dir = Path(out_dir)
    cohort = load_events(events_path)
    if not cohort:
        raise ValueError(f"{events_path}: no events")
    splits = split_patients(cohort.keys(), tk.split_ratios, tk.split_seed)
    split_of = {pid: name for name, ids in splits.items() for pid in ids}

    binners = fit_binners(
        (ev for pid in splits["train"] for ev in cohort[pid]), tk.bin_count, tk.min_group_size
    )
    vocab = build_corpus_vocabulary(cohort, binners)
    order = sorted(cohort)
    timelines = [build_timeline(cohort[pid], vocab, binners) for pid in order]
    logger.info("tokenized %d patients, vocabulary of %d tokens", len(timelines), len(vocab))

    mortality = {tl.patient_id: icu_mortality_label(tl, vocab) for tl in timelines}
    readmission = {tl.patient_id: readmission_label(tl, vocab) for tl in timelines}
    stream = TokenStream.from_timelines(timelines, len(vocab))

    paths = [out_dir / STREAM_FILE, out_dir / VOCAB_FILE, out_dir / PATIENTS_FILE, out_dir / STATS_FILE]
    save_stream(stream, paths[0])
    vocab.save(paths[1])
    save_patient_table(patient_table(order, stream, split_of, mortality, readmission), paths[2])

    per_split = {}
    for name in SPLIT_NAMES:
        tls = [tl for tl in timelines if split_of[tl.patient_id] == name]
        if tls:
            per_split[name] = compute_stats(tls, segment_corpus(tls, tk.max_len, tk.min_len))
    save_stats_csv(per_split, paths[3])
    return paths


def cmd_stats(cfg: RunConfig, corpus_dir: Path, out_dir: Path) -> List[Path]:
    """Recompute the per-split statistics table of a tokenized corpus."""
    corpus = load_corpus(corpus_dir)
    examples = _split_examples(corpus, cfg.tokenizer.max_len, cfg.tokenizer.min_len)
    per_split = {
        name: compute_stats(tls, examples[name]) for name, tls in corpus.timelines.items() if tls
    }
    path = Path(out_dir) / STATS_FILE
    save_stats_csv(per_split, path)
    return [path]


def cmd_train(
    cfg: RunConfig,
    corpus_dir: Path,
    out_dir: Path,
    budget: Optional[float] = None,
    name: str = "model",
) -> List[Path]:
    """Train one model: to a FLOPs budget, or with early stopping when ``budget`` is None."""
    corpus = load_corpus(corpus_dir)
    model_cfg = cfg.model.build(len(corpus.vocab))
    examples = _split_examples(corpus, model_cfg.context_len, cfg.tokenizer.min_len)
    tokens = None
    if budget is not None:
        tokens = tokens_for_budget(model_cfg, budget, model_cfg.context_len)
        logger.info("budget %.3e buys %d tokens for %s", budget, tokens, model_cfg.config_id)
    result = train(
        model_cfg, examples["train"], examples["validation"], cfg.train,
        token_budget=tokens, early_stop=budget is None,
    )
    out_dir = Path(out_dir)
    ckpt, curve, svg = out_dir / f"{name}.ckpt", out_dir / f"{name}.loss.csv", out_dir / f"{name}.loss.svg"
    meta = {
        "mode": "budget" if budget is not None else "early_stop",
        "params": count_params(model_cfg),
        "tokens": result.state.tokens_seen,
        "val_loss": result.final_val_loss,
        "best_step": result.state.best_step,
    }
    if budget is not None:
        meta["budget"] = budget
    save_checkpoint(result.model, ckpt, meta)
    save_loss_curve(result.loss_curve, curve)
    save_svg(plot_loss_curve(result.loss_curve, title=model_cfg.config_id), svg)
    return [ckpt, curve, svg]


def cmd_isoflop(cfg: RunConfig, corpus_dir: Path, out_dir: Path) -> List[Path]:
    """Run (or resume) the fixed-compute sweep, fit it and draw the three panels."""
    sweep = cfg.sweep
    corpus = load_corpus(corpus_dir)
    grid = sweep.grid(len(corpus.vocab))
    examples = _split_examples(corpus, sweep.context_len, cfg.tokenizer.min_len)
    out_dir = Path(out_dir)
    ckpt_dir = out_dir / "checkpoints"
    ckpt_dir.mkdir(parents=True, exist_ok=True)

    points_path = out_dir / "isoflop_points.csv"
    trainer = make_trainer(examples["train"], examples["validation"], sweep.train, ckpt_dir)
    points = run_sweep(
        sweep.budgets, grid, trainer, points_path, sweep.context_len, sweep.include_logits, sweep.train.progress
    )
    analysis = analyze_sweep(points, grid, sweep.keep_lowest, sweep.context_len, sweep.include_logits)

    fits_path, laws_path, svg_path = out_dir / "isoflop_fits.csv", out_dir / "power_laws.csv", out_dir / "isoflop.svg"
    fits_table(analysis).to_csv(fits_path, index=False, lineterminator="\n")
    power_law_table(analysis).to_csv(laws_path, index=False, lineterminator="\n")
    save_svg(plot_isoflop_figure(points, analysis), svg_path)
    return [points_path, fits_path, laws_path, svg_path] + sorted(ckpt_dir.iterdir())


def _score(cfg: RunConfig, model: MicroLlama, corpus: Corpus, task: str, split: str):
    return score_cohort(model, corpus.timelines.get(split, []), task, corpus.vocab, cfg.rollout, corpus.labels(task))


def cmd_simulate(
    cfg: RunConfig,
    checkpoint: Path,
    corpus_dir: Path,
    out_dir: Path,
    tasks: Sequence[str],
    split: str = "test",
) -> List[Path]:
    """Score one checkpoint on held-out patients without computing metrics."""
    corpus = load_corpus(corpus_dir)
    model, _ = load_checkpoint(checkpoint)
    paths = []
    for task in tasks:
        path = Path(out_dir) / f"scores-{model_id(checkpoint)}-{task}.csv"
        save_cohort_csv(_score(cfg, model, corpus, task, split), path)
        paths.append(path)
    return paths


def _regression_rows(frame: pd.DataFrame) -> List[Mapping[str, object]]:
    rows = []
    for task, group in frame.groupby("task", sort=True):
        for x, regress in (("val_loss", loss_vs_metric_regression), ("params", size_vs_metric_regression)):
            if len(group) < 2 or group[x].nunique() < 2:
                logger.info("%s: too few distinct models for a %s regression", task, x)
                continue
            fit = regress(group[x], group["roc_auc"])
            rows.append({
                "task": task, "x": x, "slope": fit.slope, "intercept": fit.intercept,
                "correlation": fit.correlation, "n_points": fit.n_points,
            })
    return rows


def cmd_evaluate(
    cfg: RunConfig,
    checkpoints: Sequence[Path],
    corpus_dir: Path,
    out_dir: Path,
    split: str = "test",
) -> List[Path]:
    """Score every checkpoint on every task, then write metrics, ROC curves and scaling plots."""
    corpus = load_corpus(corpus_dir)
    out_dir = Path(out_dir)
    ev = cfg.evaluation
    paths: List[Path] = []
    rows = []
    for ckpt in checkpoints:
        model, meta = load_checkpoint(ckpt)
        mid = model_id(ckpt)
        for task in ev.tasks:
            cohort = _score(cfg, model, corpus, task, split)
            scores_path = out_dir / f"scores-{mid}-{task}.csv"
            roc_path = out_dir / f"roc-{mid}-{task}.svg"
            save_cohort_csv(cohort, scores_path)
            save_svg(plot_roc(cohort, cfg.rollout.n_rollouts, title=f"{mid} {task}"), roc_path)
            paths += [scores_path, roc_path]
            row = {
                "model_id": mid,
                "params": count_params(model.config),
                "val_loss": float(meta.get("val_loss", "nan")),
                "task": task,
            }
            row.update(cohort_metrics(cohort, ev, cfg.rollout.n_rollouts))
            rows.append(row)
            logger.info("%s %s: roc_auc %.4f pr_auc %.4f", mid, task, row["roc_auc"], row["pr_auc"])

    metrics_path = out_dir / "metrics.csv"
    frame = save_metrics_csv(rows, metrics_path)
    paths.append(metrics_path)

    regressions = _regression_rows(frame)
    if regressions:
        reg_path = out_dir / "regressions.csv"
        pd.DataFrame(regressions).to_csv(reg_path, index=False, lineterminator="\n")
        paths.append(reg_path)
        for x in ("val_loss", "params"):
            path = out_dir / f"roc_auc_vs_{x}.svg"
            save_svg(plot_metric_vs(frame, x=x), path)
            paths.append(path)
    return paths


def cmd_report(
    cfg: RunConfig,
    out_dir: Path,
    corpus_dir: Optional[Path] = None,
    vocab_size: Optional[int] = None,
    points_path: Optional[Path] = None,
) -> List[Path]:
    """FLOPs table of the sweep grid; with ``points_path``, refit and redraw a finished sweep."""
    if corpus_dir is not None:
        vocab_size = len(Vocabulary.load(Path(corpus_dir) / VOCAB_FILE))
    if vocab_size is None:
        raise ValueError("report needs --corpus or --vocab-size")
    sweep = cfg.sweep
    out_dir = Path(out_dir)
    grid = sweep.grid(vocab_size)
    paths = [out_dir / "flops.csv", out_dir / "flops_2048.csv"]
    flops_table(grid, sweep.context_len, sweep.include_logits).to_csv(paths[0], index=False, lineterminator="\n")
    full = default_grid(vocab_size, 2048, sweep.d_models, sweep.n_layers)
    flops_table(full, 2048, sweep.include_logits).to_csv(paths[1], index=False, lineterminator="\n")
    logger.info(
        "training FLOPs per token span %d..%d over %d grid models",
        min(training_flops_per_token(c, sweep.context_len) for c in grid),
        max(training_flops_per_token(c, sweep.context_len) for c in grid),
        len(grid),
    )

    if points_path is not None:
        points = load_manifest(points_path)
        if not points:
            raise ValueError(f"{points_path}: no sweep points")
        analysis = analyze_sweep(points, grid, sweep.keep_lowest, sweep.context_len, sweep.include_logits)
        extra = [out_dir / "isoflop_fits.csv", out_dir / "power_laws.csv", out_dir / "isoflop.svg"]
        fits_table(analysis).to_csv(extra[0], index=False, lineterminator="\n")
        power_law_table(analysis).to_csv(extra[1], index=False, lineterminator="\n")
        save_svg(plot_isoflop_figure(points, analysis), extra[2])
        paths += extra
    return paths


__all__ = [
    "Corpus",
    "load_corpus",
    "model_id",
    "cmd_synth",
    "cmd_tokenize",
    "cmd_stats",
    "cmd_train",
    "cmd_isoflop",
    "cmd_simulate",
    "cmd_evaluate",
    "cmd_report",
]
