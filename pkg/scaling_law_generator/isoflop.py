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
IsoFLOP sweeps, parabola fits and compute-optimal power laws.

For every budget C each grid model is trained on ``tokens_for_budget`` tokens
and its final validation loss recorded. The lowest-loss points of a budget
are fitted with ``L = alpha (ln N)^2 + beta ln N + gamma``; the vertex gives
N_opt. Across budgets, ``ln N_opt`` and ``ln D_opt`` are regressed on ``ln C``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import linregress
from tqdm.auto import tqdm

from scaling_law_generator.checkpoint import save_checkpoint, save_loss_curve
from scaling_law_generator.config import REFERENCE_EXPONENTS, ModelConfig, TrainConfig
from scaling_law_generator.model import count_params
from scaling_law_generator.physics import BACKWARD_FACTOR, BudgetTooSmallError, forward_flops, tokens_for_budget, training_flops
from scaling_law_generator.train import DataLimitedError, train
from timeline_generator.models import TrainingExample

logger = logging.getLogger(__name__)

EXTRAPOLATION_FACTOR: float = 10.0
"""N_opt further than this factor outside the observed N range is flagged."""

MANIFEST_COLUMNS = ("budget", "config_id", "params", "tokens", "val_loss", "status")

STATUS_OK = "ok"
STATUS_DATA_LIMITED = "data_limited"
STATUS_INFEASIBLE = "infeasible"


class DegenerateFitError(ValueError):
    """The points do not determine the requested fit."""


# ── observations ─────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class IsoFlopPoint:
    """
    One trained model of a fixed-compute profile.

    Attributes:
        budget (float): Total training FLOPs C.
        config_id (str): Grid model name.
        params (int): Parameter count N.
        tokens (int): Training tokens D.
        val_loss (float): Final validation loss in nats/token (NaN unless ``ok``).
        status (str): ``ok``, ``data_limited`` or ``infeasible``.
    """

    budget: float
    config_id: str
    params: int
    tokens: int
    val_loss: float
    status: str = STATUS_OK

    @property
    def usable(self) -> bool:
        return self.status == STATUS_OK and math.isfinite(self.val_loss)

    @property
    def key(self) -> Tuple[float, str]:
        return (float(self.budget), self.config_id)


def load_manifest(path: Union[str, Path]) -> List[IsoFlopPoint]:
    """Points persisted by an earlier (possibly interrupted) sweep."""
    path = Path(path)
    if not path.exists():
        return []
    frame = pd.read_csv(path, float_precision="round_trip", dtype={"config_id": str, "status": str})
    return [
        IsoFlopPoint(
            budget=float(r.budget),
            config_id=r.config_id,
            params=int(r.params),
            tokens=int(r.tokens),
            val_loss=float(r.val_loss),
            status=r.status,
        )
        for r in frame.itertuples(index=False)
    ]


def save_manifest(points: Sequence[IsoFlopPoint], path: Union[str, Path]) -> None:
    frame = pd.DataFrame([asdict(p) for p in points], columns=list(MANIFEST_COLUMNS))
    tmp = Path(str(path) + ".tmp")
    frame.to_csv(tmp, index=False, lineterminator="\n")
    tmp.replace(path)


Trainer = Callable[[ModelConfig, int, float], float]
"""``(config, tokens, budget) -> final validation loss``."""


def checkpoint_stem(budget: float, config: ModelConfig) -> str:
    """File stem of a sweep checkpoint, e.g. ``C1.000e+12_d64-l2-h2-kv1-ff176``."""
    return f"C{budget:.3e}_{config.config_id}"


def make_trainer(
    train_examples: Sequence[TrainingExample],
    val_examples: Sequence[TrainingExample],
    cfg: TrainConfig,
    checkpoint_dir: Optional[Union[str, Path]] = None,
) -> Trainer:
    """Budget-mode `train` wrapped as a `Trainer`; optionally keeps every checkpoint."""

    def _run(config: ModelConfig, tokens: int, budget: float) -> float:
        result = train(config, train_examples, val_examples, cfg, token_budget=tokens)
        if checkpoint_dir is not None:
            stem = checkpoint_stem(budget, config)
            meta = {"budget": budget, "tokens": result.state.tokens_seen, "val_loss": result.final_val_loss}
            save_checkpoint(result.model, Path(checkpoint_dir) / f"{stem}.ckpt", meta)
            save_loss_curve(result.loss_curve, Path(checkpoint_dir) / f"{stem}.loss.csv")
        return result.final_val_loss

    return _run


def run_sweep(
    budgets: Sequence[float],
    grid: Sequence[ModelConfig],
    trainer: Trainer,
    manifest_path: Optional[Union[str, Path]] = None,
    seq_len: Optional[int] = None,
    include_logits: bool = True,
    progress: bool = False,
) -> List[IsoFlopPoint]:
    """Train every (budget, model) pair not already in the manifest.

    Args:
        budgets: Compute budgets C (at least 3).
        grid: Model configs (at least 4).
        trainer: Runs one point; raises `DataLimitedError` when the corpus is
            too small for the requested tokens.
        manifest_path: CSV rewritten after every point and read on restart.
        seq_len: FLOPs accounting length (defaults to each config's context).
        include_logits: Count output-logit FLOPs.
        progress: Show a tqdm bar.

    Returns:
        One point per pair, budgets outer, grid inner.
    """
    if len(budgets) < 3:
        raise ValueError(f"a sweep needs at least 3 budgets, got {len(budgets)}")
    if len(grid) < 4:
        raise ValueError(f"a sweep needs at least 4 grid models, got {len(grid)}")

    done: Dict[Tuple[float, str], IsoFlopPoint] = {}
    if manifest_path is not None:
        done = {p.key: p for p in load_manifest(manifest_path)}
        if done:
            logger.info("resuming sweep: %d points already on disk", len(done))

    points: List[IsoFlopPoint] = []
    jobs = [(float(c), cfg) for c in budgets for cfg in grid]
    for budget, cfg in tqdm(jobs, desc="isoflop", disable=not progress):
        key = (budget, cfg.config_id)
        if key in done:
            points.append(done[key])
            continue
        s = seq_len or cfg.context_len
        n = count_params(cfg)
        try:
            d = tokens_for_budget(cfg, budget, s, include_logits)
        except BudgetTooSmallError:
            logger.warning("budget %.3e cannot pay for one token of %s", budget, cfg.config_id)
            point = IsoFlopPoint(budget, cfg.config_id, n, 0, math.nan, STATUS_INFEASIBLE)
        else:
            if training_flops(cfg, d, s, include_logits) > budget:
                raise ValueError(f"{d} tokens of {cfg.config_id} overrun the budget {budget:.3e}")
            try:
                loss = trainer(cfg, d, budget)
                point = IsoFlopPoint(budget, cfg.config_id, n, d, float(loss), STATUS_OK)
            except DataLimitedError as e:
                logger.warning("data-limited point C=%.3e %s: %s", budget, cfg.config_id, e)
                point = IsoFlopPoint(budget, cfg.config_id, n, d, math.nan, STATUS_DATA_LIMITED)
            except BudgetTooSmallError as e:
                logger.warning("infeasible point C=%.3e %s: %s", budget, cfg.config_id, e)
                point = IsoFlopPoint(budget, cfg.config_id, n, d, math.nan, STATUS_INFEASIBLE)
        points.append(point)
        done[key] = point
        if manifest_path is not None:
            save_manifest(list(done.values()), manifest_path)
    return points


def select_lowest(points: Sequence[IsoFlopPoint], k: int = 6) -> List[IsoFlopPoint]:
    """The ``k`` lowest-loss points; ties go to the smaller model."""
    return sorted(points, key=lambda p: (p.val_loss, p.params))[:k]


# ── fits ─────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class ParabolaFit:
    """
    ``L = alpha (ln N)^2 + beta ln N + gamma`` with its vertex.

    Attributes:
        alpha (float): Curvature (> 0).
        beta (float): Linear coefficient.
        gamma (float): Intercept.
        n_opt (float): ``exp(-beta / (2 alpha))``.
        l_min (float): ``gamma - beta^2 / (4 alpha)``.
        rms (float): Root-mean-square residual.
        extrapolated (bool): N_opt lies outside ``[min N / 10, max N * 10]``.
    """

    alpha: float
    beta: float
    gamma: float
    n_opt: float
    l_min: float
    rms: float
    extrapolated: bool

    def predict(self, n: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        x = np.log(n)
        return self.alpha * x * x + self.beta * x + self.gamma


def fit_parabola_log(log_n: Sequence[float], losses: Sequence[float]) -> ParabolaFit:
    """Least-squares parabola in ``(ln N, L)`` coordinates.

    Raises:
        DegenerateFitError: Fewer than 3 distinct ``ln N`` or ``alpha <= 0``.
    """
    pairs = sorted(zip(map(float, log_n), map(float, losses)))
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    if len(np.unique(x)) < 3:
        raise DegenerateFitError(f"need 3 distinct model sizes, got {len(np.unique(x))}")
    alpha, beta, gamma = (float(c) for c in np.polyfit(x, y, 2))
    scale = max(1.0, float(np.abs(y).max()))
    if alpha <= 1e-12 * scale:
        raise DegenerateFitError(f"no interior minimum (alpha = {alpha:.3e}); the grid does not bracket the optimum")
    x_opt = -beta / (2.0 * alpha)
    resid = y - (alpha * x * x + beta * x + gamma)
    lo, hi = x.min() - math.log(EXTRAPOLATION_FACTOR), x.max() + math.log(EXTRAPOLATION_FACTOR)
    return ParabolaFit(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        n_opt=math.exp(x_opt),
        l_min=gamma - beta * beta / (4.0 * alpha),
        rms=float(np.sqrt(np.mean(resid ** 2))),
        extrapolated=not lo <= x_opt <= hi,
    )


def fit_parabola(points: Sequence[IsoFlopPoint]) -> ParabolaFit:
    """Parabola over the points of one budget (see `fit_parabola_log`)."""
    return fit_parabola_log([math.log(p.params) for p in points], [p.val_loss for p in points])


@dataclass(frozen=True)
class PowerLawFit:
    """
    ``Y = exp(log_coefficient) * C^exponent`` fitted in log-log space.

    Attributes:
        exponent (float): Slope in ``(ln C, ln Y)``.
        log_coefficient (float): Intercept in ``(ln C, ln Y)``.
        r_squared (float): Coefficient of determination.
        c_min (float): Smallest fitted C.
        c_max (float): Largest fitted C.
    """

    exponent: float
    log_coefficient: float
    r_squared: float
    c_min: float
    c_max: float

    @property
    def coefficient(self) -> float:
        return math.exp(self.log_coefficient)


class Extrapolation(NamedTuple):
    value: float
    extrapolated: bool


def fit_power_law(pairs: Sequence[Tuple[float, float]]) -> PowerLawFit:
    """Ordinary least squares of ``ln Y`` on ``ln C``.

    Raises:
        ValueError: On nonpositive inputs.
        DegenerateFitError: Fewer than 2 pairs or a single distinct C.
    """
    if len(pairs) < 2:
        raise DegenerateFitError(f"need at least 2 pairs, got {len(pairs)}")
    c = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    if (c <= 0).any() or (y <= 0).any():
        raise ValueError("power-law fit needs positive C and Y")
    if len(np.unique(c)) < 2:
        raise DegenerateFitError("all pairs share the same C")
    reg = linregress(np.log(c), np.log(y))
    return PowerLawFit(
        exponent=float(reg.slope),
        log_coefficient=float(reg.intercept),
        r_squared=float(min(1.0, reg.rvalue ** 2)),
        c_min=float(c.min()),
        c_max=float(c.max()),
    )


def extrapolate(fit: PowerLawFit, c: float) -> Extrapolation:
    """Evaluate the power law at ``c``; flag values outside the fitted C range.

    Raises:
        ValueError: If ``c <= 0``.
    """
    if c <= 0:
        raise ValueError(f"C must be positive, got {c}")
    value = math.exp(fit.log_coefficient + fit.exponent * math.log(c))
    return Extrapolation(value, not fit.c_min <= c <= fit.c_max)


# ── sweep analysis ───────────────────────────────────────────────────────────
def fit_flops_per_token(grid: Sequence[ModelConfig], seq_len: Optional[int] = None, include_logits: bool = True) -> PowerLawFit:
    """Log-linear model of forward FLOPs per token as a function of N over the grid."""
    pairs = [
        (float(count_params(cfg)), float(forward_flops(cfg, seq_len or cfg.context_len, include_logits).per_token))
        for cfg in grid
    ]
    return fit_power_law(pairs)


def optimal_tokens(budget: float, n_opt: float, flops_fit: PowerLawFit) -> int:
    """D_opt: tokens a model of ``n_opt`` parameters can consume under ``budget``."""
    per_token = extrapolate(flops_fit, n_opt).value
    return int(budget // (BACKWARD_FACTOR * per_token))


@dataclass(frozen=True)
class BudgetOptimum:
    budget: float
    fit: ParabolaFit
    d_opt: int
    retained: Tuple[IsoFlopPoint, ...]


@dataclass
class SweepAnalysis:
    """
    Per-budget optima and the two power laws.

    Attributes:
        optima (List[BudgetOptimum]): One entry per budget with a valid parabola.
        n_law (Optional[PowerLawFit]): N_opt against C.
        d_law (Optional[PowerLawFit]): D_opt against C.
        flops_fit (PowerLawFit): Per-token FLOPs against N.
        skipped (Dict[float, str]): Budgets without a fit and the reason.
    """

    optima: List[BudgetOptimum]
    n_law: Optional[PowerLawFit]
    d_law: Optional[PowerLawFit]
    flops_fit: PowerLawFit
    skipped: Dict[float, str] = field(default_factory=dict)


def analyze_sweep(
    points: Sequence[IsoFlopPoint],
    grid: Sequence[ModelConfig],
    keep_lowest: int = 6,
    seq_len: Optional[int] = None,
    include_logits: bool = True,
) -> SweepAnalysis:
    """Fit every budget's profile, then the power laws over the optima."""
    flops_fit = fit_flops_per_token(grid, seq_len, include_logits)
    by_budget: Dict[float, List[IsoFlopPoint]] = {}
    for p in points:
        if p.usable:
            by_budget.setdefault(float(p.budget), []).append(p)

    optima: List[BudgetOptimum] = []
    skipped: Dict[float, str] = {}
    for budget in sorted({float(p.budget) for p in points}):
        retained = select_lowest(by_budget.get(budget, []), keep_lowest)
        try:
            fit = fit_parabola(retained)
        except DegenerateFitError as e:
            logger.warning("budget %.3e: %s", budget, e)
            skipped[budget] = str(e)
            continue
        if fit.extrapolated:
            logger.warning("budget %.3e: N_opt %.3e lies outside the sampled sizes", budget, fit.n_opt)
        optima.append(BudgetOptimum(budget, fit, optimal_tokens(budget, fit.n_opt, flops_fit), tuple(retained)))

    n_law = d_law = None
    if len(optima) >= 2:
        n_law = fit_power_law([(o.budget, o.fit.n_opt) for o in optima])
        d_law = fit_power_law([(o.budget, float(max(o.d_opt, 1))) for o in optima])
    else:
        logger.warning("fewer than 2 budgets with a valid profile; no power laws fitted")
    return SweepAnalysis(optima=optima, n_law=n_law, d_law=d_law, flops_fit=flops_fit, skipped=skipped)


def fits_table(analysis: SweepAnalysis) -> pd.DataFrame:
    """One row per fitted budget."""
    rows = [
        {
            "budget": o.budget,
            "alpha": o.fit.alpha,
            "beta": o.fit.beta,
            "gamma": o.fit.gamma,
            "n_opt": o.fit.n_opt,
            "d_opt": o.d_opt,
            "l_min": o.fit.l_min,
            "rms": o.fit.rms,
            "extrapolated": o.fit.extrapolated,
            "retained": " ".join(p.config_id for p in o.retained),
        }
        for o in analysis.optima
    ]
    return pd.DataFrame(rows)


def power_law_table(analysis: SweepAnalysis) -> pd.DataFrame:
    """Fitted exponents next to the published reference exponents."""
    rows = []
    for quantity, law, ref in (("n_opt", analysis.n_law, "a"), ("d_opt", analysis.d_law, "b")):
        if law is None:
            continue
        rows.append(
            {
                "quantity": quantity,
                "exponent": law.exponent,
                "log_coefficient": law.log_coefficient,
                "r_squared": law.r_squared,
                "c_min": law.c_min,
                "c_max": law.c_max,
                "reference_exponent": REFERENCE_EXPONENTS[ref],
            }
        )
    return pd.DataFrame(rows)


__all__ = [
    "DegenerateFitError",
    "IsoFlopPoint",
    "MANIFEST_COLUMNS",
    "load_manifest",
    "save_manifest",
    "checkpoint_stem",
    "make_trainer",
    "run_sweep",
    "select_lowest",
    "ParabolaFit",
    "fit_parabola_log",
    "fit_parabola",
    "PowerLawFit",
    "Extrapolation",
    "fit_power_law",
    "extrapolate",
    "fit_flops_per_token",
    "optimal_tokens",
    "BudgetOptimum",
    "SweepAnalysis",
    "analyze_sweep",
    "fits_table",
    "power_law_table",
]
