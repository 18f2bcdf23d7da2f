import math

import numpy as np
import pytest

from scaling_law_generator.config import ModelConfig, default_grid
from scaling_law_generator.isoflop import (
    STATUS_DATA_LIMITED,
    STATUS_INFEASIBLE,
    STATUS_OK,
    DegenerateFitError,
    analyze_sweep,
    checkpoint_stem,
    extrapolate,
    fit_parabola_log,
    fit_power_law,
    fits_table,
    load_manifest,
    power_law_table,
    run_sweep,
    save_manifest,
    select_lowest,
)
from scaling_law_generator.model import count_params
from scaling_law_generator.physics import BudgetTooSmallError
from scaling_law_generator.train import DataLimitedError

BUDGETS = [1e12, 1e13, 1e14]
GRID = default_grid(256, context_len=64, d_models=(32, 64, 96, 128, 192, 256), n_layers=(1, 2, 4, 8))
EXPONENT = 0.58


def n_opt(budget: float) -> float:
    return 2e5 * (budget / 1e13) ** EXPONENT


class ParabolaTrainer:
    """Loss is an exact parabola in ln N around ``n_opt(C)``."""

    def __init__(self, limited_above: float = math.inf) -> None:
        self.calls = []
        self.limited_above = limited_above

    def __call__(self, config: ModelConfig, tokens: int, budget: float) -> float:
        self.calls.append((budget, config.config_id))
        n = count_params(config)
        if n > self.limited_above:
            raise DataLimitedError("corpus too small")
        return 0.05 * (math.log(n) - math.log(n_opt(budget))) ** 2 + 3.0 - 0.1 * math.log10(budget)


def test_parabola_vertex_recovered():
    log_n = np.log(np.logspace(4, 8, 7))
    losses = 0.1 * (log_n - math.log(1e6)) ** 2 + 2.0
    fit = fit_parabola_log(log_n, losses)
    assert fit.n_opt == pytest.approx(1e6, rel=1e-6)
    assert fit.l_min == pytest.approx(2.0, abs=1e-9)
    assert fit.rms == pytest.approx(0.0, abs=1e-9)
    assert not fit.extrapolated


def test_parabola_needs_curvature_and_three_sizes():
    with pytest.raises(DegenerateFitError):
        fit_parabola_log([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
    with pytest.raises(DegenerateFitError):
        fit_parabola_log([1.0, 1.0, 2.0], [1.0, 1.0, 2.0])


def test_power_law_exponent_recovered():
    pairs = [(c, 3.0 * c ** EXPONENT) for c in (1e12, 1e13, 1e14, 1e15)]
    fit = fit_power_law(pairs)
    assert fit.exponent == pytest.approx(EXPONENT, abs=1e-9)
    assert fit.coefficient == pytest.approx(3.0, rel=1e-6)
    assert fit.r_squared == pytest.approx(1.0)
    assert extrapolate(fit, 1e16).extrapolated
    assert not extrapolate(fit, 1e13).extrapolated


def test_power_law_input_checks():
    with pytest.raises(DegenerateFitError):
        fit_power_law([(1e12, 1.0)])
    with pytest.raises(DegenerateFitError):
        fit_power_law([(1e12, 1.0), (1e12, 2.0)])
    with pytest.raises(ValueError):
        fit_power_law([(1e12, 0.0), (1e13, 1.0)])


def test_sweep_recovers_planted_exponent(tmp_path):
    points = run_sweep(BUDGETS, GRID, ParabolaTrainer(), tmp_path / "points.csv", seq_len=64)
    assert len(points) == len(BUDGETS) * len(GRID)
    assert all(p.status == STATUS_OK for p in points)
    analysis = analyze_sweep(points, GRID, keep_lowest=6, seq_len=64)
    assert len(analysis.optima) == 3
    for opt in analysis.optima:
        assert opt.fit.n_opt == pytest.approx(n_opt(opt.budget), rel=1e-3)
        assert opt.d_opt > 0
    assert analysis.n_law.exponent == pytest.approx(EXPONENT, abs=0.02)
    assert fits_table(analysis).shape[0] == 3
    assert set(power_law_table(analysis)["quantity"]) == {"n_opt", "d_opt"}


def test_sweep_resumes_from_manifest(tmp_path):
    path = tmp_path / "points.csv"
    first = ParabolaTrainer()
    points = run_sweep(BUDGETS, GRID, first, path, seq_len=64)
    assert len(first.calls) == len(points)

    again = ParabolaTrainer()
    assert run_sweep(BUDGETS, GRID, again, path, seq_len=64) == points
    assert again.calls == []

    kept = load_manifest(path)[:-5]
    save_manifest(kept, path)
    partial = ParabolaTrainer()
    assert run_sweep(BUDGETS, GRID, partial, path, seq_len=64) == points
    assert len(partial.calls) == 5


def test_data_limited_points_are_recorded_not_fitted(tmp_path):
    trainer = ParabolaTrainer(limited_above=3e6)
    points = run_sweep(BUDGETS, GRID, trainer, None, seq_len=64)
    limited = [p for p in points if p.status == STATUS_DATA_LIMITED]
    assert limited and all(math.isnan(p.val_loss) for p in limited)
    analysis = analyze_sweep(points, GRID, seq_len=64)
    retained = {p.config_id for o in analysis.optima for p in o.retained}
    assert not retained & {p.config_id for p in limited}


def test_budget_below_one_token_is_infeasible():
    points = run_sweep([1.0, 2.0, 3.0], GRID[:4], ParabolaTrainer(), seq_len=64)
    assert {p.status for p in points} == {STATUS_INFEASIBLE}
    analysis = analyze_sweep(points, GRID[:4], seq_len=64)
    assert analysis.optima == [] and analysis.n_law is None
    assert len(analysis.skipped) == 3


def test_trainer_budget_shortfall_is_infeasible():
    def trainer(config, tokens, budget):
        raise BudgetTooSmallError("no whole batch")

    points = run_sweep(BUDGETS, GRID[:4], trainer, seq_len=64)
    assert {p.status for p in points} == {STATUS_INFEASIBLE}


def test_trainer_bugs_are_not_swallowed():
    def trainer(config, tokens, budget):
        raise ValueError("shape mismatch")

    with pytest.raises(ValueError, match="shape mismatch"):
        run_sweep(BUDGETS, GRID[:4], trainer, seq_len=64)


def test_sweep_size_checks():
    with pytest.raises(ValueError):
        run_sweep(BUDGETS[:2], GRID, ParabolaTrainer())
    with pytest.raises(ValueError):
        run_sweep(BUDGETS, GRID[:3], ParabolaTrainer())


def test_select_lowest_breaks_ties_by_size():
    points = run_sweep(BUDGETS, GRID, lambda cfg, d, c: 1.0, seq_len=64)
    chosen = select_lowest([p for p in points if p.budget == 1e12], k=2)
    smallest = sorted(p.params for p in points if p.budget == 1e12)[:2]
    assert [p.params for p in chosen] == smallest


def test_checkpoint_stem_keeps_exponent():
    assert checkpoint_stem(1e12, GRID[0]) == f"C1.000e+12_{GRID[0].config_id}"
