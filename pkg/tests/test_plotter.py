import math

import numpy as np
import pandas as pd
import pytest

from scaling_law_generator.config import default_grid
from scaling_law_generator.isoflop import analyze_sweep, run_sweep
from scaling_law_generator.model import count_params
from scaling_law_generator.plotter import budget_gid, line_by_gid, plot_isoflop_figure, plot_loss_curve, save_svg

BUDGETS = [1e12, 1e13, 1e14]
GRID = default_grid(256, context_len=64, d_models=(32, 64, 96, 128, 192, 256), n_layers=(1, 2, 4, 8))


@pytest.fixture(scope="module")
def sweep():
    def trainer(cfg, tokens, budget):
        centre = math.log(2e5 * (budget / 1e13) ** 0.5)
        return 0.05 * (math.log(count_params(cfg)) - centre) ** 2 + 2.0

    points = run_sweep(BUDGETS, GRID, trainer, seq_len=64)
    return points, analyze_sweep(points, GRID, seq_len=64)


def test_budget_gid_format():
    assert budget_gid(1e12) == "parabola-1.000e+12"
    assert budget_gid(3.2e13) == "parabola-3.200e+13"


def test_isoflop_figure_carries_fitted_lines(sweep):
    points, analysis = sweep
    fig = plot_isoflop_figure(points, analysis)
    assert len(fig.axes) == 3
    for budget in BUDGETS:
        assert line_by_gid(fig, budget_gid(budget)) is not None
    law = line_by_gid(fig, "law-n_opt")
    xs, ys = law.get_data()
    slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
    assert slope == pytest.approx(analysis.n_law.exponent, abs=1e-9)
    assert line_by_gid(fig, "law-d_opt") is not None
    assert line_by_gid(fig, "no-such-line") is None


def test_extended_law_reaches_target_budget(sweep):
    points, analysis = sweep
    fig = plot_isoflop_figure(points, analysis, extend_to=1e16)
    xs, _ = line_by_gid(fig, "law-n_opt").get_data()
    assert xs[-1] == pytest.approx(1e16)


def test_svg_keeps_gids(sweep, tmp_path):
    points, analysis = sweep
    path = save_svg(plot_isoflop_figure(points, analysis), tmp_path / "isoflop.svg")
    text = path.read_text()
    assert 'id="parabola-1.000e+12"' in text
    assert 'id="law-n_opt"' in text


def test_loss_curve_one_line_per_split():
    curve = pd.DataFrame(
        {"step": [1, 2, 3, 3], "split": ["train", "train", "train", "validation"], "loss": [3.0, 2.6, 2.4, 2.5]}
    )
    fig = plot_loss_curve(curve, title="d32 l1")
    labels = [line.get_label() for line in fig.axes[0].get_lines()]
    assert labels == ["train", "validation"]
