# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Train micro transformers under fixed compute and fit scaling laws.

Modules exported by this package:

- `config`: Model, training and sweep configuration.
- `model`: Decoder-only transformer, loss, gradients and sampling.
- `train`: Optimizer, schedule and the training loop.
- `checkpoint`: Checkpoint and loss-curve files.
- `physics`: FLOPs accounting and token budgets.
- `isoflop`: Sweeps, parabola fits and power laws.
- `style`: Styling options for plots.
- `plotter`: Scaling-law figures.
"""

__version__ = "0.1.0"

from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig, SweepConfig, TrainConfig, default_grid
from .isoflop import (
    DegenerateFitError,
    IsoFlopPoint,
    ParabolaFit,
    PowerLawFit,
    extrapolate,
    fit_parabola,
    fit_power_law,
    run_sweep,
    select_lowest,
)
from .model import backward, count_params, forward, init_params, nll_loss, sample_next
from .physics import BudgetTooSmallError, FlopsBreakdown, forward_flops, palm_flops_per_token, tokens_for_budget, training_flops
from .train import DataLimitedError, NonFiniteGradientError, TrainState, optimizer_step, train

__all__ = [
    "BudgetTooSmallError",
    "DataLimitedError",
    "DegenerateFitError",
    "FlopsBreakdown",
    "IsoFlopPoint",
    "ModelConfig",
    "NonFiniteGradientError",
    "ParabolaFit",
    "PowerLawFit",
    "SweepConfig",
    "TrainConfig",
    "TrainState",
    "backward",
    "count_params",
    "default_grid",
    "extrapolate",
    "fit_parabola",
    "fit_power_law",
    "forward",
    "forward_flops",
    "init_params",
    "load_checkpoint",
    "nll_loss",
    "optimizer_step",
    "palm_flops_per_token",
    "run_sweep",
    "sample_next",
    "save_checkpoint",
    "select_lowest",
    "tokens_for_budget",
    "train",
    "training_flops",
]
