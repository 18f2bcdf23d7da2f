# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Turn clinical events into token timelines and training corpora.

Modules exported by this package:

- `models`: Events, timelines, token streams and corpus statistics.
- `format`: Token-text formatting.
- `splitters`: Hierarchical code decomposition (ICD-10, ICD-10-PCS, ATC).
- `binning`: Quantile binning of numeric values.
- `intervals`: The thirteen elapsed-time classes.
- `vocab`: Token vocabulary.
- `tokenizer`: Event and timeline tokenization.
- `read`: JSON Lines event files.
- `synth`: Synthetic cohort generator.
- `corpus`: Patient splits, segmentation and batching.
- `stats`: Corpus statistics table.
- `stream`: Binary token-stream files and the patient sidecar table.
"""

__version__ = "0.1.0"

from .binning import BinnerRegistry, QuantileBinner, fit_binners, fit_quantile_binner
from .corpus import BatchSampler, next_batch, segment_timeline, split_patients
from .intervals import DEFAULT_LADDER, IntervalLadder, intervals_for_gap
from .models import (
    ClinicalEvent,
    CorpusStats,
    EventKind,
    PatientTimeline,
    SyntheticCohortConfig,
    TokenizerConfig,
    TokenStream,
    TrainingExample,
)
from .read import MalformedEventError, load_events, save_events
from .stats import compute_stats
from .stream import load_stream, save_stream
from .synth import generate_synthetic_cohort
from .tokenizer import build_timeline, encode_age_and_start_year, tokenize_event
from .vocab import UnknownTokenError, Vocabulary, build_vocabulary

__all__ = [
    "BatchSampler",
    "BinnerRegistry",
    "ClinicalEvent",
    "CorpusStats",
    "DEFAULT_LADDER",
    "EventKind",
    "IntervalLadder",
    "MalformedEventError",
    "PatientTimeline",
    "QuantileBinner",
    "SyntheticCohortConfig",
    "TokenStream",
    "TokenizerConfig",
    "TrainingExample",
    "UnknownTokenError",
    "Vocabulary",
    "build_timeline",
    "build_vocabulary",
    "compute_stats",
    "encode_age_and_start_year",
    "fit_binners",
    "fit_quantile_binner",
    "generate_synthetic_cohort",
    "intervals_for_gap",
    "load_events",
    "load_stream",
    "next_batch",
    "save_events",
    "save_stream",
    "segment_timeline",
    "split_patients",
    "tokenize_event",
]
