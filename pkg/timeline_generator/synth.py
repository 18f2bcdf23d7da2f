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
Synthetic cohort generator.

Stands in for a gated EHR database. Every patient gets demographics, one or
more hospital admissions with diagnoses, labs, medications and procedures,
and optional ICU stays. Two outcomes carry a planted signal driven by how
abnormal the admission labs are:

- death during an ICU stay, with probability
  ``expit(logit(icu_mortality_hazard) + hazard_coupling * (severity - 0.5))``;
- readmission within 30 days, same form with ``readmission_hazard``. An
  early readmission after the last stay is recorded as the admission that
  opens a stay still in progress when the record ends.

``severity`` is the mean abnormality quantile of the labs drawn before the
ICU admission (or discharge), so a model that reads those lab tokens can
beat chance on both tasks.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Tuple

import numpy as np
from scipy.special import expit, logit
from scipy.stats import norm

from timeline_generator.models import (
    MINUTES_PER_DAY,
    MINUTES_PER_YEAR,
    ClinicalEvent,
    EventKind,
    SyntheticCohortConfig,
)
from timeline_generator.tokenizer import START_YEAR_CODE

logger = logging.getLogger(__name__)

_HOUR = 60.0

LABS: Dict[str, Tuple[float, float, int]] = {
    "LACTATE": (1.5, 0.8, +1),
    "CREAT": (1.0, 0.3, +1),
    "WBC": (8.0, 3.0, +1),
    "K": (4.2, 0.5, +1),
    "BUN": (15.0, 6.0, +1),
    "NA": (140.0, 3.0, -1),
    "HGB": (13.0, 1.8, -1),
    "PLT": (250.0, 60.0, -1),
}
"""Lab code -> (mean, sd, direction); direction +1 means high values are abnormal."""

VITALS: Dict[str, Tuple[float, float, int]] = {
    "HR": (85.0, 12.0, +1),
    "SBP": (120.0, 15.0, -1),
    "SPO2": (96.0, 2.0, -1),
}

DIAGNOSES = ("I21.4", "I50.9", "J18.9", "N17.9", "E11.9", "I10", "K92.2", "J44.1")
SEVERE_DIAGNOSES = ("A41.9", "R65.21", "J96.01")
MEDICATIONS = ("B01AC06", "C07AB02", "J01CA04", "A10BA02", "N02BE01", "C09AA05")
PROCEDURES = ("02HV33Z", "0BH17EZ", "5A1955Z")
DRGS = ("DRG291", "DRG193", "DRG871", "DRG470", "DRG683")
ADMISSION_TYPES = ("EMERGENCY", "URGENT", "ELECTIVE")
DISCHARGE_LOCATIONS = ("HOME", "SNF", "REHAB")
ICU_UNITS = ("MICU", "SICU", "CCU")


def _hazard(base: float, coupling: float, severity: float) -> float:
    """Logistic hazard that is exactly 0 (1) when the base is 0 (1)."""
    if base <= 0.0 or base >= 1.0:
        return float(base)
    return float(expit(logit(base) + coupling * (severity - 0.5)))


def _lab_events(
    rng: np.random.Generator,
    pid: str,
    t_start: float,
    t_span: float,
    frailty: float,
    count: int,
    table: Dict[str, Tuple[float, float, int]],
    kind: EventKind,
) -> Tuple[List[ClinicalEvent], List[float]]:
    """Draw ``count`` measurements; also return their abnormality quantiles."""
    codes = list(table)
    events: List[ClinicalEvent] = []
    quantiles: List[float] = []
    for _ in range(count):
        code = codes[int(rng.integers(len(codes)))]
        mean, sd, direction = table[code]
        z = 0.9 * frailty + 0.45 * rng.standard_normal()
        value = round(mean + direction * z * sd, 2)
        t = t_start + rng.uniform(0.0, t_span)
        events.append(ClinicalEvent(pid, t, kind, code, value))
        quantiles.append(float(norm.cdf(z)))
    return events, quantiles


def _patient(cfg: SyntheticCohortConfig, pid: str, rng: np.random.Generator) -> List[ClinicalEvent]:
    events: List[ClinicalEvent] = []
    sex = "F" if rng.random() < 0.5 else "M"
    start_year = int(rng.integers(cfg.start_year_range[0], cfg.start_year_range[1] + 1))
    events.append(ClinicalEvent(pid, None, EventKind.DEMOGRAPHIC, f"SEX_{sex}"))
    events.append(ClinicalEvent(pid, None, EventKind.DEMOGRAPHIC, START_YEAR_CODE, float(start_year)))

    frailty = rng.standard_normal()
    n_admissions = 1 + int(rng.poisson(cfg.mean_admissions - 1.0))
    t = rng.uniform(25.0, 85.0) * MINUTES_PER_YEAR
    early = False

    for _ in range(n_admissions):
        adm_frailty = frailty + 0.5 * rng.standard_normal()
        events.append(ClinicalEvent(pid, t, EventKind.ADMISSION, str(rng.choice(ADMISSION_TYPES))))

        labs, quantiles = _lab_events(
            rng, pid, t + 10.0, 6 * _HOUR, adm_frailty, cfg.labs_per_admission, LABS, EventKind.LAB_RESULT
        )
        events.extend(labs)
        severity = float(np.mean(quantiles))

        pool = SEVERE_DIAGNOSES if severity > 0.75 else DIAGNOSES
        for code in rng.choice(pool, size=int(rng.integers(1, 3)), replace=False):
            events.append(ClinicalEvent(pid, t + 30.0, EventKind.DIAGNOSIS, str(code)))
        for code in MEDICATIONS:
            if rng.random() < cfg.medication_rate:
                events.append(ClinicalEvent(pid, t + rng.uniform(1, 8) * _HOUR, EventKind.MEDICATION, code))
        if rng.random() < 0.3:
            events.append(ClinicalEvent(pid, t + rng.uniform(2, 20) * _HOUR, EventKind.PROCEDURE, str(rng.choice(PROCEDURES))))
        drg = str(rng.choice(DRGS))

        # Outcome draws are taken unconditionally so that runs with different
        # hazards stay on the same random stream.
        has_icu = rng.random() < cfg.icu_rate
        icu_in = t + rng.uniform(7, 24) * _HOUR
        icu_los = rng.uniform(1.0, 6.0) * MINUTES_PER_DAY
        death_u = rng.random()
        death_at = icu_in + rng.uniform(0.1, 1.0) * icu_los
        ward_days = rng.uniform(1.0, 5.0) * MINUTES_PER_DAY
        readmit_u = rng.random()
        early_gap = rng.uniform(2.0, 29.0) * MINUTES_PER_DAY
        late_gap = (31.0 + rng.exponential(240.0)) * MINUTES_PER_DAY

        if has_icu:
            events.append(ClinicalEvent(pid, icu_in, EventKind.ICU_ADMISSION, str(rng.choice(ICU_UNITS))))
            sofa = float(np.clip(np.round(2 + 10 * severity + rng.normal(0, 1.5)), 0, 24))
            events.append(ClinicalEvent(pid, icu_in + _HOUR, EventKind.SOFA_SCORE, "SOFA", sofa))
            icu_labs, _ = _lab_events(
                rng, pid, icu_in + 5.0, min(icu_los, MINUTES_PER_DAY), adm_frailty, cfg.labs_per_admission, LABS, EventKind.LAB_RESULT
            )
            vitals, _ = _lab_events(rng, pid, icu_in + 5.0, min(icu_los, MINUTES_PER_DAY), adm_frailty, 3, VITALS, EventKind.VITAL_SIGN)
            if death_u < _hazard(cfg.icu_mortality_hazard, cfg.hazard_coupling, severity):
                events.extend(icu_labs + vitals)
                events = [ev for ev in events if ev.is_static or ev.age_at_event < death_at]
                events.append(ClinicalEvent(pid, death_at, EventKind.DEATH))
                return events
            events.extend(icu_labs + vitals)
            icu_out = icu_in + icu_los
            events.append(ClinicalEvent(pid, icu_out, EventKind.ICU_DISCHARGE, "WARD"))
            discharge_at = icu_out + ward_days
        else:
            discharge_at = t + ward_days

        events.append(ClinicalEvent(pid, discharge_at, EventKind.DISCHARGE, str(rng.choice(DISCHARGE_LOCATIONS))))
        # DRG is stamped at admission time; the tokenizer moves it behind the discharge.
        events.append(ClinicalEvent(pid, t + 1.0, EventKind.DRG_ASSIGNMENT, drg))
        early = readmit_u < _hazard(cfg.readmission_hazard, cfg.hazard_coupling, severity)
        t = discharge_at + (early_gap if early else late_gap)
    if early:
        # Follow-up admission of a stay still open at the end of the record.
        events.append(ClinicalEvent(pid, t, EventKind.ADMISSION, str(rng.choice(ADMISSION_TYPES))))
    return events


def generate_synthetic_cohort(config: SyntheticCohortConfig) -> Dict[str, List[ClinicalEvent]]:
    """Generate a deterministic synthetic cohort.

    Each patient draws from its own child of ``SeedSequence(config.seed)``,
    so patients are independent and the output does not depend on the order
    in which they are generated.

    Args:
        config: Cohort knobs and seed.

    Returns:
        Mapping patient id -> events (ids ``P000000``, ``P000001``, ...).
    """
    children = np.random.SeedSequence(config.seed).spawn(config.n_patients)
    cohort: Dict[str, List[ClinicalEvent]] = {}
    for i, child in enumerate(children):
        pid = f"P{i:06d}"
        cohort[pid] = _patient(config, pid, np.random.default_rng(child))
    n_events = sum(len(v) for v in cohort.values())
    n_deaths = sum(ev.kind is EventKind.DEATH for evs in cohort.values() for ev in evs)
    logger.info("synthetic cohort: %d patients, %d events, %d deaths", len(cohort), n_events, n_deaths)
    return cohort


__all__ = ["generate_synthetic_cohort", "LABS", "VITALS"]
