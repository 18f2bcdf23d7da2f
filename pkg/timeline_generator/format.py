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
Formatting helpers for token text.

Example:
 kind_token(EventKind.LAB_RESULT) -> "LAB_RESULT"\n
 quantile_token(3) -> "Q4"\n
 age_token(62.0) -> "AGE//60-65"\n
 year_token(2013) -> "YEAR//2010-2015"
"""

import math
import re
from typing import Optional

from timeline_generator.models import EventKind

# Pre-compile regex patterns for code normalisation and interval parsing
_CODE_RE = re.compile(r"[\s.]+")
_INTERVAL_RE = re.compile(r"^INT//(\w+)$")

SEPARATOR = "//"
UNKNOWN_AGE = "AGE//UNKNOWN"
UNKNOWN_YEAR = "YEAR//UNKNOWN"


def normalize_code(code: str) -> str:
    """Upper-case a code and drop dots and whitespace ("i21.4" -> "I214")."""
    return _CODE_RE.sub("", code or "").upper()


def kind_token(kind: EventKind) -> str:
    """Token text that opens every event of ``kind``."""
    return kind.name


def code_token(prefix: str, code: str) -> str:
    """Namespaced code token, e.g. ``code_token("LAB", "K") -> "LAB//K"``."""
    return f"{prefix}{SEPARATOR}{code}"


def quantile_token(bin_index: int) -> str:
    """One-based quantile token ("Q1" is the lowest bin)."""
    return f"Q{bin_index + 1}"


def interval_token(label: str) -> str:
    return f"INT{SEPARATOR}{label}"


def parse_interval_token(text: str) -> Optional[str]:
    """Return the ladder label of an interval token, ``None`` for other tokens."""
    m = _INTERVAL_RE.match(text)
    return m.group(1) if m else None


def age_token(age_years: float) -> str:
    """Five-year age bucket token.

    Args:
        age_years: Age in years (nonnegative).

    Returns:
        Token text such as ``"AGE//60-65"``.

    Raises:
        ValueError: If ``age_years`` is negative.
    """
    if age_years < 0:
        raise ValueError(f"age must be nonnegative, got {age_years}")
    low = 5 * math.floor(age_years / 5)
    return f"AGE{SEPARATOR}{low}-{low + 5}"


def year_token(start_year: int) -> str:
    """Five-year bucket token for the calendar year the timeline starts in."""
    low = 5 * math.floor(int(start_year) / 5)
    return f"YEAR{SEPARATOR}{low}-{low + 5}"


__all__ = [
    "normalize_code",
    "kind_token",
    "code_token",
    "quantile_token",
    "interval_token",
    "parse_interval_token",
    "age_token",
    "year_token",
    "UNKNOWN_AGE",
    "UNKNOWN_YEAR",
]
