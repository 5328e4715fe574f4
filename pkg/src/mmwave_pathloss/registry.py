"""Published reference parameters for 28/73 GHz UMi street canyon and indoor office.

Single-frequency FI/CI fits are keyed by one frequency (28 or 73 GHz, as
printed).  Multi-frequency ABG/CI/CIF fits are keyed by the pair (28, 73.5).
The CIF rows carry ``f0 = 51`` GHz, which is derived (equal sample counts at
both bands) rather than published; ``f0_derived`` flags that.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple, Union

from .models import (
    INDOOR_OFFICE,
    UMI_SC,
    AbgParams,
    CifParams,
    CiParams,
    Environment,
    FiParams,
    ModelParams,
    Scenario,
    normalize_model_name,
)

LOS = Environment.LOS
NLOS = Environment.NLOS

MULTI_FREQ = (28.0, 73.5)
CIF_F0_GHZ = 51.0

FreqKey = Union[float, Iterable[float]]


@dataclass(frozen=True)
class ReferenceEntry:
    table: int
    scenario: Scenario
    environment: Environment
    frequencies: Tuple[float, ...]
    distance_range: Tuple[float, float]
    model: str
    params: ModelParams
    sigma: float
    f0_derived: bool = False

    @property
    def multi_frequency(self) -> bool:
        return len(self.frequencies) > 1


def _t1(scenario, env, freq, dist, fi, ci):
    (a, b, s_fi), (n, s_ci) = fi, ci
    yield ReferenceEntry(1, scenario, env, (freq,), dist, "FI", FiParams(a, b), s_fi)
    yield ReferenceEntry(1, scenario, env, (freq,), dist, "CI", CiParams(n), s_ci)


def _t2(scenario, env, dist, abg, ci, cif):
    (a, b, g, s_abg), (n, s_ci), (n2, bb, s_cif) = abg, ci, cif
    yield ReferenceEntry(2, scenario, env, MULTI_FREQ, dist, "ABG", AbgParams(a, b, g), s_abg)
    yield ReferenceEntry(2, scenario, env, MULTI_FREQ, dist, "CI", CiParams(n), s_ci)
    yield ReferenceEntry(
        2, scenario, env, MULTI_FREQ, dist, "CIF", CifParams(n2, bb, CIF_F0_GHZ), s_cif, f0_derived=True
    )


TABLE_I: Tuple[ReferenceEntry, ...] = (
    *_t1(UMI_SC, LOS, 28.0, (31.0, 54.0), (3.9, 31.8, 2.9), (2.1, 3.5)),
    *_t1(UMI_SC, LOS, 73.0, (27.0, 54.0), (-0.8, 115.6, 3.9), (2.0, 4.9)),
    *_t1(UMI_SC, NLOS, 28.0, (61.0, 186.0), (2.5, 80.6, 9.7), (3.4, 9.7)),
    *_t1(UMI_SC, NLOS, 73.0, (48.0, 190.0), (2.9, 80.6, 7.8), (3.4, 7.9)),
    *_t1(INDOOR_OFFICE, LOS, 28.0, (4.1, 21.3), (1.2, 60.4, 1.8), (1.1, 1.8)),
    *_t1(INDOOR_OFFICE, LOS, 73.0, (4.1, 21.3), (0.5, 77.9, 1.4), (1.3, 2.4)),
    *_t1(INDOOR_OFFICE, NLOS, 28.0, (3.9, 45.9), (3.5, 51.3, 9.3), (2.7, 9.6)),
    *_t1(INDOOR_OFFICE, NLOS, 73.0, (3.9, 41.9), (2.7, 76.3, 11.2), (3.2, 11.3)),
)

TABLE_II: Tuple[ReferenceEntry, ...] = (
    *_t2(UMI_SC, LOS, (27.0, 54.0), (1.0, 55.0, 1.7, 4.3), (2.0, 4.5), (2.0, -0.06, 4.4)),
    # b printed as "-0.00"
    *_t2(UMI_SC, NLOS, (48.0, 190.0), (2.8, 46.7, 1.9, 8.4), (3.4, 8.4), (3.4, -0.0, 8.4)),
    *_t2(INDOOR_OFFICE, LOS, (4.1, 21.3), (0.9, 26.8, 2.6, 1.8), (1.2, 2.3), (1.2, 0.18, 2.1)),
    *_t2(INDOOR_OFFICE, NLOS, (3.9, 45.9), (3.1, 1.3, 3.8, 10.3), (2.9, 10.9), (3.0, 0.21, 10.4)),
)

ENTRIES: Tuple[ReferenceEntry, ...] = TABLE_I + TABLE_II


def freq_key(freqs: FreqKey) -> Tuple[float, ...]:
    if isinstance(freqs, (int, float)):
        return (float(freqs),)
    return tuple(sorted({float(f) for f in freqs}))


def reference_lookup(
    scenario: Scenario, env: Environment, freqs: FreqKey, model: str
) -> Optional[ReferenceEntry]:
    """Return the published row matching exactly, or ``None``."""
    key = freq_key(freqs)
    model = normalize_model_name(model)
    for entry in ENTRIES:
        if (
            entry.scenario == scenario
            and entry.environment == env
            and entry.frequencies == key
            and entry.model == model
        ):
            return entry
    return None


CSV_COLUMNS = (
    "scenario",
    "environment",
    "model",
    "freq_ghz_list",
    "dist_min_m",
    "dist_max_m",
    "ple_or_alpha_or_n",
    "beta_db",
    "gamma_or_b",
    "sigma_db",
)


def _num(x):
    return "" if x is None else format(x, "g")


def entry_row(entry: ReferenceEntry) -> dict:
    p = entry.params
    first = getattr(p, "alpha", None)
    if first is None:
        first = p.n
    third = getattr(p, "gamma", None)
    if third is None:
        third = getattr(p, "b", None)
    return {
        "scenario": entry.scenario.code,
        "environment": entry.environment.value,
        "model": entry.model,
        "freq_ghz_list": ";".join(format(f, "g") for f in entry.frequencies),
        "dist_min_m": _num(entry.distance_range[0]),
        "dist_max_m": _num(entry.distance_range[1]),
        "ple_or_alpha_or_n": _num(first),
        "beta_db": _num(getattr(p, "beta", None)),
        "gamma_or_b": _num(third),
        "sigma_db": _num(entry.sigma),
    }


def export_csv(entries: Iterable[ReferenceEntry] = ENTRIES) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for entry in entries:
        writer.writerow(entry_row(entry))
    return buf.getvalue()
