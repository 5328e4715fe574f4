"""Side-by-side model comparison and link-budget range inversion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple, Union

from .dataset import Dataset
from .errors import (
    BelowAnchorError,
    DegenerateGeometryError,
    DomainError,
    EmptyReportError,
    NoSolutionError,
    SingularDesignError,
    UnstableParameterError,
)
from .estimation import FitResult, fit_model, sig6
from .models import MODEL_NAMES, Environment, ModelParams, Scenario, normalize_model_name
from .registry import ReferenceEntry, reference_lookup


@dataclass(frozen=True)
class DatasetSummary:
    scenario: Optional[Scenario]  # None when the data mixes scenarios
    environment: Optional[Environment]
    frequencies: Tuple[float, ...]
    distance_range: Tuple[float, float]
    sample_count: int

    @classmethod
    def of(cls, ds: Dataset) -> "DatasetSummary":
        scenarios = {s.scenario for s in ds.samples}
        envs = {s.environment for s in ds.samples}
        return cls(
            scenario=scenarios.pop() if len(scenarios) == 1 else None,
            environment=envs.pop() if len(envs) == 1 else None,
            frequencies=ds.frequency_set(),
            distance_range=ds.distance_range(),
            sample_count=len(ds),
        )


@dataclass(frozen=True)
class ComparisonReport:
    summary: DatasetSummary
    fits: Dict[str, FitResult]
    skipped: Dict[str, str]
    ranking: Tuple[str, ...]
    references: Dict[str, ReferenceEntry] = field(default_factory=dict)

    def deltas(self) -> Dict[str, Dict[str, float]]:
        """Fitted minus published value for every model with a matching row."""
        out = {}
        for name, ref in self.references.items():
            fitted = self.fits[name].params.as_dict()
            d = {k: fitted[k] - v for k, v in ref.params.as_dict().items() if k != "f0"}
            d["sigma"] = self.fits[name].sigma - ref.sigma
            out[name] = d
        return out

    def to_dict(self, residuals: bool = False) -> dict:
        s = self.summary
        return {
            "summary": {
                "scenario": None if s.scenario is None else s.scenario.code,
                "environment": None if s.environment is None else s.environment.value,
                "freq_ghz_set": [sig6(f) for f in s.frequencies],
                "dist_range_m": [sig6(x) for x in s.distance_range],
                "n_samples": s.sample_count,
            },
            "fits": [self.fits[m].to_dict(residuals) for m in self.fits],
            "skipped": dict(self.skipped),
            "sigma_ranking": list(self.ranking),
            "reference_deltas": {
                m: {k: sig6(v) for k, v in d.items()} for m, d in self.deltas().items()
            },
        }

    def to_json(self, residuals: bool = False) -> str:
        return json.dumps(self.to_dict(residuals), indent=2) + "\n"

    def to_table(self, bold_header: bool = False) -> str:
        return format_table(self, bold_header)


def _applicability(model: str, n_freqs: int) -> Optional[str]:
    if model == "FI" and n_freqs > 1:
        return f"FI is a single-frequency model; data has {n_freqs} frequencies"
    if model == "ABG" and n_freqs < 2:
        return "ABG needs at least two distinct frequencies"
    return None


def compare_models(
    ds: Dataset,
    models: Iterable[str] = MODEL_NAMES,
    f0: Union[str, float, None] = "auto",
) -> ComparisonReport:
    """Fit every requested model that the data supports.

    Models whose preconditions fail are listed in ``skipped`` with the reason.
    Raises :class:`EmptyReportError` if nothing could be fitted.
    """
    requested = []
    for m in models:
        m = normalize_model_name(m)
        if m not in requested:
            requested.append(m)
    if not len(ds):
        raise EmptyReportError("dataset is empty")
    summary = DatasetSummary.of(ds)

    fits, skipped = {}, {}
    for m in requested:
        reason = _applicability(m, len(summary.frequencies))
        if reason:
            skipped[m] = reason
            continue
        try:
            fits[m] = fit_model(ds, m, f0)
        except (SingularDesignError, DegenerateGeometryError, UnstableParameterError) as exc:
            skipped[m] = str(exc)
    if not fits:
        raise EmptyReportError("no requested model could be fitted: " + "; ".join(
            f"{m}: {r}" for m, r in skipped.items()))

    order = {m: i for i, m in enumerate(requested)}
    ranking = tuple(sorted(fits, key=lambda m: (fits[m].sigma, order[m])))

    references = {}
    if summary.scenario is not None and summary.environment is not None:
        for m in fits:
            ref = reference_lookup(summary.scenario, summary.environment, summary.frequencies, m)
            if ref is not None:
                references[m] = ref
    return ComparisonReport(summary, fits, skipped, ranking, references)


TABLE_COLUMNS = ("Scenario", "Env", "Freq (GHz)", "Dist Range (m)", "Model", "PLE/α/n", "β (dB)", "γ/b", "σ (dB)")


def _fmt_freqs(freqs):
    return ", ".join(format(f, "g") for f in freqs)


def _param_cells(params: ModelParams):
    p = params.as_dict()
    first = p.get("alpha", p.get("n"))
    beta = p.get("beta")
    third = p.get("gamma", p.get("b"))
    return (
        f"{first:.2f}",
        "-" if beta is None else f"{beta:.1f}",
        "-" if third is None else f"{third:.2f}",
    )


def _align(rows, bold_header):
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    if bold_header:
        lines[0] = f"\x1b[1m{lines[0]}\x1b[0m"
    lines.insert(1, "  ".join("-" * w for w in widths))
    return lines


def format_table(report: ComparisonReport, bold_header: bool = False) -> str:
    s = report.summary
    scen = "mixed" if s.scenario is None else s.scenario.display
    env = "mixed" if s.environment is None else s.environment.value.upper()
    dist = f"{s.distance_range[0]:.1f}-{s.distance_range[1]:.1f}"
    rows = [TABLE_COLUMNS]
    for m, fit in report.fits.items():
        rows.append((scen, env, _fmt_freqs(fit.frequency_set), dist, m, *_param_cells(fit.params), f"{fit.sigma:.2f}"))
    lines = _align(rows, bold_header)
    lines.append("")
    lines.append(f"samples: {s.sample_count}")
    cif = report.fits.get("CIF")
    if cif is not None:
        lines.append(f"CIF f0: {cif.f0_used:g} GHz" + (f" ({cif.note})" if cif.note else ""))
    lines.append("sigma ranking: " + " <= ".join(report.ranking))
    for m, reason in report.skipped.items():
        lines.append(f"skipped {m}: {reason}")
    deltas = report.deltas()
    if deltas:
        lines.append("")
        lines.append("reference deltas (fitted - published):")
        for m, d in deltas.items():
            ref = report.references[m]
            parts = ", ".join(f"{k} {v:+.2f}" for k, v in d.items())
            lines.append(f"  {m} (table {'I' * ref.table}): {parts}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RangeQuery:
    model: ModelParams
    freq: Optional[float]
    max_path_loss: float

    def __post_init__(self):
        if not (math.isfinite(self.max_path_loss) and self.max_path_loss > 0):
            raise DomainError(f"maximum path loss must be positive, got {self.max_path_loss!r}")
        if self.freq is None and self.model.model != "FI":
            raise DomainError(f"{self.model.model} needs a frequency")


def max_range(query: RangeQuery) -> float:
    """Largest distance (m) at which the mean path loss stays within budget."""
    f = query.freq if query.freq is not None else 1.0
    slope = float(query.model.slope(f))
    anchor = float(query.model.intercept(f))
    if not slope > 0:
        raise NoSolutionError(
            f"{query.model.model} slope {slope:g} is not positive; path loss does not grow with distance"
        )
    if query.max_path_loss < anchor:
        raise BelowAnchorError(
            f"maximum path loss {query.max_path_loss:g} dB is below the 1 m value {anchor:.2f} dB"
        )
    return 10.0 ** ((query.max_path_loss - anchor) / (10.0 * slope))
