"""Large-scale path loss models and their domain types.

All evaluators return the *mean* path loss in dB; shadow fading is not part
of the deterministic model and only shows up in synthetic data and in fit
residuals.  Evaluators accept scalars or numpy arrays for ``f`` (GHz) and
``d`` (meters) and return a float for scalar input.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact

MIN_FREQ_GHZ = 1.0
MIN_DIST_M = 1.0

#: 20*log10(4*pi*1e9/c), the ABG offset that turns ABG into CI.
FSPL_1M_1GHZ_DB = 20.0 * math.log10(4.0 * math.pi * 1e9 / SPEED_OF_LIGHT)

ArrayLike = Union[float, np.ndarray]


class Environment(enum.Enum):
    LOS = "los"
    NLOS = "nlos"

    @classmethod
    def parse(cls, text: str) -> "Environment":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DomainError(f"unknown environment {text!r} (expected los or nlos)") from None

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Scenario:
    """Measurement scenario: ``umi_sc``, ``indoor_office`` or ``other:<label>``."""

    kind: str
    label: str = ""

    KINDS = ("umi_sc", "indoor_office", "other")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown scenario kind {self.kind!r}")
        if self.kind == "other" and not self.label:
            raise DomainError("scenario 'other' needs a nonempty label")
        if self.kind != "other" and self.label:
            raise DomainError(f"scenario {self.kind!r} takes no label")

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        text = text.strip()
        if text.lower().startswith("other:"):
            return cls("other", text[len("other:"):])
        return cls(text.lower())

    @property
    def code(self) -> str:
        return f"other:{self.label}" if self.kind == "other" else self.kind

    @property
    def display(self) -> str:
        return {"umi_sc": "UMi SC", "indoor_office": "Indoor Office"}.get(self.kind, self.label)

    def __str__(self):
        return self.code


UMI_SC = Scenario("umi_sc")
INDOOR_OFFICE = Scenario("indoor_office")


def _as_array(x, name, minimum, unit):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < minimum):
        raise DomainError(f"{name} must be >= {minimum:g} {unit}")
    return arr


def _check_f(f):
    return _as_array(f, "frequency", MIN_FREQ_GHZ, "GHz")


def _check_d(d):
    return _as_array(d, "distance", MIN_DIST_M, "m")


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def fspl_1m(f: ArrayLike) -> ArrayLike:
    """Free space path loss at 1 m, ``20*log10(4*pi*f/c)`` in dB, f in GHz."""
    f = _check_f(f)
    return _out(20.0 * np.log10(4.0 * np.pi * f * 1e9 / SPEED_OF_LIGHT))


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise DomainError(f"parameter {name} must be finite, got {v!r}")


@dataclass(frozen=True)
class FiParams:
    """Floating-intercept (alpha-beta) model."""

    alpha: float
    beta: float

    model = "FI"

    def __post_init__(self):
        _check_finite(alpha=self.alpha, beta=self.beta)

    def evaluate(self, f: ArrayLike, d: ArrayLike) -> ArrayLike:
        # f is ignored; the signature is shared with the other models
        return eval_fi(self, d)

    def intercept(self, f: float) -> float:
        return self.beta

    def slope(self, f: float) -> float:
        return self.alpha

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class CiParams:
    """Close-in free space reference distance model."""

    n: float

    model = "CI"

    def __post_init__(self):
        _check_finite(n=self.n)

    def evaluate(self, f, d):
        return eval_ci(self, f, d)

    def intercept(self, f):
        return fspl_1m(f)

    def slope(self, f):
        return self.n

    def as_dict(self):
        return {"n": self.n}


@dataclass(frozen=True)
class AbgParams:
    """Alpha-beta-gamma model."""

    alpha: float
    beta: float
    gamma: float

    model = "ABG"

    def __post_init__(self):
        _check_finite(alpha=self.alpha, beta=self.beta, gamma=self.gamma)

    def evaluate(self, f, d):
        return eval_abg(self, f, d)

    def intercept(self, f):
        return self.beta + 10.0 * self.gamma * math.log10(float(_check_f(f)))

    def slope(self, f):
        return self.alpha

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


@dataclass(frozen=True)
class CifParams:
    """CI model with a frequency-weighted path loss exponent."""

    n: float
    b: float
    f0: float

    model = "CIF"

    def __post_init__(self):
        _check_finite(n=self.n, b=self.b, f0=self.f0)
        if self.f0 < MIN_FREQ_GHZ:
            raise DomainError(f"reference frequency f0 must be >= {MIN_FREQ_GHZ:g} GHz")

    def evaluate(self, f, d):
        return eval_cif(self, f, d)

    def intercept(self, f):
        return fspl_1m(f)

    def slope(self, f):
        return self.n * (1.0 + self.b * (f - self.f0) / self.f0)

    def as_dict(self):
        return {"n": self.n, "b": self.b, "f0": self.f0}


ModelParams = Union[FiParams, CiParams, AbgParams, CifParams]

MODEL_NAMES = ("FI", "CI", "ABG", "CIF")


def normalize_model_name(name: str) -> str:
    up = name.strip().upper()
    if up not in MODEL_NAMES:
        raise DomainError(f"unknown model {name!r} (expected one of {', '.join(MODEL_NAMES)})")
    return up


def eval_fi(p: FiParams, d: ArrayLike) -> ArrayLike:
    d = _check_d(d)
    return _out(10.0 * p.alpha * np.log10(d) + p.beta)


def eval_ci(p: CiParams, f: ArrayLike, d: ArrayLike) -> ArrayLike:
    fspl = fspl_1m(f)
    d = _check_d(d)
    return _out(fspl + 10.0 * p.n * np.log10(d))


def eval_abg(p: AbgParams, f: ArrayLike, d: ArrayLike) -> ArrayLike:
    f = _check_f(f)
    d = _check_d(d)
    return _out(10.0 * p.alpha * np.log10(d) + p.beta + 10.0 * p.gamma * np.log10(f))


def eval_cif(p: CifParams, f: ArrayLike, d: ArrayLike) -> ArrayLike:
    fspl = fspl_1m(f)
    f = np.asarray(f, dtype=float)
    d = _check_d(d)
    # keep the grouping (10*n*weight)*log10(d) so b=0 reproduces eval_ci exactly
    weight = 1.0 + p.b * (f - p.f0) / p.f0
    return _out(fspl + 10.0 * p.n * weight * np.log10(d))


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def weighted_mean_frequency(counts: Iterable[Tuple[float, int]]) -> float:
    """Sample-count weighted mean frequency (unrounded)."""
    counts = list(counts)
    if not counts:
        raise DomainError("frequency/count list is empty")
    num = 0.0
    den = 0
    for f, nk in counts:
        _check_f(f)
        if int(nk) != nk or nk <= 0:
            raise DomainError(f"sample count for {f:g} GHz must be a positive integer, got {nk!r}")
        num += f * nk
        den += int(nk)
    return num / den


def compute_f0(counts: Iterable[Tuple[float, int]]) -> float:
    """Reference frequency for the CIF model in integer GHz.

    ``counts`` is a list of ``(frequency_ghz, n_samples)``.  The weighted mean
    is rounded to the nearest integer GHz, halves away from zero.
    """
    return float(round_half_away(weighted_mean_frequency(counts)))
