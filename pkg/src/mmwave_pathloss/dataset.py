"""Path loss measurements: CSV ingestion, filtering and synthetic generation."""

from __future__ import annotations

import csv
import io
import math
import types
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Iterable, Mapping, Sequence, Tuple

import numpy as np

from .errors import DomainError, ParseError, SchemaError, ValidationError
from .models import MIN_DIST_M, MIN_FREQ_GHZ, Environment, ModelParams, Scenario

CSV_HEADER = ("scenario", "environment", "frequency_ghz", "distance_m", "path_loss_db")

#: Identifier recorded in the metadata of every generated dataset.
GENERATOR_ID = "philox4x64-10/as241-inv-cdf/v1"

_TWO_M53 = 2.0 ** -53


@dataclass(frozen=True)
class PathLossSample:
    scenario: Scenario
    environment: Environment
    freq: float
    dist: float
    path_loss: float

    def __post_init__(self):
        problem = sample_problem(self.freq, self.dist, self.path_loss)
        if problem:
            raise DomainError(problem)


def sample_problem(freq, dist, path_loss):
    """Return a message describing why a sample is invalid, or ``None``."""
    if not all(math.isfinite(v) for v in (freq, dist, path_loss)):
        return "values must be finite"
    if dist < MIN_DIST_M:
        return f"distance {dist:g} m violates d >= {MIN_DIST_M:g} m"
    if freq < MIN_FREQ_GHZ:
        return f"frequency {freq:g} GHz violates f >= {MIN_FREQ_GHZ:g} GHz"
    if path_loss <= 0:
        return f"path loss {path_loss:g} dB must be positive"
    return None


@dataclass(frozen=True)
class Dataset:
    samples: Tuple[PathLossSample, ...]
    source: str = ""
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "metadata", types.MappingProxyType(dict(self.metadata)))

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def freqs(self) -> np.ndarray:
        return np.array([s.freq for s in self.samples], dtype=float)

    @property
    def dists(self) -> np.ndarray:
        return np.array([s.dist for s in self.samples], dtype=float)

    @property
    def path_losses(self) -> np.ndarray:
        return np.array([s.path_loss for s in self.samples], dtype=float)

    def frequency_counts(self):
        """``[(freq, n_samples), ...]`` sorted by frequency."""
        counts = {}
        for s in self.samples:
            counts[s.freq] = counts.get(s.freq, 0) + 1
        return sorted(counts.items())

    def frequency_set(self):
        return tuple(f for f, _ in self.frequency_counts())

    def distance_range(self):
        if not self.samples:
            return None
        d = self.dists
        return float(d.min()), float(d.max())


def _decode(source) -> Tuple[str, str]:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8"), "<bytes>"
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return data, getattr(source, "name", "<stream>")
    raise TypeError("load_csv expects bytes or a readable stream")


def _float_cell(text, row, column):
    text = text.strip()
    # locale-free decimal only; float() would also accept "inf", "1_0", etc.
    try:
        if not text or "_" in text or any(c.isalpha() and c not in "eE" for c in text):
            raise ValueError
        return float(text)
    except ValueError:
        raise ParseError(row, f"not a decimal number: {text!r}", column) from None


def load_csv(source, name: str | None = None) -> Dataset:
    """Parse the measurement CSV format.

    ``source`` is ``bytes`` or a binary/text stream.  Lines starting with
    ``#`` are comments; ``# key: value`` comments are kept as metadata.
    Row numbers in errors are 1-based physical line numbers.
    """
    text, default_name = _decode(source)
    lines = text.splitlines()
    metadata = {}
    header = None
    samples = []
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep and key.strip():
                metadata[key.strip()] = value.strip()
            continue
        if not line.strip():
            continue
        cells = next(csv.reader([line]))
        if header is None:
            header = [c.strip() for c in cells]
            for col in CSV_HEADER:
                if col not in header:
                    raise SchemaError(col)
            index = {col: header.index(col) for col in CSV_HEADER}
            continue
        if len(cells) != len(header):
            raise ParseError(lineno, f"expected {len(header)} cells, found {len(cells)}")
        try:
            scenario = Scenario.parse(cells[index["scenario"]])
        except DomainError as exc:
            raise ParseError(lineno, str(exc), "scenario") from None
        try:
            env = Environment.parse(cells[index["environment"]])
        except DomainError as exc:
            raise ParseError(lineno, str(exc), "environment") from None
        freq = _float_cell(cells[index["frequency_ghz"]], lineno, "frequency_ghz")
        dist = _float_cell(cells[index["distance_m"]], lineno, "distance_m")
        pl = _float_cell(cells[index["path_loss_db"]], lineno, "path_loss_db")
        problem = sample_problem(freq, dist, pl)
        if problem:
            raise ValidationError(lineno, problem)
        samples.append(PathLossSample(scenario, env, freq, dist, pl))
    if header is None:
        raise SchemaError(CSV_HEADER[0], "no header line found")
    return Dataset(samples, source=name or default_name, metadata=metadata)


def dump_csv(ds: Dataset, comments: bool = True) -> str:
    """Serialize to the CSV format, LF newlines, shortest round-trip floats."""
    out = io.StringIO()
    if comments:
        if ds.source:
            out.write(f"# source: {ds.source}\n")
        for key, value in ds.metadata.items():
            out.write(f"# {key}: {value}\n")
    out.write(",".join(CSV_HEADER) + "\n")
    for s in ds.samples:
        out.write(f"{s.scenario.code},{s.environment.value},{s.freq!r},{s.dist!r},{s.path_loss!r}\n")
    return out.getvalue()


def filter(ds: Dataset, predicate: Callable[[PathLossSample], bool]) -> Dataset:  # noqa: A001
    return Dataset([s for s in ds.samples if predicate(s)], source=ds.source, metadata=ds.metadata)


def where(
    scenario: Scenario | None = None,
    environment: Environment | None = None,
    freqs: Iterable[float] | None = None,
) -> Callable[[PathLossSample], bool]:
    """Build a predicate for :func:`filter`; ``None`` means "any"."""
    freqs = None if freqs is None else {float(f) for f in freqs}

    def predicate(s):
        return (
            (scenario is None or s.scenario == scenario)
            and (environment is None or s.environment == environment)
            and (freqs is None or s.freq in freqs)
        )

    return predicate


@dataclass(frozen=True)
class GenSpec:
    model: ModelParams
    freq_plan: Sequence[Tuple[float, int]]
    dist_range: Tuple[float, float]
    sigma: float
    seed: int
    scenario: Scenario = Scenario("other", "synthetic")
    environment: Environment = Environment.NLOS

    def validate(self):
        if not self.freq_plan:
            raise DomainError("frequency plan is empty")
        for f, count in self.freq_plan:
            if not (math.isfinite(f) and f >= MIN_FREQ_GHZ):
                raise DomainError(f"frequency {f!r} GHz violates f >= {MIN_FREQ_GHZ:g} GHz")
            if int(count) != count or count < 1:
                raise DomainError(f"sample count must be a positive integer, got {count!r}")
        dmin, dmax = self.dist_range
        if not (math.isfinite(dmin) and math.isfinite(dmax)):
            raise DomainError("distance range must be finite")
        if dmin < MIN_DIST_M:
            raise DomainError(f"minimum distance {dmin:g} m violates d >= {MIN_DIST_M:g} m")
        if not dmin < dmax:
            raise DomainError(f"distance range must satisfy min < max, got {dmin:g}..{dmax:g}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise DomainError(f"sigma must be >= 0, got {self.sigma!r}")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise DomainError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")


class UniformStream:
    """Uniforms on (0, 1) from Philox4x64-10 keyed directly by ``key``.

    Each raw 64-bit word ``x`` maps to ``((x >> 11) + 0.5) * 2**-53`` so the
    endpoints are never produced and the inverse normal CDF stays finite.
    """

    def __init__(self, key: int):
        self._bitgen = np.random.Philox(key=key)

    def draw(self, count: int) -> np.ndarray:
        raw = self._bitgen.random_raw(count)
        return ((raw >> np.uint64(11)).astype(float) + 0.5) * _TWO_M53


def _standard_normals(u: np.ndarray) -> np.ndarray:
    inv = NormalDist().inv_cdf
    return np.array([inv(x) for x in u], dtype=float)


def generate_synthetic(spec: GenSpec) -> Dataset:
    """Draw log-uniform distances and add zero-mean Gaussian shadowing in dB.

    Distances and shadowing use two independent Philox streams (keys
    ``seed`` and ``seed + 2**64``), so for a given seed the distances do not
    depend on ``sigma``.
    """
    spec.validate()
    seed = int(spec.seed)
    dist_stream = UniformStream(seed)
    noise_stream = UniformStream(seed + 2**64)
    lo, hi = (math.log10(x) for x in spec.dist_range)

    samples = []
    for f, count in spec.freq_plan:
        count = int(count)
        u = dist_stream.draw(count)
        d = np.clip(10.0 ** (lo + u * (hi - lo)), *spec.dist_range)
        mean = np.asarray(spec.model.evaluate(np.full(count, float(f)), d), dtype=float)
        pl = mean + spec.sigma * _standard_normals(noise_stream.draw(count))
        for di, pli in zip(d, pl):
            problem = sample_problem(float(f), float(di), float(pli))
            if problem:
                raise DomainError(f"generated sample invalid: {problem}")
            samples.append(PathLossSample(spec.scenario, spec.environment, float(f), float(di), float(pli)))

    metadata = {
        "generator": GENERATOR_ID,
        "seed": str(seed),
        "model": spec.model.model,
        "params": ",".join(f"{k}={v!r}" for k, v in spec.model.as_dict().items()),
        "sigma_db": repr(float(spec.sigma)),
        "freq_plan": ";".join(f"{float(f)!r}x{int(c)}" for f, c in spec.freq_plan),
        "dist_range_m": f"{float(spec.dist_range[0])!r}..{float(spec.dist_range[1])!r}",
    }
    return Dataset(samples, source="synthetic", metadata=metadata)
