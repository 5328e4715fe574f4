"""Closed-form least-squares fits that minimize the shadow fading deviation.

Shadow fading sigma is always the population RMS of the residuals,
``sqrt(mean(residual**2))``.  The grid oracle at the bottom brute-forces the
same objective and exists to check the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .dataset import Dataset, PathLossSample
from .errors import (
    DegenerateGeometryError,
    DomainError,
    SingularDesignError,
    UnstableParameterError,
)
from .models import (
    AbgParams,
    CifParams,
    CiParams,
    FiParams,
    ModelParams,
    compute_f0,
    fspl_1m,
    normalize_model_name,
)

PIVOT_RTOL = 1e-12
UNSTABLE_N = 1e-6

Samples = Union[Dataset, Sequence[PathLossSample]]


@dataclass(frozen=True)
class FitResult:
    model: str
    params: ModelParams
    sigma: float
    residuals: Tuple[float, ...]
    sample_count: int
    frequency_set: Tuple[float, ...]
    f0_used: Optional[float] = None
    note: str = ""

    def to_dict(self, residuals: bool = False) -> dict:
        out = {
            "model": self.model,
            "params": {k: sig6(v) for k, v in self.params.as_dict().items() if k != "f0"},
            "sigma_db": sig6(self.sigma),
            "n_samples": self.sample_count,
            "freq_ghz_set": [sig6(f) for f in self.frequency_set],
            "f0_ghz": None if self.f0_used is None else sig6(self.f0_used),
        }
        if self.note:
            out["note"] = self.note
        if residuals:
            out["residuals"] = [sig6(r) for r in self.residuals]
        return out


def sig6(x: float) -> float:
    """Round to 6 significant digits for serialization."""
    return float(format(float(x), ".6g"))


def _columns(samples: Samples):
    samples = list(samples)
    if not samples:
        raise DomainError("sample set is empty")
    f = np.array([s.freq for s in samples], dtype=float)
    d = np.array([s.dist for s in samples], dtype=float)
    pl = np.array([s.path_loss for s in samples], dtype=float)
    return f, d, pl


def _result(model, params, residuals, f, f0=None, note=""):
    residuals = np.asarray(residuals, dtype=float)
    sigma = float(np.sqrt(np.mean(residuals**2)))
    return FitResult(
        model=model,
        params=params,
        sigma=sigma,
        residuals=tuple(float(r) for r in residuals),
        sample_count=len(residuals),
        frequency_set=tuple(sorted({float(x) for x in f})),
        f0_used=f0,
        note=note,
    )


def residual_stats(samples: Samples, model: Union[ModelParams, Callable]) -> Tuple[float, np.ndarray]:
    """Residuals ``PL - model(f, d)`` and their RMS.

    ``model`` is a params object (anything with ``evaluate(f, d)``) or a
    plain callable ``(f, d) -> dB``.
    """
    f, d, pl = _columns(samples)
    evaluate = model.evaluate if hasattr(model, "evaluate") else model
    residuals = pl - np.asarray(evaluate(f, d), dtype=float)
    return float(np.sqrt(np.mean(residuals**2))), residuals


def solve_normal_equations(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve the small symmetric system ``a @ x = y``.

    Gaussian elimination with partial pivoting.  Raises
    :class:`SingularDesignError` when a pivot falls below ``PIVOT_RTOL``
    times the largest entry of ``a``.
    """
    m = np.array(a, dtype=float)
    rhs = np.array(y, dtype=float)
    size = len(rhs)
    scale = np.max(np.abs(m))
    if scale == 0:
        raise SingularDesignError("design matrix is all zeros")
    for col in range(size):
        pivot_row = col + int(np.argmax(np.abs(m[col:, col])))
        if abs(m[pivot_row, col]) < PIVOT_RTOL * scale:
            raise SingularDesignError(
                f"rank-deficient design (pivot {abs(m[pivot_row, col]):.3g} in column {col})"
            )
        if pivot_row != col:
            m[[col, pivot_row]] = m[[pivot_row, col]]
            rhs[[col, pivot_row]] = rhs[[pivot_row, col]]
        for row in range(col + 1, size):
            factor = m[row, col] / m[col, col]
            m[row, col:] -= factor * m[col, col:]
            rhs[row] -= factor * rhs[col]
    x = np.zeros(size)
    for row in range(size - 1, -1, -1):
        x[row] = (rhs[row] - m[row, row + 1:] @ x[row + 1:]) / m[row, row]
    return x


def _least_squares(columns, y):
    x = np.column_stack(columns)
    return solve_normal_equations(x.T @ x, x.T @ y)


def fit_ci(samples: Samples) -> FitResult:
    """Single-parameter fit of the path loss exponent; FSPL is removed per sample."""
    f, d, pl = _columns(samples)
    a = pl - fspl_1m(f)
    dd = 10.0 * np.log10(d)
    denom = float(np.sum(dd * dd))
    if denom == 0.0:
        raise DegenerateGeometryError("all samples are at 1 m; the exponent is undetermined")
    n = float(np.sum(a * dd)) / denom
    return _result("CI", CiParams(n), a - n * dd, f)


def fit_fi(samples: Samples) -> FitResult:
    f, d, pl = _columns(samples)
    if len(np.unique(d)) < 2:
        raise SingularDesignError("FI needs at least two distinct distances")
    dd = 10.0 * np.log10(d)
    alpha, beta = _least_squares([dd, np.ones_like(dd)], pl)
    params = FiParams(float(alpha), float(beta))
    return _result("FI", params, pl - (alpha * dd + beta), f)


def fit_abg(samples: Samples) -> FitResult:
    f, d, pl = _columns(samples)
    if len(np.unique(f)) < 2:
        raise SingularDesignError("ABG needs at least two distinct frequencies")
    if len(np.unique(d)) < 2:
        raise SingularDesignError("ABG needs at least two distinct distances")
    dd = 10.0 * np.log10(d)
    ff = 10.0 * np.log10(f)
    alpha, beta, gamma = _least_squares([dd, np.ones_like(dd), ff], pl)
    params = AbgParams(float(alpha), float(beta), float(gamma))
    return _result("ABG", params, pl - (alpha * dd + beta + gamma * ff), f)


def _resolve_f0(f: np.ndarray, f0: Union[str, float, None]) -> float:
    if f0 is None or (isinstance(f0, str) and f0.lower() == "auto"):
        values, counts = np.unique(f, return_counts=True)
        return compute_f0(zip(values.tolist(), counts.tolist()))
    f0 = float(f0)
    if not (math.isfinite(f0) and f0 >= 1.0):
        raise DomainError(f"reference frequency must be >= 1 GHz, got {f0!r}")
    return f0


def fit_cif(samples: Samples, f0: Union[str, float, None] = "auto") -> FitResult:
    """Fit ``n`` and ``b`` jointly as an intercept-free regression in ``(n, n*b)``.

    ``f0`` is ``"auto"`` (count-weighted mean frequency, integer GHz) or an
    explicit value in GHz.  Single-frequency data degenerates to CI with b = 0.
    """
    f, d, pl = _columns(samples)
    f0_used = _resolve_f0(f, f0)
    if len(np.unique(f)) == 1:
        ci = fit_ci(samples)
        params = CifParams(ci.params.n, 0.0, f0_used)
        return FitResult(
            model="CIF",
            params=params,
            sigma=ci.sigma,
            residuals=ci.residuals,
            sample_count=ci.sample_count,
            frequency_set=ci.frequency_set,
            f0_used=f0_used,
            note="single frequency: reverts to CI (b = 0)",
        )
    a = pl - fspl_1m(f)
    x1 = 10.0 * np.log10(d)
    if float(np.sum(x1 * x1)) == 0.0:
        raise DegenerateGeometryError("all samples are at 1 m; the exponent is undetermined")
    x2 = x1 * (f - f0_used) / f0_used
    c1, c2 = _least_squares([x1, x2], a)
    if abs(c1) < UNSTABLE_N:
        raise UnstableParameterError(f"fitted n = {c1:.3g} is too close to zero to define b")
    params = CifParams(float(c1), float(c2 / c1), f0_used)
    return _result("CIF", params, a - (c1 * x1 + c2 * x2), f, f0=f0_used)


FITTERS = {"FI": fit_fi, "CI": fit_ci, "ABG": fit_abg}


def fit_model(samples: Samples, model: str, f0: Union[str, float, None] = "auto") -> FitResult:
    model = normalize_model_name(model)
    if model == "CIF":
        return fit_cif(samples, f0)
    return FITTERS[model](samples)


# -- brute-force oracle -----------------------------------------------------

GridAxis = Tuple[float, float, float]  # (lo, hi, step)

_PARAM_ORDER = {
    "FI": ("alpha", "beta"),
    "CI": ("n",),
    "ABG": ("alpha", "beta", "gamma"),
    "CIF": ("n", "b"),
}
# parameters that enter the model as a pure additive constant
_INTERCEPTS = {"FI": "beta", "ABG": "beta"}


def grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    if not (step > 0 and math.isfinite(step)):
        raise DomainError(f"grid step must be positive, got {step!r}")
    if hi < lo:
        raise DomainError(f"empty grid axis [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def grid_oracle_fit(
    samples: Samples,
    model: str,
    grid: Mapping[str, GridAxis],
    f0: Union[str, float, None] = "auto",
) -> Tuple[ModelParams, float]:
    """Exhaustively evaluate sigma over a parameter box and return the argmin.

    ``grid`` maps each parameter name to ``(lo, hi, step)``.  Ties go to the
    first point in lexicographic order of the parameters (FI: alpha, beta;
    CI: n; ABG: alpha, beta, gamma; CIF: n, b).  Returns
    ``(params, sigma)``.

    For a pure additive intercept the mean-square residual over that axis is
    ``var(r) + (mean(r) - beta)**2`` with ``r`` the residual without the
    intercept, which is evaluated exactly for every grid value.
    """
    model = normalize_model_name(model)
    names = _PARAM_ORDER[model]
    missing = set(names) - set(grid)
    if missing:
        raise DomainError(f"grid lacks axes for {sorted(missing)}")
    axes = {name: grid_points(*grid[name]) for name in names}

    f, d, pl = _columns(samples)
    dd = 10.0 * np.log10(d)
    intercept = _INTERCEPTS.get(model)
    slope_names = [n for n in names if n != intercept]

    f0_used = _resolve_f0(f, f0) if model == "CIF" else None
    if model in ("CI", "CIF"):
        base = pl - fspl_1m(f)
    else:
        base = pl

    def slope_residual(values):
        p = dict(zip(slope_names, values))
        if model == "FI":
            return base - p["alpha"] * dd
        if model == "CI":
            return base - p["n"] * dd
        if model == "ABG":
            return base - p["alpha"] * dd - p["gamma"] * 10.0 * np.log10(f)
        return base - p["n"] * (1.0 + p["b"] * (f - f0_used) / f0_used) * dd

    slope_axes = [axes[n] for n in slope_names]
    shape = tuple(len(a) for a in slope_axes)
    # one row of residuals per grid point over the slope parameters; the
    # first axis is looped to bound memory
    rest = np.meshgrid(*slope_axes[1:], indexing="ij")
    rest = [r.reshape(-1, 1) for r in rest]
    means = np.empty(shape)
    mean_sq = np.empty(shape)
    for i, first in enumerate(slope_axes[0]):
        r = slope_residual([np.full((1, 1), first)] + rest)
        m = r.mean(axis=1)
        means[i] = m.reshape(shape[1:])
        if intercept is None:
            mean_sq[i] = (r * r).mean(axis=1).reshape(shape[1:])
        else:
            mean_sq[i] = ((r - m[:, None]) ** 2).mean(axis=1).reshape(shape[1:])
    if intercept is None:
        ms = mean_sq
    else:
        beta = axes[intercept]
        ms = mean_sq[..., None] + (means[..., None] - beta) ** 2
        # move the intercept axis back to its declared position
        ms = np.moveaxis(ms, -1, names.index(intercept))

    flat = int(np.argmin(ms))
    idx = np.unravel_index(flat, ms.shape)
    values = {name: float(axes[name][i]) for name, i in zip(names, idx)}
    sigma = float(np.sqrt(ms[idx]))
    if model == "FI":
        params = FiParams(values["alpha"], values["beta"])
    elif model == "CI":
        params = CiParams(values["n"])
    elif model == "ABG":
        params = AbgParams(values["alpha"], values["beta"], values["gamma"])
    else:
        params = CifParams(values["n"], values["b"], f0_used)
    return params, sigma
