"""Dataset container, CSV ingestion, standardization, and synthetic benchmarks.

The design matrix is stored dense and column-major (Fortran order) because
every hot loop in the solver walks one column at a time.  Standardization uses
the sample convention with denominator n, which makes the largest useful
penalty level exactly max_j |x_j^T y| / n on centered data.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, FormatError, ParameterError, ParseError


@dataclass
class Dataset:
    """Immutable design matrix / response pair with standardization statistics.

    ``column_means`` and ``column_scales`` describe the transform that was
    applied when ``standardized`` is True; on raw data they hold the statistics
    that standardization *would* use.
    """

    x: np.ndarray
    y: np.ndarray
    column_means: np.ndarray = None
    column_scales: np.ndarray = None
    standardized: bool = False
    feature_names: list[str] = None

    def __post_init__(self):
        x = np.asfortranarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64).ravel()
        # snapshot writeable aliases so the Dataset owns immutable data;
        # already-frozen arrays (e.g. from standardize) are shared as-is
        if x is self.x and x.flags.writeable:
            x = x.copy(order="F")
        if y is self.y and y.flags.writeable:
            y = y.copy()
        if x.ndim != 2:
            raise DataError(f"x must be 2-D, got shape {x.shape}")
        n, d = x.shape
        if n < 2:
            raise DataError(f"need at least 2 rows, got {n}")
        if d < 1:
            raise DataError("need at least 1 feature column")
        if y.shape[0] != n:
            raise DataError(f"y has {y.shape[0]} entries but x has {n} rows")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise DataError("x and y must be finite")
        if self.column_means is None:
            object.__setattr__(self, "column_means", x.mean(axis=0))
        if self.column_scales is None:
            object.__setattr__(self, "column_scales", np.sqrt(np.mean((x - x.mean(axis=0)) ** 2, axis=0)))
        if self.feature_names is None:
            object.__setattr__(self, "feature_names", [f"x{j}" for j in range(d)])
        elif len(self.feature_names) != d:
            raise DataError("feature_names length does not match number of columns")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass
class StandardizationRecord:
    """Everything needed to map standardized-scale coefficients back.

    ``beta_original[kept[j]] = beta_std[j] / scales[kept[j]]`` and the
    intercept picks up ``-sum_j beta_std[j] * means[kept[j]] / scales[kept[j]]``.
    Dropped (constant) columns carry zero coefficients.
    """

    means: np.ndarray
    scales: np.ndarray
    kept: np.ndarray
    dropped: np.ndarray
    original_d: int

    def unstandardize(self, beta_std: np.ndarray, intercept_std: float) -> tuple[np.ndarray, float]:
        beta = np.zeros(self.original_d)
        scale_kept = self.scales[self.kept]
        beta[self.kept] = beta_std / scale_kept
        intercept = intercept_std - float(np.dot(beta_std / scale_kept, self.means[self.kept]))
        return beta, intercept


def standardize(dataset: Dataset) -> tuple[Dataset, StandardizationRecord]:
    """Center and unit-variance-scale columns (denominator n), dropping constants.

    Idempotent: a standardized dataset passes through unchanged.  Constant
    columns are dropped with a warning and reported in the record.
    """
    x = dataset.x
    means = x.mean(axis=0)
    scales = np.sqrt(np.mean((x - means) ** 2, axis=0))
    constant = scales <= 1e-12 * np.maximum(1.0, np.abs(means))
    kept = np.flatnonzero(~constant)
    dropped = np.flatnonzero(constant)
    if kept.size == 0:
        raise DataError("all columns are constant")
    if dropped.size:
        warnings.warn(f"dropping {dropped.size} constant column(s): {dropped.tolist()}", stacklevel=2)
    xs = (x[:, kept] - means[kept]) / scales[kept]
    record = StandardizationRecord(
        means=means, scales=np.where(constant, 1.0, scales), kept=kept, dropped=dropped,
        original_d=dataset.d,
    )
    names = [dataset.feature_names[j] for j in kept]
    out = Dataset(
        x=xs, y=dataset.y,
        column_means=np.zeros(kept.size), column_scales=np.ones(kept.size),
        standardized=True, feature_names=names,
    )
    return out, record


def load_csv(path, has_header: bool = False, response_column: str | int = 0) -> Dataset:
    """Read a dense numeric CSV, splitting off one column as the response.

    ``response_column`` is a 0-based index, or a header name when
    ``has_header`` is set.  Raises :class:`ParseError` with the offending
    row/column on non-numeric cells and :class:`FormatError` on ragged rows.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from None
    rows = [r for r in rows if r]  # tolerate trailing blank lines
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise FormatError(f"{path}: header but no data rows")
    width = len(rows[0])
    if width < 2:
        raise FormatError(f"{path}: need at least 2 columns, found {width}")
    if isinstance(response_column, str):
        if header is None:
            raise ParameterError("response_column by name requires has_header=True")
        try:
            resp_idx = header.index(response_column)
        except ValueError:
            raise ParameterError(f"response column {response_column!r} not in header {header}") from None
    else:
        resp_idx = int(response_column)
        if not 0 <= resp_idx < width:
            raise ParameterError(f"response column index {resp_idx} out of range for {width} columns")

    data = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric cell {cell!r} at row {i + 1}, column {j + 1}",
                    row=i + 1, column=j + 1,
                ) from None

    y = data[:, resp_idx].copy()
    feat_idx = [j for j in range(width) if j != resp_idx]
    x = data[:, feat_idx]
    if header is not None:
        names = [header[j] for j in feat_idx]
    else:
        names = [f"col{j}" for j in feat_idx]
    return Dataset(x=x, y=y, feature_names=names)


def save_csv(dataset: Dataset, path, response_name: str = "y") -> None:
    """Write a Dataset back out with a header row (inverse of load_csv)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([response_name] + list(dataset.feature_names))
        for i in range(dataset.n):
            writer.writerow([repr(float(dataset.y[i]))] + [repr(float(v)) for v in dataset.x[i]])


def generate_synthetic(n: int, d: int, sparsity: int, correlation: float, family: str = "gaussian",
                       noise_sd: float = 1.0, seed: int = 0) -> tuple[Dataset, np.ndarray]:
    """AR(1)-correlated gaussian design with an s-sparse signal.

    corr(x_j, x_k) = correlation^|j-k|; the true coefficients sit at random
    positions with magnitudes drawn from +/- U[0.5, 1.5].  The response follows
    the requested family; poisson linear predictors are clipped to keep means
    below 50.
    """
    if not 0 <= correlation < 1:
        raise ParameterError(f"correlation must be in [0, 1), got {correlation}")
    if not 0 <= sparsity <= d:
        raise ParameterError(f"sparsity must be in [0, d], got {sparsity}")
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
    rng = np.random.default_rng(np.uint64(seed))
    z = rng.standard_normal((n, d))
    x = np.empty((n, d), order="F")
    x[:, 0] = z[:, 0]
    if d > 1:
        rho = correlation
        scale = np.sqrt(1.0 - rho * rho)
        for j in range(1, d):
            x[:, j] = rho * x[:, j - 1] + scale * z[:, j]
    support = rng.choice(d, size=sparsity, replace=False)
    beta = np.zeros(d)
    beta[support] = rng.uniform(0.5, 1.5, size=sparsity) * rng.choice([-1.0, 1.0], size=sparsity)
    eta = x @ beta
    if family in ("gaussian", "scaled_gaussian"):
        y = eta + noise_sd * rng.standard_normal(n)
    elif family == "binomial":
        p = 1.0 / (1.0 + np.exp(-eta))
        y = (rng.random(n) < p).astype(np.float64)
    elif family == "poisson":
        mu = np.exp(np.minimum(eta, np.log(50.0)))
        y = rng.poisson(mu).astype(np.float64)
    else:
        raise ParameterError(f"unknown family {family!r}")
    return Dataset(x=x, y=y), beta
