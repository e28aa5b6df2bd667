"""Loss families: value, gradient, and local quadratic (IRLS) models.

Four families are implemented: ``gaussian``, ``binomial``, ``poisson`` and
``scaled_gaussian`` (the square-root/scaled variant that estimates the noise
level sigma jointly with the coefficients).  All losses are 1/n-scaled so that
penalty levels are comparable across sample sizes.

The solver never forms X beta from scratch inside its loops; the ``*_from_eta``
helpers evaluate everything from a maintained linear predictor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import (
    DataError,
    DegenerateDataError,
    DegenerateFitError,
    EvaluationError,
    ParameterError,
)

FAMILIES = ("gaussian", "binomial", "poisson", "scaled_gaussian")

# linear predictors are clamped to +/- ETA_CLAMP before exponentiation;
# beyond that the mean functions are saturated at double precision
ETA_CLAMP = 30.0

# IRLS weights are floored to keep the working response bounded
WEIGHT_FLOOR = 1e-5


@dataclass(frozen=True)
class ObjectiveSpec:
    """Loss family plus the gaussian coordinate-update rule.

    ``gaussian_update`` selects between the residual-maintaining "naive" rule
    and the inner-product-caching "covariance" rule; it only makes sense for
    the gaussian family and is rejected elsewhere.
    """

    family: str = "gaussian"
    gaussian_update: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "gaussian":
            update = self.gaussian_update or "naive"
            if update not in ("naive", "covariance"):
                raise ParameterError(f"gaussian_update must be 'naive' or 'covariance', got {update!r}")
            object.__setattr__(self, "gaussian_update", update)
        elif self.gaussian_update is not None:
            raise ParameterError(f"gaussian_update is only valid for family='gaussian', not {self.family!r}")

    @property
    def needs_sigma(self) -> bool:
        return self.family == "scaled_gaussian"

    @property
    def is_quadratic(self) -> bool:
        """True when the loss itself is a quadratic (no proximal Newton needed)."""
        return self.family in ("gaussian", "scaled_gaussian")


@dataclass
class QuadraticModel:
    """Weighted least-squares model of the loss around an expansion point.

    The surrogate is (1/2n) sum_i weights_i (working_response_i - eta_i)^2,
    which matches the true loss to second order at the expansion point.
    """

    weights: np.ndarray
    working_response: np.ndarray
    base_loss: float


def _check_eta(eta: np.ndarray) -> None:
    if not np.all(np.isfinite(eta)):
        raise EvaluationError("nonfinite linear predictor")


def linear_predictor(x: np.ndarray, beta: np.ndarray, intercept: float) -> np.ndarray:
    """X beta + intercept, exploiting sparsity in beta when worthwhile."""
    nz = np.flatnonzero(beta)
    if nz.size == 0:
        return np.full(x.shape[0], float(intercept))
    if nz.size < beta.shape[0] // 4:
        return x[:, nz] @ beta[nz] + intercept
    return x @ beta + intercept


def mean_from_eta(family: str, eta: np.ndarray) -> np.ndarray:
    if family in ("gaussian", "scaled_gaussian"):
        return eta
    etac = np.clip(eta, -ETA_CLAMP, ETA_CLAMP)
    if family == "binomial":
        return expit(etac)
    return np.exp(etac)  # poisson


def loss_from_eta(family: str, y: np.ndarray, eta: np.ndarray, sigma: float | None = None) -> float:
    _check_eta(eta)
    n = y.shape[0]
    if family == "gaussian":
        r = y - eta
        return 0.5 * float(r @ r) / n
    if family == "scaled_gaussian":
        r = y - eta
        return float(r @ r) / (2.0 * n * sigma) + 0.5 * sigma
    etac = np.clip(eta, -ETA_CLAMP, ETA_CLAMP)
    if family == "binomial":
        return float(np.mean(np.logaddexp(0.0, etac) - y * etac))
    return float(np.mean(np.exp(etac) - y * etac))  # poisson


def loss_value(spec: ObjectiveSpec, dataset, beta, intercept: float, sigma: float | None = None) -> float:
    """1/n-scaled negative log-likelihood (up to constants) at (beta, intercept)."""
    _check_sigma(spec, sigma)
    eta = linear_predictor(dataset.x, np.asarray(beta, dtype=float), intercept)
    return loss_from_eta(spec.family, dataset.y, eta, sigma)


def _check_sigma(spec: ObjectiveSpec, sigma) -> None:
    if spec.needs_sigma:
        if sigma is None or not sigma > 0:
            raise ParameterError("scaled_gaussian requires sigma > 0")
    elif sigma is not None:
        raise ParameterError(f"sigma is only meaningful for scaled_gaussian, not {spec.family!r}")


def gradient_from_eta(family: str, x: np.ndarray, y: np.ndarray, eta: np.ndarray,
                      sigma: float | None = None) -> tuple[np.ndarray, float]:
    _check_eta(eta)
    n = y.shape[0]
    mu = mean_from_eta(family, eta)
    score = (mu - y) / n
    if family == "scaled_gaussian":
        score = score / sigma
    return x.T @ score, float(score.sum())


def full_gradient(spec: ObjectiveSpec, dataset, beta, intercept: float,
                  sigma: float | None = None) -> tuple[np.ndarray, float]:
    """Gradient of the loss in (beta, intercept): ((1/n) X^T (mu - y), mean(mu - y))."""
    _check_sigma(spec, sigma)
    eta = linear_predictor(dataset.x, np.asarray(beta, dtype=float), intercept)
    return gradient_from_eta(spec.family, dataset.x, dataset.y, eta, sigma)


def quad_from_eta(family: str, y: np.ndarray, eta: np.ndarray) -> QuadraticModel:
    _check_eta(eta)
    mu = mean_from_eta(family, eta)
    if family == "binomial":
        w = mu * (1.0 - mu)
    elif family == "poisson":
        w = mu
    else:
        raise ParameterError(f"quadratic approximation is for binomial/poisson, not {family!r}")
    w = np.maximum(w, WEIGHT_FLOOR)
    z = eta - (mu - y) / w
    return QuadraticModel(weights=w, working_response=z, base_loss=loss_from_eta(family, y, eta))


def quadratic_approx(spec: ObjectiveSpec, dataset, beta, intercept: float) -> QuadraticModel:
    """IRLS weights and working response at (beta, intercept)."""
    eta = linear_predictor(dataset.x, np.asarray(beta, dtype=float), intercept)
    return quad_from_eta(spec.family, dataset.y, eta)


def sigma_update(dataset, beta, intercept: float) -> float:
    """Scaled-regression noise estimate ||y - X beta - b||_2 / sqrt(n)."""
    eta = linear_predictor(dataset.x, np.asarray(beta, dtype=float), intercept)
    r = dataset.y - eta
    norm = float(np.linalg.norm(r))
    if norm == 0.0:
        raise DegenerateFitError("residual is identically zero (exact interpolation)")
    return norm / np.sqrt(dataset.y.shape[0])


def null_intercept(spec: ObjectiveSpec, y: np.ndarray) -> float:
    """Unpenalized intercept of the all-zero-coefficient model."""
    ybar = float(np.mean(y))
    if spec.family in ("gaussian", "scaled_gaussian"):
        return ybar
    if spec.family == "binomial":
        if ybar <= 0.0 or ybar >= 1.0:
            raise DegenerateDataError("binomial response is constant")
        return float(np.log(ybar / (1.0 - ybar)))
    if ybar <= 0.0:
        raise DegenerateDataError("poisson response is identically zero")
    return float(np.log(ybar))


def validate_response(spec: ObjectiveSpec, y: np.ndarray) -> None:
    if spec.family == "binomial":
        if not np.all((y == 0.0) | (y == 1.0)):
            raise DataError("binomial: response must be coded 0/1")
    elif spec.family == "poisson":
        if np.any(y < 0) or not np.allclose(y, np.round(y)):
            raise DataError("poisson: response must be nonnegative integer counts")
