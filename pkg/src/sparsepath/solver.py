"""Three-nested-loop pathwise solver.

Outer loop: a geometric sequence of penalty levels walked from sparse to dense
with warm starts.  Middle loop: strong-rule preselection of candidate
coordinates, inner solves restricted to that active set, and KKT scans that
first re-check the preselected set and then all coordinates, growing the sets
until no violation remains.  Inner loop: cyclic coordinate minimization, either
directly on the quadratic loss (gaussian) or on IRLS models inside a proximal
Newton iteration (binomial, poisson).  The scaled-gaussian family alternates
gaussian fits at effective penalty lambda*sigma with closed-form sigma updates.

Convergence is measured by the curvature-weighted coordinate change
v_j |delta beta_j|; diagnostics additionally expose the KKT residual and all
iteration counts per path point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .data import Dataset, StandardizationRecord, standardize
from .exceptions import DegenerateDataError, ParameterError
from .objectives import (
    ObjectiveSpec,
    full_gradient,
    gradient_from_eta,
    linear_predictor,
    loss_from_eta,
    mean_from_eta,
    null_intercept,
    quad_from_eta,
    validate_response,
)
from .regularizers import RegularizerSpec, penalty_total

# zero coordinates whose gradient exceeds lambda by less than this fraction of
# prec are not admitted by the scans; the final KKT check governs instead
ADMIT_SLACK = 0.01

# the IRLS subproblems inside a Newton step are solved tighter than prec so the
# path-level KKT certificate lands below prec
NEWTON_INNER_FACTOR = 0.2

# sigma alternation stops when |delta sigma| falls below this fraction of prec
SIGMA_TOL_FACTOR = 0.1


@dataclass(frozen=True)
class PathConfig:
    """Lambda grid and iteration controls."""

    nlambda: int = 100
    lambda_min_ratio: float = 0.05
    lambdas: tuple | None = None
    prec: float = 1e-4
    max_inner_sweeps: int = 1000
    max_middle_rounds: int = 100
    max_newton_steps: int = 50

    def __post_init__(self):
        if not isinstance(self.nlambda, (int, np.integer)) or self.nlambda < 1:
            raise ParameterError(f"nlambda must be a positive integer, got {self.nlambda}")
        if not 0.0 < self.lambda_min_ratio < 1.0:
            raise ParameterError(f"lambda_min_ratio must be in (0, 1), got {self.lambda_min_ratio}")
        if not self.prec > 0:
            raise ParameterError(f"prec must be > 0, got {self.prec}")
        for name in ("max_inner_sweeps", "max_middle_rounds", "max_newton_steps"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value}")
        if self.lambdas is not None:
            arr = np.asarray(self.lambdas, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ParameterError("explicit lambdas must be a nonempty 1-D sequence")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ParameterError("explicit lambdas must be positive and finite")
            if arr.size > 1 and not np.all(np.diff(arr) < 0):
                raise ParameterError("explicit lambdas must be strictly decreasing")
            object.__setattr__(self, "lambdas", tuple(float(v) for v in arr))


@dataclass
class PathFit:
    """Solution path on the original data scale with per-lambda diagnostics."""

    lambdas: np.ndarray
    beta_path: sp.csc_matrix  # d x K, only nonzeros stored
    intercepts: np.ndarray
    sigmas: np.ndarray | None
    kkt_residuals: np.ndarray
    inner_sweep_counts: np.ndarray
    middle_round_counts: np.ndarray
    newton_step_counts: np.ndarray
    kkt_scan_counts: np.ndarray
    converged: np.ndarray
    column_means: np.ndarray
    column_scales: np.ndarray
    dropped_columns: np.ndarray
    feature_names: list[str]

    @property
    def n_lambdas(self) -> int:
        return self.lambdas.shape[0]

    def coefficients(self) -> np.ndarray:
        """Densified d x K coefficient matrix."""
        return self.beta_path.toarray()

    def support(self, k: int) -> np.ndarray:
        """Indices of nonzero coefficients at path point k."""
        col = self.beta_path.getcol(k).tocoo()
        return np.sort(col.row)

    def predict_linear(self, x: np.ndarray, k: int) -> np.ndarray:
        """Linear predictor X beta_k + intercept_k on original-scale inputs."""
        x = np.asarray(x, dtype=float)
        return x @ self.beta_path.getcol(k).toarray().ravel() + self.intercepts[k]


class GramCache:
    """Lazily grown (1/n) X^T X block over features that ever became active.

    Also carries the matching (1/n) X^T y entries so the covariance-rule
    sweeps never touch the raw data matrix.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self.x = x
        self.y = y
        n, d = x.shape
        self.n = n
        self.position = np.full(d, -1, dtype=np.int64)
        self.tracked: list[int] = []
        cap = 64
        self.buf = np.zeros((cap, cap))
        self.xty = np.zeros(cap)

    @property
    def m(self) -> int:
        return len(self.tracked)

    def ensure(self, indices) -> None:
        new = [int(j) for j in indices if self.position[j] < 0]
        if not new:
            return
        old_m = self.m
        m = old_m + len(new)
        if m > self.buf.shape[0]:
            cap = max(2 * self.buf.shape[0], m)
            grown = np.zeros((cap, cap))
            grown[:old_m, :old_m] = self.buf[:old_m, :old_m]
            self.buf = grown
            xty = np.zeros(cap)
            xty[:old_m] = self.xty[:old_m]
            self.xty = xty
        for rank, j in enumerate(new):
            self.position[j] = old_m + rank
            self.tracked.append(j)
        cols_new = self.x[:, new]
        block = cols_new.T @ self.x[:, self.tracked] / self.n
        self.buf[old_m:m, :m] = block
        self.buf[:m, old_m:m] = block.T
        self.xty[old_m:m] = cols_new.T @ self.y / self.n


@dataclass
class ActiveState:
    """Working state of one middle-loop invocation.

    Coordinates outside ``active_set`` hold exactly zero during inner loops.
    ``residual`` is the working residual z - X beta - b of the current
    (possibly IRLS) quadratic model; ``eta`` the linear predictor for the
    curved losses.  ``gram_cache`` switches the inner loop to the
    covariance-update rule.
    """

    active_set: np.ndarray
    strong_set: np.ndarray
    beta: np.ndarray
    intercept: float
    residual: np.ndarray | None = None
    eta: np.ndarray | None = None
    gram_cache: GramCache | None = None


@dataclass
class MiddleResult:
    beta: np.ndarray
    intercept: float
    kkt_residual: float
    rounds: int
    inner_sweeps: int
    newton_steps: int
    kkt_scans: int
    converged: bool
    ever_active: np.ndarray  # boolean mask over coordinates


def compute_lambda_path(dataset: Dataset, objective: ObjectiveSpec,
                        config: PathConfig | None = None) -> np.ndarray:
    """Geometric penalty sequence from lambda_max down to ratio * lambda_max.

    lambda_max is the null-model gradient sup-norm, the smallest level at which
    the all-zero coefficient vector is optimal.  Explicit config lambdas pass
    through unchanged.
    """
    config = config or PathConfig()
    if config.lambdas is not None:
        return np.asarray(config.lambdas, dtype=float)
    y = dataset.y
    b0 = null_intercept(objective, y)
    sigma0 = None
    if objective.needs_sigma:
        norm = float(np.linalg.norm(y - b0))
        if norm == 0.0:
            raise DegenerateDataError("response is constant; no penalty path exists")
        sigma0 = norm / np.sqrt(y.shape[0])
    grad, _ = full_gradient(objective, dataset, np.zeros(dataset.d), b0, sigma0)
    lam_max = float(np.max(np.abs(grad)))
    if not np.isfinite(lam_max) or lam_max <= 0.0:
        raise DegenerateDataError("null-model gradient is identically zero")
    # absorb summation-order noise so the null model is exactly optimal at the
    # first path point
    lam_max *= 1.0 + 1e-10
    if config.nlambda == 1:
        return np.array([lam_max])
    return np.geomspace(lam_max, lam_max * config.lambda_min_ratio, config.nlambda)


def strong_rule_preselect(grad_prev: np.ndarray, lambda_k: float, lambda_prev: float,
                          prev_support=()) -> np.ndarray:
    """Coordinates passing the gradient threshold 2*lambda_k - lambda_prev.

    ``grad_prev`` is the gradient at the previous path point's solution; the
    previous support is always retained regardless of its gradient.
    """
    thr = 2.0 * lambda_k - lambda_prev
    selected = np.flatnonzero(np.abs(grad_prev) >= thr).astype(np.int64)
    prev = np.asarray(prev_support, dtype=np.int64)
    if prev.size:
        return np.union1d(selected, prev)
    return selected


def _penalty_derivative_vec(reg: RegularizerSpec, a: np.ndarray, lam: float) -> np.ndarray:
    if reg.kind == "l1" or lam == 0.0:
        return np.full_like(a, lam)
    g = reg.gamma
    if reg.kind == "mcp":
        return np.maximum(0.0, lam - a / g)
    return np.where(a <= lam, lam, np.maximum(0.0, g * lam - a) / (g - 1.0))


def kkt_residual_from_gradient(grad: np.ndarray, beta: np.ndarray, reg: RegularizerSpec,
                               lam: float) -> float:
    """Max first-order violation given the loss gradient at beta."""
    grad = np.asarray(grad, dtype=float)
    beta = np.asarray(beta, dtype=float)
    zero = beta == 0.0
    worst = 0.0
    if np.any(zero):
        worst = max(worst, float(np.max(np.abs(grad[zero])) - lam))
    nz = ~zero
    if np.any(nz):
        deriv = _penalty_derivative_vec(reg, np.abs(beta[nz]), lam)
        worst = max(worst, float(np.max(np.abs(grad[nz] + np.sign(beta[nz]) * deriv))))
    return max(worst, 0.0)


def kkt_residual(dataset: Dataset, objective: ObjectiveSpec, reg: RegularizerSpec, lam: float,
                 beta: np.ndarray, intercept: float, sigma: float | None = None) -> float:
    """Optimality certificate: 0 at an exact stationary point of the penalized loss."""
    grad, _ = full_gradient(objective, dataset, beta, intercept, sigma)
    return kkt_residual_from_gradient(grad, beta, reg, lam)


def _curvatures(x: np.ndarray, weights: np.ndarray | None, idx: np.ndarray) -> np.ndarray:
    cols = x[:, idx]
    if weights is None:
        return np.mean(cols * cols, axis=0)
    return (weights @ (cols * cols)) / x.shape[0]


def inner_coordinate_loop(x: np.ndarray, state: ActiveState, reg: RegularizerSpec, lam: float,
                          prec: float, max_sweeps: int, weights: np.ndarray | None = None,
                          curvatures: np.ndarray | None = None,
                          fit_intercept: bool = True) -> tuple[int, float]:
    """Cyclic coordinate sweeps over ``state.active_set``.

    Mutates ``state`` in place and returns (sweeps, last_max_move); the loop
    stopped of its own accord iff last_max_move < prec.  With a gram cache on
    the state the covariance rule is used, otherwise the residual-maintaining
    naive rule.
    """
    active = np.asarray(state.active_set, dtype=np.int64)
    if active.size == 0 and not fit_intercept:
        return 0, 0.0
    code = reg.kind_code
    gamma = float(reg.gamma) if reg.kind != "l1" else 0.0
    if state.gram_cache is not None:
        cache = state.gram_cache
        cache.ensure(active)
        m = cache.m
        tracked = np.asarray(cache.tracked, dtype=np.int64)
        beta_t = state.beta[tracked].copy() if m else np.zeros(0)
        active_pos = cache.position[active]
        v_t = np.ascontiguousarray(np.diag(cache.buf[:m, :m]))
        sweeps, move = kernels.cd_sweeps_cov(cache.buf, m, cache.xty, beta_t, active_pos, v_t,
                                             code, gamma, float(lam), float(prec), max_sweeps)
        if m:
            state.beta[tracked] = beta_t
        return sweeps, move
    if curvatures is None:
        curvatures = np.zeros(state.beta.shape[0])
        if active.size:
            curvatures[active] = _curvatures(x, weights, active)
    if weights is None:
        sweeps, move, b = kernels.cd_sweeps_naive_unit(
            x, state.residual, state.beta, float(state.intercept), active, curvatures,
            code, gamma, float(lam), float(prec), max_sweeps, fit_intercept)
    else:
        sweeps, move, b = kernels.cd_sweeps_naive(
            x, weights, state.residual, state.beta, float(state.intercept), active, curvatures,
            code, gamma, float(lam), float(prec), max_sweeps, fit_intercept)
    state.intercept = float(b)
    return sweeps, move


def middle_loop(dataset: Dataset, objective: ObjectiveSpec, reg: RegularizerSpec, lam: float,
                lambda_prev: float | None = None, warm_beta: np.ndarray | None = None,
                warm_intercept: float = 0.0, config: PathConfig | None = None, *,
                gram: GramCache | None = None, curvatures: np.ndarray | None = None,
                screen: bool = True) -> MiddleResult:
    """Solve one path point: preselect, inner-solve, grow sets on KKT violations.

    The dataset must be standardized.  Terminates once no coordinate violates
    its first-order condition and the KKT residual is within config.prec, or
    flags non-convergence after config.max_middle_rounds rounds.
    """
    config = config or PathConfig()
    family = objective.family
    if family not in ("gaussian", "binomial", "poisson"):
        raise ParameterError(f"middle_loop does not handle family {family!r} directly")
    x, y = dataset.x, dataset.y
    n, d = x.shape
    lam = float(lam)
    beta = np.zeros(d) if warm_beta is None else np.array(warm_beta, dtype=float)
    b = float(warm_intercept)
    if lambda_prev is None:
        lambda_prev = lam

    eta = linear_predictor(x, beta, b)
    grad0, _ = gradient_from_eta(family, x, y, eta)
    if screen:
        strong = strong_rule_preselect(grad0, lam, float(lambda_prev), np.flatnonzero(beta))
    else:
        strong = np.arange(d, dtype=np.int64)
    active = strong.copy()
    admitted = np.zeros(d, dtype=bool)
    admitted[active] = True

    gaussian = family == "gaussian"
    use_cov = gram is not None and gaussian
    if use_cov:
        yscale = max(1.0, float(np.max(np.abs(y))))
        if abs(float(np.mean(y))) > 1e-8 * yscale:
            raise ParameterError("covariance update requires a centered response")
    if gaussian and not use_cov and curvatures is None:
        curvatures = np.mean(x * x, axis=0)

    slack = ADMIT_SLACK * config.prec
    inner_tol = config.prec if gaussian else NEWTON_INNER_FACTOR * config.prec

    state = ActiveState(
        active_set=active, strong_set=strong, beta=beta, intercept=b,
        residual=(y - eta) if (gaussian and not use_cov) else None,
        eta=None if gaussian else eta,
        gram_cache=gram if use_cov else None,
    )

    sweeps_total = 0
    newton_total = 0
    scans = 0
    converged = True
    kkt = np.inf
    rounds = 0
    score = None
    while rounds < config.max_middle_rounds:
        rounds += 1
        state.active_set = active
        state.strong_set = strong
        if gaussian:
            sweeps, move = inner_coordinate_loop(x, state, reg, lam, inner_tol,
                                                 config.max_inner_sweeps,
                                                 curvatures=curvatures,
                                                 fit_intercept=not use_cov)
            sweeps_total += sweeps
            if move >= inner_tol:
                converged = False
            if use_cov:
                eta = linear_predictor(x, state.beta, state.intercept)
                score = (eta - y) / n
            else:
                score = -state.residual / n
        else:
            steps, sweeps, newton_ok = _proximal_newton(x, y, family, reg, lam, state, config,
                                                        inner_tol)
            sweeps_total += sweeps
            newton_total += steps
            if not newton_ok:
                converged = False
            score = (mean_from_eta(family, state.eta) - y) / n
        beta = state.beta
        b = state.intercept

        support_mask = beta != 0.0
        # (d) re-check the preselected set first: zero coordinates there whose
        # true gradient violates the threshold rejoin the inner solve
        strong_zero = strong[~support_mask[strong]]
        if strong_zero.size:
            g_sub = x[:, strong_zero].T @ score
            viol = strong_zero[np.abs(g_sub) > lam + slack]
            if viol.size:
                active = np.union1d(active, viol)
                admitted[viol] = True
                continue
        # (e) full scan over all coordinates
        grad_full = x.T @ score
        scans += 1
        zero_idx = np.flatnonzero(~support_mask)
        viol_full = zero_idx[np.abs(grad_full[zero_idx]) > lam + slack]
        if viol_full.size:
            strong = np.union1d(strong, viol_full)
            active = np.union1d(active, viol_full)
            admitted[viol_full] = True
            continue
        kkt = kkt_residual_from_gradient(grad_full, beta, reg, lam)
        if kkt <= config.prec:
            break
        # stationarity of already-active coordinates still above prec: rerun
        # the inner solve (it always performs at least one full sweep)
    else:
        converged = False
    if not np.isfinite(kkt):
        grad_full = x.T @ score
        scans += 1
        kkt = kkt_residual_from_gradient(grad_full, beta, reg, lam)

    return MiddleResult(beta=beta, intercept=b, kkt_residual=float(kkt), rounds=rounds,
                        inner_sweeps=sweeps_total, newton_steps=newton_total, kkt_scans=scans,
                        converged=converged, ever_active=admitted)


def _proximal_newton(x, y, family, reg, lam, state: ActiveState, config: PathConfig,
                     inner_tol: float) -> tuple[int, int, bool]:
    """IRLS models solved by penalized CD, with step halving on the true loss."""
    active = np.asarray(state.active_set, dtype=np.int64)
    beta = state.beta
    eta = state.eta
    steps = 0
    sweeps_total = 0
    ok = True
    for _ in range(config.max_newton_steps):
        quad = quad_from_eta(family, y, eta)
        w, z = quad.weights, quad.working_response
        v = np.zeros(beta.shape[0])
        if active.size:
            v[active] = _curvatures(x, w, active)
        beta_old = beta[active].copy()
        b_old = state.intercept
        eta_old = eta
        f_old = quad.base_loss + penalty_total(reg, beta_old, lam)
        state.residual = z - eta
        sweeps, move = inner_coordinate_loop(x, state, reg, lam, inner_tol,
                                             config.max_inner_sweeps, weights=w,
                                             curvatures=v, fit_intercept=True)
        sweeps_total += sweeps
        steps += 1
        if move >= inner_tol:
            ok = False
        eta_new = z - state.residual
        beta_new = beta[active].copy()
        b_new = state.intercept
        f_new = loss_from_eta(family, y, eta_new) + penalty_total(reg, beta_new, lam)
        ftol = 1e-12 * max(1.0, abs(f_old))
        if f_new <= f_old + ftol:
            eta = eta_new
        else:
            t = 1.0
            accepted = False
            for _ in range(20):
                t *= 0.5
                beta[active] = beta_old + t * (beta_new - beta_old)
                b_t = b_old + t * (b_new - b_old)
                eta_t = eta_old + t * (eta_new - eta_old)
                f_t = loss_from_eta(family, y, eta_t) + penalty_total(reg, beta[active], lam)
                if f_t <= f_old + ftol:
                    state.intercept = b_t
                    eta = eta_t
                    accepted = True
                    break
            if not accepted:
                beta[active] = beta_old
                state.intercept = b_old
                eta = eta_old
                ok = False
                break
        delta = abs(state.intercept - b_old)
        if active.size:
            delta = max(delta, float(np.max(np.abs(beta[active] - beta_old))))
        if delta < config.prec:
            break
    # exhausting max_newton_steps is a quiet termination: the middle loop's
    # KKT certificate decides whether the point counts as converged
    state.eta = eta
    return steps, sweeps_total, ok


def fit_path(dataset: Dataset, objective: ObjectiveSpec, reg: RegularizerSpec,
             config: PathConfig | None = None, *, screen: bool = True) -> PathFit:
    """Fit the whole regularization path with warm starts.

    Coefficients and intercepts come back on the original data scale; the
    internal standardization (and, for the gaussian families, response
    centering) is recorded on the returned object.  Per-lambda non-convergence
    is flagged in diagnostics, never raised.  ``screen=False`` disables the
    strong rule and runs full cyclic coordinate descent over all coordinates,
    which is the no-screening baseline used by the benchmark harness.
    """
    config = config or PathConfig()
    validate_response(objective, dataset.y)
    family = objective.family
    if dataset.standardized:
        std = dataset
        record = StandardizationRecord(
            means=np.zeros(dataset.d), scales=np.ones(dataset.d),
            kept=np.arange(dataset.d), dropped=np.array([], dtype=np.int64),
            original_d=dataset.d)
    else:
        std, record = standardize(dataset)

    center_y = family in ("gaussian", "scaled_gaussian")
    y_mean = float(np.mean(std.y)) if center_y else 0.0
    y_work = std.y - y_mean if center_y else std.y
    work = Dataset(x=std.x, y=y_work,
                   column_means=np.zeros(std.d), column_scales=np.ones(std.d),
                   standardized=True, feature_names=std.feature_names)

    scaled = family == "scaled_gaussian"
    inner_objective = ObjectiveSpec("gaussian") if scaled else objective
    use_cov = family == "gaussian" and objective.gaussian_update == "covariance"
    gram = GramCache(work.x, work.y) if use_cov else None
    curv = None
    if inner_objective.family == "gaussian" and not use_cov:
        curv = np.mean(work.x * work.x, axis=0)

    lambdas = compute_lambda_path(work, objective, config)
    n, d_std = work.n, work.d
    beta = np.zeros(d_std)
    b = null_intercept(inner_objective, y_work)
    sigma = None
    if scaled:
        norm0 = float(np.linalg.norm(y_work - b))
        if norm0 == 0.0:
            raise DegenerateDataError("response is constant")
        sigma = norm0 / np.sqrt(n)

    stages = []
    lam_prev = float(lambdas[0])
    lam_eff_prev = float(lambdas[0]) * sigma if scaled else None
    truncated = False
    for lam in lambdas:
        lam = float(lam)
        if scaled:
            stage, sigma, lam_eff_prev = _scaled_stage(
                work, reg, lam, lam_eff_prev, beta, b, sigma, config, curv, screen)
            if stage is None:
                truncated = True
                break
        else:
            res = middle_loop(work, objective, reg, lam, lam_prev, beta, b, config,
                              gram=gram, curvatures=curv, screen=screen)
            stage = {"res": res, "sigma": None}
        res = stage["res"]
        beta, b = res.beta, res.intercept
        stages.append({
            "beta": beta.copy(), "intercept": b, "sigma": stage["sigma"],
            "kkt": res.kkt_residual, "rounds": res.rounds, "sweeps": res.inner_sweeps,
            "newton": res.newton_steps, "scans": res.kkt_scans, "converged": res.converged,
        })
        lam_prev = lam

    K = len(stages)
    lambdas = np.asarray(lambdas[:K], dtype=float)
    n_flagged = sum(0 if s["converged"] else 1 for s in stages)
    if n_flagged:
        warnings.warn(f"{n_flagged} of {K} path points flagged non-convergent", stacklevel=2)
    if truncated:
        warnings.warn("path truncated: residual reached zero (exact interpolation)", stacklevel=2)

    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    intercepts = np.empty(K)
    for k, s in enumerate(stages):
        beta_std = s["beta"]
        nz = np.flatnonzero(beta_std)
        orig_idx = record.kept[nz]
        vals = beta_std[nz] / record.scales[orig_idx]
        order = np.argsort(orig_idx)
        orig_idx = orig_idx[order]
        vals = vals[order]
        indices.extend(orig_idx.tolist())
        values.extend(vals.tolist())
        indptr.append(len(indices))
        intercepts[k] = s["intercept"] - float(vals @ record.means[orig_idx]) + y_mean
    beta_path = sp.csc_matrix(
        (np.asarray(values), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(record.original_d, K))

    return PathFit(
        lambdas=lambdas,
        beta_path=beta_path,
        intercepts=intercepts,
        sigmas=np.asarray([s["sigma"] for s in stages]) if scaled else None,
        kkt_residuals=np.asarray([s["kkt"] for s in stages]),
        inner_sweep_counts=np.asarray([s["sweeps"] for s in stages], dtype=np.int64),
        middle_round_counts=np.asarray([s["rounds"] for s in stages], dtype=np.int64),
        newton_step_counts=np.asarray([s["newton"] for s in stages], dtype=np.int64),
        kkt_scan_counts=np.asarray([s["scans"] for s in stages], dtype=np.int64),
        converged=np.asarray([s["converged"] for s in stages], dtype=bool),
        column_means=record.means,
        column_scales=record.scales,
        dropped_columns=record.dropped,
        feature_names=list(dataset.feature_names),
    )


def _scaled_stage(work, reg, lam, lam_eff_prev, beta, b, sigma, config, curv, screen):
    """One lambda stage of the scaled fit: alternate beta-steps and sigma updates.

    Returns (stage, sigma, lam_eff_prev); stage is None when the residual hit
    exactly zero (the caller truncates the path).
    """
    x, y = work.x, work.y
    n = work.n
    sigma_tol = SIGMA_TOL_FACTOR * config.prec
    gaussian = ObjectiveSpec("gaussian")
    sigma_entry = sigma
    rounds = sweeps = scans = 0
    converged = True
    res = None
    for _ in range(config.max_newton_steps):
        res = middle_loop(work, gaussian, reg, lam * sigma, lam_eff_prev, beta, b, config,
                          curvatures=curv, screen=screen)
        beta, b = res.beta, res.intercept
        rounds += res.rounds
        sweeps += res.inner_sweeps
        scans += res.kkt_scans
        converged = converged and res.converged
        lam_eff_prev = lam * sigma
        eta = linear_predictor(x, beta, b)
        norm = float(np.linalg.norm(y - eta))
        if norm == 0.0:
            return None, sigma, lam_eff_prev
        sigma_new = norm / np.sqrt(n)
        done = abs(sigma_new - sigma) < sigma_tol
        sigma = sigma_new
        if done:
            break
    else:
        if sigma < sigma_entry - sigma_tol:
            # iteration cap exhausted with the noise estimate still drifting
            # down: below this lambda there is no interior fixed point (the
            # interpolation regime), so the path stops here
            return None, sigma, lam_eff_prev
        converged = False
    # certify against the scaled objective at the recorded sigma
    eta = linear_predictor(x, beta, b)
    grad = x.T @ ((eta - y) / (n * sigma))
    scans += 1
    kkt = kkt_residual_from_gradient(grad, beta, reg, lam)
    if kkt > config.prec:
        converged = False
    result = MiddleResult(beta=beta, intercept=b, kkt_residual=float(kkt), rounds=rounds,
                          inner_sweeps=sweeps, newton_steps=0, kkt_scans=scans,
                          converged=converged, ever_active=np.zeros(work.d, dtype=bool))
    return {"res": result, "sigma": sigma}, sigma, lam_eff_prev
