"""Sparsity-inducing penalties and their scalar proximal (thresholding) operators.

Three penalty families are supported: the convex l1 penalty and the folded
concave MCP and SCAD penalties.  Each family provides a value function
``penalty_value``, the derivative of the value in ``|t|`` (``penalty_derivative``),
and ``scalar_threshold``, the exact minimizer of the one-dimensional coordinate
subproblem

    argmin_t  (v/2) t^2 - u t + p(t; lam)

which is the basic step of every coordinate-descent sweep in the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateCurvatureError, ParameterError

KINDS = ("l1", "mcp", "scad")

# integer codes shared with the compiled sweep kernels
KIND_CODES = {"l1": 0, "mcp": 1, "scad": 2}

DEFAULT_GAMMA = {"mcp": 3.0, "scad": 3.7}


@dataclass(frozen=True)
class RegularizerSpec:
    """Penalty family plus concavity parameter.

    ``gamma`` controls how fast the concave penalties flatten out; it is
    ignored for ``l1``.  When omitted it defaults to 3.0 (mcp) or 3.7 (scad).
    """

    kind: str = "l1"
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown regularizer kind {self.kind!r}; expected one of {KINDS}")
        gamma = self.gamma
        if gamma is None:
            gamma = DEFAULT_GAMMA.get(self.kind)
        if self.kind != "l1":
            if not np.isfinite(gamma):
                raise ParameterError(f"gamma must be finite, got {gamma}")
            if self.kind == "mcp" and gamma <= 1:
                raise ParameterError(f"mcp requires gamma > 1, got {gamma}")
            if self.kind == "scad" and gamma <= 2:
                raise ParameterError(f"scad requires gamma > 2, got {gamma}")
        object.__setattr__(self, "gamma", gamma)

    @property
    def kind_code(self) -> int:
        return KIND_CODES[self.kind]

    def curvature_floor(self) -> float:
        """Smallest curvature v for which the 1-D subproblem is strongly convex."""
        if self.kind == "mcp":
            return 1.0 / self.gamma
        if self.kind == "scad":
            return 1.0 / (self.gamma - 1.0)
        return 0.0


def penalty_value(spec: RegularizerSpec, t: float, lam: float) -> float:
    """Penalty value p(t; lam).  Symmetric in t, zero at t = 0."""
    if not np.isfinite(t) or not np.isfinite(lam):
        raise ParameterError("t and lambda must be finite")
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    a = abs(t)
    if lam == 0.0:
        return 0.0
    if spec.kind == "l1":
        return lam * a
    g = spec.gamma
    if spec.kind == "mcp":
        if a <= g * lam:
            return lam * a - a * a / (2.0 * g)
        return 0.5 * g * lam * lam
    # scad
    if a <= lam:
        return lam * a
    if a <= g * lam:
        return (2.0 * g * lam * a - a * a - lam * lam) / (2.0 * (g - 1.0))
    return 0.5 * (g + 1.0) * lam * lam


def penalty_derivative(spec: RegularizerSpec, t: float, lam: float) -> float:
    """d p(|t|; lam) / d|t|, evaluated from the right at t = 0 (giving lam)."""
    a = abs(t)
    if spec.kind == "l1" or lam == 0.0:
        return lam
    g = spec.gamma
    if spec.kind == "mcp":
        return max(0.0, lam - a / g)
    if a <= lam:
        return lam
    return max(0.0, g * lam - a) / (g - 1.0)


def penalty_total(spec: RegularizerSpec, beta: np.ndarray, lam: float) -> float:
    """Sum of penalty values over a coefficient vector (vectorized)."""
    a = np.abs(np.asarray(beta, dtype=float))
    if lam == 0.0:
        return 0.0
    if spec.kind == "l1":
        return float(lam * a.sum())
    g = spec.gamma
    if spec.kind == "mcp":
        inner = a <= g * lam
        vals = np.where(inner, lam * a - a * a / (2.0 * g), 0.5 * g * lam * lam)
        return float(vals.sum())
    mid = (a > lam) & (a <= g * lam)
    outer = a > g * lam
    vals = lam * a
    vals = np.where(mid, (2.0 * g * lam * a - a * a - lam * lam) / (2.0 * (g - 1.0)), vals)
    vals = np.where(outer, 0.5 * (g + 1.0) * lam * lam, vals)
    return float(vals.sum())


def scalar_threshold(spec: RegularizerSpec, u: float, v: float, lam: float) -> float:
    """Exact minimizer of (v/2) t^2 - u t + p(t; lam).

    Requires v > 0, and for the concave penalties enough curvature to keep the
    subproblem strongly convex (v > 1/gamma for mcp, v > 1/(gamma-1) for scad);
    otherwise a :class:`DegenerateCurvatureError` is raised and the caller is
    expected to fall back to the l1 update at the same lambda.
    """
    if v <= 0:
        raise ParameterError(f"curvature v must be > 0, got {v}")
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    if lam == 0.0:
        return u / v
    au = abs(u)
    if spec.kind == "l1":
        if au <= lam:
            return 0.0
        return np.sign(u) * (au - lam) / v
    g = spec.gamma
    floor = spec.curvature_floor()
    if v <= floor:
        raise DegenerateCurvatureError(
            f"{spec.kind} with gamma={g} needs curvature v > {floor:.6g}, got {v:.6g}"
        )
    if au <= lam:
        return 0.0
    if spec.kind == "mcp":
        if au <= g * lam * v:
            return np.sign(u) * (au - lam) / (v - 1.0 / g)
        return u / v
    # scad
    if au <= lam * (v + 1.0):
        return np.sign(u) * (au - lam) / v
    if au <= g * lam * v:
        return np.sign(u) * (au - g * lam / (g - 1.0)) / (v - 1.0 / (g - 1.0))
    return u / v
