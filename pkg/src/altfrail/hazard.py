"""Shape classification for the field hazard under gamma frailty.

The sign of the hazard derivative is the sign of the quadratic

    q(y) = (beta - 1) gamma y^2 + [2 gamma mu (beta - 1) - k] y
           + mu (mu gamma + k) (beta - 1),        y = (t/alpha)^beta,

so the shape is decided by ``beta`` and the discriminant
``k [k - 4 gamma mu beta (beta - 1)]``, and turning points are quadratic
roots mapped back through ``t = alpha y^(1/beta)``.  The conditions involve
only (beta, gamma, mu, k), so the classification is invariant to time
rescaling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distributions import FrailtyField

__all__ = ["ShapeLabel", "HazardShape", "classify_shape", "hazard_profile"]


class ShapeLabel(enum.Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"
    N_SHAPE = "n_shape"
    UPSIDE_DOWN_BATHTUB = "upside_down_bathtub"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class HazardShape:
    label: ShapeLabel
    turning_points: tuple[float, ...]

    def __post_init__(self):
        expected = {
            ShapeLabel.DECREASING: 0,
            ShapeLabel.INCREASING: 0,
            ShapeLabel.UPSIDE_DOWN_BATHTUB: 1,
            ShapeLabel.N_SHAPE: 2,
            ShapeLabel.BOUNDARY: 1,
        }[self.label]
        if len(self.turning_points) != expected:
            raise ValueError(
                f"{self.label.value} requires {expected} turning point(s), "
                f"got {len(self.turning_points)}"
            )


def classify_shape(params: FrailtyField) -> HazardShape:
    """Classify the field hazard as decreasing, increasing, unimodal or N-shaped.

    Rules (with g = gamma, b = beta):

    * b <= 1: decreasing.
    * g = 0, b > 1: upside-down bathtub, peak at alpha [mu (b-1)]^(1/b).
    * g > 0, b > 1 and b^2 - b < k / (4 g mu): N-shape (two turning points).
    * g > 0, b > 1 and b^2 - b > k / (4 g mu): increasing.
    * exact equality: boundary case, tangency point reported.
    """
    a, b, mu, k, g = params.alpha, params.beta, params.mu, params.k, params.gamma
    if b <= 1:
        return HazardShape(ShapeLabel.DECREASING, ())
    if g == 0:
        t_peak = a * (mu * (b - 1.0)) ** (1.0 / b)
        return HazardShape(ShapeLabel.UPSIDE_DOWN_BATHTUB, (t_peak,))
    # minimum of q is negative iff k - 4 g mu b (b - 1) > 0
    delta = k - 4.0 * g * mu * b * (b - 1.0)
    if delta < 0:
        return HazardShape(ShapeLabel.INCREASING, ())
    mid = k - 2.0 * g * mu * (b - 1.0)
    denom = 2.0 * g * (b - 1.0)
    if delta == 0:
        y = mid / denom
        return HazardShape(ShapeLabel.BOUNDARY, (a * y ** (1.0 / b),))
    root = math.sqrt(k * delta)
    y_lo, y_hi = (mid - root) / denom, (mid + root) / denom
    points = tuple(a * y ** (1.0 / b) for y in (y_lo, y_hi))
    return HazardShape(ShapeLabel.N_SHAPE, points)


def hazard_profile(params: FrailtyField, t_grid) -> np.ndarray:
    """Evaluate the field hazard over a strictly increasing grid.

    Returns an ``(n, 2)`` array of ``(t, h(t))`` rows, ready for CSV export
    or plotting.
    """
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("t_grid must be a nonempty 1-D array")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("t_grid must be nonnegative and strictly increasing")
    return np.column_stack([grid, params.hazard(grid)])


def default_profile_grid(params: FrailtyField, points: int = 400) -> np.ndarray:
    """Log-spaced grid spanning the 1e-4 .. 1-1e-4 quantile range."""
    lo = params._quantile(1e-4)
    hi = params._quantile(1.0 - 1e-4)
    if lo <= 0:
        lo = hi * 1e-8
    return np.geomspace(lo, hi, points)
