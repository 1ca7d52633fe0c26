"""Shared test utilities: numeric hazard-shape oracle and parameter samplers."""

import numpy as np

from altfrail import FrailtyField, ShapeLabel


def numeric_shape_oracle(params: FrailtyField, points: int = 10_000):
    """Classify the hazard by counting derivative sign changes on a dense grid.

    Independent of the closed-form classifier: evaluates the hazard on a
    log-spaced grid between the 1e-6 and 1-1e-6 quantiles and counts sign
    changes of successive differences.

    Returns (label, change_indices) where label ignores the boundary case
    (a tangency has no sign change and reads as increasing).
    """
    lo = params._quantile(1e-6)
    hi = params._quantile(1.0 - 1e-6)
    if lo <= 0:
        lo = hi * 1e-12
    grid = np.geomspace(lo, hi, points)
    h = params.hazard(grid)
    d = np.diff(h)
    scale = np.maximum(np.abs(h[:-1]), np.abs(h[1:]))
    signs = np.where(np.abs(d) <= 1e-11 * scale, 0, np.sign(d)).astype(int)
    signs = signs[signs != 0]
    changes = []
    for i in range(1, signs.size):
        if signs[i] != signs[i - 1]:
            changes.append(i)
    n_changes = len(changes)
    if n_changes == 0:
        label = ShapeLabel.INCREASING if signs.size and signs[0] > 0 else ShapeLabel.DECREASING
    elif n_changes == 1:
        label = (
            ShapeLabel.UPSIDE_DOWN_BATHTUB if signs[0] > 0 else ShapeLabel.DECREASING
        )
    elif n_changes == 2 and signs[0] > 0:
        label = ShapeLabel.N_SHAPE
    else:
        label = None
    return label, grid, h


def _dip_resolvable(params: FrailtyField, t1: float, t2: float) -> bool:
    lo = params._quantile(1e-5)
    hi = params._quantile(1.0 - 1e-5)
    if not (lo < t1 < t2 < hi):
        return False
    h1, h2 = params.hazard(t1), params.hazard(t2)
    return h1 - h2 > 1e-5 * h1


def sample_case_params(rng: np.random.Generator, case: int) -> FrailtyField:
    """Draw parameters squarely inside one of the four hazard-shape cases."""
    from altfrail import classify_shape

    while True:
        alpha = float(np.exp(rng.uniform(-1.5, 1.5)))
        mu = float(np.exp(rng.uniform(-2.5, 1.5)))
        k = float(np.exp(rng.uniform(-2.5, 1.5)))
        if case == 1:
            beta = float(rng.uniform(0.2, 1.0))
            gamma = float(rng.choice([0.0, rng.uniform(0.0, 2.0)]))
            return FrailtyField(alpha, beta, mu, k, gamma)
        if case == 4:
            beta = float(rng.uniform(1.1, 3.5))
            return FrailtyField(alpha, beta, mu, k, 0.0)
        beta = float(rng.uniform(1.1, 2.8))
        gamma = float(np.exp(rng.uniform(-2.0, 1.0)))
        base = 4.0 * gamma * mu * beta * (beta - 1.0)
        if case == 3:
            k_case = base * float(rng.uniform(0.05, 0.67))
            if k_case <= 0:
                continue
            return FrailtyField(alpha, beta, mu, k_case, gamma)
        # case 2: margin above the boundary plus a numerically resolvable dip
        k_case = base * float(np.exp(rng.uniform(np.log(1.5), np.log(20.0))))
        if k_case <= 0:
            continue
        params = FrailtyField(alpha, beta, mu, k_case, gamma)
        shape = classify_shape(params)
        if shape.label.value != "n_shape":
            continue
        t1, t2 = shape.turning_points
        if _dip_resolvable(params, t1, t2):
            return params
