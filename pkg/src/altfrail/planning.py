"""Optimal two-stress accelerated-life-test planning under field heterogeneity.

Test stress is standardized so the highest allowable stress sits at xi = 0
and the nominal use stress at xi = 1; log-life is smallest-extreme-value with
location ``v0 + v1 * xi`` and stress-independent scale ``sigma``.  A plan
allocates a fraction ``pi`` of units to a lower stress ``xi_low`` (the rest
run at xi = 0), and is scored by the delta-method asymptotic standard
deviation of a field-side criterion: a log-quantile or quantile of the
frailty-marginal field life, or the probability of failure inside a warranty
window.  Minimizing that score over (xi_low, pi) gives the optimal plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

__all__ = [
    "PlanningValues",
    "TestPlan",
    "PlanConstraint",
    "LogQuantile",
    "Quantile",
    "FailureProb",
    "HomogeneousLogQuantile",
    "PlanResult",
    "ContourGrid",
    "NoFeasiblePlanError",
    "standardize_stress",
    "sev_unit_info",
    "plan_fisher_info",
    "field_quantile",
    "field_failure_prob",
    "asymptotic_sd",
    "optimize_plan",
    "contour_grid",
]


class NoFeasiblePlanError(RuntimeError):
    """Every scanned plan produced singular information."""


class QuadratureError(RuntimeError):
    """Numerical quadrature failed to reach the requested accuracy."""


@dataclass(frozen=True)
class PlanningValues:
    """Planning inputs: stress-life line, SEV scale, and frailty parameters."""

    v0: float
    v1: float
    sigma: float
    mu: float
    k: float

    def __post_init__(self):
        for name in ("sigma", "mu", "k"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def beta(self) -> float:
        return 1.0 / self.sigma


@dataclass(frozen=True)
class TestPlan:
    """Lower standardized stress and the unit fraction allocated to it."""

    xi_low: float
    pi: float

    def __post_init__(self):
        if not 0 < self.xi_low < 1:
            raise ValueError("xi_low must lie strictly inside (0, 1)")
        if not 0 < self.pi < 1:
            raise ValueError("pi must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class PlanConstraint:
    """Shared censoring rule for both stresses, plus an optional total size.

    Exactly one of ``censor_time`` (type-1: one clock for all units) or
    ``fail_fractions`` (type-2 analog: expected failing fraction per stress,
    a scalar or a ``(low_stress, high_stress)`` pair) must be given.
    """

    censor_time: float | None = None
    fail_fractions: float | tuple[float, float] | None = None
    n_total: int | None = None

    def __post_init__(self):
        if (self.censor_time is None) == (self.fail_fractions is None):
            raise ValueError("give exactly one of censor_time or fail_fractions")
        if self.censor_time is not None and self.censor_time <= 0:
            raise ValueError("censor_time must be positive")
        if self.fail_fractions is not None:
            fracs = self.fail_fractions
            if np.isscalar(fracs):
                fracs = (float(fracs), float(fracs))
            if not all(0 < q <= 1 for q in fracs):
                raise ValueError("fail fractions must lie in (0, 1]")
            object.__setattr__(self, "fail_fractions", tuple(fracs))
        if self.n_total is not None and self.n_total < 1:
            raise ValueError("n_total must be >= 1")

    def zeta(self, xi: float, values: PlanningValues) -> float:
        """Standardized censor level for a unit tested at stress xi."""
        if self.censor_time is not None:
            return (math.log(self.censor_time) - (values.v0 + values.v1 * xi)) / values.sigma
        q_low, q_high = self.fail_fractions
        q = q_low if xi > 0 else q_high
        if q >= 1:
            return math.inf
        return math.log(-math.log1p(-q))


def standardize_stress(s: float, s0: float, sh: float) -> float:
    """Map stress to xi = (s - sh)/(s0 - sh): 0 at the max test stress, 1 at use."""
    if s0 == sh:
        raise ValueError("use stress and maximum stress must differ")
    return (s - sh) / (s0 - sh)


# ---------------------------------------------------------------------------
# Fisher information

def _exp1(z):
    # exp(z - e^z), the standardized SEV density
    with np.errstate(over="ignore"):
        return np.exp(z - np.exp(z))


def _exp2(z):
    with np.errstate(over="ignore"):
        return np.exp(2.0 * z - np.exp(z))


@lru_cache(maxsize=4096)
def sev_unit_info(zeta: float) -> np.ndarray:
    """Per-unit expected information for a standardized SEV observation.

    The observation is type-1 censored at ``zeta`` (``+inf`` for complete
    data); entries are expectations of the negative second derivatives of the
    log-likelihood in (location, scale), evaluated by adaptive quadrature.
    The complete-data limit is ``[[1, 1 - g], [1 - g, pi^2/6 + (1 - g)^2]]``
    with ``g`` Euler's constant.
    """
    zeta = float(zeta)
    if math.isnan(zeta):
        raise ValueError("zeta must not be NaN")
    if zeta == -math.inf:
        return np.zeros((2, 2))
    pieces = [
        quad(_exp2, -np.inf, zeta, limit=200),
        quad(lambda z: (z + 1.0) * _exp2(z) - _exp1(z), -np.inf, zeta, limit=200),
        quad(lambda z: (z * z + 2.0 * z) * _exp2(z) - (2.0 * z + 1.0) * _exp1(z), -np.inf, zeta, limit=200),
    ]
    f11, f12, f22 = (p[0] for p in pieces)
    for value, err in pieces:
        if err > 1e-7 * max(1.0, abs(value)):
            raise QuadratureError(f"information quadrature error {err:g} at zeta={zeta:g}")
    if math.isfinite(zeta):
        ez = math.exp(zeta)
        surv = math.exp(-ez)
        f11 += ez * surv
        f12 += ez * (zeta + 1.0) * surv
        f22 += zeta * ez * (zeta + 2.0) * surv
    out = np.array([[f11, f12], [f12, f22]])
    out.setflags(write=False)
    return out


def _stress_info(xi: float, values: PlanningValues, constraint: PlanConstraint) -> np.ndarray:
    """3x3 information in (v0, v1, sigma) for one unit at stress xi."""
    F = sev_unit_info(constraint.zeta(xi, values)) / values.sigma**2
    A = np.array([[1.0, xi, 0.0], [0.0, 0.0, 1.0]])
    return A.T @ F @ A


def plan_fisher_info(
    plan: TestPlan, values: PlanningValues, constraint: PlanConstraint
) -> np.ndarray:
    """Fisher information for (v0, v1, sigma) under a two-stress plan.

    Per unit by default; multiplied by ``constraint.n_total`` when given.
    Degenerate plans (stresses collapsing) make this singular; consumers
    should treat singularity as plan infeasibility.
    """
    info = plan.pi * _stress_info(plan.xi_low, values, constraint) + (
        1.0 - plan.pi
    ) * _stress_info(0.0, values, constraint)
    if constraint.n_total is not None:
        info = info * constraint.n_total
    return info


# ---------------------------------------------------------------------------
# criteria

@dataclass(frozen=True)
class LogQuantile:
    """Asymptotic sd of the log p-quantile of the frailty-marginal field life."""

    p: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")

    def gradient(self, values: PlanningValues) -> np.ndarray:
        third = math.log(values.mu * math.expm1(-math.log1p(-self.p) / values.k))
        return np.array([1.0, 1.0, third])


@dataclass(frozen=True)
class Quantile:
    """Asymptotic sd of the p-quantile itself (same argmin as LogQuantile)."""

    p: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")

    def gradient(self, values: PlanningValues) -> np.ndarray:
        t_p = field_quantile(values, self.p)
        return t_p * LogQuantile(self.p).gradient(values)


@dataclass(frozen=True)
class HomogeneousLogQuantile:
    """Log-quantile criterion ignoring frailty (plain Weibull field life)."""

    p: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")

    def gradient(self, values: PlanningValues) -> np.ndarray:
        return np.array([1.0, 1.0, math.log(-math.log1p(-self.p))])


@dataclass(frozen=True)
class FailureProb:
    """Asymptotic sd of the failure probability inside a warranty window tau."""

    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def gradient(self, values: PlanningValues) -> np.ndarray:
        log_omega = math.log(self.tau) - (values.v0 + values.v1)
        a = math.exp(log_omega / values.sigma) / values.mu
        common = (
            -values.k
            * math.exp(log_omega / values.sigma)
            / (values.mu * values.sigma)
            * (a + 1.0) ** (-values.k - 1.0)
        )
        return np.array([common, common, common * log_omega / values.sigma])


def field_quantile(values: PlanningValues, p: float) -> float:
    """p-quantile of field life at use stress: e^(v0+v1) [mu(1-p)^(-1/k) - mu]^sigma."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    inner = values.mu * math.expm1(-math.log1p(-p) / values.k)
    return math.exp(values.v0 + values.v1) * inner**values.sigma


def field_failure_prob(values: PlanningValues, tau: float) -> float:
    """Failure probability by warranty time tau: 1 - [Omega^(1/sigma)/mu + 1]^(-k)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    log_omega = math.log(tau) - (values.v0 + values.v1)
    a = math.exp(log_omega / values.sigma) / values.mu
    return -math.expm1(-values.k * math.log1p(a))


def asymptotic_sd(
    plan: TestPlan,
    values: PlanningValues,
    constraint: PlanConstraint,
    criterion,
) -> float:
    """Delta-method asymptotic standard deviation of the criterion.

    Returns ``inf`` when the plan's information matrix is singular (the plan
    cannot identify the stress-life line), rather than raising.
    """
    info = plan_fisher_info(plan, values, constraint)
    grad = criterion.gradient(values)
    try:
        chol = np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return math.inf
    y = np.linalg.solve(chol, grad)
    avar = float(y @ y)
    if not np.isfinite(avar) or avar < 0:
        return math.inf
    return math.sqrt(avar)


# ---------------------------------------------------------------------------
# optimization and contour export

@dataclass
class PlanResult:
    plan: TestPlan
    sd: float
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "xi_low": self.plan.xi_low,
            "pi": self.plan.pi,
            "sd": self.sd,
            "metadata": dict(self.metadata),
        }


def _criterion_label(criterion) -> str:
    return f"{type(criterion).__name__}({vars(criterion)})"


def optimize_plan(
    values: PlanningValues,
    constraint: PlanConstraint,
    criterion,
    grid_step: float = 0.01,
    jobs: int = 1,
) -> PlanResult:
    """Minimize the asymptotic sd over (xi_low, pi) in the open unit square.

    A coarse grid scan (default step 0.01) locates the basin; a local simplex
    refinement polishes the optimum.  The returned metadata records the
    information convention (per unit unless ``n_total`` is set).
    """
    xis = np.arange(grid_step, 1.0, grid_step)
    pis = np.arange(grid_step, 1.0, grid_step)
    grad = criterion.gradient(values)
    scale = constraint.n_total if constraint.n_total is not None else 1.0
    j_high = _stress_info(0.0, values, constraint)
    best = (math.inf, None, None)
    for xi in xis:
        j_low = _stress_info(float(xi), values, constraint)
        for pi in pis:
            info = scale * (pi * j_low + (1.0 - pi) * j_high)
            try:
                chol = np.linalg.cholesky(info)
            except np.linalg.LinAlgError:
                continue
            y = np.linalg.solve(chol, grad)
            avar = float(y @ y)
            if np.isfinite(avar) and 0 <= avar and math.sqrt(avar) < best[0]:
                best = (math.sqrt(avar), float(xi), float(pi))
    sd0, xi0, pi0 = best
    if xi0 is None:
        raise NoFeasiblePlanError("no feasible plan on the scan grid")

    from scipy.optimize import minimize

    eps = 1e-6

    def objective(x):
        xi, pi = x
        if not (eps < xi < 1 - eps and eps < pi < 1 - eps):
            return math.inf
        return asymptotic_sd(TestPlan(xi, pi), values, constraint, criterion)

    res = minimize(
        objective,
        [xi0, pi0],
        method="Nelder-Mead",
        options=dict(xatol=1e-6, fatol=1e-12, maxiter=2000),
    )
    xi, pi = (res.x if res.fun <= sd0 else (xi0, pi0))
    plan = TestPlan(float(xi), float(pi))
    sd = asymptotic_sd(plan, values, constraint, criterion)
    metadata = {
        "information_scale": "per_unit" if constraint.n_total is None else f"n_total={constraint.n_total}",
        "criterion": _criterion_label(criterion),
        "grid_step": grid_step,
    }
    return PlanResult(plan=plan, sd=float(sd), metadata=metadata)


@dataclass
class ContourGrid:
    """Asymptotic-sd surface over (xi_low, pi); inf marks infeasible cells."""

    xi: np.ndarray
    pi: np.ndarray
    sd: np.ndarray

    def rows(self):
        for i, xi in enumerate(self.xi):
            for j, pi in enumerate(self.pi):
                yield float(xi), float(pi), float(self.sd[i, j])

    def minimum(self) -> tuple[float, float, float]:
        idx = np.unravel_index(np.argmin(self.sd), self.sd.shape)
        return float(self.xi[idx[0]]), float(self.pi[idx[1]]), float(self.sd[idx])


def _contour_columns(args):
    values, constraint, criterion, xis, pis = args
    out = np.empty((len(xis), len(pis)))
    for i, xi in enumerate(xis):
        for j, pi in enumerate(pis):
            out[i, j] = asymptotic_sd(TestPlan(xi, pi), values, constraint, criterion)
    return out


def contour_grid(
    values: PlanningValues,
    constraint: PlanConstraint,
    criterion,
    resolution: int = 50,
    jobs: int = 1,
) -> ContourGrid:
    """Evaluate the asymptotic sd on a cell-centered grid for contour plots."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2 per axis")
    xis = (np.arange(resolution) + 0.5) / resolution
    pis = (np.arange(resolution) + 0.5) / resolution
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        blocks = np.array_split(np.arange(len(xis)), jobs)
        tasks = [
            (values, constraint, criterion, [float(xis[i]) for i in blk], [float(p) for p in pis])
            for blk in blocks
            if blk.size
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_contour_columns, tasks))
        sd = np.vstack(parts)
    else:
        sd = _contour_columns((values, constraint, criterion, list(map(float, xis)), list(map(float, pis))))
    return ContourGrid(xi=xis, pi=pis, sd=sd)
