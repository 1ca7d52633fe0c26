"""Lifetime distributions for lab and field failure modeling.

The lab model is a Weibull distribution.  Field units see heterogeneous
operating conditions, modeled as a per-unit gamma frailty ``Z`` multiplying
the Weibull hazard.  Marginalizing ``Z`` out gives the field-time family
implemented by :class:`FrailtyField`; with a zero frailty threshold it is
exactly the Burr-XII distribution, and the log-logistic is Burr-XII with
``k = 1``.

All cdf/pdf/hazard evaluations are carried out in log space (``log1p`` /
``expm1`` / ``logaddexp`` forms), so large values of ``(t/scale)**shape``
cannot overflow intermediate results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import rng_for

__all__ = [
    "ParameterError",
    "Weibull",
    "BurrXII",
    "GammaFrailty",
    "FrailtyField",
    "sample_field_time",
    "sev_cdf",
    "sev_pdf",
    "sev_quantile",
]


class ParameterError(ValueError):
    """A distribution parameter is outside its domain."""


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not (np.isfinite(value) and value > 0):
            raise ParameterError(f"{name} must be a positive finite real, got {value!r}")


def _as_times(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("times must be nonnegative")
    return arr, arr.ndim == 0


def _as_probs(p) -> tuple[np.ndarray, bool]:
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0) or np.any(arr >= 1) or np.any(np.isnan(arr)):
        raise ValueError("probabilities must lie in [0, 1)")
    return arr, arr.ndim == 0


def _ret(values: np.ndarray, scalar: bool):
    return float(values[()]) if scalar else values


def _resolve_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return rng_for(seed)


def _log_t(t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(t)


@dataclass(frozen=True)
class Weibull:
    """Weibull distribution, F(t) = 1 - exp[-(t/alpha)^beta].

    ``alpha > 0`` is the scale (time units) and ``beta > 0`` the shape.  On
    the log-time scale this is a smallest-extreme-value distribution with
    location ``ln(alpha)`` and scale ``1/beta``.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        _check_positive(alpha=self.alpha, beta=self.beta)

    def log_sf(self, t):
        t, scalar = _as_times(t)
        with np.errstate(over="ignore"):
            out = -np.exp(self.beta * (_log_t(t) - math.log(self.alpha)))
        return _ret(out, scalar)

    def sf(self, t):
        t, scalar = _as_times(t)
        return _ret(np.exp(self.log_sf(t)), scalar)

    def cdf(self, t):
        t, scalar = _as_times(t)
        return _ret(-np.expm1(self.log_sf(t)), scalar)

    def pdf(self, t):
        t, scalar = _as_times(t)
        out = self.hazard(t) * self.sf(t)
        return _ret(np.asarray(out, dtype=float), scalar)

    def log_pdf(self, t):
        """Log density; defined for t > 0."""
        t, scalar = _as_times(t)
        z = self.beta * (_log_t(t) - math.log(self.alpha))
        out = math.log(self.beta) - _log_t(t) + z + self.log_sf(t)
        return _ret(out, scalar)

    def hazard(self, t):
        """(beta/alpha) (t/alpha)^(beta-1); equals pdf/sf."""
        t, scalar = _as_times(t)
        with np.errstate(over="ignore", invalid="ignore"):
            w = (self.beta - 1.0) * (_log_t(t) - math.log(self.alpha))
            out = (self.beta / self.alpha) * np.exp(w)
        out = _patch_zero(out, t, self.beta, at_zero=self.beta / self.alpha)
        return _ret(out, scalar)

    def quantile(self, p):
        p, scalar = _as_probs(p)
        out = self.alpha * np.power(-np.log1p(-p), 1.0 / self.beta)
        return _ret(out, scalar)

    def sample(self, n: int, seed) -> np.ndarray:
        """Inverse-cdf draws; deterministic for a given seed."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _resolve_rng(seed)
        return self.quantile(rng.random(n))


def _patch_zero(out: np.ndarray, t: np.ndarray, beta: float, at_zero: float) -> np.ndarray:
    """Fix the t == 0 limit: +inf for beta < 1, finite for beta == 1, 0 above."""
    zero = t == 0
    if not np.any(zero):
        return out
    out = np.array(out, dtype=float, copy=True)
    if beta < 1:
        out[zero] = np.inf
    elif beta == 1:
        out[zero] = at_zero
    else:
        out[zero] = 0.0
    return out


@dataclass(frozen=True)
class BurrXII:
    """Burr-XII distribution, F(t) = 1 - [(t/scale)^beta + 1]^(-k).

    Arises as the field marginal of a Weibull baseline under a gamma frailty
    with zero threshold; ``k = 1`` gives the log-logistic distribution.
    """

    scale: float
    beta: float
    k: float

    def __post_init__(self):
        _check_positive(scale=self.scale, beta=self.beta, k=self.k)

    def _w(self, t: np.ndarray) -> np.ndarray:
        return self.beta * (_log_t(t) - math.log(self.scale))

    def log_sf(self, t):
        t, scalar = _as_times(t)
        out = -self.k * np.logaddexp(0.0, self._w(t))
        return _ret(out, scalar)

    def sf(self, t):
        t, scalar = _as_times(t)
        return _ret(np.exp(self.log_sf(t)), scalar)

    def cdf(self, t):
        t, scalar = _as_times(t)
        return _ret(-np.expm1(self.log_sf(t)), scalar)

    def hazard(self, t):
        t, scalar = _as_times(t)
        w = self._w(t)
        u = np.logaddexp(0.0, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(math.log(self.k * self.beta) - _log_t(t) + w - u)
        out = _patch_zero(out, t, self.beta, at_zero=self.k / self.scale)
        return _ret(out, scalar)

    def pdf(self, t):
        t, scalar = _as_times(t)
        out = self.hazard(t) * self.sf(t)
        return _ret(np.asarray(out, dtype=float), scalar)

    def log_pdf(self, t):
        """Log density; defined for t > 0."""
        t, scalar = _as_times(t)
        w = self._w(t)
        u = np.logaddexp(0.0, w)
        out = math.log(self.k * self.beta) - _log_t(t) + w - u + self.log_sf(t)
        return _ret(out, scalar)

    def quantile(self, p):
        """Closed form: scale * [(1-p)^(-1/k) - 1]^(1/beta)."""
        p, scalar = _as_probs(p)
        with np.errstate(over="ignore"):
            out = self.scale * np.exp(_log_expm1(-np.log1p(-p) / self.k) / self.beta)
        out = np.where(np.asarray(p) == 0, 0.0, out)
        return _ret(out, scalar)

    def sample(self, n: int, seed) -> np.ndarray:
        """Inverse-cdf draws; deterministic for a given seed."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _resolve_rng(seed)
        return self.quantile(rng.random(n))


def _log_expm1(x: np.ndarray) -> np.ndarray:
    """log(exp(x) - 1), stable for both tiny and huge x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x > 36.0, x, np.log(np.expm1(np.minimum(x, 36.0))))
    return out


@dataclass(frozen=True)
class GammaFrailty:
    """Gamma frailty: Z = gamma + Gamma(shape k, rate mu), z > gamma >= 0.

    ``Z`` multiplies the baseline Weibull hazard of a field unit; its mean is
    ``gamma + k/mu``.
    """

    k: float
    mu: float
    gamma: float = 0.0

    def __post_init__(self):
        _check_positive(k=self.k, mu=self.mu)
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise ParameterError(f"gamma must be a nonnegative real, got {self.gamma!r}")

    @property
    def mean(self) -> float:
        return self.gamma + self.k / self.mu

    def pdf(self, z):
        z = np.asarray(z, dtype=float)
        scalar = z.ndim == 0
        x = z - self.gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = (
                self.k * math.log(self.mu)
                + (self.k - 1.0) * np.log(x)
                - self.mu * x
                - math.lgamma(self.k)
            )
        out = np.where(x > 0, np.exp(logpdf), 0.0)
        return _ret(out, scalar)

    def sample(self, n: int, seed) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _resolve_rng(seed)
        return self.gamma + rng.gamma(self.k, 1.0 / self.mu, size=n)


@dataclass(frozen=True)
class FrailtyField:
    """Field failure-time marginal of a Weibull baseline under gamma frailty.

    Survival function::

        S(t) = [(t/alpha)^beta / mu + 1]^(-k) * exp[-gamma (t/alpha)^beta]

    and hazard::

        h(t) = (gamma beta / alpha) (t/alpha)^(beta-1)
               + k beta t^(beta-1) / (t^beta + mu alpha^beta).

    With ``gamma = 0`` this is BurrXII(alpha * mu^(1/beta), beta, k).
    """

    alpha: float
    beta: float
    mu: float
    k: float
    gamma: float = 0.0

    def __post_init__(self):
        _check_positive(alpha=self.alpha, beta=self.beta, mu=self.mu, k=self.k)
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise ParameterError(f"gamma must be a nonnegative real, got {self.gamma!r}")

    @property
    def scale(self) -> float:
        """Burr-XII scale identity: alpha * mu^(1/beta)."""
        return self.alpha * self.mu ** (1.0 / self.beta)

    def as_burr12(self) -> BurrXII:
        if self.gamma != 0:
            raise ParameterError("Burr-XII equivalence requires gamma == 0")
        return BurrXII(self.scale, self.beta, self.k)

    def frailty(self) -> GammaFrailty:
        return GammaFrailty(self.k, self.mu, self.gamma)

    def _w(self, t: np.ndarray) -> np.ndarray:
        return self.beta * (_log_t(t) - math.log(self.alpha))

    def log_sf(self, t):
        t, scalar = _as_times(t)
        w = self._w(t)
        with np.errstate(over="ignore"):
            out = -self.k * np.logaddexp(0.0, w - math.log(self.mu)) - self.gamma * np.exp(w)
        return _ret(out, scalar)

    def sf(self, t):
        t, scalar = _as_times(t)
        return _ret(np.exp(self.log_sf(t)), scalar)

    def cdf(self, t):
        t, scalar = _as_times(t)
        return _ret(-np.expm1(self.log_sf(t)), scalar)

    def hazard(self, t):
        t, scalar = _as_times(t)
        w = self._w(t)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            mix = self.gamma + self.k / (np.exp(w) + self.mu)
            out = np.exp(math.log(self.beta) - _log_t(t) + w) * mix
        out = _patch_zero(out, t, self.beta, at_zero=(self.gamma + self.k / self.mu) / self.alpha)
        return _ret(out, scalar)

    def pdf(self, t):
        t, scalar = _as_times(t)
        with np.errstate(invalid="ignore"):
            out = self.hazard(t) * self.sf(t)
        out = np.asarray(out, dtype=float)
        # inf * 0 only happens at t == 0 with beta < 1, where sf == 1
        if np.any(np.isnan(out)):
            out = np.where(np.isnan(out), np.inf, out)
        return _ret(out, scalar)

    def _quantile(self, p: float) -> float:
        """Numeric cdf inverse; internal helper (no closed form for gamma > 0).

        Solved on the log-time axis: the Burr-XII component and the pure
        threshold (Weibull) component each bound the cdf from below, so their
        closed-form quantiles bracket the target tightly from above, and the
        same quantiles at p/2 bracket it from below via a union bound.
        """
        if not 0 <= p < 1:
            raise ValueError("probability must lie in [0, 1)")
        if p == 0:
            return 0.0
        if self.gamma == 0:
            return float(self.as_burr12().quantile(p))
        from scipy.optimize import brentq

        burr = BurrXII(self.scale, self.beta, self.k)
        thresh = Weibull(self.alpha * self.gamma ** (-1.0 / self.beta), self.beta)
        hi = min(float(burr.quantile(p)), float(thresh.quantile(p)))
        lo = min(float(burr.quantile(p / 2)), float(thresh.quantile(p / 2)))
        if not (np.isfinite(hi) and lo > 0):
            hi = self.alpha
            while self.cdf(hi) < p:
                hi *= 8.0
            lo = hi / 1e12
        u = brentq(
            lambda v: self.cdf(math.exp(v)) - p,
            math.log(lo) - 1e-9,
            math.log(hi) + 1e-9,
            xtol=1e-13,
            maxiter=300,
        )
        return float(math.exp(u))

    def sample(self, n: int, seed) -> np.ndarray:
        """Draw Z per unit, then a lifetime with conditional survival exp[-Z (t/alpha)^beta]."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _resolve_rng(seed)
        z = self.frailty().sample(n, rng)
        e = -np.log1p(-rng.random(n))
        return self.alpha * np.power(e / z, 1.0 / self.beta)


def sample_field_time(weibull: Weibull, frailty: GammaFrailty, n: int, seed) -> np.ndarray:
    """Field lifetimes under a Weibull baseline whose hazard is scaled by a gamma frailty."""
    dist = FrailtyField(weibull.alpha, weibull.beta, frailty.mu, frailty.k, frailty.gamma)
    return dist.sample(n, seed)


# Standardized smallest-extreme-value distribution: the law of ln(T) - ln(alpha)
# scaled by beta when T is Weibull(alpha, beta) (location 0, scale 1 here).


def sev_cdf(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        out = -np.expm1(-np.exp(z))
    return float(out[()]) if out.ndim == 0 else out


def sev_pdf(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        out = np.exp(z - np.exp(z))
    return float(out[()]) if out.ndim == 0 else out


def sev_quantile(p):
    p, scalar = _as_probs(p)
    with np.errstate(divide="ignore"):
        out = np.log(-np.log1p(-p))
    return _ret(out, scalar)
