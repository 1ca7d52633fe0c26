"""Censored maximum-likelihood fitting for lab and field lifetime models.

Fitting runs a Nelder-Mead simplex search over log-transformed positive
parameters, then polishes the optimum with Newton steps built from central
finite differences.  Standard errors come from the inverse of the observed
information (numerical Hessian of the log-likelihood at the optimum, on the
original parameter scale).  Non-convergence is reported through the
``converged`` flag plus diagnostics, never as an exception, so large
simulation batches survive pathological replicates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import chi2

__all__ = [
    "InsufficientDataError",
    "Scheme",
    "CensoredSample",
    "FitResult",
    "JointFitResult",
    "LRTestResult",
    "KaplanMeier",
    "fit_weibull",
    "fit_burr12",
    "fit_field_extended",
    "fit_frailty_joint",
    "lr_test",
    "aic",
    "kaplan_meier",
]

FORMAT_VERSION = "1"


class InsufficientDataError(ValueError):
    """Too few failures to identify the requested model."""


@dataclass(frozen=True)
class Scheme:
    """Censoring scheme declaration: complete, type1 (time) or type2 (count)."""

    kind: str
    censor_time: float | None = None
    r: int | None = None

    def __post_init__(self):
        if self.kind not in ("complete", "type1", "type2"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "type1" and not (self.censor_time and self.censor_time > 0):
            raise ValueError("type1 scheme requires censor_time > 0")
        if self.kind == "type2" and not (self.r and self.r >= 1):
            raise ValueError("type2 scheme requires r >= 1")


COMPLETE = Scheme("complete")


@dataclass(frozen=True)
class CensoredSample:
    """Right-censored observations: (time, status) with status 1 = failure."""

    times: np.ndarray
    status: np.ndarray
    scheme: Scheme = COMPLETE

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        status = np.asarray(self.status, dtype=int)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "status", status)
        if times.ndim != 1 or times.shape != status.shape or times.size == 0:
            raise ValueError("times and status must be matching nonempty 1-D arrays")
        if np.any(~np.isfinite(times)) or np.any(times <= 0):
            raise ValueError("times must be positive and finite")
        if not np.all((status == 0) | (status == 1)):
            raise ValueError("status must be 0 (censored) or 1 (failure)")
        censored = times[status == 0]
        if self.scheme.kind == "complete" and censored.size:
            raise ValueError("complete scheme admits no censored observations")
        if self.scheme.kind == "type1" and censored.size:
            if not np.allclose(censored, self.scheme.censor_time, rtol=0, atol=1e-9):
                raise ValueError("type1 censored times must all equal censor_time")
        if self.scheme.kind == "type2":
            if int(status.sum()) != self.scheme.r:
                raise ValueError("type2 sample must contain exactly r failures")
            if censored.size:
                last = times[status == 1].max()
                if not np.allclose(censored, last, rtol=0, atol=1e-9):
                    raise ValueError("type2 censored times must equal the last failure time")

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def n_events(self) -> int:
        return int(self.status.sum())

    @property
    def n_censored(self) -> int:
        return self.n - self.n_events

    def scaled(self, c: float) -> "CensoredSample":
        """Same sample with all times (and any censor time) multiplied by c."""
        if c <= 0:
            raise ValueError("scale factor must be positive")
        scheme = self.scheme
        if scheme.kind == "type1":
            scheme = Scheme("type1", censor_time=scheme.censor_time * c)
        return CensoredSample(self.times * c, self.status, scheme)


@dataclass
class FitResult:
    """Point estimates with observed-information covariance."""

    model: str
    param_names: tuple[str, ...]
    params: np.ndarray
    loglik: float
    covariance: np.ndarray
    std_errors: np.ndarray
    converged: bool
    n_events: int
    n_censored: int
    diagnostics: dict = dc_field(default_factory=dict)

    def estimate(self, name: str) -> float:
        return float(self.params[self.param_names.index(name)])

    def se(self, name: str) -> float:
        return float(self.std_errors[self.param_names.index(name)])

    def n_params(self) -> int:
        return len(self.param_names)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "model": self.model,
            "params": {n: float(v) for n, v in zip(self.param_names, self.params)},
            "std_errors": {n: float(v) for n, v in zip(self.param_names, self.std_errors)},
            "covariance": np.asarray(self.covariance, dtype=float).tolist(),
            "loglik": float(self.loglik),
            "converged": bool(self.converged),
            "n_events": self.n_events,
            "n_censored": self.n_censored,
            "diagnostics": _jsonable(self.diagnostics),
        }

    def to_json(self, **extra) -> str:
        payload = self.to_dict()
        payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, payload: dict) -> "FitResult":
        names = tuple(payload["params"])
        result = cls(
            model=payload["model"],
            param_names=names,
            params=np.array([payload["params"][n] for n in names]),
            loglik=float(payload["loglik"]),
            covariance=np.array(payload["covariance"], dtype=float),
            std_errors=np.array([payload["std_errors"][n] for n in names]),
            converged=bool(payload["converged"]),
            n_events=int(payload["n_events"]),
            n_censored=int(payload["n_censored"]),
            diagnostics=dict(payload.get("diagnostics", {})),
        )
        return result


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    return obj


@dataclass
class JointFitResult(FitResult):
    """Joint lab+field fit, with the derived frailty rate mu = (scale/alpha)^beta."""

    mu_hat: float = float("nan")
    mu_hat_se: float = float("nan")

    def to_dict(self) -> dict:
        payload = super().to_dict()
        payload["mu_hat"] = float(self.mu_hat)
        payload["mu_hat_se"] = float(self.mu_hat_se)
        return payload


# ---------------------------------------------------------------------------
# log-likelihoods (full, including data-dependent constants)

_BIG = 1e300
_CLIP = 7.0e2


def _weibull_ll(x: np.ndarray, lt: np.ndarray, d: np.ndarray) -> float:
    la, lb = x
    b = math.exp(lb)
    z = b * (lt - la)
    val = np.sum(d * (lb - lt + z)) - np.sum(np.exp(np.minimum(z, _CLIP)))
    return float(val)


def _burr12_ll(x: np.ndarray, lt: np.ndarray, d: np.ndarray, fix_k: float | None) -> float:
    if fix_k is None:
        llam, lb, lk = x
        k = math.exp(lk)
    else:
        llam, lb = x
        k, lk = fix_k, math.log(fix_k)
    b = math.exp(lb)
    w = b * (lt - llam)
    u = np.logaddexp(0.0, w)
    val = np.sum(d * (lk + lb - lt + w - u)) - k * np.sum(u)
    return float(val)


def _extended_ll(x: np.ndarray, lt: np.ndarray, d: np.ndarray) -> float:
    llam, lb, lk, lg = x
    b, k, g = math.exp(lb), math.exp(lk), math.exp(lg)
    w = b * (lt - llam)
    u = np.logaddexp(0.0, w)
    ew = np.exp(np.minimum(w, _CLIP))
    with np.errstate(divide="ignore"):
        log_mix = np.log(k / (ew + 1.0) + g)
    val = np.sum(d * (lb - lt + w + log_mix)) - k * np.sum(u) - g * np.sum(ew)
    return float(val)


def _joint_ll(x: np.ndarray, lab: tuple, field: tuple) -> float:
    la, lb, llam, lk = x
    lt_l, d_l = lab
    lt_f, d_f = field
    return _weibull_ll(np.array([la, lb]), lt_l, d_l) + _burr12_ll(
        np.array([llam, lb, lk]), lt_f, d_f, None
    )


# ---------------------------------------------------------------------------
# generic maximizer: simplex over transformed parameters + Newton polish

_FD_REL = 1e-4


def _fd_grad(fn, x: np.ndarray) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(x.size):
        h = _FD_REL * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fn(xp) - fn(xm)) / (2 * h)
    return g


def _fd_hess(fn, x: np.ndarray, rel: float = _FD_REL, steps: np.ndarray | None = None) -> np.ndarray:
    n = x.size
    H = np.empty((n, n))
    if steps is None:
        steps = np.array([rel * max(1.0, abs(v)) for v in x])
    for i in range(n):
        for j in range(i + 1):
            hi, hj = steps[i], steps[j]
            xpp, xpm, xmp, xmm = (x.copy() for _ in range(4))
            xpp[i] += hi
            xpp[j] += hj
            xpm[i] += hi
            xpm[j] -= hj
            xmp[i] -= hi
            xmp[j] += hj
            xmm[i] -= hi
            xmm[j] -= hj
            H[i, j] = H[j, i] = (fn(xpp) - fn(xpm) - fn(xmp) + fn(xmm)) / (4 * hi * hj)
    return H


def _maximize(ll, x0: np.ndarray) -> tuple[np.ndarray, float, float, bool]:
    """Return (x_hat, loglik, scaled gradient norm, converged)."""

    def nll(x):
        if np.any(np.abs(x) > 60):
            return _BIG
        v = ll(x)
        return -v if np.isfinite(v) else _BIG

    opts = dict(xatol=1e-9, fatol=1e-11, maxiter=4000)
    res = minimize(nll, np.asarray(x0, dtype=float), method="Nelder-Mead", options=opts)
    res = minimize(nll, res.x, method="Nelder-Mead", options=opts)
    x = res.x
    f = nll(x)
    for _ in range(40):
        g = _fd_grad(nll, x)
        if np.linalg.norm(g, ord=np.inf) / max(1.0, abs(f)) < 1e-9:
            break
        H = _fd_hess(nll, x)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        t, accepted = 1.0, False
        for _ in range(25):
            xn = x - t * step
            fn_ = nll(xn)
            if fn_ < f:
                x, f, accepted = xn, fn_, True
                break
            t /= 2.0
        if not accepted:
            break
    gnorm = float(np.linalg.norm(_fd_grad(nll, x), ord=np.inf) / max(1.0, abs(f)))
    return x, -f, gnorm, gnorm < 1e-6


def _covariance(ll_orig, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, bool]:
    """Observed-information covariance on the original parameter scale."""
    H = _fd_hess(ll_orig, theta, steps=_FD_REL * np.abs(theta))
    info = -H
    if not np.all(np.isfinite(info)):
        n = theta.size
        return np.full((n, n), np.nan), np.full(n, np.nan), False
    w, V = np.linalg.eigh(0.5 * (info + info.T))
    if bool(np.all(w > 0)):
        cov = (V / w) @ V.T
        return 0.5 * (cov + cov.T), np.sqrt(np.diag(cov)), True
    w_clip = np.where(w > 1e-12 * max(1.0, w.max()), w, np.inf)
    cov = (V / w_clip) @ V.T
    cov = 0.5 * (cov + cov.T)
    return cov, np.sqrt(np.clip(np.diag(cov), 0.0, None)), False


# ---------------------------------------------------------------------------
# starting values from probability-plot linearization

def _km_curve(times: np.ndarray, status: np.ndarray):
    """Product-limit survival at distinct event times: (t, S(t-), S(t), at_risk, d)."""
    order = np.argsort(times, kind="stable")
    t_sorted = times[order]
    d_sorted = status[order]
    event_times = np.unique(t_sorted[d_sorted == 1])
    n = times.size
    rows = []
    s = 1.0
    for te in event_times:
        at_risk = int(np.sum(t_sorted >= te))
        deaths = int(np.sum((t_sorted == te) & (d_sorted == 1)))
        s_prev = s
        s = s * (1.0 - deaths / at_risk)
        rows.append((float(te), s_prev, s, at_risk, deaths))
    return rows


def _weibull_start(lt: np.ndarray, d: np.ndarray) -> np.ndarray:
    times = np.exp(lt)
    rows = _km_curve(times, d)
    xs, ys = [], []
    for te, s_prev, s, _, _ in rows:
        p_mid = 1.0 - 0.5 * (s_prev + s)
        if 0 < p_mid < 1:
            xs.append(math.log(te))
            ys.append(math.log(-math.log1p(-p_mid)))
    if len(xs) >= 2 and max(xs) > min(xs):
        slope, intercept = np.polyfit(xs, ys, 1)
        if slope > 0:
            return np.array([-intercept / slope, math.log(slope)])
    # degenerate plot: fall back to an exponential-like guess
    mean_t = float(np.sum(np.exp(lt)) / max(d.sum(), 1))
    return np.array([math.log(mean_t), 0.0])


def _burr12_start(lt: np.ndarray, d: np.ndarray, k0: float) -> np.ndarray:
    la, lb = _weibull_start(lt, d)
    b = math.exp(lb)
    log_median = la + math.log(math.log(2.0)) / b
    # match the Burr-XII median at the weibull-estimated median
    llam = log_median - math.log(math.expm1(math.log(2.0) / k0)) / b
    return np.array([llam, lb])


# ---------------------------------------------------------------------------
# public fitters

def _prep(sample: CensoredSample, min_events: int, what: str):
    if sample.n_events < min_events:
        raise InsufficientDataError(
            f"{what} needs at least {min_events} failures, got {sample.n_events}"
        )
    return np.log(sample.times), sample.status.astype(float)


def fit_weibull(sample: CensoredSample) -> FitResult:
    """Fit Weibull(alpha, beta) to right-censored data by maximum likelihood.

    Parameters
    ----------
    sample : CensoredSample
        At least 2 failures required.

    Returns
    -------
    FitResult
        Estimates ``alpha`` (scale) and ``beta`` (shape), the maximized
        log-likelihood, and observed-information standard errors.
    """
    lt, d = _prep(sample, 2, "weibull fit")
    x0 = _weibull_start(lt, d)
    x, ll_val, gnorm, converged = _maximize(lambda x: _weibull_ll(x, lt, d), x0)
    theta = np.exp(x)

    def ll_orig(p):
        return _weibull_ll(np.log(p), lt, d)

    cov, se, pd_ok = _covariance(ll_orig, theta)
    return FitResult(
        model="weibull",
        param_names=("alpha", "beta"),
        params=theta,
        loglik=ll_val,
        covariance=cov,
        std_errors=se,
        converged=converged and pd_ok,
        n_events=sample.n_events,
        n_censored=sample.n_censored,
        diagnostics={"grad_norm": gnorm, "hessian_pd": pd_ok},
    )


def fit_burr12(sample: CensoredSample, fix_k: float | None = None) -> FitResult:
    """Fit the Burr-XII field model; ``fix_k=1`` gives the log-logistic fit.

    Parameters
    ----------
    sample : CensoredSample
        At least 3 failures (2 when ``fix_k`` is supplied).
    fix_k : float, optional
        Hold the second shape parameter fixed instead of estimating it.

    Returns
    -------
    FitResult
        Free-k fits report ``("scale", "beta", "k")``; fixed-k fits report
        ``("scale", "beta")`` with the pinned value in ``diagnostics``.
    """
    if fix_k is not None and fix_k <= 0:
        raise ValueError("fix_k must be positive")
    lt, d = _prep(sample, 2 if fix_k is not None else 3, "Burr-XII fit")
    start2 = _burr12_start(lt, d, fix_k if fix_k is not None else 1.0)
    if fix_k is None:
        x0 = np.append(start2, 0.0)
        names = ("scale", "beta", "k")
    else:
        x0 = start2
        names = ("scale", "beta")
    x, ll_val, gnorm, converged = _maximize(lambda x: _burr12_ll(x, lt, d, fix_k), x0)
    theta = np.exp(x)

    def ll_orig(p):
        return _burr12_ll(np.log(p), lt, d, fix_k)

    cov, se, pd_ok = _covariance(ll_orig, theta)
    diagnostics = {"grad_norm": gnorm, "hessian_pd": pd_ok}
    if fix_k is not None:
        diagnostics["fixed_k"] = float(fix_k)
    return FitResult(
        model="loglogistic" if fix_k == 1 else "burr12",
        param_names=names,
        params=theta,
        loglik=ll_val,
        covariance=cov,
        std_errors=se,
        converged=converged and pd_ok,
        n_events=sample.n_events,
        n_censored=sample.n_censored,
        diagnostics=diagnostics,
    )


def fit_field_extended(sample: CensoredSample) -> FitResult:
    """Fit the four-parameter field family with a nonnegative frailty threshold.

    The survival function is ``[(t/scale)^beta + 1]^(-k) *
    exp[-gamma_mu (t/scale)^beta]``; ``gamma_mu`` absorbs the threshold/rate
    product that field data alone cannot separate.  The fit never drops below
    the nested Burr-XII fit: when the unconstrained optimum lands on the
    ``gamma_mu = 0`` boundary, the reduced solution is reported.
    """
    lt, d = _prep(sample, 4, "extended field fit")
    reduced = fit_burr12(sample)
    x0 = np.array(
        [
            math.log(reduced.estimate("scale")),
            math.log(reduced.estimate("beta")),
            math.log(reduced.estimate("k")),
            math.log(0.05),
        ]
    )
    x, ll_val, gnorm, converged = _maximize(lambda x: _extended_ll(x, lt, d), x0)
    names = ("scale", "beta", "k", "gamma_mu")
    if ll_val <= reduced.loglik + 1e-7 or x[3] < math.log(1e-10):
        cov = np.zeros((4, 4))
        cov[:3, :3] = reduced.covariance
        se = np.append(reduced.std_errors, 0.0)
        return FitResult(
            model="field_extended",
            param_names=names,
            params=np.append(reduced.params, 0.0),
            loglik=reduced.loglik,
            covariance=cov,
            std_errors=se,
            converged=reduced.converged,
            n_events=sample.n_events,
            n_censored=sample.n_censored,
            diagnostics={"boundary": True, "grad_norm": reduced.diagnostics["grad_norm"]},
        )
    theta = np.exp(x)

    def ll_orig(p):
        return _extended_ll(np.log(p), lt, d)

    cov, se, pd_ok = _covariance(ll_orig, theta)
    return FitResult(
        model="field_extended",
        param_names=names,
        params=theta,
        loglik=ll_val,
        covariance=cov,
        std_errors=se,
        converged=converged and pd_ok,
        n_events=sample.n_events,
        n_censored=sample.n_censored,
        diagnostics={"boundary": False, "grad_norm": gnorm, "hessian_pd": pd_ok},
    )


def fit_frailty_joint(lab: CensoredSample, field: CensoredSample) -> JointFitResult:
    """Fit the common-shape frailty model to lab and field data together.

    Maximizes the summed Weibull (lab) and Burr-XII (field) log-likelihoods
    over ``(alpha, beta, scale, k)`` with one shared ``beta``, then reports
    the implied frailty rate ``mu = (scale/alpha)^beta`` with a delta-method
    standard error.
    """
    lt_l, d_l = _prep(lab, 2, "joint fit (lab)")
    lt_f, d_f = _prep(field, 2, "joint fit (field)")
    lab_fit = fit_weibull(lab)
    field_fit = fit_burr12(field)
    w_l, w_f = lab.n_events, field.n_events
    beta0 = (w_l * lab_fit.estimate("beta") + w_f * field_fit.estimate("beta")) / (w_l + w_f)
    x0 = np.array(
        [
            math.log(lab_fit.estimate("alpha")),
            math.log(beta0),
            math.log(field_fit.estimate("scale")),
            math.log(field_fit.estimate("k")),
        ]
    )
    ll = lambda x: _joint_ll(x, (lt_l, d_l), (lt_f, d_f))
    x, ll_val, gnorm, converged = _maximize(ll, x0)
    theta = np.exp(x)

    def ll_orig(p):
        return _joint_ll(np.log(p), (lt_l, d_l), (lt_f, d_f))

    cov, se, pd_ok = _covariance(ll_orig, theta)
    alpha, beta, scale, _ = theta
    mu_hat = (scale / alpha) ** beta
    grad_mu = np.array(
        [
            -beta / alpha * mu_hat,
            mu_hat * math.log(scale / alpha),
            beta / scale * mu_hat,
            0.0,
        ]
    )
    mu_var = float(grad_mu @ cov @ grad_mu)
    return JointFitResult(
        model="frailty_joint",
        param_names=("alpha", "beta", "scale", "k"),
        params=theta,
        loglik=ll_val,
        covariance=cov,
        std_errors=se,
        converged=converged and pd_ok,
        n_events=lab.n_events + field.n_events,
        n_censored=lab.n_censored + field.n_censored,
        diagnostics={"grad_norm": gnorm, "hessian_pd": pd_ok},
        mu_hat=float(mu_hat),
        mu_hat_se=math.sqrt(mu_var) if mu_var > 0 else 0.0,
    )


# ---------------------------------------------------------------------------
# tests and summaries

class LRTestResult(tuple):
    """(statistic, p_value) pair from a likelihood-ratio test."""

    __slots__ = ()

    def __new__(cls, statistic: float, p_value: float):
        return tuple.__new__(cls, (float(statistic), float(p_value)))

    @property
    def statistic(self) -> float:
        return self[0]

    @property
    def p_value(self) -> float:
        return self[1]


def lr_test(full: FitResult, reduced: FitResult, df: int, boundary: bool = False) -> LRTestResult:
    """Likelihood-ratio test of a reduced model nested in a full model.

    ``boundary=True`` applies the 50:50 chi-square mixture appropriate when
    the reduced model pins a parameter at the edge of its range (for example
    ``gamma_mu = 0``).
    """
    if df <= 0:
        raise ValueError("df must be a positive parameter-count difference")
    stat = max(2.0 * (full.loglik - reduced.loglik), 0.0)
    if boundary:
        upper = chi2.sf(stat, df) if stat > 0 else 1.0
        lower = (chi2.sf(stat, df - 1) if df > 1 else (1.0 if stat <= 0 else 0.0))
        p = 0.5 * (upper + lower)
    else:
        p = chi2.sf(stat, df) if stat > 0 else 1.0
    return LRTestResult(stat, min(float(p), 1.0))


def aic(fit: FitResult | float, n_params: int | None = None) -> float:
    """Akaike information criterion, -2 loglik + 2 (number of parameters)."""
    if isinstance(fit, FitResult):
        return -2.0 * fit.loglik + 2.0 * fit.n_params()
    if n_params is None:
        raise ValueError("n_params is required when passing a raw log-likelihood")
    return -2.0 * float(fit) + 2.0 * n_params


@dataclass
class KaplanMeier:
    """Product-limit survival estimate with pointwise 95% intervals."""

    times: np.ndarray
    survival: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray

    def survival_at(self, t: float) -> float:
        idx = np.searchsorted(self.times, t, side="right") - 1
        return 1.0 if idx < 0 else float(self.survival[idx])

    def rows(self):
        for i in range(self.times.size):
            yield (
                float(self.times[i]),
                float(self.survival[i]),
                float(self.ci_lower[i]),
                float(self.ci_upper[i]),
                int(self.at_risk[i]),
                int(self.events[i]),
            )


def kaplan_meier(sample: CensoredSample, conf_level: float = 0.95) -> KaplanMeier:
    """Kaplan-Meier estimator with log(-log) pointwise confidence intervals."""
    rows = _km_curve(sample.times, sample.status.astype(float))
    if not rows:
        return KaplanMeier(
            times=np.empty(0),
            survival=np.empty(0),
            ci_lower=np.empty(0),
            ci_upper=np.empty(0),
            at_risk=np.empty(0, dtype=int),
            events=np.empty(0, dtype=int),
        )
    from scipy.stats import norm

    z = norm.ppf(0.5 + conf_level / 2.0)
    times, surv, lower, upper, at_risk, events = [], [], [], [], [], []
    greenwood = 0.0
    for te, _, s, n_risk, d in rows:
        times.append(te)
        surv.append(s)
        at_risk.append(n_risk)
        events.append(d)
        if d < n_risk:
            greenwood += d / (n_risk * (n_risk - d))
        else:
            greenwood = math.inf
        if 0 < s < 1 and math.isfinite(greenwood):
            sigma = math.sqrt(greenwood) / abs(math.log(s))
            lo = s ** math.exp(z * sigma)
            hi = s ** math.exp(-z * sigma)
        else:
            lo, hi = (0.0, 0.0) if s == 0 else (s, s)
        lower.append(lo)
        upper.append(hi)
    return KaplanMeier(
        times=np.array(times),
        survival=np.array(surv),
        ci_lower=np.array(lower),
        ci_upper=np.array(upper),
        at_risk=np.array(at_risk, dtype=int),
        events=np.array(events, dtype=int),
    )
