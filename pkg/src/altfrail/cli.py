"""Command-line interface: fitting, testing, planning, and the size study.

Artifacts are JSON or CSV files that embed provenance (command line, seed,
format version), so identical invocations with identical seeds are
byte-identical.  Exit codes: 0 success, 1 data/numeric error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import os
import shlex
import sys

import numpy as np

from . import __version__, dataio, hazard, inference, pivotal, planning, report
from .distributions import BurrXII, FrailtyField, Weibull
from .rng import DEFAULT_SEED


def _provenance(args, argv) -> dict:
    options = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("handler",) and v is not None
    }
    return {
        "command": "altfrail " + shlex.join(argv),
        "tool_version": __version__,
        "seed": getattr(args, "seed", None),
        "options": {k: (list(v) if isinstance(v, tuple) else v) for k, v in options.items()},
    }


def _load_sample(token: str, scheme: str | None) -> inference.CensoredSample:
    declared = _parse_scheme_token(scheme) if scheme else None
    if token == "appliance_b":
        sample = dataio.appliance_b_lab()
        return sample if declared is None else inference.CensoredSample(
            sample.times, sample.status, declared
        )
    with open(token, "r", encoding="utf-8") as fh:
        return dataio.parse_csv(fh.read(), scheme=declared)


def _parse_scheme_token(token: str) -> inference.Scheme:
    kind, _, value = token.partition(":")
    if kind == "complete":
        return inference.Scheme("complete")
    if kind == "type1":
        return inference.Scheme("type1", censor_time=float(value))
    if kind == "type2":
        return inference.Scheme("type2", r=int(value))
    raise ValueError(f"bad scheme {token!r}; use complete, type1:<time> or type2:<r>")


def _write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit_fit(fit: inference.FitResult, args, argv) -> None:
    prov = _provenance(args, argv)
    if args.format == "json":
        payload = fit.to_dict()
        payload["provenance"] = prov
        dataio.dump_json(payload, args.out)
    else:
        lines = [
            f"# format_version={dataio.FORMAT_VERSION}",
            f"# command={prov['command']}",
            f"# model={fit.model}",
            f"# loglik={fit.loglik!r}",
            f"# converged={fit.converged}",
            "param,estimate,std_error",
        ]
        for name, value, se in zip(fit.param_names, fit.params, fit.std_errors):
            lines.append(f"{name},{value!r},{se!r}")
        _write_text(args.out, "\n".join(lines) + "\n")


def _cmd_fit_lab(args, argv) -> int:
    sample = _load_sample(args.data, args.scheme)
    fit = inference.fit_weibull(sample)
    _emit_fit(fit, args, argv)
    if args.plot:
        dist = Weibull(fit.estimate("alpha"), fit.estimate("beta"))
        report.save_probability_plot(sample, [("weibull", dist.cdf)], args.plot)
    return 0


def _cmd_fit_field(args, argv) -> int:
    sample = _load_sample(args.data, args.scheme)
    if args.extended:
        fit = inference.fit_field_extended(sample)
    else:
        fit = inference.fit_burr12(sample, fix_k=args.fix_k)
    _emit_fit(fit, args, argv)
    if args.plot:
        k = fit.estimate("k") if "k" in fit.param_names else args.fix_k
        dist = BurrXII(fit.estimate("scale"), fit.estimate("beta"), k)
        report.save_probability_plot(sample, [(fit.model, dist.cdf)], args.plot)
    return 0


def _cmd_fit_joint(args, argv) -> int:
    lab = _load_sample(args.lab, args.lab_scheme)
    field = _load_sample(args.field, args.field_scheme)
    fit = inference.fit_frailty_joint(lab, field)
    _emit_fit(fit, args, argv)
    return 0


def _cmd_test_lr(args, argv) -> int:
    import json

    with open(args.full, "r", encoding="utf-8") as fh:
        full = inference.FitResult.from_dict(json.load(fh))
    with open(args.reduced, "r", encoding="utf-8") as fh:
        reduced = inference.FitResult.from_dict(json.load(fh))
    df = args.df if args.df is not None else full.n_params() - reduced.n_params()
    stat, p = inference.lr_test(full, reduced, df=df, boundary=args.boundary)
    dataio.dump_json(
        {"statistic": stat, "p_value": p, "df": df, "boundary": args.boundary},
        args.out,
        provenance=_provenance(args, argv),
    )
    return 0


def _scheme_from_flags(kind, n, r, events, tau, side) -> pivotal.CensoringScheme:
    try:
        return pivotal.CensoringScheme(kind, n, r=r, tau=tau, events=events)
    except ValueError as exc:
        raise ValueError(f"{side} scheme: {exc}")


def _cmd_test_pivotal(args, argv) -> int:
    lab = _scheme_from_flags(args.lab_kind, args.lab_n, args.lab_r, args.lab_events, None, "lab")
    field = _scheme_from_flags(
        args.field_kind, args.field_n, args.field_r, args.field_events, None, "field"
    )
    method = {"full": "full_refit", "normal": "normal_approx", None: None}[args.method]
    result = pivotal.pivotal_test(
        args.beta_l,
        args.beta_w,
        lab,
        field,
        k_hat=args.k,
        B=args.B,
        seed=args.seed,
        method=method,
        beta_w_se=args.beta_w_se,
        jobs=args.jobs,
    )
    dataio.dump_json(result.to_dict(), args.out, provenance=_provenance(args, argv))
    return 0


def _cmd_hazard_shape(args, argv) -> int:
    params = FrailtyField(args.alpha, args.beta, args.mu, args.k, args.gamma)
    shape = hazard.classify_shape(params)
    dataio.dump_json(
        {
            "label": shape.label.value,
            "turning_points": list(shape.turning_points),
            "params": {
                "alpha": args.alpha,
                "beta": args.beta,
                "mu": args.mu,
                "k": args.k,
                "gamma": args.gamma,
            },
        },
        args.out,
        provenance=_provenance(args, argv),
    )
    profile = None
    if args.profile_out or args.plot:
        if args.t_min is not None and args.t_max is not None:
            grid = np.geomspace(args.t_min, args.t_max, args.points)
        else:
            grid = hazard.default_profile_grid(params, args.points)
        profile = hazard.hazard_profile(params, grid)
    if args.profile_out:
        lines = [f"# command={_provenance(args, argv)['command']}", "t,hazard"]
        lines += [f"{t!r},{h!r}" for t, h in profile]
        _write_text(args.profile_out, "\n".join(lines) + "\n")
    if args.plot:
        report.save_hazard_profile(profile, args.plot, label=shape.label.value)
    return 0


_CRITERIA = {
    "logquantile": lambda a: planning.LogQuantile(a.p),
    "quantile": lambda a: planning.Quantile(a.p),
    "failprob": lambda a: planning.FailureProb(a.tau),
    "weibull-logquantile": lambda a: planning.HomogeneousLogQuantile(a.p),
}


def _cmd_plan_alt(args, argv) -> int:
    values = planning.PlanningValues(args.v0, args.v1, 1.0 / args.beta, args.mu, args.k)
    if args.criterion in ("logquantile", "quantile", "weibull-logquantile") and args.p is None:
        raise ValueError(f"criterion {args.criterion} requires --p")
    if args.criterion == "failprob" and args.tau is None:
        raise ValueError("criterion failprob requires --tau")
    criterion = _CRITERIA[args.criterion](args)
    if args.fail_fraction is not None:
        constraint = planning.PlanConstraint(
            fail_fractions=tuple(args.fail_fraction), n_total=args.n_total
        )
    else:
        constraint = planning.PlanConstraint(censor_time=args.censor, n_total=args.n_total)
    result = planning.optimize_plan(
        values, constraint, criterion, grid_step=args.grid_step, jobs=args.jobs
    )
    dataio.dump_json(result.to_dict(), args.out, provenance=_provenance(args, argv))
    grid = None
    if args.contour_out or args.plot:
        grid = planning.contour_grid(
            values, constraint, criterion, resolution=args.contour_resolution, jobs=args.jobs
        )
    if args.contour_out:
        lines = [f"# command={_provenance(args, argv)['command']}", "xi_low,pi,sd"]
        lines += [f"{x!r},{p!r},{s!r}" for x, p, s in grid.rows()]
        _write_text(args.contour_out, "\n".join(lines) + "\n")
    if args.plot:
        report.save_contour(grid, args.plot, optimum=(result.plan.xi_low, result.plan.pi))
    return 0


def _cmd_simulate_table1(args, argv) -> int:
    method = {"full": "full_refit", "normal": "normal_approx"}[args.method]
    result = pivotal.simulation_study(
        scenarios=tuple(args.scenarios.split(",")),
        betas=tuple(float(b) for b in args.betas.split(",")),
        sizes=tuple(int(n) for n in args.sizes.split(",")),
        replications=args.replications,
        B=args.B,
        seed=args.seed,
        method=method,
        jobs=args.jobs,
    )
    prov = _provenance(args, argv)
    result.to_csv(args.out, provenance={"command": prov["command"], "seed": args.seed})
    return 0


def _cmd_km(args, argv) -> int:
    sample = _load_sample(args.data, args.scheme)
    km = inference.kaplan_meier(sample)
    prov = _provenance(args, argv)
    lines = [
        f"# format_version={dataio.FORMAT_VERSION}",
        f"# command={prov['command']}",
        "time,survival,ci_lower,ci_upper,at_risk,events",
    ]
    for row in km.rows():
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    _write_text(args.out, "\n".join(lines) + "\n")
    if args.plot:
        report.save_km_plot(km, args.plot)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altfrail",
        description="Reliability toolkit linking lab ALT data to heterogeneous field data.",
    )
    parser.add_argument("--version", action="version", version=f"altfrail {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, handler, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(handler=handler)
        return p

    p = add("fit-lab", _cmd_fit_lab, "fit the Weibull lab model to censored data")
    p.add_argument("--data", required=True, help="dataset CSV path, or 'appliance_b'")
    p.add_argument("--scheme", help="override scheme: complete, type1:<time>, type2:<r>")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--plot", help="write a probability plot PNG")

    p = add("fit-field", _cmd_fit_field, "fit the Burr-XII (or extended) field model")
    p.add_argument("--data", required=True)
    p.add_argument("--scheme")
    p.add_argument("--fix-k", type=float, dest="fix_k", help="hold k fixed (1 = log-logistic)")
    p.add_argument("--extended", action="store_true", help="fit the nonzero-threshold family")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--plot")

    p = add("fit-joint", _cmd_fit_joint, "joint common-shape fit of lab and field data")
    p.add_argument("--lab", required=True)
    p.add_argument("--lab-scheme", dest="lab_scheme")
    p.add_argument("--field", required=True)
    p.add_argument("--field-scheme", dest="field_scheme")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("test-lr", _cmd_test_lr, "likelihood-ratio test from two fit artifacts")
    p.add_argument("--full", required=True)
    p.add_argument("--reduced", required=True)
    p.add_argument("--df", type=int)
    p.add_argument("--boundary", action="store_true")
    p.add_argument("--out", required=True)

    p = add("test-pivotal", _cmd_test_pivotal, "simulated-reference equal-shapes ratio test")
    p.add_argument("--beta-l", type=float, required=True, dest="beta_l")
    p.add_argument("--beta-w", type=float, required=True, dest="beta_w")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--lab-kind", choices=("complete", "type1", "type2"), default="type2")
    p.add_argument("--lab-n", type=int, required=True)
    p.add_argument("--lab-r", type=int)
    p.add_argument("--lab-events", type=int)
    p.add_argument("--field-kind", choices=("complete", "type1", "type2"), default="type1")
    p.add_argument("--field-n", type=int, required=True)
    p.add_argument("--field-r", type=int)
    p.add_argument("--field-events", type=int)
    p.add_argument("--B", type=int, default=5000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--method", choices=("full", "normal"))
    p.add_argument("--beta-w-se", type=float, dest="beta_w_se")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("hazard-shape", _cmd_hazard_shape, "classify the field hazard shape")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.add_argument("--profile-out", dest="profile_out", help="write a (t, hazard) CSV grid")
    p.add_argument("--t-min", type=float, dest="t_min")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--plot")

    p = add("plan-alt", _cmd_plan_alt, "optimize a two-stress test plan")
    p.add_argument("--v0", type=float, required=True)
    p.add_argument("--v1", type=float, required=True)
    p.add_argument("--beta", type=float, required=True, help="SEV scale is 1/beta")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--censor", type=float, help="shared test censor time (type-1 constraint)")
    p.add_argument(
        "--fail-fraction",
        type=float,
        nargs="+",
        dest="fail_fraction",
        help="expected failing fraction per stress (one value or low high)",
    )
    p.add_argument("--n-total", type=int, dest="n_total")
    p.add_argument("--criterion", choices=tuple(_CRITERIA), default="logquantile")
    p.add_argument("--p", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--grid-step", type=float, default=0.01, dest="grid_step")
    p.add_argument("--contour-out", dest="contour_out")
    p.add_argument("--contour-resolution", type=int, default=50, dest="contour_resolution")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--plot")
    p.add_argument("--out", required=True)

    p = add("simulate-table1", _cmd_simulate_table1, "size study for the ratio and LR tests")
    p.add_argument("--scenarios", default="I,II,III")
    p.add_argument("--betas", default="1.5,2.0")
    p.add_argument("--sizes", default="2000,5000")
    p.add_argument("--replications", type=int, default=2000)
    p.add_argument("--B", type=int, default=5000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--method", choices=("full", "normal"), default="normal")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("km", _cmd_km, "Kaplan-Meier estimate with pointwise intervals")
    p.add_argument("--data", required=True)
    p.add_argument("--scheme")
    p.add_argument("--out", required=True)
    p.add_argument("--plot")

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args, list(argv))
    except (ValueError, RuntimeError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
