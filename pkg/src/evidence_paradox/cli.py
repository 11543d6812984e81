"""Command-line interface.

Subcommands: ``ppv``, ``posterior``, ``region``, ``simulate``, ``homogeneous``.
Every subcommand writes JSON (default) or CSV to stdout or ``--output``.
Exit codes: 0 success, 2 usage or validation error, 3 oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import classical, framework, homogeneous, simulator
from .classical import ErrorRates
from .framework import FrameworkParams, GammaPrior, PriorMismatchError, UniformPrior
from .numerics import DomainError, log_lower_incomplete_gamma

EXIT_USAGE = 2
EXIT_ORACLE = 3

QUADRATURE_TOL = 1e-8
MONTE_CARLO_SE = 4.0

CSV_HEADERS = {
    "ppv": ["event", "n", "j", "likelihood_ratio", "posterior"],
    "posterior": ["j", "k", "likelihood_ratio", "posterior", "paradox", "beta_star"],
    "region": ["beta", "kappa", "paradox", "posterior_1_0", "posterior_0_0", "beta_star"],
    "simulate": ["oracle", "truth", "j", "k", "closed_form", "oracle_value", "deviation", "se", "occupants", "status"],
    "homogeneous": ["j", "likelihood_ratio", "posterior", "gamma_alpha", "gamma_p", "threshold", "paradox"],
}


class UsageError(Exception):
    pass


class OracleFailure(Exception):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def parse_interest(text: str):
    """Parse ``gamma:<kappa>,<beta>`` or ``uniform:<C>``."""
    kind, _, rest = text.partition(":")
    try:
        values = [float(v) for v in rest.split(",")] if rest else []
    except ValueError:
        raise UsageError(f"bad --interest value {text!r}") from None
    if kind == "gamma" and len(values) == 2:
        return GammaPrior(*values)
    if kind == "uniform" and len(values) == 1:
        return UniformPrior(values[0])
    raise UsageError(f"--interest must be gamma:<kappa>,<beta> or uniform:<C>, got {text!r}")


def parse_grid(text: str, log_spacing: bool = False) -> np.ndarray:
    """Parse ``lo,hi,steps`` into an evenly (or log-evenly) spaced grid."""
    try:
        lo, hi, steps = text.split(",")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"grid must be lo,hi,steps, got {text!r}") from None
    if steps < 1 or not 0 < lo <= hi:
        raise UsageError(f"grid {text!r} is empty or not positive")
    if log_spacing:
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)


# -- parser --------------------------------------------------------------------

def _add_output(p):
    p.add_argument("--format", choices=["json", "csv"], default=None, help="output format (default json)")
    p.add_argument("--output", default=None, help="output file (default stdout)")
    p.add_argument("--config", default=None, help="JSON file of flag values; explicit flags override it")


def _add_framework(p, with_interest=True):
    g = p.add_argument_group("framework parameters")
    g.add_argument("--alpha-weak", type=float, help="weak-study false-positive rate (alpha_w)")
    g.add_argument("--gamma-weak", type=float, help="weak-study power (gamma_w)")
    g.add_argument("--alpha-strong", type=float, help="strong-study false-positive rate (alpha_S)")
    g.add_argument("--gamma-strong", type=float, help="strong-study power (gamma_S)")
    g.add_argument("--cw", type=float, help="weak attempt-rate multiplier c_w (default 1)")
    g.add_argument("--prior", type=float, help="prior probability of the hypothesis, P(H)")
    if with_interest:
        g.add_argument("--interest", help="interest prior: gamma:<kappa>,<beta> or uniform:<C>")


def _add_homogeneous(p):
    g = p.add_argument_group("p-value model parameters")
    g.add_argument("--alpha", type=float, help="publication cutoff alpha")
    g.add_argument("--p", type=float, help="p-value floor p < alpha")
    g.add_argument("--shift", type=float, help="normal-shift constant of the power curve")
    g.add_argument("--power-table", help="CSV (header; x,gamma_x) giving the power curve")
    g.add_argument("--null-table", help="CSV (header; x,a_x) giving the null p-value curve")
    g.add_argument("--effect", type=float, help="true effect size (derives --shift with --sd and --n)")
    g.add_argument("--sd", type=float, help="standard deviation of paired differences")
    g.add_argument("--n", type=int, help="sample size")
    g.add_argument("--interest", help="interest prior gamma:<kappa>,<beta>")
    g.add_argument("--prior", type=float, help="prior probability of the hypothesis, P(H)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evidence-paradox",
        description="Posteriors, paradox regions and oracle checks for improvable evidence under publication bias.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ppv", help="classical positive predictive value")
    p.add_argument("--alpha", type=float, help="false-positive rate")
    p.add_argument("--gamma", type=float, help="power")
    p.add_argument("--prior", type=float, help="prior probability of the hypothesis")
    p.add_argument("--n", type=int, help="number of studies attempted")
    p.add_argument("--j", type=int, help="exact number of successes among n")
    _add_output(p)

    p = sub.add_parser("posterior", help="posterior after j weak and k strong successes")
    _add_framework(p)
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--j-max", type=int)
    p.add_argument("--k-max", type=int)
    _add_output(p)

    p = sub.add_parser("region", help="paradox flag over a grid of gamma-prior rates")
    _add_framework(p, with_interest=False)
    p.add_argument("--beta-grid", help="lo,hi,steps")
    p.add_argument("--kappa-grid", help="lo,hi,steps (default: kappa = 1)")
    p.add_argument("--log-spacing", action="store_true", default=None, help="space grids geometrically")
    _add_output(p)

    p = sub.add_parser("simulate", help="check closed forms against Monte Carlo and quadrature")
    p.add_argument("--model", choices=["framework", "homogeneous"], default=None)
    _add_framework(p)
    g = p.add_argument_group("p-value model parameters")
    g.add_argument("--alpha", type=float)
    g.add_argument("--p", type=float)
    g.add_argument("--shift", type=float)
    p.add_argument("--oracle", choices=["montecarlo", "quadrature", "both"], default=None)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--max-count", type=int, help="largest count tallied per cell (default 20)")
    p.add_argument("--j-max", type=int, help="quadrature cells j <= j_max (default 5)")
    p.add_argument("--k-max", type=int, help="quadrature cells k <= k_max (default 5)")
    _add_output(p)

    p = sub.add_parser("homogeneous", help="single study type reporting p-values")
    _add_homogeneous(p)
    p.add_argument("--j-max", type=int, help="largest j in the posterior table (default 5)")
    _add_output(p)
    return parser


DEFAULTS = {
    "format": "json",
    "cw": 1.0,
    "model": "framework",
    "oracle": "both",
    "samples": 1_000_000,
    "seed": 0,
    "workers": 1,
    "max_count": 20,
    "j_max_quadrature": 5,
    "k_max_quadrature": 5,
    "log_spacing": False,
}


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in data.items():
            dest = key.replace("-", "_")
            if not hasattr(args, dest):
                raise UsageError(f"unknown config key {key!r} for {args.command}")
            if getattr(args, dest) is None:
                setattr(args, dest, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, "missing") is None:
            setattr(args, key, value)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command}: missing required {flags}")


def _framework_params(args, interest=None) -> FrameworkParams:
    _require(args, "alpha_weak", "gamma_weak", "alpha_strong", "gamma_strong", "prior")
    if interest is None:
        _require(args, "interest")
        interest = parse_interest(args.interest)
    return FrameworkParams(
        weak=ErrorRates(args.alpha_weak, args.gamma_weak),
        strong=ErrorRates(args.alpha_strong, args.gamma_strong),
        weak_rate_multiplier=args.cw,
        hypothesis_prior=args.prior,
        interest=interest,
    )


def _finite_or_none(x):
    return None if x is None or not math.isfinite(x) else x


def _interest_dict(prior):
    if isinstance(prior, GammaPrior):
        return {"kind": "gamma", "shape": prior.shape, "rate": prior.rate}
    return {"kind": "uniform", "upper": prior.upper}


# -- subcommands ----------------------------------------------------------------

def cmd_ppv(args) -> dict:
    _require(args, "alpha", "gamma", "prior")
    rates = ErrorRates(args.alpha, args.gamma)
    rows = []
    lr = classical.likelihood_ratio_single(rates)
    rows.append({"event": "single", "n": 1, "j": 1, "likelihood_ratio": lr,
                 "posterior": classical.posterior_from_lr(args.prior, lr)})
    if args.j is not None and args.n is None:
        raise UsageError("ppv: --j needs --n")
    if args.n is not None:
        lr = classical.likelihood_ratio_at_least_one(rates, args.n)
        rows.append({"event": "at_least_one", "n": args.n, "j": None, "likelihood_ratio": lr,
                     "posterior": classical.posterior_from_lr(args.prior, lr)})
        if args.j is not None:
            lr = classical.likelihood_ratio_exactly_j(rates, args.n, args.j)
            rows.append({"event": "exactly_j", "n": args.n, "j": args.j, "likelihood_ratio": lr,
                         "posterior": classical.posterior_from_lr(args.prior, lr)})
    return {"command": "ppv", "alpha": args.alpha, "gamma": args.gamma, "prior": args.prior, "rows": rows}


def _counts(value, maximum, name):
    if value is not None and maximum is not None:
        raise UsageError(f"posterior: give --{name} or --{name}-max, not both")
    if value is not None:
        return [value]
    return list(range((maximum or 0) + 1))


def cmd_posterior(args) -> dict:
    params = _framework_params(args)
    js = _counts(args.j, args.j_max, "j")
    ks = _counts(args.k, args.k_max, "k")
    if isinstance(params.interest, GammaPrior):
        beta_star = framework.paradox_rate_threshold(params.weak, params.strong)
        paradox = framework.is_paradoxical(params)
    else:
        beta_star = None
        paradox = framework.is_paradoxical_uniform_up_to(params, max(js) + max(ks))
    rows = [
        {"j": j, "k": k, "likelihood_ratio": framework.likelihood_ratio(params, j, k),
         "posterior": framework.posterior(params, j, k)}
        for j in js
        for k in ks
    ]
    return {"command": "posterior", "interest": _interest_dict(params.interest), "prior": params.hypothesis_prior,
            "paradox": paradox, "beta_star": beta_star, "rows": rows}


def cmd_region(args) -> dict:
    _require(args, "beta_grid")
    betas = parse_grid(args.beta_grid, args.log_spacing)
    kappas = parse_grid(args.kappa_grid, args.log_spacing) if args.kappa_grid else np.array([1.0])
    base = _framework_params(args, interest=GammaPrior(1.0, 1.0))
    beta_star = framework.paradox_rate_threshold(base.weak, base.strong)
    rows = []
    for kappa in kappas:
        for beta in betas:
            params = base.with_interest(GammaPrior(float(kappa), float(beta)))
            rows.append({
                "beta": float(beta),
                "kappa": float(kappa),
                "paradox": framework.is_paradoxical(params),
                "posterior_1_0": framework.posterior(params, 1, 0),
                "posterior_0_0": framework.posterior(params, 0, 0),
                "beta_star": beta_star,
            })
    return {"command": "region", "beta_star": beta_star, "rows": rows}


def _indexing_report(params: FrameworkParams, quad_values) -> str:
    """Which incomplete-gamma indexing of the uniform closed form reproduces quadrature."""
    c = params.interest.upper

    def candidate(truth, j, k, shift):
        rate_w, rate_s = params.success_rates(truth)
        a = rate_w + rate_s
        n = j + k
        log_q = (j * math.log(rate_w) + k * math.log(rate_s) - math.lgamma(j + 1) - math.lgamma(k + 1)
                 - math.log(c) - (n + 1) * math.log(a) + log_lower_incomplete_gamma(n + 1 + shift, a * c))
        return math.exp(log_q)

    matches = []
    for label, shift in (("standard gamma(j+k+1, aC)", 0), ("shifted gamma(j+k+2, aC)", 1)):
        if all(abs(candidate(t, j, k, shift) / q - 1) <= QUADRATURE_TOL for (t, j, k), q in quad_values.items()):
            matches.append(label)
    return " and ".join(matches) if matches else "none"


def _quadrature_rows(params: FrameworkParams, j_max: int, k_max: int):
    rows, values = [], {}
    for truth in (True, False):
        for j in range(j_max + 1):
            for k in range(k_max + 1):
                closed = framework.observation_probability(params, truth, j, k)
                quad = simulator.quadrature_observation_probability(params, truth, j, k)
                values[(truth, j, k)] = quad
                rel = quad / closed - 1.0
                rows.append({"oracle": "quadrature", "truth": truth, "j": j, "k": k, "closed_form": closed,
                             "oracle_value": quad, "deviation": rel, "se": None, "occupants": None,
                             "status": "pass" if abs(rel) <= QUADRATURE_TOL else "fail"})
    return rows, values


def _homogeneous_quadrature_rows(params, p_floor, j_max):
    rows = []
    for truth in (True, False):
        for j in range(j_max + 1):
            closed = homogeneous.homogeneous_observation_probability(params, truth, j, p_floor)
            quad = simulator.quadrature_homogeneous_probability(params, truth, j, p_floor)
            rel = quad / closed - 1.0
            rows.append({"oracle": "quadrature", "truth": truth, "j": j, "k": 0, "closed_form": closed,
                         "oracle_value": quad, "deviation": rel, "se": None, "occupants": None,
                         "status": "pass" if abs(rel) <= QUADRATURE_TOL else "fail"})
    return rows


def _monte_carlo_rows(comparisons):
    rows = []
    for c in comparisons:
        verdict = c.within(MONTE_CARLO_SE)
        status = "insufficient" if verdict is None else ("pass" if verdict else "fail")
        rows.append({"oracle": "montecarlo", "truth": None, "j": c.j, "k": c.k, "closed_form": c.closed_form,
                     "oracle_value": c.estimate, "deviation": c.deviation, "se": c.se,
                     "occupants": c.occupants, "status": status})
    return rows


def cmd_simulate(args) -> dict:
    config = simulator.SimulationConfig(samples=args.samples, seed=args.seed,
                                        max_count_tracked=args.max_count, workers=args.workers)
    j_max = args.j_max if args.j_max is not None else DEFAULTS["j_max_quadrature"]
    k_max = args.k_max if args.k_max is not None else DEFAULTS["k_max_quadrature"]
    rows = []
    report = {"command": "simulate", "model": args.model, "oracle": args.oracle,
              "samples": args.samples, "seed": args.seed}
    if args.model == "framework":
        params = _framework_params(args)
        report["interest"] = _interest_dict(params.interest)
        if args.oracle in ("quadrature", "both"):
            quad_rows, values = _quadrature_rows(params, j_max, k_max)
            rows += quad_rows
            if isinstance(params.interest, UniformPrior):
                report["incomplete_gamma_indexing"] = _indexing_report(params, values)
        if args.oracle in ("montecarlo", "both"):
            table = simulator.simulate_framework(params, config)
            rows += _monte_carlo_rows(simulator.compare_framework_posteriors(params, table))
    else:
        _require(args, "alpha", "p", "shift", "interest", "prior")
        interest = parse_interest(args.interest)
        hp = homogeneous.HomogeneousParams(args.alpha, homogeneous.NormalShiftCurve(args.shift),
                                           hypothesis_prior=args.prior, interest=interest)
        if args.oracle in ("quadrature", "both"):
            rows += _homogeneous_quadrature_rows(hp, args.p, j_max)
        if args.oracle in ("montecarlo", "both"):
            table = simulator.simulate_homogeneous(hp, config, args.p)
            rows += _monte_carlo_rows(simulator.compare_homogeneous_posteriors(hp, table, args.p))
    report["rows"] = rows
    statuses = [r["status"] for r in rows]
    report["failures"] = statuses.count("fail")
    mc = [s for r, s in zip(rows, statuses) if r["oracle"] == "montecarlo"]
    report["warnings"] = []
    if mc and all(s == "insufficient" for s in mc):
        report["warnings"].append(
            f"every Monte Carlo cell has fewer than {simulator.MIN_OCCUPANTS} occupants; no comparison made")
    if report["failures"]:
        raise OracleFailure(f"{report['failures']} cell(s) disagree with the closed form", report)
    return report


def cmd_homogeneous(args) -> dict:
    _require(args, "alpha", "p", "interest", "prior")
    shift = args.shift
    if args.effect is not None or args.sd is not None or args.n is not None:
        _require(args, "effect", "sd", "n")
        if shift is not None:
            raise UsageError("homogeneous: give --shift or --effect/--sd/--n, not both")
        shift = homogeneous.shift_from_design(args.effect, args.sd, args.n)
    if args.power_table:
        if shift is not None:
            raise UsageError("homogeneous: give --shift or --power-table, not both")
        curve = homogeneous.TableCurve.from_csv(args.power_table)
    elif shift is not None:
        curve = homogeneous.NormalShiftCurve(shift)
    else:
        raise UsageError("homogeneous: need --shift, --power-table or --effect/--sd/--n")
    null = homogeneous.TableCurve.from_csv(args.null_table) if args.null_table else homogeneous.IdentityNull()
    interest = parse_interest(args.interest)
    if not isinstance(interest, GammaPrior):
        raise UsageError("homogeneous: --interest must be gamma:<kappa>,<beta>")
    if not 0 < args.p < args.alpha:
        raise DomainError(f"need 0 < p < alpha, got p={args.p}, alpha={args.alpha}")
    params = homogeneous.HomogeneousParams(args.alpha, curve, null, args.prior, interest)
    bound = homogeneous.homogeneous_paradox_threshold(args.alpha, args.p, curve, null)
    j_max = 5 if args.j_max is None else args.j_max
    rows = [
        {"j": j, "likelihood_ratio": homogeneous.homogeneous_likelihood_ratio(params, j, args.p),
         "posterior": homogeneous.homogeneous_posterior(params, j, args.p)}
        for j in range(j_max + 1)
    ]
    return {
        "command": "homogeneous",
        "alpha": args.alpha,
        "p": args.p,
        "shift": shift,
        "gamma_alpha": bound.gamma_alpha,
        "gamma_p": bound.gamma_p,
        "threshold": _finite_or_none(bound.threshold),
        "threshold_unbounded": math.isinf(bound.threshold),
        "sufficient_threshold": _finite_or_none(bound.sufficient_threshold),
        "ratio_condition": bound.ratio_condition,
        "paradox": homogeneous.homogeneous_is_paradoxical(params, args.p),
        "rows": rows,
    }


COMMANDS = {
    "ppv": cmd_ppv,
    "posterior": cmd_posterior,
    "region": cmd_region,
    "simulate": cmd_simulate,
    "homogeneous": cmd_homogeneous,
}


# -- output ---------------------------------------------------------------------

def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if not math.isfinite(value) else f"{value:.10g}"
    return str(value)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, allow_nan=False) + "\n"
    header = CSV_HEADERS[report["command"]]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in report["rows"]:
        merged = {**report, **row}
        writer.writerow([_csv_cell(merged.get(col)) for col in header])
    return buf.getvalue()


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, PriorMismatchError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleFailure as exc:
        _emit(render(exc.report, args.format), args.output)
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except simulator.QuadratureError as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    for warning in report.get("warnings", []):
        print(f"warning: {warning}", file=sys.stderr)
    _emit(render(report, args.format), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
