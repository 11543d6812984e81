"""Verification oracles: seeded Monte Carlo of both generative models and
adaptive quadrature of the defining mixture integrals.

Random streams
--------------
Samples are processed in shards of ``SimulationConfig.shard_size``.  Shard
``s`` draws from ``numpy.random.Generator(Philox(SeedSequence(seed,
spawn_key=(s,))))``, a counter-based generator, so a sample's draws depend
only on the seed, the shard size and the sample's index.  Shards can run on
any number of worker threads; tallies are merged by addition, so the result is
bit-identical whatever the execution order.

Interest levels are drawn with ``Generator.gamma`` (Marsaglia-Tsang squeeze
for shape >= 1, a rejection sampler for shape < 1) or ``Generator.uniform``.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, stats

from .framework import FrameworkParams, GammaPrior, InterestPrior, UniformPrior, posterior
from .homogeneous import HomogeneousParams, IdentityNull, NormalShiftCurve, homogeneous_posterior
from .numerics import DomainError, normal_quantile

MIN_OCCUPANTS = 50


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error estimate={error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class SimulationConfig:
    samples: int
    seed: int = 0
    max_count_tracked: int = 20
    shard_size: int = 200_000
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.max_count_tracked < 1 or self.shard_size < 1 or self.workers < 1:
            raise DomainError("max_count_tracked, shard_size and workers must be >= 1")

    def shards(self):
        for index, start in enumerate(range(0, self.samples, self.shard_size)):
            yield index, min(self.shard_size, self.samples - start)

    def generator(self, shard: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=(shard,))))


@dataclass
class JointCountTable:
    """Tallies of (truth, j, k) cells; counts above ``max_count`` go to ``overflow``.

    ``discarded`` counts samples rejected by conditioning (p-value model).
    """

    counts: np.ndarray
    overflow: int = 0
    discarded: int = 0

    @classmethod
    def empty(cls, max_count: int, strong_axis: bool = True) -> "JointCountTable":
        shape = (2, max_count + 1, max_count + 1 if strong_axis else 1)
        return cls(np.zeros(shape, dtype=np.int64))

    @property
    def max_count(self) -> int:
        return self.counts.shape[1] - 1

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.overflow + self.discarded

    def tally(self, truth: bool, j: int, k: int = 0) -> int:
        return int(self.counts[int(truth), j, k])

    def occupants(self, j: int, k: int = 0) -> int:
        return int(self.counts[0, j, k] + self.counts[1, j, k])

    def merge(self, other: "JointCountTable") -> "JointCountTable":
        if self.counts.shape != other.counts.shape:
            raise ValueError("cannot merge tables of different shapes")
        return JointCountTable(self.counts + other.counts, self.overflow + other.overflow, self.discarded + other.discarded)

    __add__ = merge

    def posterior(self, j: int, k: int = 0, min_occupants: int = MIN_OCCUPANTS):
        """Empirical Pr(H | cell) and its binomial standard error, or None if the cell is too thin."""
        n = self.occupants(j, k)
        if n < min_occupants:
            return None
        p_hat = self.tally(True, j, k) / n
        return p_hat, math.sqrt(p_hat * (1.0 - p_hat) / n), n

    def cells(self):
        _, nj, nk = self.counts.shape
        for j in range(nj):
            for k in range(nk):
                yield j, k

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("truth,j,k,tally\n")
        for truth in (0, 1):
            for j, k in self.cells():
                buf.write(f"{truth},{j},{k},{int(self.counts[truth, j, k])}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "max_count": self.max_count,
            "strong_axis": self.counts.shape[2] > 1,
            "total": self.total,
            "overflow": self.overflow,
            "discarded": self.discarded,
            "cells": [
                {"truth": bool(t), "j": j, "k": k, "tally": int(self.counts[t, j, k])}
                for t in (0, 1)
                for j, k in self.cells()
                if self.counts[t, j, k]
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "JointCountTable":
        table = cls.empty(data["max_count"], data.get("strong_axis", True))
        for cell in data["cells"]:
            table.counts[int(cell["truth"]), cell["j"], cell["k"]] = cell["tally"]
        table.overflow = data["overflow"]
        table.discarded = data.get("discarded", 0)
        if table.total != data["total"]:
            raise ValueError("table total does not match its tallies")
        return table


def _draw_interest(rng: np.random.Generator, prior: InterestPrior, n: int) -> np.ndarray:
    if isinstance(prior, GammaPrior):
        return rng.gamma(prior.shape, 1.0 / prior.rate, size=n)
    return rng.uniform(0.0, prior.upper, size=n)


def _run_shards(config: SimulationConfig, shard_fn: Callable[[np.random.Generator, int], JointCountTable]):
    jobs = list(config.shards())

    def run(job):
        index, size = job
        return shard_fn(config.generator(index), size)

    if config.workers == 1:
        parts = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(run, jobs))
    result = parts[0]
    for part in parts[1:]:
        result = result + part
    return result


def _tabulate(truth: np.ndarray, j: np.ndarray, k: np.ndarray, max_count: int, strong_axis: bool) -> JointCountTable:
    table = JointCountTable.empty(max_count, strong_axis)
    inside = (j <= max_count) & (k <= max_count)
    t, jj, kk = truth[inside].astype(np.int64), j[inside], k[inside]
    nk = table.counts.shape[2]
    flat = (t * (max_count + 1) + jj) * nk + kk
    table.counts += np.bincount(flat, minlength=table.counts.size).reshape(table.counts.shape)
    table.overflow = int((~inside).sum())
    return table


def simulate_framework(params: FrameworkParams, config: SimulationConfig) -> JointCountTable:
    """Monte Carlo of the weak/strong framework, tallying (truth, j, k)."""
    cw = params.weak_rate_multiplier
    weak, strong = params.weak, params.strong

    def shard(rng: np.random.Generator, size: int) -> JointCountTable:
        interest = _draw_interest(rng, params.interest, size)
        weak_attempts = rng.poisson(cw * interest)
        strong_attempts = rng.poisson(interest)
        truth = rng.random(size) < params.hypothesis_prior
        j = rng.binomial(weak_attempts, np.where(truth, weak.power, weak.alpha))
        k = rng.binomial(strong_attempts, np.where(truth, strong.power, strong.alpha))
        return _tabulate(truth, j, k, config.max_count_tracked, True)

    return _run_shards(config, shard)


def simulate_homogeneous(params: HomogeneousParams, config: SimulationConfig, p_floor: float) -> JointCountTable:
    """Monte Carlo of the p-value model, conditioned on no success below ``p_floor``.

    Each study draws a z statistic, N(0, 1) under a false hypothesis and
    N(shift, 1) under a true one; its p-value is ``1 - Phi(z)`` and it
    succeeds when the p-value is at most alpha.  Samples with any success
    whose p-value is below ``p_floor`` are discarded; the rest are tallied by
    (truth, number of successes).
    """
    if not isinstance(params.power_curve, NormalShiftCurve) or not isinstance(params.null_curve, IdentityNull):
        raise DomainError("simulation supports only a normal-shift power curve with exact p-values")
    if not 0.0 <= p_floor < params.alpha:
        raise DomainError(f"p_floor must lie in [0, alpha), got {p_floor!r}")
    shift = params.power_curve.shift
    z_success = normal_quantile(1.0 - params.alpha)
    z_floor = math.inf if p_floor == 0 else normal_quantile(1.0 - p_floor)

    def shard(rng: np.random.Generator, size: int) -> JointCountTable:
        interest = _draw_interest(rng, params.interest, size)
        attempts = rng.poisson(interest)
        truth = rng.random(size) < params.hypothesis_prior
        owner = np.repeat(np.arange(size), attempts)
        z = rng.standard_normal(owner.size) + shift * truth[owner]
        # p <= alpha  <=>  z >= z_success;  p < p_floor  <=>  z > z_floor
        successes = np.bincount(owner, weights=z >= z_success, minlength=size).astype(np.int64)
        too_strong = np.bincount(owner, weights=z > z_floor, minlength=size) > 0
        keep = ~too_strong
        table = _tabulate(truth[keep], successes[keep], np.zeros(int(keep.sum()), dtype=np.int64),
                          config.max_count_tracked, False)
        table.discarded = int(too_strong.sum())
        return table

    return _run_shards(config, shard)


def _integrate(log_f: Callable[[float], float], upper: float, singular_power: float = 0.0,
               rel_tol: float = 1e-11) -> float:
    """Integrate exp(log_f(x)) * x**singular_power over [0, upper].

    ``log_f`` must be finite on (0, upper].  The integrand is rescaled by its
    largest sampled value and split at the sampled mode; a negative
    ``singular_power`` is integrated exactly with the algebraic-weight rule
    on the first piece.
    """
    grid = np.linspace(0.0, upper, 257)[1:]
    logs = np.array([log_f(x) + singular_power * math.log(x) for x in grid])
    i_peak = int(np.argmax(logs))
    scale = float(logs[i_peak])
    mode = float(grid[i_peak])

    def plain(x):
        return math.exp(log_f(x) - scale + singular_power * math.log(x)) if x > 0 else 0.0

    def weighted(x):
        return math.exp(log_f(max(x, 1e-300)) - scale)

    pieces = []
    breaks = [0.0, mode, upper] if 0.0 < mode < upper else [0.0, upper]
    for a, b in zip(breaks[:-1], breaks[1:]):
        if a == 0.0 and singular_power < 0:
            out = integrate.quad(weighted, a, b, weight="alg", wvar=(singular_power, 0.0),
                                 epsabs=0.0, epsrel=rel_tol, limit=500, full_output=1)
        else:
            out = integrate.quad(plain, a, b, epsabs=0.0, epsrel=rel_tol, limit=500, full_output=1)
        pieces.append(out[:2])
    total = sum(v for v, _ in pieces)
    error = sum(e for _, e in pieces)
    if not total > 0 or error > 1e-9 * total:
        raise QuadratureError("adaptive quadrature did not converge",
                              total * math.exp(scale), error * math.exp(scale))
    return total * math.exp(scale)


def _upper_limit(log_f: Callable[[float], float]) -> float:
    # double until the integrand is e**-45 below the largest value seen and still falling
    x = 1.0
    peak = prev = log_f(x)
    while True:
        x *= 2.0
        val = log_f(x)
        peak = max(peak, val)
        if val < peak - 45.0 and val < prev:
            return x
        prev = val
        if x > 1e12:
            raise QuadratureError("integrand tail does not decay", math.nan, math.nan)


def _log_poisson(n: int, mean: float) -> float:
    if mean == 0:
        return 0.0 if n == 0 else -math.inf
    return -mean + n * math.log(mean) - math.lgamma(n + 1)


def _mixture_integral(prior: InterestPrior, log_kernel: Callable[[float], float]) -> float:
    """E[exp(log_kernel(I))] for I drawn from the interest prior."""
    if isinstance(prior, GammaPrior):
        kappa, beta = prior.shape, prior.rate
        norm = kappa * math.log(beta) - math.lgamma(kappa)

        def log_f(x):
            # gamma density without its x**(kappa - 1) factor
            return norm - beta * x + log_kernel(x)

        upper = _upper_limit(lambda x: log_f(x) + (kappa - 1.0) * math.log(x))
        return _integrate(log_f, upper, singular_power=kappa - 1.0)
    c = prior.upper
    return _integrate(lambda x: log_kernel(x) - math.log(c), c)


def quadrature_observation_probability(params: FrameworkParams, truth: bool, j: int, k: int) -> float:
    """Q_{j,k} by integrating prior density x Poisson pmfs over the interest level."""
    weak, strong, cw = params.weak, params.strong, params.weak_rate_multiplier
    p_w = weak.power if truth else weak.alpha
    p_s = strong.power if truth else strong.alpha

    def log_kernel(x):
        return _log_poisson(j, cw * p_w * x) + _log_poisson(k, p_s * x)

    return _mixture_integral(params.interest, log_kernel)


def quadrature_homogeneous_probability(params: HomogeneousParams, truth: bool, j: int, p: float) -> float:
    """R_{j,p} by integrating prior density x Poisson(band) x no-strong-success probability."""
    curve = params.power_curve if truth else params.null_curve
    below, top = curve(p), curve(params.alpha)
    band = top - below

    def log_kernel(x):
        return _log_poisson(j, band * x) - below * x

    return _mixture_integral(params.interest, log_kernel)


@dataclass
class CheckReport:
    """Empirical-vs-exact pmf comparison on a small count distribution."""

    samples: int
    empirical: np.ndarray
    expected: np.ndarray
    max_abs_deviation: float
    se_limit: float
    qualifying_cells: int
    passed: bool
    worst_z: float = field(default=0.0)


def _compare_pmf(observed: np.ndarray, expected_pmf: np.ndarray, samples: int, se_limit: float,
                 min_expected: float = 100.0) -> CheckReport:
    empirical = observed / samples
    deviation = np.abs(empirical - expected_pmf)
    se = np.sqrt(np.clip(expected_pmf * (1.0 - expected_pmf), 0.0, None) / samples)
    qualifying = expected_pmf * samples >= min_expected
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(qualifying, deviation / se, 0.0)
    worst = float(z.max()) if qualifying.any() else 0.0
    return CheckReport(
        samples=samples,
        empirical=empirical,
        expected=expected_pmf,
        max_abs_deviation=float(deviation.max()),
        se_limit=se_limit,
        qualifying_cells=int(qualifying.sum()),
        passed=bool(worst <= se_limit),
        worst_z=worst,
    )


def poisson_thinning_check(lam: float, p: float, config: SimulationConfig, se_limit: float = 4.0) -> CheckReport:
    """Thin Poisson(lam) counts with Bernoulli(p) and compare to Poisson(p * lam)."""
    if not lam > 0 or not 0.0 <= p <= 1.0:
        raise DomainError("need lam > 0 and 0 <= p <= 1")
    max_k = int(math.ceil(lam + 20 * math.sqrt(lam) + 20))

    def shard(rng, size):
        nu = rng.poisson(lam, size)
        zeta = rng.binomial(nu, p)
        return np.bincount(np.minimum(zeta, max_k + 1), minlength=max_k + 2)

    counts = sum(shard(config.generator(i), size) for i, size in config.shards())
    ks = np.arange(max_k + 2)
    if p == 0:
        expected = (ks == 0).astype(float)
    else:
        expected = stats.poisson.pmf(ks, p * lam)
        expected[-1] = stats.poisson.sf(max_k, p * lam)
    return _compare_pmf(counts, expected, config.samples, se_limit)


def negative_binomial_marginal_check(prior: GammaPrior, config: SimulationConfig, se_limit: float = 3.0) -> CheckReport:
    """Compare strong-attempt counts Poisson(I), I ~ Gamma(kappa, beta), with NB(kappa, beta/(beta+1))."""
    nb = stats.nbinom(prior.shape, prior.rate / (prior.rate + 1.0))
    max_n = int(nb.ppf(1 - 1e-9)) + 1

    def shard(rng, size):
        interest = _draw_interest(rng, prior, size)
        attempts = rng.poisson(interest)
        return np.bincount(np.minimum(attempts, max_n + 1), minlength=max_n + 2)

    counts = sum(shard(config.generator(i), size) for i, size in config.shards())
    ns = np.arange(max_n + 2)
    expected = nb.pmf(ns)
    expected[-1] = nb.sf(max_n)
    return _compare_pmf(counts, expected, config.samples, se_limit)


@dataclass
class CellComparison:
    """Empirical Pr(H | cell) against its closed form.

    ``within(n_se)`` uses the normal band ``|deviation| <= n_se * se`` when the
    cell holds at least 10 expected minority outcomes; thinner cells (posterior
    within ~10/n of 0 or 1) use the exact binomial tail at the same two-sided
    level, since the normal band is meaningless there.
    """

    j: int
    k: int
    closed_form: float
    estimate: Optional[float]
    se: Optional[float]
    occupants: int
    true_tally: int = 0

    @property
    def deviation(self) -> Optional[float]:
        return None if self.estimate is None else self.estimate - self.closed_form

    @property
    def z(self) -> Optional[float]:
        if self.estimate is None:
            return None
        return abs(self.deviation) / self.se if self.se > 0 else (0.0 if self.deviation == 0 else math.inf)

    def within(self, n_se: float) -> Optional[bool]:
        if self.estimate is None:
            return None
        n, p = self.occupants, self.closed_form
        if n * p * (1.0 - p) >= 10.0:
            return abs(self.deviation) <= n_se * self.se
        lower = stats.binom.cdf(self.true_tally, n, p)
        upper = stats.binom.sf(self.true_tally - 1, n, p)
        return bool(min(1.0, 2.0 * min(lower, upper)) >= 2.0 * stats.norm.sf(n_se))


def _compare_cell(table: JointCountTable, j: int, k: int, closed_form: float, min_occupants: int) -> CellComparison:
    # the standard error is the binomial one at the closed-form value
    n = table.occupants(j, k)
    if n < min_occupants:
        return CellComparison(j, k, closed_form, None, None, n)
    estimate = table.tally(True, j, k) / n
    se = math.sqrt(closed_form * (1.0 - closed_form) / n)
    return CellComparison(j, k, closed_form, estimate, se, n, table.tally(True, j, k))


def compare_framework_posteriors(params: FrameworkParams, table: JointCountTable,
                                 min_occupants: int = MIN_OCCUPANTS) -> list[CellComparison]:
    """Empirical vs closed-form Pr(H | j, k) for every tracked cell."""
    return [_compare_cell(table, j, k, posterior(params, j, k), min_occupants) for j, k in table.cells()]


def compare_homogeneous_posteriors(params: HomogeneousParams, table: JointCountTable, p_floor: float,
                                   min_occupants: int = MIN_OCCUPANTS) -> list[CellComparison]:
    """Empirical vs closed-form Pr(H | j successes, none below p_floor)."""
    return [
        _compare_cell(table, j, 0, homogeneous_posterior(params, j, p_floor), min_occupants)
        for j in range(table.max_count + 1)
    ]
