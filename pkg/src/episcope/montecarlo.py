"""Hierarchical Beta-Bernoulli simulator for the accuracy estimator.

Checks the closed-form variance model empirically: per-episode accuracies are
drawn from a Beta distribution moment-matched to the prior (the model itself
is distribution-free over [0,1], so any family with the right two moments
works, and Beta fits in closed form), each episode is evaluated with Kq
Bernoulli queries, and the spread of the resulting mean accuracy across many
replications is compared against the formula.

Every replication owns an independent counter-based substream keyed by the
replication-indexed output of a SplitMix64 sequence at the master seed, and
the mean/variance reduction runs over the replication-indexed array, so
results are bit-identical for a given master seed no matter how many threads
run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .seeds import check_seed, rekey_philox, substream_seed, substream_seeds
from .variance import AccuracyPrior, EvalDesign, estimator_variance

THREADS_ENV_VAR = "EPISCOPE_THREADS"

# Replications per work unit. Fixed: results must not depend on it, but a
# stable value keeps profiles comparable.
_CHUNK = 4096

# Margin keeping the Beta fit away from the two-point boundary distribution.
_INTERIOR_SLACK = 1e-12


class DegeneratePriorError(ValueError):
    """A zero-variance prior has no Beta fit; sample the point mass instead."""


def fit_beta(prior: AccuracyPrior) -> tuple[float, float]:
    """Moment-matched Beta(alpha, beta) for the prior's mean and variance.

    With nu = mean*(1-mean)/var - 1, alpha = mean*nu and beta = (1-mean)*nu
    reproduce both moments exactly.
    """
    mean, var = prior.mean, prior.variance
    if var == 0.0:
        raise DegeneratePriorError(
            "prior std is 0; there is no Beta fit (use the point mass at the mean)"
        )
    if not 0.0 < mean < 1.0:
        raise ValueError(f"Beta fit needs 0 < mean < 1, got {mean}")
    bound = mean * (1.0 - mean)
    if var >= bound - _INTERIOR_SLACK:
        raise ValueError(
            f"prior variance {var:.6g} is at or beyond the two-point boundary "
            f"{bound:.6g}; no interior Beta distribution has these moments"
        )
    nu = bound / var - 1.0
    return mean * nu, (1.0 - mean) * nu


@dataclass(frozen=True)
class SimConfig:
    """One simulation: prior, design, replication count and master seed."""

    prior: AccuracyPrior
    design: EvalDesign
    replications: int
    master_seed: int

    def __post_init__(self) -> None:
        if isinstance(self.replications, bool) or not isinstance(self.replications, int):
            raise ValueError(f"replications must be an integer, got {self.replications!r}")
        if self.replications < 2:
            raise ValueError("replications must be >= 2 (sample variance needs two points)")
        check_seed(self.master_seed, "master_seed")
        if self.prior.std > 0.0:
            # Raises unless an interior Beta fit exists.
            fit_beta(self.prior)


@dataclass(frozen=True)
class SimReport:
    """Empirical vs. theoretical moments of the mean-accuracy estimator."""

    empirical_mean: float
    empirical_var: float
    theoretical_mean: float
    theoretical_var: float
    rel_var_error: float
    replications: int

    def to_dict(self) -> dict[str, float | int]:
        return {
            "empirical_mean": self.empirical_mean,
            "empirical_var": self.empirical_var,
            "theoretical_mean": self.theoretical_mean,
            "theoretical_var": self.theoretical_var,
            "rel_var_error": self.rel_var_error,
            "replications": self.replications,
        }


@dataclass(frozen=True)
class VarianceDecomposition:
    """Measured vs. expected pieces of the total-variance split.

    ``between`` is the variance of the true per-episode accuracies across all
    draws; ``within`` is the mean squared deviation of the query-estimated
    accuracy from the episode's true accuracy, expected a*(1-a)-adjusted and
    divided by Kq.
    """

    between_measured: float
    between_expected: float
    within_measured: float
    within_expected: float
    replications: int


def resolve_threads(threads: int | None = None) -> int:
    """Thread count from the argument, else the environment, else auto.

    Auto (0 or unset) selects serial execution: the per-replication draws are
    ~120-element arrays, far too small for the RNG calls to release the GIL
    productively, and measured thread pools run slower than one thread here.
    Explicit positive values are honored; results are identical either way.
    """
    if threads is None:
        raw = os.environ.get(THREADS_ENV_VAR, "0")
        try:
            threads = int(raw)
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from exc
    if threads < 0:
        raise ValueError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        threads = 1
    return threads


def _fill_chunk(
    a_tilde: np.ndarray,
    lo: int,
    hi: int,
    seeds: np.ndarray,
    alpha_beta: tuple[float, float] | None,
    mean: float,
    kp: int,
    kq: int,
) -> None:
    bitgen = np.random.Philox(key=0)
    rng = np.random.Generator(bitgen)
    denom = kp * kq
    for r in range(lo, hi):
        rekey_philox(bitgen, int(seeds[r]))
        if alpha_beta is None:
            counts = rng.binomial(kq, mean, size=kp)
        else:
            a_p = rng.beta(alpha_beta[0], alpha_beta[1], size=kp)
            counts = rng.binomial(kq, a_p)
        a_tilde[r] = counts.sum() / denom


def _accuracy_samples(config: SimConfig, threads: int | None) -> np.ndarray:
    """The mean-accuracy estimate from each replication, in index order."""
    prior, design = config.prior, config.design
    alpha_beta = None if prior.std == 0.0 else fit_beta(prior)
    seeds = substream_seeds(config.master_seed, config.replications)
    a_tilde = np.empty(config.replications)
    kp, kq = design.episodes, design.queries_per_episode

    n_threads = resolve_threads(threads)
    bounds = [
        (lo, min(lo + _CHUNK, config.replications))
        for lo in range(0, config.replications, _CHUNK)
    ]
    if n_threads <= 1 or len(bounds) <= 1:
        for lo, hi in bounds:
            _fill_chunk(a_tilde, lo, hi, seeds, alpha_beta, prior.mean, kp, kq)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futures = [
                pool.submit(_fill_chunk, a_tilde, lo, hi, seeds, alpha_beta, prior.mean, kp, kq)
                for lo, hi in bounds
            ]
            for future in futures:
                future.result()
    return a_tilde


def simulate(config: SimConfig, threads: int | None = None) -> SimReport:
    """Run the full simulation and compare moments against the closed form.

    Each replication draws Kp episode accuracies (Beta, or the point mass for
    a zero-variance prior), simulates Kq Bernoulli queries per episode via a
    binomial draw of the success count, and averages the per-episode
    empirical accuracies. Reported variance uses divisor replications-1.
    """
    a_tilde = _accuracy_samples(config, threads)
    empirical_mean = float(np.mean(a_tilde))
    empirical_var = float(np.var(a_tilde, ddof=1))
    theoretical_var = estimator_variance(config.prior, config.design)
    if theoretical_var > 0.0:
        rel_var_error = abs(empirical_var / theoretical_var - 1.0)
    else:
        rel_var_error = 0.0 if empirical_var == 0.0 else float("inf")
    return SimReport(
        empirical_mean=empirical_mean,
        empirical_var=empirical_var,
        theoretical_mean=config.prior.mean,
        theoretical_var=theoretical_var,
        rel_var_error=rel_var_error,
        replications=config.replications,
    )


def sweep(
    prior: AccuracyPrior,
    kq_values: list[int],
    kp: int,
    replications: int,
    master_seed: int,
    threads: int | None = None,
) -> list[SimReport]:
    """One simulation per Kq value, each on its own derived master seed."""
    if not kq_values:
        raise ValueError("kq_values must be non-empty")
    check_seed(master_seed, "master_seed")
    reports = []
    for index, kq in enumerate(kq_values):
        config = SimConfig(
            prior=prior,
            design=EvalDesign(episodes=kp, queries_per_episode=kq),
            replications=replications,
            master_seed=substream_seed(master_seed, index),
        )
        reports.append(simulate(config, threads))
    return reports


def decompose_variance(config: SimConfig) -> VarianceDecomposition:
    """Instrument the two variance sources separately.

    Pools the true accuracy draws and the squared estimation errors across
    all replications and episodes; serial on purpose so the accumulation
    order is fixed.
    """
    prior, design = config.prior, config.design
    kp, kq = design.episodes, design.queries_per_episode
    alpha_beta = None if prior.std == 0.0 else fit_beta(prior)
    seeds = substream_seeds(config.master_seed, config.replications)

    bitgen = np.random.Philox(key=0)
    rng = np.random.Generator(bitgen)
    # Accumulate deviations from the known prior mean: numerically stable and
    # exactly zero for the point-mass case.
    sum_dev = np.empty(config.replications)
    sum_dev2 = np.empty(config.replications)
    sum_sq_err = np.empty(config.replications)
    for r in range(config.replications):
        rekey_philox(bitgen, int(seeds[r]))
        if alpha_beta is None:
            a_p = np.full(kp, prior.mean)
        else:
            a_p = rng.beta(alpha_beta[0], alpha_beta[1], size=kp)
        counts = rng.binomial(kq, a_p)
        err = counts / kq - a_p
        dev = a_p - prior.mean
        sum_dev[r] = dev.sum()
        sum_dev2[r] = (dev * dev).sum()
        sum_sq_err[r] = (err * err).sum()

    n_draws = config.replications * kp
    total_dev = float(np.sum(sum_dev))
    between = (float(np.sum(sum_dev2)) - total_dev * total_dev / n_draws) / (n_draws - 1)
    within = float(np.sum(sum_sq_err)) / n_draws
    a = prior.mean
    return VarianceDecomposition(
        between_measured=between,
        between_expected=prior.variance,
        within_measured=within,
        within_expected=(a * (1.0 - a) - prior.variance) / kq,
        replications=config.replications,
    )


def episode_counts(prior: AccuracyPrior, design: EvalDesign, seed: int) -> np.ndarray:
    """Per-episode correct-answer counts from one simulated evaluation.

    Useful for feeding downstream aggregation the same way a real run would:
    episode p contributes (counts[p], Kq).
    """
    check_seed(seed, "seed")
    rng = np.random.Generator(np.random.Philox(key=seed))
    kp, kq = design.episodes, design.queries_per_episode
    if prior.std == 0.0:
        a_p = np.full(kp, prior.mean)
    else:
        alpha, beta = fit_beta(prior)
        a_p = rng.beta(alpha, beta, size=kp)
    return rng.binomial(kq, a_p)
