"""The kernels-of-Mallows EDA for the quadratic assignment problem.

Each iteration keeps the best half of the population as kernel centres,
converts the scheduled expected distance into a concentration parameter,
samples half a population from the kernel mixture (never at distance 0 from
the chosen centre) and merges it into the population by elitist truncation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .mallows import KernelSet, distance_pmf, kmm_sample_many, theta_from_expected_distance
from .qap import QapInstance, evaluate, evaluate_from, evaluate_many

SCHEDULE_KINDS = ("exponential", "linear")
KERNEL_MODES = ("kernels", "best_only")
EVALUATION_MODES = ("full", "auto")


class BudgetError(ValueError):
    """The evaluation budget does not allow a single iteration."""


@dataclass(frozen=True)
class Schedule:
    """Target expected distance per iteration, falling from ``ek_start`` to ``ek_end``.

    With progress ``p = t / t_max`` the exponential schedule returns
    ``ek_start - delta(p) * (ek_start - ek_end)`` where
    ``delta(p) = (exp(-gamma p) - 1) / (exp(-gamma) - 1)`` rises steeply
    from 0 to 1, so most of the decrease happens early. The linear
    schedule uses ``p`` in place of ``delta(p)``.
    """

    ek_start: float
    ek_end: float
    gamma: float
    t_max: int
    kind: str = "exponential"

    def __post_init__(self):
        if not self.ek_start > self.ek_end > 0:
            raise ValueError("need ek_start > ek_end > 0, got %r, %r" % (self.ek_start, self.ek_end))
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError("unknown schedule kind %r" % self.kind)

    def weight(self, t: int) -> float:
        """Fraction of the way from ``ek_end`` back to ``ek_start`` at iteration ``t``."""
        if not 0 <= t <= self.t_max:
            raise ValueError("iteration %d outside [0, %d]" % (t, self.t_max))
        p = t / self.t_max
        if self.kind == "linear":
            return 1.0 - p
        return 1.0 - exponential_progress(p, self.gamma)

    def target(self, t: int) -> float:
        w = self.weight(t)
        # written as a convex combination so both end points are exact
        return w * self.ek_start + (1.0 - w) * self.ek_end


def exponential_progress(q: float, gamma: float) -> float:
    return math.expm1(-gamma * q) / math.expm1(-gamma)


def schedule_target(sched: Schedule, t: int) -> float:
    return sched.target(t)


@dataclass
class EdaConfig:
    population_size: int = 972
    gamma: float = 5.14
    ek_start_fraction: float = 0.5
    ek_end: float = 0.25
    eval_budget: Optional[int] = None
    budget_multiplier: int = 1000
    seed: int = 0
    schedule_kind: str = "exponential"
    kernel_mode: str = "kernels"
    evaluation: str = "full"

    def budget_for(self, n: int) -> int:
        """Evaluation budget: ``eval_budget`` if set, else ``budget_multiplier * n**2``."""
        if self.eval_budget is not None:
            return int(self.eval_budget)
        return int(self.budget_multiplier) * n * n

    def validate(self, n: int) -> None:
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population size must be even and >= 2")
        if self.schedule_kind not in SCHEDULE_KINDS:
            raise ValueError("unknown schedule kind %r" % self.schedule_kind)
        if self.kernel_mode not in KERNEL_MODES:
            raise ValueError("unknown kernel mode %r" % self.kernel_mode)
        if self.evaluation not in EVALUATION_MODES:
            raise ValueError("unknown evaluation mode %r" % self.evaluation)
        ek_start = self.ek_start_fraction * n
        if not ek_start <= n - 1:
            raise ValueError("starting expected distance %g exceeds n-1=%d" % (ek_start, n - 1))
        if not ek_start > self.ek_end > 0:
            raise ValueError("need n*ek_start_fraction > ek_end > 0")
        if self.budget_for(n) < self.population_size:
            raise BudgetError(
                "budget too small: %d evaluations cannot cover a population of %d"
                % (self.budget_for(n), self.population_size)
            )


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    target_ek: float
    theta: float
    best_objective: int
    mean_objective: float


@dataclass
class RunResult:
    best_permutation: np.ndarray
    best_objective: int
    evaluations_used: int
    iterations: int
    wall_seconds: float
    trace: List[TraceRecord] = field(default_factory=list)


def _theta_for(n: int, target: float) -> float:
    # targets at or above the uniform mean distance map to the uniform law
    if target >= n - 1:
        return 0.0
    return theta_from_expected_distance(n, target)


def _evaluate_samples(inst, samples, centers, center_fit, ks, mode):
    if mode == "full":
        return evaluate_many(inst, samples)
    out = np.empty(len(samples), dtype=np.int64)
    cutoff = inst.n / 4
    for b, (sigma, center, f, k) in enumerate(zip(samples, centers, center_fit, ks)):
        if k < cutoff:
            out[b] = evaluate_from(inst, center, int(f), sigma)
        else:
            out[b] = evaluate(inst, sigma)
    return out


def run(inst: QapInstance, cfg: EdaConfig) -> RunResult:
    """Minimise ``inst`` with the kernels-of-Mallows EDA under ``cfg``.

    The run is a deterministic function of ``(inst, cfg)``.

    Raises
    ------
    BudgetError
        If the budget cannot pay for the initial population plus one
        iteration of ``population_size // 2`` samples.
    """
    start = time.perf_counter()
    n = inst.n
    cfg.validate(n)
    rng = np.random.default_rng(cfg.seed)
    pop_size = cfg.population_size
    n_samples = pop_size // 2
    n_kernels = 1 if cfg.kernel_mode == "best_only" else pop_size // 2
    budget = cfg.budget_for(n)

    iterations = (budget - pop_size) // n_samples
    if iterations < 1:
        raise BudgetError(
            "budget too small: %d evaluations leave no room for an iteration after "
            "initialising %d individuals" % (budget, pop_size)
        )
    sched = Schedule(
        ek_start=cfg.ek_start_fraction * n,
        ek_end=cfg.ek_end,
        gamma=cfg.gamma,
        t_max=max(iterations - 1, 1),
        kind=cfg.schedule_kind,
    )

    pop = rng.permuted(np.tile(np.arange(n, dtype=np.intp), (pop_size, 1)), axis=1)
    fit = evaluate_many(inst, pop)
    order = np.argsort(fit, kind="stable")
    pop, fit = pop[order], fit[order]
    evals = pop_size

    trace = []
    theta_cache = {}
    for t in range(iterations):
        target = sched.target(t)
        if target not in theta_cache:
            theta_cache[target] = _theta_for(n, target)
        theta = theta_cache[target]
        pmf = distance_pmf(n, theta, exclude_consensus=True)

        kernels = KernelSet(pop[:n_kernels])
        samples, which, ks = kmm_sample_many(kernels, pmf, n_samples, rng)
        new_fit = _evaluate_samples(inst, samples, kernels.centers[which], fit[which], ks, cfg.evaluation)
        evals += n_samples

        # stable sort over old-then-new keeps older individuals on ties
        merged = np.concatenate([pop, samples])
        merged_fit = np.concatenate([fit, new_fit])
        keep = np.argsort(merged_fit, kind="stable")[:pop_size]
        pop, fit = merged[keep], merged_fit[keep]

        trace.append(TraceRecord(t, target, theta, int(fit[0]), float(fit.mean())))

    return RunResult(
        best_permutation=pop[0].copy(),
        best_objective=int(fit[0]),
        evaluations_used=evals,
        iterations=iterations,
        wall_seconds=time.perf_counter() - start,
        trace=trace,
    )
