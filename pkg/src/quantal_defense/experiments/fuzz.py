"""Randomised checks of the PoQA and PoBW upper bounds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..game import SecurityGame, StrategySpace
from ..inefficiency import pobw, poqa


@dataclass(frozen=True)
class FuzzSummary:
    kind: str
    trials: int
    violations: int
    worst_ratio: float  # max value / bound over all trials

    def as_row(self) -> dict:
        return {
            "kind": self.kind,
            "trials": self.trials,
            "violations": self.violations,
            "worst_ratio": self.worst_ratio,
        }


def random_space(rng: np.random.Generator, budget: float, low: int = 2, high: int = 8) -> StrategySpace:
    size = int(rng.integers(low, high + 1))
    while True:
        allocs = rng.uniform(0.0, budget, size)
        if np.min(np.diff(np.sort(allocs))) > 1e-12:
            return StrategySpace(tuple(allocs), budget)


def fuzz_poqa(trials: int, rng: np.random.Generator, R=(1.0, 8.0), A=(0.1, 10.0), lam=(0.0, 1e3)):
    """PoQA <= bound over random budgets, losses, menus of 2-8 strategies and rationality levels."""
    violations, worst, records = 0, 0.0, []
    for _ in range(trials):
        game = SecurityGame(rng.uniform(*R), rng.uniform(*A))
        space = random_space(rng, game.budget_R)
        lam_d = rng.uniform(*lam)
        report = poqa(game, space, lam_d)
        ratio = report.value / report.bound
        worst = max(worst, ratio)
        violations += not report.within_bound
        records.append((game.budget_R, game.loss_A, len(space), lam_d, report.value, report.bound))
    return FuzzSummary("poqa", trials, violations, worst), records


def fuzz_pobw(trials: int, rng: np.random.Generator, R=(1.0, 8.0), A=(0.1, 10.0)):
    """PoBW <= bound over random budgets, losses and weighting exponents in (0, 1]."""
    violations, worst, records = 0, 0.0, []
    for _ in range(trials):
        game = SecurityGame(rng.uniform(*R), rng.uniform(*A))
        alpha = 1.0 - rng.uniform(0.0, 1.0)  # (0, 1]
        report = pobw(game, alpha)
        ratio = report.value / report.bound
        worst = max(worst, ratio)
        violations += not report.within_bound
        records.append((game.budget_R, game.loss_A, alpha, report.value, report.bound))
    return FuzzSummary("pobw", trials, violations, worst), records
