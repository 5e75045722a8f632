"""Inefficiency ratios of boundedly rational defenders and their upper bounds.

Both ratios compare a *true* expected loss against the rational optimum
``L(r*)`` taken over the whole interval ``[0, R]``, not over the menu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .game import SecurityGame, StrategySpace, expected_loss, losses, optimal_allocation
from .prospect import behavioral_optimal, check_alpha
from .quantal import check_rationality, defender_response, pne_limit


@dataclass(frozen=True)
class InefficiencyReport:
    value: float
    bound: float
    numerator: float
    denominator: float
    qre_support_size: int

    @property
    def within_bound(self) -> bool:
        return self.value <= self.bound


def quantal_anarchy_bound(loss_A: float, support_size: int, budget_R: float) -> float:
    """``max{A, 1/A} * |X_QRE| * e^R``."""
    if loss_A <= 0 or support_size < 1 or budget_R < 0:
        raise DomainError("need A > 0, support size >= 1 and R >= 0")
    return max(loss_A, 1 / loss_A) * support_size * math.exp(budget_R)


def weighting_bound(loss_A: float, budget_R: float) -> float:
    """``max{A, 1/A} * e^R``."""
    if loss_A <= 0 or budget_R < 0:
        raise DomainError("need A > 0 and R >= 0")
    return max(loss_A, 1 / loss_A) * math.exp(budget_R)


def _require_unit_exponential(game: SecurityGame) -> None:
    if not game.is_unit_exponential:
        raise PreconditionError("bound is only established for p(x) = exp(-x) on both sites")


def poqa_bound(game: SecurityGame, space: StrategySpace, support_size: int | None = None) -> float:
    _require_unit_exponential(game)
    return quantal_anarchy_bound(game.loss_A, len(space) if support_size is None else support_size, game.budget_R)


def pobw_bound(game: SecurityGame) -> float:
    _require_unit_exponential(game)
    return weighting_bound(game.loss_A, game.budget_R)


def _bound_or_nan(fn, *args) -> float:
    try:
        return fn(*args)
    except PreconditionError:
        return math.nan


def poqa(game: SecurityGame, space: StrategySpace, lambda_d: float) -> InefficiencyReport:
    """Price of quantal anarchy at rationality ``lambda_d``.

    For finite ``lambda_d`` every strategy has positive probability, so the
    QRE support is the whole menu. ``lambda_d = inf`` evaluates the limit,
    spreading mass evenly over the loss-minimising strategies.
    """
    if lambda_d == math.inf:
        support = pne_limit(game, space)
        ls = losses(game, space)
        numerator = float(np.mean(ls[list(support)]))
        size = len(support)
    else:
        check_rationality(lambda_d, "lambda_d")
        dist = defender_response(game, space, lambda_d)
        numerator = float(dist.probabilities @ dist.losses)
        size = len(space)
    denominator = expected_loss(game, optimal_allocation(game))
    bound = _bound_or_nan(poqa_bound, game, space, size)
    return InefficiencyReport(numerator / denominator, bound, numerator, denominator, size)


def pobw(game: SecurityGame, alpha: float) -> InefficiencyReport:
    """Price of behavioural probability weighting: ``L(r_hat) / L(r*)`` in true losses."""
    check_alpha(alpha)
    numerator = expected_loss(game, behavioral_optimal(game, alpha))
    denominator = expected_loss(game, optimal_allocation(game))
    bound = _bound_or_nan(pobw_bound, game)
    return InefficiencyReport(numerator / denominator, bound, numerator, denominator, 1)
