"""Prelec probability weighting and the perceived-loss-minimising defender."""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from scipy.optimize import bisect

from .errors import DomainError, ValidationWarning
from .game import (
    BISECT_MAXITER,
    BISECT_XTOL,
    DefenseAllocation,
    SecurityGame,
    _site1,
    optimal_allocation,
)

INV_E = math.exp(-1.0)


def check_alpha(alpha: float) -> None:
    if not (0 < alpha <= 1):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")


@dataclass(frozen=True)
class PrelecWeight:
    """``w(p) = exp(-(-ln p)^alpha)``; ``alpha = 1`` is the identity."""

    alpha: float = 1.0

    def __post_init__(self):
        check_alpha(self.alpha)

    def __call__(self, p: float) -> float:
        return prelec(p, self.alpha)


def prelec(p: float, alpha: float) -> float:
    """Prelec weight of probability ``p``.

    Values in ``(1, inf)`` (from curves scaled above 1) are clamped to 1 with
    a :class:`ValidationWarning`.
    """
    check_alpha(alpha)
    if not p > 0 or math.isnan(p):
        raise DomainError(f"probability must be > 0, got {p}")
    if p > 1:
        if math.isinf(p):
            raise DomainError("probability must be finite")
        warnings.warn(f"probability {p} > 1 clamped to 1", ValidationWarning, stacklevel=2)
        return 1.0
    if alpha == 1:
        return float(p)
    return math.exp(-((-math.log(p)) ** alpha))


def weighted_site_losses(game: SecurityGame, alpha: float, r: float) -> tuple[float, float]:
    a, b = game.p1(r), game.p2(game.budget_R - r)
    return prelec(a, alpha), game.loss_A * prelec(b, alpha)


def perceived_loss(game: SecurityGame, alpha: float, alloc) -> float:
    """``max{w(p1(r)), A w(p2(R - r))}``."""
    r = _site1(game, alloc)
    return max(weighted_site_losses(game, alpha, r))


def weighted_difference(game: SecurityGame, alpha: float, r: float) -> float:
    """``w(p1(r)) - A w(p2(R - r))``, strictly decreasing in ``r``."""
    r = _site1(game, r)
    a, b = weighted_site_losses(game, alpha, r)
    return a - b


def behavioral_optimal(game: SecurityGame, alpha: float) -> DefenseAllocation:
    """Unique minimiser of :func:`perceived_loss` over ``[0, R]``."""
    check_alpha(alpha)
    R = game.budget_R
    if weighted_difference(game, alpha, 0.0) <= 0:
        return DefenseAllocation(0.0, R)
    if weighted_difference(game, alpha, R) >= 0:
        return DefenseAllocation(R, R)
    r = bisect(
        lambda x: weighted_difference(game, alpha, x),
        0.0,
        R,
        xtol=BISECT_XTOL,
        maxiter=BISECT_MAXITER,
    )
    return DefenseAllocation(r, R)


class TheoremCase(str, enum.Enum):
    CORNER_LOW = "corner_low"  # perceived site-2 loss dominates everywhere: r_hat = 0 <= r*
    CORNER_HIGH = "corner_high"  # perceived site-1 loss dominates everywhere: r_hat = R >= r*
    EQUAL = "equal"  # A = 1: r_hat = r*
    HAT_GREATER = "hat_greater"  # p1(r*) < 1/e and A < 1
    HAT_LESS = "hat_less"  # p1(r*) < 1/e and A > 1
    UNCLASSIFIED = "unclassified"  # p1(r*) >= 1/e, A != 1: no prediction


def theorem_case(game: SecurityGame, alpha: float) -> TheoremCase:
    """Predicted position of the behavioural optimum relative to ``r*``.

    Only meaningful for a distorting weight, so ``alpha`` must lie in (0, 1).
    """
    if not 0 < alpha < 1:
        raise DomainError(f"classification needs alpha in (0, 1), got {alpha}")
    R = game.budget_R
    if weighted_difference(game, alpha, 0.0) < 0:
        return TheoremCase.CORNER_LOW
    if weighted_difference(game, alpha, R) > 0:
        return TheoremCase.CORNER_HIGH
    A = game.loss_A
    if A == 1.0:
        return TheoremCase.EQUAL
    r_star = optimal_allocation(game).r
    if not 0 < r_star < R:
        return TheoremCase.UNCLASSIFIED
    if game.p1(r_star) < INV_E:
        return TheoremCase.HAT_GREATER if A < 1 else TheoremCase.HAT_LESS
    return TheoremCase.UNCLASSIFIED

