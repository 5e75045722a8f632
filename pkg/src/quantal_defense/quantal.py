"""Logit quantal responses and sensitivities of the defender's choice.

The defender picks strategy ``r`` from a finite menu with probability
proportional to ``exp(-lambda_d * L(r))``. As ``lambda_d`` grows the mass
concentrates on the loss-minimising strategy.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, PreconditionError
from .game import (
    TIE_TOL,
    SecurityGame,
    StrategySpace,
    _site1,
    closed_form_optimum,
    losses,
    optimal_allocation,
)

FD_REL_STEP = 1e-5


@dataclass(frozen=True)
class QuantalParams:
    lambda_d: float = 0.0
    lambda_a: float = 0.0

    def __post_init__(self):
        check_rationality(self.lambda_d, "lambda_d")
        check_rationality(self.lambda_a, "lambda_a")


@dataclass(frozen=True)
class ResponseDistribution:
    """Choice probabilities aligned with a strategy menu (or the two sites)."""

    probabilities: np.ndarray
    losses: np.ndarray
    labels: tuple[str, ...]

    def __getitem__(self, i):
        return float(self.probabilities[i])

    def __len__(self):
        return len(self.probabilities)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, map(float, self.probabilities)))


class AttackerSign(str, enum.Enum):
    MAXIMIZER = "maximizer"
    VERBATIM = "verbatim"


class LossCase(str, enum.Enum):
    """How the non-optimal strategies sit relative to the equalisation point."""

    SITE1_DOMINATES = "i"  # p1(r) > A p2(R - r) for every other strategy
    SITE2_DOMINATES = "ii"  # p1(r) < A p2(R - r) for every other strategy
    MIXED = "iii"
    TRIVIAL = "trivial"  # menu holds only the optimum


def check_rationality(value: float, name: str = "lambda") -> None:
    if not (value >= 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be finite and >= 0, got {value}")


def _logit(values: np.ndarray, lam: float) -> np.ndarray:
    # Softmax of -lam * values, shifted by the minimum so the largest weight is exp(0).
    w = np.exp(-lam * (values - values.min()))
    return w / w.sum()


def defender_response(game: SecurityGame, space: StrategySpace, lambda_d: float) -> ResponseDistribution:
    check_rationality(lambda_d, "lambda_d")
    ls = losses(game, space)
    return ResponseDistribution(_logit(ls, lambda_d), ls, space.labels)


def attacker_response(
    game: SecurityGame, alloc, lambda_a: float, sign: str | AttackerSign = AttackerSign.MAXIMIZER
) -> ResponseDistribution:
    """Logit choice over (site 1, site 2) after observing ``alloc``.

    ``maximizer`` weights by ``exp(+lambda_a * u)`` since the attacker wants
    the larger expected loss; ``verbatim`` uses ``exp(-lambda_a * u)``.
    """
    check_rationality(lambda_a, "lambda_a")
    sign = AttackerSign(sign)
    r = _site1(game, alloc)
    u = np.array(game.site_losses(r), dtype=float)
    if sign is AttackerSign.MAXIMIZER:
        probs = _logit(-u, lambda_a)
    else:
        probs = _logit(u, lambda_a)
    return ResponseDistribution(probs, u, ("site1", "site2"))


def sigma_lambda_derivative(game: SecurityGame, space: StrategySpace, lambda_d: float) -> np.ndarray:
    """d sigma(r_k) / d lambda_d for every strategy.

    Equal to ``sigma_k * sum_j sigma_j (L_j - L_k)``, i.e. ``sigma_k`` times
    the gap between the mean loss under sigma and ``L_k``.
    """
    dist = defender_response(game, space, lambda_d)
    ls, sigma = dist.losses, dist.probabilities
    # Pairwise gaps avoid cancellation in (mean - L_k) when sigma concentrates on k.
    gaps = ls[None, :] - ls[:, None]
    return sigma * (gaps @ sigma)


def pne_limit(game: SecurityGame, space: StrategySpace) -> tuple[int, ...]:
    """Indices of the loss-minimising strategies (support of the lambda -> inf limit)."""
    ls = losses(game, space)
    return tuple(int(i) for i in np.flatnonzero(ls <= ls.min() + TIE_TOL))


def locate_optimum(game: SecurityGame, space: StrategySpace, tol: float = 1e-9) -> int:
    """Index of the continuous optimum ``r*`` inside ``space``."""
    if game.is_unit_exponential and abs(math.log(game.loss_A)) < game.budget_R:
        r_star = closed_form_optimum(game.budget_R, game.loss_A)
    else:
        r_star = optimal_allocation(game).r
    idx = space.index_of(r_star, tol)
    if idx is None:
        raise PreconditionError(f"strategy space does not contain the optimum r*={r_star:.12g}")
    return idx


def classify_loss_case(
    game: SecurityGame, space: StrategySpace, opt_index: int | None = None
) -> tuple[LossCase, dict[str, list[int]]]:
    """Classify the menu by which site's loss dominates at each non-optimal strategy.

    Returns the case plus index lists ``site1``, ``site2`` and ``tied``
    (non-optimal strategies within the tie tolerance).
    """
    if opt_index is None:
        opt_index = locate_optimum(game, space)
    a, b = game.site_losses(np.clip(space.r, 0.0, game.budget_R))
    groups: dict[str, list[int]] = {"site1": [], "site2": [], "tied": []}
    for k in range(len(space)):
        if k == opt_index:
            continue
        if a[k] > b[k] + TIE_TOL:
            groups["site1"].append(k)
        elif b[k] > a[k] + TIE_TOL:
            groups["site2"].append(k)
        else:
            groups["tied"].append(k)
    if len(space) == 1:
        case = LossCase.TRIVIAL
    elif groups["tied"] or (groups["site1"] and groups["site2"]):
        case = LossCase.MIXED
    elif groups["site1"]:
        case = LossCase.SITE1_DOMINATES
    else:
        case = LossCase.SITE2_DOMINATES
    return case, groups


def _check_closed_form_game(game: SecurityGame) -> None:
    if not game.is_unit_exponential:
        raise PreconditionError("loss sensitivity closed forms need p(x) = exp(-x) on both sites")
    if not abs(math.log(game.loss_A)) < game.budget_R:
        raise PreconditionError(f"A={game.loss_A} gives a corner optimum; no interior r*")


def _loss_sensitivity_closed(game, space, lambda_d, opt, case, groups) -> float:
    R, A = game.budget_R, game.loss_A
    r = np.clip(space.r, 0.0, R)
    p1 = game.p1(r)
    q = game.p2(R - r)  # site-2 attack probabilities
    half_q_star = q[opt] / 2  # d/dA of A p2(R - r*(A)) with r*(A) = (R - ln A)/2

    ls = np.maximum(p1, A * q)
    shift = ls.min()
    e_star = math.exp(-lambda_d * (ls[opt] - shift))
    site1 = np.asarray(groups["site1"], dtype=int)
    site2 = np.asarray(groups["site2"], dtype=int)
    w1 = np.exp(-lambda_d * (p1[site1] - shift))
    w2 = np.exp(-lambda_d * (A * q[site2] - shift))
    total = e_star + w1.sum() + w2.sum()

    if case is LossCase.SITE1_DOMINATES:
        numer = -half_q_star * w1.sum()
    elif case is LossCase.SITE2_DOMINATES:
        numer = float(np.sum(w2 * (q[site2] - half_q_star)))
    else:
        numer = float(np.sum(q[site2] * w2)) - half_q_star * (w2.sum() + w1.sum())
    return lambda_d * e_star * numer / total**2


def sigma_loss_sensitivity(
    game: SecurityGame,
    space: StrategySpace,
    lambda_d: float,
    method: str = "closed_form",
) -> float:
    """d sigma(r*) / dA where the optimal strategy tracks ``r*(A) = (R - ln A)/2``.

    The other strategies keep their allocations; only the optimum moves with
    ``A``, as in the built-in menus that embed ``r*``.

    Args:
        method: ``"closed_form"`` (requires every non-optimal strategy on the
            same side of the equalisation point), ``"mixed"`` (closed form
            valid for any split, including mixed menus) or
            ``"finite_difference"`` (central difference on ``A`` with the
            optimum rebuilt at ``A +- h``).

    Raises:
        PreconditionError: the menu lacks ``r*``, the curves are not unit
            exponentials, or ``closed_form`` is asked for a mixed menu.
    """
    check_rationality(lambda_d, "lambda_d")
    _check_closed_form_game(game)
    opt = locate_optimum(game, space)
    if len(space) == 1:
        return 0.0
    if method == "finite_difference":
        return _loss_sensitivity_fd(game, space, lambda_d, opt)
    case, groups = classify_loss_case(game, space, opt)
    if method == "closed_form":
        if case is LossCase.MIXED:
            bad = groups["tied"] or (
                groups["site2"] if len(groups["site1"]) >= len(groups["site2"]) else groups["site1"]
            )
            names = ", ".join(f"{space.labels[k]} (r={space.allocations[k]:g})" for k in bad)
            raise PreconditionError(
                f"menu mixes site-1- and site-2-dominated strategies; violating: {names}"
            )
    elif method == "mixed":
        if groups["tied"]:
            k = groups["tied"][0]
            raise PreconditionError(
                f"strategy {space.labels[k]} sits on the equalisation kink; derivative undefined"
            )
        case = LossCase.MIXED
    else:
        raise DomainError(f"unknown method {method!r}")
    return _loss_sensitivity_closed(game, space, lambda_d, opt, case, groups)


def _loss_sensitivity_fd(game, space, lambda_d, opt) -> float:
    A = game.loss_A
    h = FD_REL_STEP * (1 + abs(A))

    def sigma_opt(a):
        g = game.with_loss(a)
        s = space.replace(opt, closed_form_optimum(g.budget_R, a))
        return defender_response(g, s, lambda_d)[opt]

    return (sigma_opt(A + h) - sigma_opt(A - h)) / (2 * h)


@dataclass(frozen=True)
class LossComparison:
    """sigma(r*) at two loss values, with the case that predicts their order."""

    loss_low: float
    loss_high: float
    sigma_low: float
    sigma_high: float
    case: LossCase

    @property
    def predicted(self) -> str:
        return "decreasing" if self.case is LossCase.SITE1_DOMINATES else "increasing"

    def holds(self) -> bool:
        if self.case is LossCase.SITE1_DOMINATES:
            return self.sigma_low > self.sigma_high
        return self.sigma_low < self.sigma_high

    def check(self) -> LossComparison:
        if not self.holds():
            raise AssertionError(
                f"expected sigma(r*) {self.predicted} in A under case {self.case.value}: "
                f"{self.sigma_low!r} at A={self.loss_low}, {self.sigma_high!r} at A={self.loss_high}"
            )
        return self


def compare_sigma_across_losses(
    game_template: SecurityGame,
    space_builder: Callable[[float], StrategySpace],
    A1: float,
    A2: float,
    lambda_d: float,
) -> LossComparison:
    """Evaluate sigma(r*) at two losses ``A1 < A2`` with the menu rebuilt for each.

    Both menus must fall in the same non-mixed case; call
    :meth:`LossComparison.check` to assert the predicted order.
    """
    if not A1 < A2:
        raise DomainError(f"need A1 < A2, got A1={A1}, A2={A2}")
    check_rationality(lambda_d, "lambda_d")
    sigmas, cases = [], []
    for A in (A1, A2):
        game = game_template.with_loss(A)
        space = space_builder(A)
        opt = locate_optimum(game, space)
        case, groups = classify_loss_case(game, space, opt)
        if case is LossCase.MIXED:
            bad = groups["tied"] + (groups["site2"] if len(groups["site1"]) >= len(groups["site2"]) else groups["site1"])
            raise PreconditionError(
                f"at A={A} the menu is mixed; violating strategies: "
                + ", ".join(space.labels[k] for k in bad)
            )
        cases.append(case)
        sigmas.append(defender_response(game, space, lambda_d)[opt])
    if cases[0] is not cases[1]:
        raise PreconditionError(
            f"menu changes case between A={A1} ({cases[0].value}) and A={A2} ({cases[1].value})"
        )
    return LossComparison(A1, A2, sigmas[0], sigmas[1], cases[0])
