"""Two-site sequential defender-attacker game.

The defender splits a budget ``R`` into ``r`` on site 1 and ``R - r`` on
site 2; the attacker observes the split and hits the site with the larger
expected loss. Site 1 has unit loss, site 2 has loss ``A``. All logarithms
in this package are natural logarithms.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, PreconditionError, ValidationWarning

TIE_TOL = 1e-12
BISECT_XTOL = 1e-10
BISECT_MAXITER = 200
# Feasibility slack for allocations computed in floating point (e.g. (R - ln A)/2).
_FEAS_TOL = 1e-12


@dataclass(frozen=True)
class ProbabilityCurve:
    """Probability of a successful attack as a function of investment.

    The built-in form is ``scale * exp(-x)``. A custom strictly decreasing,
    strictly convex curve can be supplied via :meth:`custom`.
    """

    scale: float = 1.0
    form: str = "exponential"
    func: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"curve scale must be positive and finite, got {self.scale}")
        if self.form not in ("exponential", "custom"):
            raise DomainError(f"unknown curve form {self.form!r}")
        if self.form == "custom" and self.func is None:
            raise DomainError("custom curve needs a callable")
        if self.form == "exponential" and self.scale > 1:
            warnings.warn(
                f"attack curve scale {self.scale} > 1: p(0) is not a probability",
                ValidationWarning,
                stacklevel=3,
            )

    @classmethod
    def custom(cls, func: Callable[[float], float]) -> ProbabilityCurve:
        return cls(scale=1.0, form="custom", func=func)

    @property
    def is_unit_exponential(self) -> bool:
        return self.form == "exponential" and self.scale == 1.0

    def __call__(self, x):
        if self.form == "custom":
            if np.ndim(x):
                return np.array([self.func(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))
            return float(self.func(float(x)))
        if np.ndim(x):
            return self.scale * np.exp(-np.asarray(x, dtype=float))
        return self.scale * math.exp(-x)

    def check_shape(self, upper: float, n: int = 65) -> None:
        """Sampled positivity, strict monotonicity and strict convexity on [0, upper]."""
        xs = np.linspace(0.0, upper, n)
        ys = np.asarray(self(xs), dtype=float)
        if np.any(ys <= 0) or not np.all(np.isfinite(ys)):
            raise DomainError("attack curve must be positive and finite on [0, R]")
        if np.any(np.diff(ys) >= 0):
            raise DomainError("attack curve must be strictly decreasing on [0, R]")
        if np.any(np.diff(ys, 2) <= 0):
            raise DomainError("attack curve must be strictly convex on [0, R]")


@dataclass(frozen=True)
class SecurityGame:
    """Budget ``budget_R``, site-2 loss ``loss_A`` and the two attack curves.

    ``p1`` is evaluated at the site-1 investment ``r``; ``p2`` at ``R - r``.
    """

    budget_R: float
    loss_A: float
    p1: ProbabilityCurve = field(default_factory=ProbabilityCurve)
    p2: ProbabilityCurve = field(default_factory=ProbabilityCurve)

    def __post_init__(self):
        if not (self.budget_R > 0 and math.isfinite(self.budget_R)):
            raise DomainError(f"budget_R must be positive and finite, got {self.budget_R}")
        if not (self.loss_A > 0 and math.isfinite(self.loss_A)):
            raise DomainError(f"loss_A must be positive and finite, got {self.loss_A}")
        for curve in (self.p1, self.p2):
            if curve.form == "custom":
                curve.check_shape(self.budget_R)

    @property
    def is_unit_exponential(self) -> bool:
        return self.p1.is_unit_exponential and self.p2.is_unit_exponential

    def with_loss(self, loss_A: float) -> SecurityGame:
        return SecurityGame(self.budget_R, loss_A, self.p1, self.p2)

    def site_losses(self, r):
        """Return ``(p1(r), A * p2(R - r))``; vectorised over ``r``."""
        return self.p1(r), self.loss_A * self.p2(self.budget_R - r)


@dataclass(frozen=True)
class DefenseAllocation:
    """Investment ``r`` on site 1; site 2 receives ``budget - r``."""

    r: float
    budget: float

    def __post_init__(self):
        check_feasible(self.r, self.budget)

    @property
    def site2(self) -> float:
        return self.budget - self.r

    def as_pair(self) -> tuple[float, float]:
        return (self.r, self.budget - self.r)


@dataclass(frozen=True)
class StrategySpace:
    """Finite ordered menu of allocations (site-1 investments) for one budget."""

    allocations: tuple[float, ...]
    budget: float
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        allocs = tuple(float(a) for a in self.allocations)
        object.__setattr__(self, "allocations", allocs)
        if not allocs:
            raise DomainError("strategy space must be non-empty")
        for i, a in enumerate(allocs):
            try:
                check_feasible(a, self.budget)
            except DomainError as exc:
                raise DomainError(f"strategy {i}: {exc}") from None
        order = sorted(range(len(allocs)), key=allocs.__getitem__)
        for i, j in zip(order, order[1:]):
            if abs(allocs[i] - allocs[j]) <= 1e-12:
                raise DomainError(f"strategies {i} and {j} coincide (r={allocs[i]})")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"r{k + 1}" for k in range(len(allocs))))
        else:
            labels = tuple(self.labels)
            if len(labels) != len(allocs):
                raise DomainError("labels must match allocations in length")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_allocations(cls, allocations: Sequence[float], budget: float, labels=None):
        return cls(tuple(allocations), budget, None if labels is None else tuple(labels))

    def __len__(self) -> int:
        return len(self.allocations)

    @property
    def r(self) -> np.ndarray:
        return np.asarray(self.allocations, dtype=float)

    def index_of(self, r: float, tol: float = 1e-9) -> int | None:
        for i, a in enumerate(self.allocations):
            if abs(a - r) <= tol:
                return i
        return None

    def replace(self, index: int, r: float) -> StrategySpace:
        allocs = list(self.allocations)
        allocs[index] = r
        return StrategySpace(tuple(allocs), self.budget, self.labels)


class Target(enum.Enum):
    SITE1 = "site1"
    SITE2 = "site2"
    INDIFFERENT = "indifferent"


class AttackOutcome(NamedTuple):
    target: Target
    utility: float


def check_feasible(r: float, budget: float) -> None:
    if not math.isfinite(r):
        raise DomainError(f"allocation r={r} is not finite")
    if r < -_FEAS_TOL:
        raise DomainError(f"allocation r={r} violates lower bound 0")
    if r > budget + _FEAS_TOL:
        raise DomainError(f"allocation r={r} violates upper bound R={budget}")


def _site1(game: SecurityGame, alloc) -> float:
    if isinstance(alloc, DefenseAllocation):
        if alloc.budget != game.budget_R:
            raise DomainError(
                f"allocation budget {alloc.budget} does not match game budget {game.budget_R}"
            )
        r = alloc.r
    else:
        r = float(alloc)
    check_feasible(r, game.budget_R)
    return min(max(r, 0.0), game.budget_R)


def expected_loss(game: SecurityGame, alloc) -> float:
    """Defender's expected loss ``max{p1(r), A p2(R - r)}``.

    This is also the attacker's utility. ``alloc`` may be a
    :class:`DefenseAllocation` or a bare site-1 investment.
    """
    r = _site1(game, alloc)
    a, b = game.site_losses(r)
    return max(a, b)


def losses(game: SecurityGame, space: StrategySpace) -> np.ndarray:
    """Expected loss of every strategy in ``space``, in space order."""
    if space.budget != game.budget_R:
        raise DomainError(f"space budget {space.budget} does not match game budget {game.budget_R}")
    r = np.clip(space.r, 0.0, game.budget_R)
    a, b = game.site_losses(r)
    return np.maximum(a, b)


def attacker_target(game: SecurityGame, alloc) -> AttackOutcome:
    r = _site1(game, alloc)
    a, b = game.site_losses(r)
    if a > b + TIE_TOL:
        target = Target.SITE1
    elif b > a + TIE_TOL:
        target = Target.SITE2
    else:
        target = Target.INDIFFERENT
    return AttackOutcome(target, max(a, b))


def difference_function(game: SecurityGame, r: float) -> float:
    """``p1(r) - A p2(R - r)``; strictly decreasing, zero at the interior optimum."""
    r = _site1(game, r)
    a, b = game.site_losses(r)
    return a - b


def optimal_allocation(game: SecurityGame) -> DefenseAllocation:
    """Unique minimiser of :func:`expected_loss` over ``[0, R]``.

    Corners are detected from the sign of the difference function at the
    endpoints; otherwise the equalisation point is found by bisection.
    """
    R = game.budget_R
    lo, hi = difference_function(game, 0.0), difference_function(game, R)
    if lo <= 0:
        return DefenseAllocation(0.0, R)
    if hi >= 0:
        return DefenseAllocation(R, R)
    r = bisect(
        lambda x: difference_function(game, x), 0.0, R, xtol=BISECT_XTOL, maxiter=BISECT_MAXITER
    )
    return DefenseAllocation(r, R)


def has_interior_optimum(game: SecurityGame) -> bool:
    """Whether ``p1(0) > A p2(R)`` and ``p1(R) < A p2(0)``."""
    return difference_function(game, 0.0) > 0 and difference_function(game, game.budget_R) < 0


def closed_form_optimum(budget_R: float, loss_A: float) -> float:
    """``(R - ln A) / 2`` without any validation."""
    return (budget_R - math.log(loss_A)) / 2


def optimal_allocation_closed_form(game: SecurityGame) -> DefenseAllocation:
    """Closed-form optimum ``(R - ln A)/2`` for unit exponential curves.

    Raises:
        PreconditionError: curves are not ``exp(-x)`` or ``A`` is outside
            ``(e^-R, e^R)``; use :func:`optimal_allocation` instead.
    """
    if not game.is_unit_exponential:
        raise PreconditionError(
            "closed form needs p(x) = exp(-x) on both sites; use optimal_allocation"
        )
    R, A = game.budget_R, game.loss_A
    if not (-R < math.log(A) < R):
        raise PreconditionError(
            f"A={A} outside (e^-R, e^R): optimum is a corner; use optimal_allocation"
        )
    return DefenseAllocation(closed_form_optimum(R, A), R)
