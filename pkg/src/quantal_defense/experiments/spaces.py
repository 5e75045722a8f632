"""The three built-in five-strategy menus (budget 10)."""
from __future__ import annotations

import math

from ..errors import PreconditionError
from ..game import StrategySpace, closed_form_optimum

TABLE_BUDGET = 10.0
SPACE_NAMES = ("A", "B", "C")

# Site-1 investments; None marks the loss-dependent optimum r3 = (10 - ln A)/2.
_ROWS = {
    "A": (4.0, 2.0, None, 3.5, 0.0),
    "B": (7.0, 5.4, None, 6.5, 10.0),
    "C": (10.0, 5.35, 5.0, 4.8, 0.0),
}
OPTIMUM_INDEX = 2


def builtin_space(name: str, loss_A: float = 1.0) -> StrategySpace:
    """Built-in menu ``name``; spaces A and B embed the optimum for ``loss_A``.

    Space C does not depend on ``loss_A``.
    """
    name = name.upper()
    if name not in _ROWS:
        raise PreconditionError(f"unknown built-in space {name!r}; expected one of A, B, C")
    rows = _ROWS[name]
    if None in rows:
        if not (loss_A > 0 and abs(math.log(loss_A)) < TABLE_BUDGET):
            raise PreconditionError(
                f"space {name} needs e^-10 < A < e^10 so r3 is feasible, got A={loss_A}"
            )
        r3 = closed_form_optimum(TABLE_BUDGET, loss_A)
        rows = tuple(r3 if v is None else v for v in rows)
    return StrategySpace(rows, TABLE_BUDGET)
