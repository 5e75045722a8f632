from .spaces import SPACE_NAMES, TABLE_BUDGET, builtin_space
from .sweeps import (
    SweepResult,
    SweepSpec,
    run_lambda_sweep,
    run_loss_sweep,
    run_poqa_sweep,
    run_sweep,
)

__all__ = [
    "SPACE_NAMES",
    "TABLE_BUDGET",
    "SweepResult",
    "SweepSpec",
    "builtin_space",
    "run_lambda_sweep",
    "run_loss_sweep",
    "run_poqa_sweep",
    "run_sweep",
]
