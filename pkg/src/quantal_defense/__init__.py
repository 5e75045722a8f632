"""Two-site defender-attacker security game with quantal and Prelec-weighted defenders."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, PreconditionError, ValidationWarning
from .game import (
    AttackOutcome,
    DefenseAllocation,
    ProbabilityCurve,
    SecurityGame,
    StrategySpace,
    Target,
    attacker_target,
    difference_function,
    expected_loss,
    losses,
    optimal_allocation,
    optimal_allocation_closed_form,
)
from .inefficiency import InefficiencyReport, pobw, pobw_bound, poqa, poqa_bound
from .prospect import (
    PrelecWeight,
    TheoremCase,
    behavioral_optimal,
    perceived_loss,
    prelec,
    theorem_case,
    weighted_difference,
)
from .quantal import (
    LossCase,
    QuantalParams,
    ResponseDistribution,
    attacker_response,
    classify_loss_case,
    compare_sigma_across_losses,
    defender_response,
    pne_limit,
    sigma_lambda_derivative,
    sigma_loss_sensitivity,
)
