"""Declarative parameter sweeps over rationality levels and losses."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Mapping, Sequence

import numpy as np

from .. import __version__
from ..errors import ConfigError, DomainError, PreconditionError
from ..game import SecurityGame, StrategySpace
from ..inefficiency import poqa
from ..quantal import (
    LossCase,
    classify_loss_case,
    defender_response,
    pne_limit,
    sigma_lambda_derivative,
)
from .spaces import OPTIMUM_INDEX, SPACE_NAMES, TABLE_BUDGET, builtin_space

KINDS = ("lambda_sweep", "loss_sweep", "poqa_sweep")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "lambda_sweep": {
        "space": "C",
        "A_fixed": 1.0,
        "lambda_values": {"log_range": [1e-3, 1e4], "count": 100, "include_zero": True},
    },
    "loss_sweep": {
        "space": "A",
        "A_values": [0.5, 0.75, 1.0, 1.25, 1.5],
        "lambda_values": {"log_range": [1.0, 1e3], "count": 50},
    },
    "poqa_sweep": {
        "space": "C",
        "A_values": [0.5, 1.0, 1.5],
        "lambda_values": {"log_range": [10.0, 1e4], "count": 60},
    },
}

_FIELDS = ("kind", "space", "R", "A_values", "A_fixed", "lambda_values", "lambda_fixed", "output_path")


def expand_grid(value: Any, path: str) -> tuple[float, ...]:
    """Turn an explicit list or ``{"log_range": [lo, hi], "count": n}`` into floats.

    ``include_zero`` prepends 0 to a log range.
    """
    if isinstance(value, Mapping):
        unknown = set(value) - {"log_range", "count", "include_zero"}
        if unknown:
            raise ConfigError(f"unknown grid keys {sorted(unknown)}", path)
        rng = value.get("log_range")
        if not (isinstance(rng, Sequence) and len(rng) == 2):
            raise ConfigError("log_range must be [lo, hi]", f"{path}.log_range")
        lo, hi = (_number(v, f"{path}.log_range[{i}]") for i, v in enumerate(rng))
        if not 0 < lo < hi:
            raise ConfigError("log_range needs 0 < lo < hi", f"{path}.log_range")
        count = value.get("count", 50)
        if isinstance(count, bool) or not isinstance(count, int) or count < 2:
            raise ConfigError("count must be an integer >= 2", f"{path}.count")
        grid = [float(v) for v in np.logspace(math.log10(lo), math.log10(hi), count)]
        if value.get("include_zero", False):
            grid.insert(0, 0.0)
        values = tuple(grid)
    elif isinstance(value, Sequence) and not isinstance(value, str):
        values = tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))
    else:
        raise ConfigError("grid must be a list or a log_range mapping", path)
    if not values:
        raise ConfigError("grid must be non-empty", path)
    for i in range(1, len(values)):
        if not values[i] > values[i - 1]:
            raise ConfigError("grid must be strictly increasing", f"{path}[{i}]")
    return values


def _number(v: Any, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", path)
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError("must be finite", path)
    return v


@dataclass(frozen=True)
class SweepSpec:
    """One sweep. ``space`` is a built-in space name or an explicit list of site-1 investments."""

    kind: str
    space: str | tuple[float, ...] = "C"
    R: float = TABLE_BUDGET
    A_values: tuple[float, ...] | None = None
    A_fixed: float | None = None
    lambda_values: tuple[float, ...] | None = None
    lambda_fixed: float | None = None
    output_path: str | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], kind: str | None = None) -> SweepSpec:
        data = dict(data)
        if kind is not None:
            data.setdefault("kind", kind)
        unknown = set(data) - set(_FIELDS)
        if unknown:
            raise ConfigError(f"unknown fields {sorted(unknown)}")
        kind = data.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}", "kind")
        merged = {**_DEFAULTS[kind], **{k: v for k, v in data.items() if v is not None}}

        space = merged.get("space")
        if isinstance(space, str):
            if space.upper() not in SPACE_NAMES:
                raise ConfigError(f"unknown space {space!r}", "space")
            space = space.upper()
        elif isinstance(space, Sequence):
            space = tuple(_number(v, f"space[{i}]") for i, v in enumerate(space))
        else:
            raise ConfigError("space must be a name or a list of allocations", "space")

        R = _number(merged.get("R", TABLE_BUDGET), "R")
        if R <= 0:
            raise ConfigError("must be positive", "R")
        if isinstance(space, str) and R != TABLE_BUDGET:
            raise ConfigError(f"built-in spaces are defined for R={TABLE_BUDGET:g}", "R")

        A_values = A_fixed = None
        if "A_values" in merged:
            A_values = expand_grid(merged["A_values"], "A_values")
            for i, a in enumerate(A_values):
                if a <= 0:
                    raise ConfigError("losses must be positive", f"A_values[{i}]")
        if "A_fixed" in merged:
            A_fixed = _number(merged["A_fixed"], "A_fixed")
            if A_fixed <= 0:
                raise ConfigError("loss must be positive", "A_fixed")

        lambda_fixed = None
        if "lambda_fixed" in merged:
            lambda_fixed = _number(merged["lambda_fixed"], "lambda_fixed")
            if lambda_fixed < 0:
                raise ConfigError("rationality must be >= 0", "lambda_fixed")
            lambda_values = (lambda_fixed,)
        else:
            lambda_values = expand_grid(merged["lambda_values"], "lambda_values")
            if lambda_values[0] < 0:
                raise ConfigError("rationality must be >= 0", "lambda_values[0]")

        if kind == "lambda_sweep" and A_fixed is None:
            raise ConfigError("lambda_sweep needs A_fixed", "A_fixed")
        if kind in ("loss_sweep", "poqa_sweep") and A_values is None:
            A_values = (A_fixed,) if A_fixed is not None else None
            if A_values is None:
                raise ConfigError(f"{kind} needs A_values", "A_values")
        if kind == "loss_sweep" and space not in ("A", "B"):
            raise ConfigError("loss_sweep rebuilds the optimum per loss; use space A or B", "space")

        output_path = merged.get("output_path")
        if output_path is not None and not isinstance(output_path, str):
            raise ConfigError("must be a string", "output_path")
        spec = cls(kind, space, R, A_values, A_fixed, lambda_values, lambda_fixed, output_path)
        if isinstance(space, tuple):
            try:
                StrategySpace(space, R)
            except DomainError as exc:
                raise ConfigError(str(exc), "space") from None
        return spec

    def build_space(self, loss_A: float) -> StrategySpace:
        if isinstance(self.space, str):
            return builtin_space(self.space, loss_A)
        return StrategySpace(self.space, self.R)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        if isinstance(self.space, tuple):
            d["space"] = list(self.space)
        for k in ("A_values", "lambda_values"):
            if d[k] is not None:
                d[k] = list(d[k])
        return d


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[dict[str, Any]]
    metadata: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=float)


def _metadata(spec: SweepSpec, spaces: dict[str, StrategySpace], notes=()) -> dict[str, Any]:
    return {
        "tool": "quantal_defense",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "spec": spec.to_dict(),
        "game": {"R": spec.R, "p1": "exp(-r)", "p2": "exp(-(R - r))"},
        "spaces": {k: {"allocations": list(s.allocations), "labels": list(s.labels)} for k, s in spaces.items()},
        "notes": list(notes),
    }


def run_lambda_sweep(spec: SweepSpec) -> SweepResult:
    """sigma over the menu and d sigma(best)/d lambda at each rationality level."""
    if spec.kind != "lambda_sweep":
        raise ConfigError(f"expected lambda_sweep, got {spec.kind}", "kind")
    game = SecurityGame(spec.R, spec.A_fixed)
    space = spec.build_space(spec.A_fixed)
    best = pne_limit(game, space)[0]
    sigma_cols = [f"sigma_{label}" for label in space.labels]
    rows = []
    for lam in spec.lambda_values:
        dist = defender_response(game, space, lam)
        row: dict[str, Any] = {"lambda": lam}
        row.update(zip(sigma_cols, map(float, dist.probabilities)))
        row["dsigma_opt_dlambda"] = float(sigma_lambda_derivative(game, space, lam)[best])
        rows.append(row)
    meta = _metadata(spec, {str(spec.A_fixed): space}, [f"optimal strategy column: {space.labels[best]}"])
    return SweepResult(["lambda", *sigma_cols, "dsigma_opt_dlambda"], rows, meta)


def run_loss_sweep(spec: SweepSpec) -> SweepResult:
    """sigma(r3) over (A, lambda) with spaces A/B rebuilt so r3 stays optimal.

    ``case_condition_ok`` records whether the menu still satisfies the
    single-side condition the space was designed for (site 1 dominating for
    space A, site 2 for space B).
    """
    if spec.kind != "loss_sweep":
        raise ConfigError(f"expected loss_sweep, got {spec.kind}", "kind")
    expected = LossCase.SITE1_DOMINATES if spec.space == "A" else LossCase.SITE2_DOMINATES
    rows, spaces = [], {}
    for A in spec.A_values:
        game = SecurityGame(spec.R, A)
        try:
            space = spec.build_space(A)
        except (PreconditionError, DomainError) as exc:
            raise ConfigError(f"A={A}: {exc}", "A_values") from None
        spaces[repr(A)] = space
        case, _ = classify_loss_case(game, space, OPTIMUM_INDEX)
        ok = case is expected
        for lam in spec.lambda_values:
            sigma = defender_response(game, space, lam)[OPTIMUM_INDEX]
            rows.append({"A": A, "lambda": lam, "sigma_opt": sigma, "case_condition_ok": ok})
    return SweepResult(["A", "lambda", "sigma_opt", "case_condition_ok"], rows, _metadata(spec, spaces))


def run_poqa_sweep(spec: SweepSpec) -> SweepResult:
    """PoQA, its log and the proved bound over (lambda, A)."""
    if spec.kind != "poqa_sweep":
        raise ConfigError(f"expected poqa_sweep, got {spec.kind}", "kind")
    games = {A: SecurityGame(spec.R, A) for A in spec.A_values}
    spaces = {A: spec.build_space(A) for A in spec.A_values}
    rows = []
    for lam in spec.lambda_values:
        for A in spec.A_values:
            report = poqa(games[A], spaces[A], lam)
            rows.append(
                {
                    "lambda": lam,
                    "A": A,
                    "poqa": report.value,
                    "ln_poqa": math.log(report.value),
                    "bound": report.bound,
                }
            )
    notes = []
    if spec.space == "C":
        notes.append("space C assumed for the PoQA sweep (the only built-in menu independent of A)")
    meta = _metadata(spec, {repr(A): s for A, s in spaces.items()}, notes)
    return SweepResult(["lambda", "A", "poqa", "ln_poqa", "bound"], rows, meta)


_RUNNERS = {
    "lambda_sweep": run_lambda_sweep,
    "loss_sweep": run_loss_sweep,
    "poqa_sweep": run_poqa_sweep,
}


def run_sweep(spec: SweepSpec) -> SweepResult:
    return _RUNNERS[spec.kind](spec)
