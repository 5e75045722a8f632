"""Command-line interface.

Exit codes: 0 success, 1 configuration/usage error (including parameter values
outside their domain), 2 numerical precondition error (or a bound violation
found by ``fuzz-bounds``).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Sequence

import numpy as np

from .. import __version__
from ..errors import ConfigError, DomainError, PreconditionError
from ..game import (
    SecurityGame,
    StrategySpace,
    expected_loss,
    losses,
    optimal_allocation,
    optimal_allocation_closed_form,
)
from ..inefficiency import pobw
from ..prospect import behavioral_optimal, theorem_case
from ..quantal import defender_response
from .fuzz import fuzz_pobw, fuzz_poqa
from .output import write_output, write_rows
from .spaces import TABLE_BUDGET, builtin_space
from .sweeps import SweepSpec, run_sweep

log = logging.getLogger(__name__)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with parameters (flags override it)")
    common.add_argument("--out", help="output file; a sibling .meta.json is written next to it")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
    common.add_argument("--format", choices=("csv", "jsonl"), default=None)

    parser = _Parser(prog="quantal-defense", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    def space_args(p):
        p.add_argument("--space", help="built-in space A, B or C")
        p.add_argument("--allocations", type=_floats, help="explicit site-1 investments, comma-separated")

    p = add("qre", "defender's logit response over a menu")
    space_args(p)
    p.add_argument("--R", type=float)
    p.add_argument("--loss-A", dest="loss_A", type=float)
    p.add_argument("--lambda", dest="lambda_d", type=float)

    p = add("optimal", "rational optimum by bisection and in closed form")
    p.add_argument("--R", type=float)
    p.add_argument("--loss-A", dest="loss_A", type=float)

    for name, help_ in (
        ("sweep-lambda", "sigma over a rationality grid"),
        ("sweep-loss", "sigma(r3) over losses and rationality levels"),
        ("sweep-poqa", "PoQA and its bound over rationality levels and losses"),
    ):
        p = add(name, help_)
        space_args(p)
        p.add_argument("--R", type=float)
        p.add_argument("--loss-A", dest="loss_A", type=float, help="fixed loss")
        p.add_argument("--loss-values", dest="loss_values", type=_floats, help="loss grid")
        p.add_argument("--lambda", dest="lambda_d", type=float, help="fixed rationality level")
        p.add_argument("--lambda-values", dest="lambda_values", type=_floats)
        p.add_argument("--lambda-range", dest="lambda_range", type=float, nargs=2, metavar=("LO", "HI"))
        p.add_argument("--lambda-count", dest="lambda_count", type=int)

    p = add("prelec-compare", "behavioural vs rational optimum over weighting exponents")
    p.add_argument("--R", type=float)
    p.add_argument("--loss-A", dest="loss_A", type=float)
    p.add_argument("--alphas", type=_floats)

    p = add("fuzz-bounds", "randomised PoQA / PoBW bound checks")
    p.add_argument("--trials", type=int)
    return parser


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", "--config") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", "--config") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", "--config")
    return data


_NUMBER_KEYS = {"R", "loss_A", "lambda_d"}
_LIST_KEYS = {"allocations", "alphas"}


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_type(key: str, value: Any) -> None:
    if key in _NUMBER_KEYS and not _is_number(value):
        raise ConfigError(f"expected a number, got {value!r}", key)
    if key in _LIST_KEYS:
        if not isinstance(value, list) or not value:
            raise ConfigError("expected a non-empty list of numbers", key)
        for i, v in enumerate(value):
            if not _is_number(v):
                raise ConfigError(f"expected a number, got {v!r}", f"{key}[{i}]")
    if key == "space" and not isinstance(value, str):
        raise ConfigError("expected a space name", key)
    if key in ("trials", "seed") and (isinstance(value, bool) or not isinstance(value, int)):
        raise ConfigError(f"expected an integer, got {value!r}", key)


def _merge(config: dict, args: argparse.Namespace, keys: Sequence[str], defaults: dict) -> dict:
    out = dict(defaults)
    for k, v in config.items():
        if k in keys:
            _check_type(k, v)
            out[k] = v
    out.update({k: getattr(args, k) for k in keys if getattr(args, k, None) is not None})
    return out


def _space_from(params: dict, loss_A: float, budget: float) -> StrategySpace:
    allocs = params.get("allocations")
    if allocs is not None:
        return StrategySpace(tuple(allocs), budget)
    name = params.get("space") or "C"
    if budget != TABLE_BUDGET:
        raise ConfigError(f"built-in spaces are defined for R={TABLE_BUDGET:g}", "R")
    return builtin_space(name, loss_A)


def _emit(rows, columns, args, metadata) -> None:
    fmt = args.format or "csv"
    if args.out:
        write_output(rows, columns, args.out, fmt, metadata)
        log.info("wrote %d rows to %s", len(rows), args.out)
    else:
        write_rows(rows, columns, sys.stdout, fmt)


def _meta(command: str, params: dict, seed=None) -> dict:
    return {
        "tool": "quantal_defense",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "parameters": params,
        "seed": seed,
    }


def _cmd_qre(args, config) -> int:
    params = _merge(
        config, args, ("space", "allocations", "R", "loss_A", "lambda_d"),
        {"R": TABLE_BUDGET, "loss_A": 1.0, "lambda_d": 0.0},
    )
    game = SecurityGame(params["R"], params["loss_A"])
    space = _space_from(params, game.loss_A, game.budget_R)
    dist = defender_response(game, space, params["lambda_d"])
    rows = [
        {"strategy": label, "site1": r, "site2": game.budget_R - r, "loss": float(L), "sigma": float(s)}
        for label, r, L, s in zip(space.labels, space.allocations, losses(game, space), dist.probabilities)
    ]
    _emit(rows, ["strategy", "site1", "site2", "loss", "sigma"], args, _meta("qre", params))
    return 0


def _cmd_optimal(args, config) -> int:
    params = _merge(config, args, ("R", "loss_A"), {"R": TABLE_BUDGET, "loss_A": 1.0})
    game = SecurityGame(params["R"], params["loss_A"])
    rows = []
    bis = optimal_allocation(game)
    rows.append({"method": "bisection", "r_star": bis.r, "site2": bis.site2, "loss": expected_loss(game, bis)})
    try:
        cf = optimal_allocation_closed_form(game)
        rows.append({"method": "closed_form", "r_star": cf.r, "site2": cf.site2, "loss": expected_loss(game, cf)})
    except PreconditionError as exc:
        print(f"closed form not applicable: {exc}", file=sys.stderr)
    _emit(rows, ["method", "r_star", "site2", "loss"], args, _meta("optimal", params))
    return 0


_SWEEP_KIND = {"sweep-lambda": "lambda_sweep", "sweep-loss": "loss_sweep", "sweep-poqa": "poqa_sweep"}


def _cmd_sweep(args, config) -> int:
    data = dict(config)
    # sweeps are deterministic; a seed in the config is only echoed to the metadata
    seed = _merge({"seed": data.pop("seed")} if "seed" in data else {}, args, ("seed",), {"seed": None})["seed"]
    if args.allocations is not None:
        data["space"] = args.allocations
    elif args.space is not None:
        data["space"] = args.space
    if args.R is not None:
        data["R"] = args.R
    if args.loss_A is not None:
        if args.command == "sweep-lambda":
            data["A_fixed"] = args.loss_A
        else:
            data["A_values"] = [args.loss_A]
    if args.loss_values is not None:
        data["A_values"] = args.loss_values
    if args.lambda_d is not None:
        data["lambda_fixed"] = args.lambda_d
    elif args.lambda_values is not None:
        data["lambda_values"] = args.lambda_values
        data.pop("lambda_fixed", None)
    elif args.lambda_range is not None or args.lambda_count is not None:
        grid = data.get("lambda_values") if isinstance(data.get("lambda_values"), dict) else {}
        grid = dict(grid)
        if args.lambda_range is not None:
            grid["log_range"] = list(args.lambda_range)
        if args.lambda_count is not None:
            grid["count"] = args.lambda_count
        grid.setdefault("log_range", [1e-3, 1e4])
        data["lambda_values"] = grid
        data.pop("lambda_fixed", None)
    if args.out is not None:
        data["output_path"] = args.out
    spec = SweepSpec.from_dict(data, _SWEEP_KIND[args.command])
    if args.out is None and spec.output_path is not None:
        args.out = spec.output_path
    result = run_sweep(spec)
    result.metadata["seed"] = seed
    _emit(result.rows, result.columns, args, result.metadata)
    return 0


def _cmd_prelec(args, config) -> int:
    params = _merge(
        config, args, ("R", "loss_A", "alphas"),
        {"R": TABLE_BUDGET, "loss_A": 0.5, "alphas": [0.3, 0.5, 0.7, 0.9, 1.0]},
    )
    game = SecurityGame(params["R"], params["loss_A"])
    r_star = optimal_allocation(game).r
    rows = []
    for alpha in params["alphas"]:
        report = pobw(game, alpha)
        case = theorem_case(game, alpha).value if alpha < 1 else "identity"
        rows.append(
            {
                "alpha": float(alpha),
                "r_hat": behavioral_optimal(game, alpha).r,
                "r_star": r_star,
                "theorem_case": case,
                "pobw": report.value,
                "bound": report.bound,
            }
        )
    _emit(rows, ["alpha", "r_hat", "r_star", "theorem_case", "pobw", "bound"], args, _meta("prelec-compare", params))
    return 0


def _cmd_fuzz(args, config) -> int:
    params = _merge(config, args, ("trials", "seed"), {"trials": 1000, "seed": 0})
    trials, seed = params["trials"], params["seed"]
    if trials < 1:
        raise ConfigError("must be a positive integer", "trials")
    if not 0 <= seed < 2**64:
        raise ConfigError("must be an unsigned 64-bit integer", "seed")
    rng = np.random.default_rng(seed)
    summaries = [fuzz_poqa(trials, rng)[0], fuzz_pobw(trials, rng)[0]]
    rows = [s.as_row() for s in summaries]
    _emit(rows, ["kind", "trials", "violations", "worst_ratio"], args, _meta("fuzz-bounds", params, seed))
    total = sum(s.violations for s in summaries)
    if total:
        print(f"{total} bound violation(s) found", file=sys.stderr)
        return 2
    return 0


_COMMANDS = {
    "qre": _cmd_qre,
    "optimal": _cmd_optimal,
    "sweep-lambda": _cmd_sweep,
    "sweep-loss": _cmd_sweep,
    "sweep-poqa": _cmd_sweep,
    "prelec-compare": _cmd_prelec,
    "fuzz-bounds": _cmd_fuzz,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer", "--seed")
        config = _load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except PreconditionError as exc:
        print(f"numerical precondition error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
