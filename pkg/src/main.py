"""
Command line front end for the three-permutation discrepancy toolkit

Usage:
    python -m src.main gen --k 2 --format text
    python -m src.main metrics --k 1 --coloring "+-+"
    python -m src.main solve --k 2 --mode exact
    python -m src.main witness --k 2 --coloring FILE --side L --sign +
    python -m src.main verify theorem --k 1 --method oracle

Exit codes: 0 success/pass, 1 claim violation, 2 usage error, 3 inconclusive.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from src.config import get_settings, positive_or_default
from src.construction import build_family, build_family_dense, build_family_tensor
from src.errors import DiscrepancyError, UsageError
from src.formats import (
    FORMATS,
    dump_csv,
    family_to_json,
    family_to_text,
    load_coloring,
    load_family,
    render,
    report_rows,
    report_summary,
    solve_payload,
    to_payload,
)
from src.metrics import disc_quadruple, interval_system_discrepancy, prefix_system_discrepancy
from src.models import SCHEMA_VERSION, PermutationFamily, RunConfig
from src.solver import (
    decide_disc_at_most,
    exhaustive_min_disc,
    heuristic_outcome,
    min_disc_by_decision,
)
from src.verify import verify_claim
from src.witness import SIDES, SIGNS, build_witness, extract_bad_prefix

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
CLAIMS = ("theorem", "lemma2", "corollary", "identity", "witness", "variants")
VALUE_OPTIONS = ("--coloring",)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, help="Recursion depth, n = 3^k")
    common.add_argument("--variant", help="Direction word over {R, L}, outermost level first")
    common.add_argument("--family", dest="family_path", help="Permutation file (text or JSON)")
    common.add_argument("--seed", type=int, help="Seed for sampling and random heuristics")
    common.add_argument("--workers", type=int, help="Worker processes for partitioned sweeps")
    common.add_argument("--format", dest="output_format", choices=FORMATS, help="Output format")
    common.add_argument("--out", help="Write output to this file instead of stdout")
    common.add_argument("--log-level", help="Logging level for stderr diagnostics")

    parser = argparse.ArgumentParser(
        prog="python -m src.main",
        description="Construct the three-permutation family and verify its discrepancy lower bound",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", parents=[common], help="Emit the permutation family")
    gen.add_argument("--builder", choices=("recursive", "tensor", "dense"), default="recursive")

    metrics = commands.add_parser("metrics", parents=[common], help="Discrepancy functionals of one coloring")
    metrics.add_argument("--coloring", required=True, help="Coloring string or file")

    solve = commands.add_parser("solve", parents=[common], help="Exact, decision or heuristic discrepancy")
    solve.add_argument("--mode", choices=("exact", "decide", "heuristic"), default="exact")
    solve.add_argument("--t", type=int, help="Threshold for decide mode")
    solve.add_argument("--method", choices=("oracle", "decide"), default="oracle",
                       help="Exact mode: full enumeration or repeated decisions")
    solve.add_argument("--strategy", choices=("random", "greedy-balance"), default="greedy-balance")
    solve.add_argument("--node-budget", type=int)
    solve.add_argument("--time-budget", type=float)

    witness = commands.add_parser("witness", parents=[common], help="Replay the certified cut triples")
    witness.add_argument("--coloring", required=True, help="Coloring string or file")
    witness.add_argument("--side", choices=SIDES)
    witness.add_argument("--sign", choices=SIGNS)
    witness.add_argument("--bad-prefix", action="store_true", help="Also report one prefix reaching the bound")

    verify = commands.add_parser("verify", help="Run a verification sweep")
    claims = verify.add_subparsers(dest="subcommand", required=True)
    for claim in CLAIMS:
        sub = claims.add_parser(claim, parents=[common])
        sub.add_argument("--mode", choices=("exhaustive", "sample"))
        sub.add_argument("--samples", type=int)
        sub.add_argument("--method", choices=("oracle", "decide"), default="oracle")
        sub.add_argument("--node-budget", type=int)
        sub.add_argument("--time-budget", type=float)
    return parser


def attach_values(argv: List[str]) -> List[str]:
    """Join value options to their argument so colorings like -+- are not read as flags"""
    joined: List[str] = []
    pending: Optional[str] = None
    for token in argv:
        if pending is not None:
            joined.append(f"{pending}={token}")
            pending = None
        elif token in VALUE_OPTIONS:
            pending = token
        else:
            joined.append(token)
    if pending is not None:
        joined.append(pending)
    return joined


def make_config(args: argparse.Namespace) -> RunConfig:
    """Merge parsed flags over the environment settings"""
    settings = get_settings()
    values = vars(args)
    return RunConfig(
        command=args.command,
        subcommand=values.get("subcommand"),
        k=values.get("k"),
        variant=values.get("variant"),
        family_path=values.get("family_path"),
        coloring=values.get("coloring"),
        mode=values.get("mode"),
        t=values.get("t"),
        method=values.get("method"),
        side=values.get("side"),
        sign=values.get("sign"),
        strategy=values.get("strategy") or "greedy-balance",
        samples=positive_or_default("--samples", values.get("samples"), settings.samples),
        seed=settings.seed if values.get("seed") is None else values["seed"],
        workers=positive_or_default("--workers", values.get("workers"), settings.workers),
        node_budget=positive_or_default("--node-budget", values.get("node_budget"), settings.node_budget),
        time_budget=positive_or_default("--time-budget", values.get("time_budget"), settings.time_budget_seconds),
        output_format=values.get("output_format") or settings.output_format,
        out=values.get("out"),
        bad_prefix=bool(values.get("bad_prefix")),
    )


def resolve_family(config: RunConfig) -> PermutationFamily:
    if config.family_path:
        if config.k is not None or config.variant:
            raise UsageError("--family cannot be combined with --k or --variant")
        return load_family(config.family_path)
    if config.k is None:
        raise UsageError("either --k or --family is required")
    return build_family(config.k, config.variant)


def run_gen(config: RunConfig, builder: str) -> Tuple[str, int]:
    if config.k is None:
        raise UsageError("gen needs --k")
    if builder == "tensor":
        family = build_family_tensor(config.k, config.variant)
    elif builder == "dense":
        if config.variant and set(config.variant.upper()) != {"R"}:
            raise UsageError("the dense builder covers the canonical family only")
        family = build_family_dense(config.k)
    else:
        family = build_family(config.k, config.variant)
    if config.output_format == "json":
        return family_to_json(family), EXIT_OK
    if config.output_format == "csv":
        rows = [
            {"position": x + 1, "perm1": family.perms[0][x], "perm2": family.perms[1][x], "perm3": family.perms[2][x]}
            for x in range(family.n)
        ]
        return dump_csv(rows), EXIT_OK
    return family_to_text(family), EXIT_OK


def run_metrics(config: RunConfig) -> Tuple[str, int]:
    family = resolve_family(config)
    coloring = load_coloring(config.coloring)
    quadruple = disc_quadruple(family, coloring)
    prefix_disc, (perm, x) = prefix_system_discrepancy(family, coloring)
    payload = {"schema_version": SCHEMA_VERSION, "n": family.n, "total": coloring.total}
    payload.update(quadruple.model_dump(mode="json"))
    payload.update(
        prefix_disc=prefix_disc,
        prefix_disc_at=[perm, x],
        interval_disc=interval_system_discrepancy(family, coloring),
    )
    return render(payload, config.output_format), EXIT_OK


def run_solve(config: RunConfig) -> Tuple[str, int]:
    family = resolve_family(config)
    budgets = {"node_budget": config.node_budget, "time_budget": config.time_budget}
    if config.mode == "decide":
        if config.t is None:
            raise UsageError("decide mode needs --t")
        outcome = decide_disc_at_most(family, config.t, **budgets)
    elif config.mode == "heuristic":
        outcome = heuristic_outcome(family, config.strategy, config.seed)
    elif config.method == "decide":
        outcome = min_disc_by_decision(family, **budgets)
    else:
        outcome = exhaustive_min_disc(family, workers=config.workers)
    code = EXIT_INCONCLUSIVE if outcome.status == "indeterminate" else EXIT_OK
    return render(solve_payload(outcome), config.output_format), code


def run_witness(config: RunConfig) -> Tuple[str, int]:
    family = resolve_family(config)
    coloring = load_coloring(config.coloring)
    sides = [config.side] if config.side else list(SIDES)
    signs = [config.sign] if config.sign else list(SIGNS)
    witnesses = [build_witness(family, coloring, side, sign) for side in sides for sign in signs]
    payload: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "k": family.k, "variant": family.variant}
    if len(witnesses) == 1:
        payload.update(witnesses[0].model_dump(mode="json"))
    else:
        payload["witnesses"] = [w.model_dump(mode="json") for w in witnesses]
    if config.bad_prefix:
        payload["bad_prefix"] = extract_bad_prefix(family, coloring).model_dump(mode="json")
    code = EXIT_OK if all(w.certified for w in witnesses) else EXIT_VIOLATION
    if config.output_format == "csv":
        rows = [
            {
                "side": w.side, "sign": w.sign, "cuts": " ".join(map(str, w.cuts)),
                "per_perm_values": " ".join(map(str, w.per_perm_values)),
                "achieved": w.achieved, "guarantee": w.guarantee, "certified": w.certified,
            }
            for w in witnesses
        ]
        return dump_csv(rows), code
    return render(payload, config.output_format), code


def run_verify(config: RunConfig) -> Tuple[str, int]:
    if config.k is None:
        raise UsageError("verify needs --k")
    claim = config.subcommand
    if claim == "theorem":
        kwargs = dict(k=config.k, method=config.method, variant=config.variant, workers=config.workers,
                      node_budget=config.node_budget, time_budget=config.time_budget)
    else:
        kwargs = dict(k=config.k, mode=config.mode, samples=config.samples, seed=config.seed,
                      workers=config.workers)
        if claim == "variants" and config.variant:
            raise UsageError("--variant does not apply to verify variants, which sweeps every word")
        if claim != "variants":
            kwargs["mode"] = config.mode or "exhaustive"
            kwargs["variant"] = config.variant
    report = verify_claim(claim, **kwargs)
    summary = report_summary(report)
    if config.output_format != "text":
        print(summary, file=sys.stderr)
    code = {"pass": EXIT_OK, "fail": EXIT_VIOLATION, "inconclusive": EXIT_INCONCLUSIVE}[report.status]
    return render(to_payload(report), config.output_format, rows=report_rows(report), summary=summary), code


def write_output(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map outcomes and errors to exit codes"""
    parser = build_parser()
    args = parser.parse_args(attach_values(sys.argv[1:] if argv is None else list(argv)))
    settings = get_settings()
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = make_config(args)
        logger.debug("run config: %s", config.model_dump())
        if config.command == "gen":
            text, code = run_gen(config, args.builder)
        elif config.command == "metrics":
            text, code = run_metrics(config)
        elif config.command == "solve":
            text, code = run_solve(config)
        elif config.command == "witness":
            text, code = run_witness(config)
        else:
            text, code = run_verify(config)
        write_output(text, config.out)
        return code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DiscrepancyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
