"""
Verification sweeps over the constructed families

Each sweep streams batches of colorings (exhaustive or seeded samples),
evaluates a claim on every row with the vectorised paths, and reduces the
partial reports of all partitions into one VerificationReport.
"""

import logging
import time
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import get_settings, positive_or_default
from src.construction import all_variants, build_family
from src.errors import ResourceLimitError, UsageError, WitnessInvariantError
from src.metrics import (
    batch_quadruples,
    batch_suffixes,
    ceil_bound,
    disc_quadruple,
    prefix_profile,
)
from src.models import Coloring, PermutationFamily, VerificationReport, Violation
from src.solver import decide_disc_at_most, exhaustive_min_disc
from src.sweep import (
    ProfileBatch,
    coloring_codes,
    exhaustive_count,
    exhaustive_slices,
    free_elements,
    iter_exhaustive_batches,
    iter_sample_batches,
    run_partitioned,
    sample_chunks,
    sample_slices,
)
from src.witness import SIDES, SIGNS, build_witness, build_witness_batch, guarantee_array

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_N = 27
METHODS = ("oracle", "decide")
MODES = ("exhaustive", "sample")


# Claim checks: each returns a boolean mask of failing rows.

def _quadruples(family: PermutationFamily, batch: ProfileBatch) -> Dict[str, np.ndarray]:
    q = batch_quadruples(batch.profiles, batch_suffixes(family, batch.colorings))
    return {name: values.astype(np.int64) for name, values in q.items()}


def _lemma2_failures(family: PermutationFamily, batch: ProfileBatch) -> np.ndarray:
    q = _quadruples(family, batch)
    bound = family.k + np.abs(q["total"]) + 2
    ok = np.where(
        q["total"] > 0,
        (q["l_plus"] >= bound) & (q["r_plus"] >= bound),
        (q["l_minus"] <= -bound) & (q["r_minus"] <= -bound),
    )
    return ~ok


def _identity_failures(family: PermutationFamily, batch: ProfileBatch) -> np.ndarray:
    q = _quadruples(family, batch)
    three_total = 3 * q["total"]
    return (q["r_minus"] + q["l_plus"] != three_total) | (q["r_plus"] + q["l_minus"] != three_total)


def _corollary_failures(family: PermutationFamily, batch: ProfileBatch) -> np.ndarray:
    q = _quadruples(family, batch)
    bound = family.k - 2 * np.abs(q["total"]) + 2
    ok = np.where(
        q["total"] > 0,
        (q["l_minus"] <= -bound) & (q["r_minus"] <= -bound),
        (q["l_plus"] >= bound) & (q["r_plus"] >= bound),
    )
    return ~ok | _identity_failures(family, batch)


def _witness_failures(family: PermutationFamily, batch: ProfileBatch) -> np.ndarray:
    """Soundness, guarantee, optimality sandwich and bad-prefix bound for all four witnesses"""
    k = family.k
    tables = {
        "L": batch.profiles,
        "R": batch_suffixes(family, batch.colorings),
    }
    q = _quadruples(family, batch)
    totals = q["total"]
    rows = np.arange(len(batch))[:, None]
    perms = np.arange(3)[None, :]
    failed = np.zeros(len(batch), dtype=bool)
    left = {}
    for side in SIDES:
        shift = 0 if side == "L" else 1
        for sign in SIGNS:
            witness = build_witness_batch(family, batch.colorings, side, sign)
            measured = tables[side][rows, perms, witness.cuts - shift]
            failed |= (measured != witness.values).any(axis=1)
            achieved = witness.achieved
            guarantee = guarantee_array(k, totals, sign)
            optimum = q[f"{side.lower()}_{'plus' if sign == '+' else 'minus'}"]
            if sign == "+":
                failed |= (achieved < guarantee) | (achieved > optimum)
            else:
                failed |= (achieved > guarantee) | (achieved < optimum)
            if side == "L":
                left[sign] = witness.values
    peak = np.where(totals[:, None] > 0, left["+"], left["-"])
    failed |= np.abs(peak).max(axis=1) < ceil_bound(k)
    return failed


CHECKS: Dict[str, Callable[[PermutationFamily, ProfileBatch], np.ndarray]] = {
    "lemma2": _lemma2_failures,
    "corollary3": _corollary_failures,
    "identity": _identity_failures,
    "witness": _witness_failures,
}


def _describe(family: PermutationFamily, coloring: Coloring) -> str:
    q = disc_quadruple(family, coloring)
    return (
        f"total={coloring.total} l_plus={q.l_plus} l_minus={q.l_minus} "
        f"r_plus={q.r_plus} r_minus={q.r_minus}"
    )


def _spot_check(claim: str, family: PermutationFamily, batch: ProfileBatch, rows: np.ndarray) -> List[Tuple[str, str]]:
    """Recompute the chosen rows on the scalar path; (coloring, message) per disagreement"""
    problems = []
    for row in rows:
        coloring = Coloring.from_array(batch.colorings[row])
        text = coloring.to_string()
        expected = np.asarray(prefix_profile(family, coloring).sums)
        if not np.array_equal(expected, batch.profiles[row]):
            problems.append((text, "incremental profile disagrees with recompute"))
            continue
        if claim != "witness":
            continue
        for side in SIDES:
            for sign in SIGNS:
                fast = build_witness_batch(family, batch.colorings[row:row + 1], side, sign)
                try:
                    slow = build_witness(family, coloring, side, sign)
                except WitnessInvariantError as exc:
                    problems.append((text, str(exc)))
                    continue
                if tuple(fast.cuts[0].tolist()) != slow.cuts or tuple(fast.values[0].tolist()) != slow.per_perm_values:
                    problems.append((text, f"batch witness ({side},{sign}) disagrees with replay"))
    return problems


def _check_slice(
    claim: str,
    family: PermutationFamily,
    mode: str,
    samples: int,
    seed: int,
    batch_size: int,
    low_bits: int,
    spot_budget: int,
    part,
) -> VerificationReport:
    """Partial report over one partition"""
    check = CHECKS[claim]
    if mode == "exhaustive":
        batches = iter_exhaustive_batches(family, fix_first=True, part=part, low_bits=low_bits)
        free = len(free_elements(family.n, True)) - part.prefix_bits
        rows_per_batch = 2 ** min(low_bits, free)
        batch_count = 2 ** free // rows_per_batch
        per_batch = min(rows_per_batch, -(-spot_budget // batch_count)) if spot_budget else 0
    else:
        batches = iter_sample_batches(family, samples, seed, batch_size, part)
        per_batch = 0

    checked = violations = spot_checked = 0
    first: Optional[Violation] = None
    for batch in batches:
        failed = check(family, batch)
        checked += len(batch)
        if per_batch and spot_checked < spot_budget:
            take = min(per_batch, spot_budget - spot_checked)
            rows = np.unique(np.linspace(0, len(batch) - 1, take).round().astype(np.int64))
            for text, problem in _spot_check(claim, family, batch, rows):
                violations += 1
                if first is None or text < first.coloring:
                    first = Violation(coloring=text, details=problem)
            spot_checked += len(rows)
        if not failed.any():
            continue
        violations += int(failed.sum())
        bad = batch.colorings[failed]
        coloring = Coloring.from_array(bad[int(coloring_codes(bad).argmin())])
        text = coloring.to_string()
        if first is None or text < first.coloring:
            first = Violation(coloring=text, details=_describe(family, coloring))
    return VerificationReport(
        claim=claim,
        k=family.k,
        variant=family.variant,
        mode=mode,
        checked=checked,
        spot_checked=spot_checked,
        violations=violations,
        first_violation=first,
        status="fail" if violations else "pass",
    )


def merge_reports(reports: Sequence[VerificationReport]) -> VerificationReport:
    """Sum the counters of partial reports, keeping the lexicographically first violation"""
    if not reports:
        raise UsageError("nothing to merge")
    violations = sum(r.violations for r in reports)
    firsts = [r.first_violation for r in reports if r.first_violation is not None]
    first = min(firsts, key=lambda v: (v.coloring, v.details)) if firsts else None
    return reports[0].model_copy(
        update={
            "checked": sum(r.checked for r in reports),
            "spot_checked": sum(r.spot_checked for r in reports),
            "violations": violations,
            "first_violation": first,
            "status": "fail" if violations else "pass",
        }
    )


def _sweep(
    claim: str,
    k: int,
    mode: str = "exhaustive",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    variant: Optional[str] = None,
    workers: Optional[int] = None,
) -> VerificationReport:
    if mode not in MODES:
        raise UsageError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    settings = get_settings()
    workers = positive_or_default("workers", workers, settings.workers)
    family = build_family(k, variant)
    started = time.perf_counter()

    if mode == "exhaustive":
        if family.n > EXHAUSTIVE_MAX_N:
            raise ResourceLimitError(
                f"exhaustive sweeps are capped at n = {EXHAUSTIVE_MAX_N}; use --mode sample for k = {k}"
            )
        parts = exhaustive_slices(len(free_elements(family.n, True)), workers)
        spot_budget = -(-settings.spot_checks // len(parts))
        samples, seed = None, None
    else:
        samples = positive_or_default("samples", samples, settings.samples)
        seed = settings.seed if seed is None else seed
        parts = sample_slices(sample_chunks(samples, settings.batch_size), workers)
        spot_budget = 0

    task = partial(
        _check_slice, claim, family, mode, samples or 0, seed or 0,
        settings.batch_size, settings.low_bits, spot_budget,
    )
    report = merge_reports(run_partitioned(task, parts, workers))
    if mode == "exhaustive" and report.checked != exhaustive_count(family.n, True):
        raise AssertionError(f"exhaustive sweep covered {report.checked} colorings")
    elapsed = time.perf_counter() - started
    logger.info(
        "%s k=%d variant=%s %s: %d checked, %d violations in %.2fs",
        claim, k, family.variant or "-", mode, report.checked, report.violations, elapsed,
    )
    return report.model_copy(
        update={
            "reduction": "negation" if mode == "exhaustive" else None,
            "seed": seed,
            "wall_time": elapsed,
        }
    )


def verify_lemma2(k: int, mode: str = "exhaustive", samples: Optional[int] = None, seed: Optional[int] = None,
                  variant: Optional[str] = None, workers: Optional[int] = None) -> VerificationReport:
    """Matched-sign bounds k + delta + 2 on both sides for every coloring"""
    return _sweep("lemma2", k, mode, samples, seed, variant, workers)


def verify_corollary(k: int, mode: str = "exhaustive", samples: Optional[int] = None, seed: Optional[int] = None,
                     variant: Optional[str] = None, workers: Optional[int] = None) -> VerificationReport:
    """Mismatched-sign bounds k - 2*delta + 2 together with the complement identities"""
    return _sweep("corollary3", k, mode, samples, seed, variant, workers)


def verify_identity(k: int, mode: str = "exhaustive", samples: Optional[int] = None, seed: Optional[int] = None,
                    variant: Optional[str] = None, workers: Optional[int] = None) -> VerificationReport:
    return _sweep("identity", k, mode, samples, seed, variant, workers)


def verify_witness(k: int, mode: str = "exhaustive", samples: Optional[int] = None, seed: Optional[int] = None,
                   variant: Optional[str] = None, workers: Optional[int] = None) -> VerificationReport:
    """Replay all four witnesses per coloring and check them against the exact functionals"""
    return _sweep("witness", k, mode, samples, seed, variant, workers)


def verify_theorem(
    k: int,
    method: str = "oracle",
    variant: Optional[str] = None,
    workers: Optional[int] = None,
    node_budget: Optional[int] = None,
    time_budget: Optional[float] = None,
) -> VerificationReport:
    """
    Certify disc >= ceil(k/3 + 1) by complete search

    oracle reports the exact minimum as value; decide refutes a coloring
    with discrepancy ceil(k/3 + 1) - 1 and reports the certified bound.
    """
    if method not in METHODS:
        raise UsageError(f"method must be one of {', '.join(METHODS)}, got {method!r}")
    family = build_family(k, variant)
    bound = ceil_bound(k)
    started = time.perf_counter()

    if bound - 1 < 1:
        # no threshold below the bound is left to refute
        method = "oracle"
    if method == "oracle":
        outcome = exhaustive_min_disc(family, workers=workers)
        failed = outcome.value < bound
        report = VerificationReport(
            claim="theorem1", k=k, variant=family.variant, method=method,
            checked=outcome.nodes_explored, reduction="negation",
            bound=bound, value=outcome.value,
        )
    else:
        outcome = decide_disc_at_most(family, bound - 1, node_budget=node_budget, time_budget=time_budget)
        failed = bool(outcome.feasible)
        report = VerificationReport(
            claim="theorem1", k=k, variant=family.variant, method=method,
            checked=outcome.nodes_explored, bound=bound,
            value=None if failed or outcome.feasible is None else bound,
        )
        if outcome.status == "indeterminate":
            logger.warning("theorem k=%d variant=%s: decision search inconclusive", k, family.variant)
            report = report.model_copy(update={"status": "inconclusive"})

    if failed:
        coloring = outcome.witness_coloring
        report = report.model_copy(
            update={
                "violations": 1,
                "status": "fail",
                "first_violation": Violation(
                    coloring=coloring.to_string(),
                    details=f"discrepancy {outcome.value if method == 'oracle' else bound - 1} below bound {bound}",
                ),
            }
        )
    return report.model_copy(update={"wall_time": time.perf_counter() - started})


def verify_variants(
    k: int,
    mode: Optional[str] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> VerificationReport:
    """
    Theorem and lemma checks for every direction word of depth k

    Failures on non-canonical words are findings and leave the status at
    pass; only the canonical word can fail the sweep.
    """
    started = time.perf_counter()
    n = 3 ** k
    method = "oracle" if k <= 2 else "decide"
    mode = mode or ("exhaustive" if n <= EXHAUSTIVE_MAX_N else "sample")
    entries, findings = [], []
    status = "pass"
    canonical_violations = 0
    for word in all_variants(k):
        theorem = verify_theorem(k, method, variant=word, workers=workers)
        lemma = verify_lemma2(k, mode, samples, seed, variant=word, workers=workers)
        violations = theorem.violations + lemma.violations
        if theorem.status == "inconclusive":
            entry_status = "inconclusive"
        else:
            entry_status = "fail" if violations else "pass"
        entries.append(
            VerificationReport(
                claim="variants", k=k, variant=word, mode=lemma.mode, method=method,
                checked=lemma.checked, violations=violations, status=entry_status,
                bound=theorem.bound, value=theorem.value, entries=[theorem, lemma],
                seed=lemma.seed, wall_time=theorem.wall_time + lemma.wall_time,
            )
        )
        is_canonical = set(word) <= {"R"}
        if entry_status == "fail" and is_canonical:
            canonical_violations += violations
            status = "fail"
        elif entry_status == "fail":
            finding = f"variant {word}: theorem {theorem.status}, lemma2 {lemma.violations} violations"
            logger.warning("finding: %s", finding)
            findings.append(finding)
        elif entry_status == "inconclusive" and status == "pass":
            status = "inconclusive"

    return VerificationReport(
        claim="variants",
        k=k,
        mode=mode,
        method=method,
        checked=sum(entry.checked for entry in entries),
        violations=canonical_violations,
        status=status,
        bound=ceil_bound(k),
        findings=findings,
        entries=entries,
        seed=entries[0].seed,
        wall_time=time.perf_counter() - started,
    )


def verify_claim(claim: str, **kwargs) -> VerificationReport:
    """Dispatch by CLI subcommand name"""
    handlers = {
        "theorem": verify_theorem,
        "lemma2": verify_lemma2,
        "corollary": verify_corollary,
        "identity": verify_identity,
        "witness": verify_witness,
        "variants": verify_variants,
    }
    if claim not in handlers:
        raise UsageError(f"unknown claim {claim!r}; choose from {', '.join(handlers)}")
    return handlers[claim](**kwargs)
