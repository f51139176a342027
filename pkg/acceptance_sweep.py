#!/usr/bin/env python3
"""
Closed-loop acceptance sweep over the whole toolkit

Runs every acceptance check in order and prints a checklist.  With
--quick the k = 3 exhaustive runs and the large sample counts are scaled
down so the loop finishes in a few seconds.

    python acceptance_sweep.py            # full desk-scale run
    python acceptance_sweep.py --quick
"""

import logging
import sys
import time

import numpy as np

from src.construction import build_family, build_family_tensor, induced_subfamily
from src.formats import family_to_text
from src.metrics import disc_quadruple
from src.models import BlockLabel, Coloring, PermutationFamily
from src.solver import decide_disc_at_most, exhaustive_min_disc
from src.verify import verify_identity, verify_lemma2, verify_theorem, verify_variants, verify_witness

GOLDEN = {
    2: "1 2 3 4 5 6 7 8 9\n"
       "9 7 8 3 1 2 6 4 5\n"
       "5 6 4 8 9 7 2 3 1\n",
    3: " ".join(str(e) for e in range(1, 28)) + "\n"
       "27 25 26 21 19 20 24 22 23 9 7 8 3 1 2 6 4 5 18 16 17 12 10 11 15 13 14\n"
       "14 15 13 17 18 16 11 12 10 23 24 22 26 27 25 20 21 19 5 6 4 8 9 7 2 3 1\n",
}


def check_golden(quick: bool):
    for k, expected in GOLDEN.items():
        assert family_to_text(build_family(k)) == expected, f"k={k} table differs"
    return "n=9 and n=27 tables match"


def check_builders(quick: bool):
    top = 6 if quick else 8
    for k in range(top + 1):
        assert build_family(k).perms == build_family_tensor(k).perms, f"builders disagree at k={k}"
    for k in range(1, 7):
        family = build_family(k)
        for block in BlockLabel:
            assert induced_subfamily(family, block).perms == build_family(k - 1).perms, f"k={k} block {block.value}"
    return f"recursive == tensor for k<={top}; self-similar for k<=6"


def check_base_table(quick: bool):
    family = build_family(1)
    for code in range(8):
        coloring = Coloring.from_array([-1 if code >> (2 - e) & 1 else 1 for e in range(3)])
        quadruple = disc_quadruple(family, coloring)
        expected = {1: 4, 3: 9, -1: -4, -3: -9}[coloring.total]
        if coloring.total > 0:
            assert quadruple.l_plus == quadruple.r_plus == expected, coloring.to_string()
        else:
            assert quadruple.l_minus == quadruple.r_minus == expected, coloring.to_string()
    return "all 8 colorings reproduce 4/9 and -4/-9"


def check_theorem(quick: bool):
    values = []
    for k in (1, 2) if quick else (1, 2, 3):
        report = verify_theorem(k, "oracle" if k <= 2 else "decide")
        assert report.passed, f"k={k}: {report.status}"
        values.append(f"k={k}:{report.value}>={report.bound}")
    return ", ".join(values)


def check_witness(quick: bool):
    samples = 2_000 if quick else 100_000
    for k in range(1, 9):
        mode = "exhaustive" if k <= 2 else "sample"
        report = verify_witness(k, mode=mode, samples=samples)
        assert report.violations == 0, f"k={k}: {report.first_violation}"
    return f"k=1..8, {samples} samples per k>=3"


def check_lemma_sweep(quick: bool):
    k = 2 if quick else 3
    report = verify_lemma2(k)
    assert report.passed, str(report.first_violation)
    return f"k={k}: {report.checked} colorings, {report.spot_checked} spot checks"


def check_identities(quick: bool):
    samples = 2_000 if quick else 100_000
    for k in range(1, 9):
        mode = "exhaustive" if k <= 2 else "sample"
        report = verify_identity(k, mode=mode, samples=samples)
        assert report.violations == 0, f"k={k}: {report.first_violation}"
    return "exact on k<=2, sampled to k=8"


def check_variants(quick: bool):
    findings = []
    for k in range(1, 3 if quick else 4):
        report = verify_variants(k)
        assert report.status != "fail", f"canonical word failed at k={k}"
        findings.extend(report.findings)
    return f"findings: {findings}" if findings else "no findings"


def check_solvers(quick: bool):
    def agree(family: PermutationFamily):
        exact = exhaustive_min_disc(family).value
        for t in range(1, exact + 2):
            outcome = decide_disc_at_most(family, t)
            assert outcome.feasible == (t >= exact), f"n={family.n} t={t}"

    for k in range(0, 3 if quick else 4):
        agree(build_family(k))
    rng = np.random.default_rng(9)
    count = 5 if quick else 20
    for _ in range(count):
        n = int(rng.integers(3, 21))
        agree(PermutationFamily(perms=tuple(tuple((rng.permutation(n) + 1).tolist()) for _ in range(3))))
    return f"canonical families and {count} random instances agree"


CHECKS = [
    ("Golden construction", check_golden),
    ("Builder equivalence and self-similarity", check_builders),
    ("Base-case table", check_base_table),
    ("Lower bound by complete search", check_theorem),
    ("Witness replay", check_witness),
    ("Exhaustive matched-sign sweep", check_lemma_sweep),
    ("Complement identities", check_identities),
    ("Variant sweep", check_variants),
    ("Solver cross-validation", check_solvers),
]


def main() -> int:
    quick = "--quick" in sys.argv
    logging.basicConfig(level=logging.WARNING)

    print("=" * 70)
    print(f"ACCEPTANCE SWEEP{' (quick)' if quick else ''}")
    print("=" * 70)

    results = []
    for i, (name, check) in enumerate(CHECKS, 1):
        started = time.perf_counter()
        try:
            detail = check(quick)
            ok = True
        except AssertionError as exc:
            detail, ok = f"FAILED: {exc}", False
        elapsed = time.perf_counter() - started
        results.append((name, ok))
        print(f"{'✅' if ok else '❌'} {i}. {name} ({elapsed:.1f}s): {detail}")

    print("\n" + "=" * 70)
    passed = sum(ok for _, ok in results)
    print(f"{passed}/{len(results)} checks passed")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
