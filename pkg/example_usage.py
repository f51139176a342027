"""
Example usage script demonstrating the toolkit from Python code
"""

import sys

from src.construction import build_family
from src.metrics import disc_quadruple, prefix_system_discrepancy
from src.models import Coloring
from src.solver import decide_disc_at_most, exhaustive_min_disc, heuristic_outcome
from src.verify import verify_lemma2, verify_theorem
from src.witness import extract_bad_prefix, witness_table


def example_session():
    """Walk through construction, measurement, solving and verification"""
    print("=" * 60)
    print("Three-Permutation Discrepancy - Example Session")
    print("=" * 60)
    print()

    # Example 1: the family for k = 2
    print("Example 1: Building S_2")
    print("-" * 60)
    family = build_family(2)
    for i, perm in enumerate(family.perms, 1):
        print(f"pi_{i}: {' '.join(map(str, perm))}")
    print()

    # Example 2: functionals of one coloring
    print("Example 2: Measuring a coloring")
    print("-" * 60)
    coloring = Coloring(values=(1, -1, 1, 1, -1, -1, 1, -1, 1))
    quadruple = disc_quadruple(family, coloring)
    value, (perm, x) = prefix_system_discrepancy(family, coloring)
    print(f"Coloring: {coloring.to_string()} (total {coloring.total})")
    print(f"l_plus={quadruple.l_plus} l_minus={quadruple.l_minus} "
          f"r_plus={quadruple.r_plus} r_minus={quadruple.r_minus}")
    print(f"Prefix discrepancy {value} at permutation {perm}, length {x}")
    print()

    # Example 3: witnesses
    print("Example 3: Replaying the proof")
    print("-" * 60)
    for name, witness in witness_table(family, coloring).items():
        print(f"{name}: cuts={witness.cuts} achieved={witness.achieved} guarantee={witness.guarantee}")
    bad = extract_bad_prefix(family, coloring)
    print(f"Bad prefix: permutation {bad.perm}, length {bad.length}, value {bad.value} (bound {bad.bound})")
    print()

    # Example 4: solvers
    print("Example 4: Solving")
    print("-" * 60)
    exact = exhaustive_min_disc(family)
    print(f"Exact minimum: {exact.value} with {exact.witness_coloring.to_string()}")
    below = decide_disc_at_most(family, exact.value - 1)
    print(f"disc <= {exact.value - 1}? {below.feasible} after {below.nodes_explored} nodes")
    greedy = heuristic_outcome(family, "greedy-balance")
    print(f"Greedy-balance reaches {greedy.value}")
    print()

    # Example 5: verification reports
    print("Example 5: Verifying")
    print("-" * 60)
    for report in (verify_theorem(2), verify_lemma2(2)):
        print(f"{report.claim}: {report.status} (checked {report.checked})")
    print()


def explore(k: int, text: str):
    """Measure a user-supplied coloring of S_k"""
    family = build_family(k)
    coloring = Coloring(values=tuple(1 if c == "+" else -1 for c in text))
    print(disc_quadruple(family, coloring).model_dump_json(indent=2))
    for name, witness in witness_table(family, coloring).items():
        print(f"{name}: {witness.model_dump_json()}")


if __name__ == "__main__":
    if len(sys.argv) == 3:
        explore(int(sys.argv[1]), sys.argv[2])
    else:
        example_session()
        print("\nTip: pass a depth and a coloring to explore your own")
        print("Example: python example_usage.py 1 +-+")
