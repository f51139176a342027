"""
Pydantic models for the permutation families, colorings, witnesses and reports
"""

from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Side = Literal["L", "R"]
Sign = Literal["+", "-"]
IntTriple = Tuple[int, int, int]

SCHEMA_VERSION = 1


class BlockLabel(str, Enum):
    """The three consecutive thirds of the ground set"""

    A = "A"
    B = "B"
    C = "C"

    @property
    def index(self) -> int:
        return "ABC".index(self.value)


def _inverse(perm: Tuple[int, ...]) -> Tuple[int, ...]:
    inverse = [0] * len(perm)
    for position, element in enumerate(perm, start=1):
        inverse[element - 1] = position
    return tuple(inverse)


class PermutationFamily(BaseModel):
    """Three permutations of 1..n, optionally tagged with their construction depth and variant"""

    model_config = ConfigDict(frozen=True)

    k: Optional[int] = Field(None, ge=0, description="Recursion depth; None for arbitrary instances")
    variant: Optional[str] = Field(None, description="Shift direction per level, outermost first")
    perms: Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]] = Field(
        ..., description="One-line notation, 1-based"
    )
    positions: Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]] = Field(
        ..., description="Inverse maps: 1-based position of each element"
    )

    @model_validator(mode="before")
    @classmethod
    def _derive_positions(cls, data):
        if isinstance(data, dict) and data.get("positions") is None and data.get("perms") is not None:
            data = dict(data)
            perms = tuple(tuple(int(v) for v in perm) for perm in data["perms"])
            data["perms"] = perms
            try:
                data["positions"] = tuple(_inverse(perm) for perm in perms)
            except IndexError:
                # out-of-range entries are reported by the bijection check
                data["positions"] = perms
        return data

    @model_validator(mode="after")
    def _check_structure(self) -> "PermutationFamily":
        n = len(self.perms[0])
        if n == 0:
            raise ValueError("permutations must be non-empty")
        expected = set(range(1, n + 1))
        for i, perm in enumerate(self.perms, start=1):
            if len(perm) != n:
                raise ValueError(f"permutation {i} has length {len(perm)}, expected {n}")
            if set(perm) != expected:
                raise ValueError(f"permutation {i} is not a bijection of 1..{n}")
        for perm, inverse in zip(self.perms, self.positions):
            if any(perm[inverse[e - 1] - 1] != e for e in range(1, n + 1)):
                raise ValueError("positions are not the inverse of perms")
        if self.k is not None:
            if n != 3 ** self.k:
                raise ValueError(f"n = {n} is not 3^{self.k}")
            if self.variant is None or len(self.variant) != self.k:
                raise ValueError("variant word must have length k")
        if self.variant is not None and set(self.variant) - {"R", "L"}:
            raise ValueError(f"variant {self.variant!r} must use only R and L")
        return self

    @property
    def n(self) -> int:
        return len(self.perms[0])

    @property
    def is_canonical(self) -> bool:
        return self.variant is not None and set(self.variant) <= {"R"}

    def index_array(self) -> np.ndarray:
        """0-based elements in position order, shape (3, n)"""
        return np.asarray(self.perms, dtype=np.int64) - 1

    def position_array(self) -> np.ndarray:
        """0-based position of each element, shape (3, n)"""
        return np.asarray(self.positions, dtype=np.int64) - 1


class Coloring(BaseModel):
    """A +1/-1 assignment indexed by element"""

    model_config = ConfigDict(frozen=True)

    values: Tuple[int, ...] = Field(..., description="Color of elements 1..n")

    @model_validator(mode="after")
    def _check_signs(self) -> "Coloring":
        if not self.values:
            raise ValueError("coloring must be non-empty")
        if any(v not in (1, -1) for v in self.values):
            raise ValueError("every color must be +1 or -1")
        return self

    @classmethod
    def from_array(cls, values) -> "Coloring":
        return cls(values=tuple(int(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def total(self) -> int:
        return sum(self.values)

    @property
    def delta(self) -> int:
        return abs(self.total)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)

    def negated(self) -> "Coloring":
        return Coloring(values=tuple(-v for v in self.values))

    def to_string(self) -> str:
        return "".join("+" if v > 0 else "-" for v in self.values)


class PrefixProfile(BaseModel):
    """Running signed sums P_i(0..n) along each permutation"""

    model_config = ConfigDict(frozen=True)

    sums: Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]

    @property
    def n(self) -> int:
        return len(self.sums[0]) - 1

    @property
    def total(self) -> int:
        return self.sums[0][-1]

    def suffix(self, perm: int, start: int) -> int:
        """Signed sum of positions start..n (1-based) of permutation perm (0-based)"""
        return self.sums[perm][-1] - self.sums[perm][start - 1]


class DiscQuadruple(BaseModel):
    """The four prefix/suffix discrepancy functionals with their optimising cuts"""

    l_plus: int
    l_minus: int
    r_plus: int
    r_minus: int
    cuts: Dict[str, IntTriple] = Field(..., description="First optimiser per permutation for each functional")


class BlockClassification(BaseModel):
    """Sorted block sums and the configuration they form in the current level"""

    values: IntTriple = Field(..., description="Block sums in label order A, B, C")
    a: int
    b: int
    c: int
    assignment: Dict[str, BlockLabel] = Field(..., description="Sorted value name -> block label")
    configuration: Literal["I", "II"]
    case_tag: Optional[Literal["i", "ii"]] = None


class WitnessTriple(BaseModel):
    """Three explicit cuts certifying a bound on one discrepancy functional"""

    side: Side
    sign: Sign
    cuts: IntTriple = Field(..., description="Prefix lengths (L) or suffix starts (R)")
    per_perm_values: IntTriple
    achieved: int
    guarantee: int
    bound_kind: Literal["lemma2", "corollary3"]
    certified: bool = True

    @model_validator(mode="after")
    def _check_sum(self) -> "WitnessTriple":
        if self.achieved != sum(self.per_perm_values):
            raise ValueError("achieved must equal the sum of the per-permutation values")
        return self

    @property
    def meets_guarantee(self) -> bool:
        if self.sign == "+":
            return self.achieved >= self.guarantee
        return self.achieved <= self.guarantee


class BadPrefix(BaseModel):
    """A single prefix whose absolute value reaches the theorem's bound"""

    perm: int = Field(..., description="1-based permutation index")
    length: int
    value: int
    bound: int


class SolveOutcome(BaseModel):
    """Result of an exact, decision or heuristic solver run"""

    mode: Literal["exact", "decide", "heuristic"]
    value: int = Field(..., description="Minimum discrepancy (exact) or threshold t (decide)")
    feasible: Optional[bool] = None
    status: Literal["definite", "indeterminate"] = "definite"
    witness_coloring: Optional[Coloring] = None
    nodes_explored: int = 0
    wall_time: float = 0.0


class Violation(BaseModel):
    """A coloring that broke the claim under test"""

    coloring: str
    details: str


class VerificationReport(BaseModel):
    """Pass/fail outcome of one verification sweep"""

    claim: Literal["theorem1", "lemma2", "corollary3", "identity", "witness", "variants"]
    k: int
    variant: Optional[str] = None
    mode: Literal["exhaustive", "sample"] = "exhaustive"
    method: Optional[str] = None
    checked: int = 0
    spot_checked: int = Field(0, description="Fast-path rows re-evaluated on the recompute path")
    violations: int = 0
    first_violation: Optional[Violation] = None
    reduction: Optional[str] = None
    status: Literal["pass", "fail", "inconclusive"] = "pass"
    bound: Optional[int] = None
    value: Optional[int] = None
    findings: List[str] = Field(default_factory=list)
    entries: List["VerificationReport"] = Field(default_factory=list)
    wall_time: float = 0.0
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class RunConfig(BaseModel):
    """Everything that determines the output of one CLI run"""

    command: str
    subcommand: Optional[str] = None
    k: Optional[int] = None
    variant: Optional[str] = None
    family_path: Optional[str] = None
    coloring: Optional[str] = None
    mode: Optional[str] = None
    t: Optional[int] = None
    method: Optional[str] = None
    side: Optional[Side] = None
    sign: Optional[Sign] = None
    strategy: str = "greedy-balance"
    samples: int
    seed: int
    workers: int
    node_budget: int
    time_budget: float
    output_format: Literal["text", "json", "csv"] = "json"
    out: Optional[str] = None
    bad_prefix: bool = False


VerificationReport.model_rebuild()
