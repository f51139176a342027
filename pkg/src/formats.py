"""
Reading and writing permutation families, colorings and reports

Family files are either text (three lines of space-separated 1-based
integers, permutation 1 first) or JSON {k, variant, perms}.  Coloring
input is one line over {+, -} or space-separated +-1 integers.
"""

import csv
import io
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from pydantic import BaseModel, ValidationError

from src.construction import build_family, detect_variant
from src.errors import FormatError, UsageError
from src.models import SCHEMA_VERSION, Coloring, PermutationFamily, SolveOutcome, VerificationReport

logger = logging.getLogger(__name__)

MINUS_SIGNS = "-−"
FORMATS = ("text", "json", "csv")
CSV_FIELDS = [
    "k", "variant", "claim", "method", "mode", "bound", "value",
    "status", "checked", "violations", "wall_time",
]

_TOKEN = re.compile(r"\S+")


def _tagged(family: PermutationFamily) -> PermutationFamily:
    """Attach k and variant when the instance is a member of the construction"""
    if family.k is not None:
        return family
    detected = detect_variant(family.perms)
    if detected is None:
        logger.info("loaded family of size %d is not a constructed instance", family.n)
        return family
    k, variant = detected
    return build_family(k, variant)


def parse_family_text(text: str, source: Optional[str] = None) -> PermutationFamily:
    rows = []
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = list(_TOKEN.finditer(raw.split("#", 1)[0]))
        if tokens:
            rows.append((number, tokens))
    if len(rows) != 3:
        raise FormatError(f"expected 3 permutation lines, found {len(rows)}", rows[-1][0] if rows else 1, 1, source)

    n = len(rows[0][1])
    perms = []
    for number, tokens in rows:
        if len(tokens) != n:
            raise FormatError(f"permutation has {len(tokens)} entries, expected {n}", number, 1, source)
        seen = set()
        for match in tokens:
            try:
                value = int(match.group())
            except ValueError:
                raise FormatError(f"expected an integer, got {match.group()!r}", number, match.start() + 1, source)
            if not 1 <= value <= n or value in seen:
                reason = "repeated" if value in seen else f"out of range 1..{n}"
                raise FormatError(f"entry {value} is {reason}", number, match.start() + 1, source)
            seen.add(value)
        perms.append(tuple(int(match.group()) for match in tokens))
    return _tagged(PermutationFamily(perms=tuple(perms)))


def parse_family_json(text: str, source: Optional[str] = None) -> PermutationFamily:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno, source)
    if not isinstance(data, dict) or "perms" not in data:
        raise FormatError("expected an object with a 'perms' field", 1, 1, source)
    try:
        k, variant = data.get("k"), data.get("variant")
        if k is not None and variant is None:
            variant = "R" * int(k)
        family = PermutationFamily(perms=data["perms"], k=k, variant=variant)
    except (ValidationError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid family: {exc}", 1, 1, source)
    if family.k is not None and family.perms != build_family(family.k, family.variant).perms:
        raise FormatError(f"perms do not match the construction for k={family.k} variant={family.variant}", 1, 1, source)
    return _tagged(family)


def load_family(path: str) -> PermutationFamily:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read family file {path}: {exc.strerror}")
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return parse_family_json(text, path)
    return parse_family_text(text, path)


def family_to_text(family: PermutationFamily) -> str:
    return "".join(" ".join(str(e) for e in perm) + "\n" for perm in family.perms)


def family_to_json(family: PermutationFamily) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "k": family.k,
        "variant": family.variant,
        "perms": [list(perm) for perm in family.perms],
    }
    return json.dumps(payload) + "\n"


def parse_coloring(text: str, source: Optional[str] = None) -> Coloring:
    """Parse '+-+' style or '1 -1 1' style input; blank lines are ignored"""
    lines = [(number, line) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if len(lines) != 1:
        raise FormatError(f"expected one coloring line, found {len(lines)}", lines[1][0] if len(lines) > 1 else 1, 1, source)
    number, line = lines[0]
    tokens = list(_TOKEN.finditer(line))
    values = []
    if len(tokens) > 1 or tokens[0].group() in ("1", "+1", "-1", "−1"):
        for match in tokens:
            token = match.group().replace("−", "-")
            if token not in ("1", "+1", "-1"):
                raise FormatError(f"expected +1 or -1, got {match.group()!r}", number, match.start() + 1, source)
            values.append(int(token))
    else:
        start = tokens[0].start()
        for offset, char in enumerate(tokens[0].group()):
            if char == "+":
                values.append(1)
            elif char in MINUS_SIGNS:
                values.append(-1)
            else:
                raise FormatError(f"expected '+' or '-', got {char!r}", number, start + offset + 1, source)
    return Coloring(values=tuple(values))


def load_coloring(value: str) -> Coloring:
    """A coloring given inline or as the path of a coloring file"""
    path = Path(value)
    if path.is_file():
        return parse_coloring(path.read_text(encoding="utf-8"), value)
    return parse_coloring(value, "<coloring>")


def to_payload(model: BaseModel, **extra: Any) -> Dict[str, Any]:
    payload = {"schema_version": SCHEMA_VERSION}
    payload.update(model.model_dump(mode="json"))
    payload.update(extra)
    return payload


def solve_payload(outcome: SolveOutcome) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "mode": outcome.mode}
    payload["t" if outcome.mode == "decide" else "value"] = outcome.value
    payload.update(
        feasible=outcome.feasible,
        status=outcome.status,
        witness=outcome.witness_coloring.to_string() if outcome.witness_coloring else None,
        nodes=outcome.nodes_explored,
        millis=round(outcome.wall_time * 1000, 3),
    )
    return payload


def dump_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2) + "\n"


def report_rows(report: VerificationReport) -> Iterable[Dict[str, Any]]:
    """One CSV record per (k, variant)"""
    for entry in report.entries or [report]:
        yield {
            "k": entry.k,
            "variant": entry.variant or "",
            "claim": report.claim,
            "method": entry.method or "",
            "mode": entry.mode,
            "bound": "" if entry.bound is None else entry.bound,
            "value": "" if entry.value is None else entry.value,
            "status": entry.status,
            "checked": entry.checked,
            "violations": entry.violations,
            "wall_time": f"{entry.wall_time:.3f}",
        }


def dump_csv(rows: Iterable[Dict[str, Any]], fields: Optional[List[str]] = None) -> str:
    rows = list(rows)
    fields = fields or (list(rows[0]) if rows else CSV_FIELDS)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def report_summary(report: VerificationReport) -> str:
    """One-line human summary of a verification report"""
    parts = [f"{report.claim} k={report.k}"]
    if report.variant:
        parts.append(f"variant={report.variant}")
    if report.method:
        parts.append(f"method={report.method}")
    parts.append(f"{report.status.upper()}: checked={report.checked} violations={report.violations}")
    if report.bound is not None:
        parts.append(f"bound={report.bound}")
    if report.value is not None:
        parts.append(f"value={report.value}")
    if report.findings:
        parts.append(f"findings={len(report.findings)}")
    if report.first_violation is not None:
        parts.append(f"first={report.first_violation.coloring}")
    return " ".join(parts)


def render(payload: Dict[str, Any], output_format: str, rows: Optional[Iterable[Dict[str, Any]]] = None,
           summary: Optional[str] = None) -> str:
    """Render a command result; text falls back to key: value lines"""
    if output_format == "json":
        return dump_json(payload)
    if output_format == "csv":
        return dump_csv(rows if rows is not None else [_flat(payload)])
    if summary is not None:
        return summary + "\n"
    return "".join(f"{key}: {value}\n" for key, value in _flat(payload).items())


def _flat(payload: Dict[str, Any]) -> Dict[str, Any]:
    flat = {}
    for key, value in payload.items():
        if isinstance(value, dict):
            for inner, item in value.items():
                flat[f"{key}.{inner}"] = " ".join(map(str, item)) if isinstance(item, (list, tuple)) else item
        elif isinstance(value, (list, tuple)):
            flat[key] = " ".join(map(str, value))
        else:
            flat[key] = value
    return flat
