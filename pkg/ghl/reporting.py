"""Emit result records as JSON, CSV or an aligned text table."""
import csv
import io
import json
from typing import Any, Dict, List, Sequence

from ghl.errors import UsageError
from ghl.exactlinalg import FpAbGroup
from ghl.models import ResultRecord

FORMATS = ("json", "csv", "table")
COLUMNS = ("theory", "group", "module", "degree", "invariant_factors", "group_name", "runtime_ms", "cached")


def describe_factors(factors: Sequence[int]) -> str:
    return FpAbGroup.from_invariant_factors(list(factors)).describe()


def _rows(records: List[ResultRecord]) -> List[Dict[str, Any]]:
    rows = []
    for r in records:
        row = r.model_dump()
        row["invariant_factors"] = " ".join(str(d) for d in r.invariant_factors)
        row["group_name"] = describe_factors(r.invariant_factors)
        rows.append(row)
    return rows


def to_json(records: List[ResultRecord]) -> str:
    return json.dumps([r.model_dump() for r in records], indent=2, ensure_ascii=False)


def to_csv(records: List[ResultRecord]) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in _rows(records):
        writer.writerow(row)
    return out.getvalue()


def to_table(records: List[ResultRecord]) -> str:
    headers = ("theory", "group", "module", "degree", "group_name", "invariant_factors")
    rows = [[str(row[h]) for h in headers] for row in _rows(records)]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows)
    return "\n".join(lines)


def render(records: List[ResultRecord], fmt: str) -> str:
    if fmt == "json":
        return to_json(records)
    if fmt == "csv":
        return to_csv(records)
    if fmt == "table":
        return to_table(records)
    raise UsageError(f"Unknown output format '{fmt}', expected one of {', '.join(FORMATS)}")


def parse_csv(text: str) -> List[Dict[str, Any]]:
    """Read back the CSV emitter's rows as (theory, degree, factors) content."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append({
            "theory": row["theory"],
            "group": row["group"],
            "module": row["module"],
            "degree": int(row["degree"]),
            "invariant_factors": [int(x) for x in row["invariant_factors"].split()],
        })
    return out
