"""Parsing of command-line specifiers for groups, modules, subgroups and degrees."""
import json
import logging
import re
from pathlib import Path
from typing import List

from pydantic import ValidationError

from ghl.coeffmod import GModule, augmentation_ideal, module_from_payload, regular_module, trivial_module
from ghl.errors import UsageError
from ghl.groups import FiniteGroup, cyclic, dihedral, klein4, quaternion8, symmetric
from ghl.models import GroupPayload, ModulePayload

logger = logging.getLogger(__name__)

_PARAMETRIC = {"cyclic": cyclic, "dihedral": dihedral, "sym": symmetric}
_FIXED = {"klein4": klein4, "q8": quaternion8}


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"Cannot read {path}: {e}")


def parse_group(spec: str) -> FiniteGroup:
    """cyclic:N, dihedral:N, sym:N, klein4, q8 or file:PATH."""
    spec = spec.strip()
    if spec in _FIXED:
        return _FIXED[spec]()
    kind, _, arg = spec.partition(":")
    if kind == "file":
        try:
            payload = GroupPayload(**_read_json(arg))
        except ValidationError as e:
            raise UsageError(f"Invalid group file {arg}: {e}")
        return FiniteGroup.from_payload(payload.model_dump(), name=f"file:{Path(arg).name}")
    if kind in _PARAMETRIC:
        if not arg.isdigit() or int(arg) < 1:
            raise UsageError(f"Group specifier '{spec}' needs a positive integer")
        return _PARAMETRIC[kind](int(arg))
    raise UsageError(f"Unknown group specifier '{spec}'")


def parse_module(spec: str, group: FiniteGroup) -> GModule:
    """trivial:Z, trivial:Z/N, regular, augideal or file:PATH."""
    spec = spec.strip()
    if spec == "regular":
        return regular_module(group, "right")
    if spec == "augideal":
        return augmentation_ideal(group, "right")
    kind, _, arg = spec.partition(":")
    if kind == "trivial":
        if arg == "Z":
            return trivial_module(group)
        match = re.fullmatch(r"Z/?(\d+)", arg)
        if match and int(match.group(1)) >= 2:
            return trivial_module(group, [int(match.group(1))])
        raise UsageError(f"Trivial module specifier '{spec}' must be trivial:Z or trivial:Z/N with N >= 2")
    if kind == "file":
        try:
            payload = ModulePayload(**_read_json(arg))
        except ValidationError as e:
            raise UsageError(f"Invalid module file {arg}: {e}")
        return module_from_payload(group, payload.model_dump())
    raise UsageError(f"Unknown module specifier '{spec}'")


def parse_subgroup(spec: str, group: FiniteGroup) -> List[int]:
    """trivial, whole, gen:I,J (generated by element indices) or elems:I,J."""
    spec = spec.strip()
    if spec == "trivial":
        return [0]
    if spec == "whole":
        return list(group.elements())
    kind, _, arg = spec.partition(":")
    try:
        indices = [int(x) for x in arg.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"Subgroup specifier '{spec}' needs comma-separated element indices")
    for i in indices:
        if not 0 <= i < group.order:
            raise UsageError(f"Element index {i} out of range for {group.name}")
    if kind == "gen":
        return sorted(group.generated_subgroup(indices))
    if kind == "elems":
        return sorted(set(indices))
    raise UsageError(f"Unknown subgroup specifier '{spec}'")


def parse_degrees(spec: str) -> List[int]:
    """A..B, a single N, or a comma list; sorted and deduplicated."""
    spec = spec.strip()
    try:
        if ".." in spec:
            lo, hi = spec.split("..", 1)
            degrees = list(range(int(lo), int(hi) + 1))
            if not degrees:
                raise UsageError(f"Empty degree range '{spec}'")
        else:
            degrees = [int(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"Cannot parse degrees '{spec}'")
    if not degrees or min(degrees) < 0:
        raise UsageError(f"Degrees must be nonnegative, got '{spec}'")
    return sorted(set(degrees))
