import hashlib
import json
from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class MatrixPayload(BaseModel):
    """Sparse integer matrix as (row, col, value) triplets."""
    rows: int
    cols: int
    triplets: List[List[Any]] = Field(default_factory=list, description="[row, col, value] with value as a decimal string")


class AbelianGroupPayload(BaseModel):
    """Finitely generated abelian group by invariant factors."""
    invariant_factors: List[int] = Field(default_factory=list, description="d1 | d2 | ..., 0 for a free factor")


class GroupPayload(BaseModel):
    """Finite group given by its multiplication table."""
    order: int
    table: List[List[int]]
    labels: Optional[List[str]] = None


class ModulePayload(BaseModel):
    """Coefficient module: presentation plus one action matrix per element label."""
    side: str = Field("right", description="'left', 'right' or 'both'")
    free_rank: int = 0
    torsion: List[int] = Field(default_factory=list)
    action: Dict[str, List[List[Any]]] = Field(default_factory=dict, description="element label -> triplets")


class ComplexDegreePayload(BaseModel):
    """One degree of a serialized complex."""
    degree: int
    group: List[int]
    boundary: List[List[Any]]


class JobSpec(BaseModel):
    """One compute job: theory, group, module and degrees."""
    model_config = ConfigDict(frozen=True)

    theory: str
    group: str
    module: str = "trivial:Z"
    degrees: List[int]
    route: Optional[str] = None
    output_format: str = Field("json", description="json, csv or table")
    use_cache: bool = True

    def job_hash(self) -> str:
        payload = {"theory": self.theory, "group": self.group, "module": self.module,
                   "degrees": list(self.degrees), "route": self.route}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class ResultRecord(BaseModel):
    """Computed (co)homology group in one degree."""
    theory: str
    group: str
    module: str
    degree: int
    invariant_factors: List[int]
    runtime_ms: float = 0.0
    cached: bool = False

    def content(self) -> Dict[str, Any]:
        """Fields covered by the cache-equality contract."""
        return self.model_dump(exclude={"runtime_ms", "cached"})


class HomRecord(BaseModel):
    """Induced homomorphism on (co)homology."""
    theory: str
    group: str
    subgroup: str
    module: str
    map: str
    degree: int
    source: List[int]
    target: List[int]
    matrix: MatrixPayload
    index: int = Field(..., description="[G:H]")
    is_index_multiplication: Optional[bool] = None


class CheckResult(BaseModel):
    """One verification check."""
    name: str
    suite: str
    passed: bool
    expected: Any = None
    computed: Any = None
    witness: Any = None
    seconds: float = 0.0
    note: Optional[str] = None


class VerifyReport(BaseModel):
    """Outcome of a verification suite."""
    suite: str
    seed: int
    mutation: Optional[str] = None
    checks: List[CheckResult] = Field(default_factory=list)
    started_at: datetime = Field(default_factory=datetime.now)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


class ExperimentRow(BaseModel):
    """One tabulated experiment value."""
    parameters: Dict[str, Any]
    computed: List[int]
    predicted: Optional[List[int]] = None
    agrees: Optional[bool] = None
    matrix: Optional[MatrixPayload] = None


class ExperimentTable(BaseModel):
    """Experiment output; rows are reported, never asserted."""
    name: str
    description: str
    rows: List[ExperimentRow] = Field(default_factory=list)


class CacheStats(BaseModel):
    """Result cache usage."""
    directory: str
    entries: int
    bytes: int
    stale: int = Field(0, description="entries written by another engine version")
