"""Pydantic models for nilplab input files and reports."""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exactmath import QQ, Field as BaseField, is_prime


class SeriesKind(str, Enum):
    """Descending series computed for an algebra."""
    WEAK = "weak"
    STRONG = "strong"
    DERIVED = "derived"


class OutputFormat(str, Enum):
    PRETTY = "pretty"
    JSON = "json"


class Command(str, Enum):
    """CLI subcommands."""
    ANALYZE = "analyze"
    SCENARIO = "scenario"
    TOWER = "tower"
    LIST = "list"
    RUN_ALL = "run-all"


class FieldSpec(BaseModel):
    """A prime field in input files: {"p": 5}. The rationals are the string "Q"."""
    p: int

    @field_validator("p")
    @classmethod
    def check_prime(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError(f"{v} is not prime")
        return v


FieldLike = Union[Literal["Q"], FieldSpec]


def field_from_spec(spec: FieldLike) -> BaseField:
    if isinstance(spec, FieldSpec):
        return BaseField(spec.p)
    return QQ


def spec_from_field(field: BaseField) -> FieldLike:
    return "Q" if field.p is None else FieldSpec(p=field.p)


class AlgebraFile(BaseModel):
    """Algebra JSON document.

    {"field": "Q" | {"p": N}, "dim": n, "labels": [...],
     "products": [[i, j, k, "scalar"], ...]}

    Indices are 0-based and omitted products are zero.
    """
    field: FieldLike = "Q"
    dim: int = Field(ge=0)
    labels: Optional[List[str]] = None
    products: List[Tuple[int, int, int, str]] = []

    @field_validator("products", mode="before")
    @classmethod
    def stringify_scalars(cls, v: Any) -> Any:
        # Accept bare integers for structure constants
        if isinstance(v, list):
            return [
                [*p[:3], str(p[3])] if isinstance(p, (list, tuple)) and len(p) == 4 and isinstance(p[3], int) else p
                for p in v
            ]
        return v

    @model_validator(mode="after")
    def check_products(self) -> "AlgebraFile":
        if self.labels is not None and len(self.labels) != self.dim:
            raise ValueError(f"{len(self.labels)} labels for dimension {self.dim}")
        f = field_from_spec(self.field)
        seen = set()
        for n, (i, j, k, c) in enumerate(self.products):
            for idx in (i, j, k):
                if not 0 <= idx < self.dim:
                    raise ValueError(f"products[{n}]: index {idx} out of range for dimension {self.dim}")
            if (i, j, k) in seen:
                raise ValueError(f"products[{n}]: duplicate entry for ({i}, {j}, {k})")
            seen.add((i, j, k))
            try:
                f.parse(c)
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"products[{n}]: {e}") from None
        return self

    def to_algebra(self):
        from .algebra import make_algebra

        f = field_from_spec(self.field)
        return make_algebra(f, self.dim, self.labels, [(i, j, k, f.parse(c)) for i, j, k, c in self.products])

    @classmethod
    def from_algebra(cls, A) -> "AlgebraFile":
        return cls(
            field=spec_from_field(A.field),
            dim=A.dim,
            labels=list(A.labels),
            products=[(i, j, k, str(c)) for i, j, k, c in A.entries],
        )


class TowerConfig(BaseModel):
    """Truncated free algebra presentation.

    {"alphabet": ["x", "w", "z"], "literals": ["xz", "wx"],
     "sandwich": [["w", "x", "w"]], "degree": 8}

    The middle of a sandwich rule is a string whose letters form the set.
    """
    alphabet: List[str]
    literals: List[str] = []
    sandwich: List[Tuple[str, str, str]] = []
    degree: int = Field(default=8, ge=1)
    degrees: Optional[List[int]] = None
    field: FieldLike = "Q"

    @field_validator("alphabet")
    @classmethod
    def check_alphabet(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("alphabet is empty")
        for letter in v:
            if len(letter) != 1:
                raise ValueError(f"letters must be single characters, got {letter!r}")
        if len(set(v)) != len(v):
            raise ValueError("alphabet has repeated letters")
        return v

    @field_validator("degrees")
    @classmethod
    def check_degrees(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is not None and any(d < 1 for d in v):
            raise ValueError("degrees must be positive")
        return v

    @model_validator(mode="after")
    def check_letters(self) -> "TowerConfig":
        letters = set(self.alphabet)
        for word in self.literals:
            if len(word) < 2:
                raise ValueError(f"literal {word!r} must have length at least 2")
            if not set(word) <= letters:
                raise ValueError(f"literal {word!r} uses letters outside the alphabet")
        for left, middle, right in self.sandwich:
            if len(left) != 1 or len(right) != 1:
                raise ValueError(f"sandwich rule {(left, middle, right)!r} needs single-letter ends")
            if not set(left + middle + right) <= letters:
                raise ValueError(f"sandwich rule {(left, middle, right)!r} uses letters outside the alphabet")
        return self


class SeriesSummary(BaseModel):
    kind: SeriesKind
    dimensions: List[int]
    stabilized: bool
    vanishing_index: Optional[int] = None


class StructureChecks(BaseModel):
    """Identities checked on basis triples."""
    associative: bool
    anticommutative: bool
    jacobi: bool
    lie: bool


class NilpotenceReport(BaseModel):
    """Indices of the three equivalent nilpotence criteria.

    N1: weak series, N2: strong series, N3: powers of the multiplication
    algebra. All present or all absent.
    """
    N1: Optional[int] = None
    N2: Optional[int] = None
    N3: Optional[int] = None
    is_nilpotent: bool


class OperatorNilpotence(BaseModel):
    """Nilpotence of one of the operator algebras M, M_l, M_r, M_a."""
    kind: str  # "full", "left", "right", "associator"
    dim: int
    index: Optional[int] = None  # smallest k with M^k = 0


class AnalysisReport(BaseModel):
    """Everything `nilplab analyze` prints for one algebra."""
    field: str
    dim: int
    labels: List[str]
    nilpotence: NilpotenceReport
    series: List[SeriesSummary]
    solvable: bool
    derived_length: Optional[int] = None
    structure: StructureChecks
    operator_algebras: List[OperatorNilpotence]
    stable_image_dim: int
    stable_image_steps: int


class Verdict(BaseModel):
    """One checked claim of a scenario."""
    model_config = ConfigDict(populate_by_name=True)

    claim: str
    citation: str
    expected: Any = None
    computed: Any = None
    passed: bool = Field(alias="pass")


class ScenarioParams(BaseModel):
    """Parameters accepted by scenario runners; unset values use settings."""
    degree: Optional[int] = Field(default=None, ge=1)
    degrees: Optional[List[int]] = None
    prime: Optional[int] = None
    n: Optional[int] = Field(default=None, ge=2)

    @field_validator("degrees")
    @classmethod
    def check_degrees(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is not None and any(d < 1 for d in v):
            raise ValueError("degrees must be positive")
        return v

    @field_validator("prime")
    @classmethod
    def check_prime(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and not is_prime(v):
            raise ValueError(f"{v} is not prime")
        return v


class ScenarioReport(BaseModel):
    """Verdicts and witnesses of one reproduction run."""
    scenario: str
    parameters: Dict[str, Any] = {}
    verdicts: List[Verdict] = []
    witnesses: Dict[str, Any] = {}
    runtime_ms: float = 0.0
    error: Optional[str] = None  # set when the run raised instead of finishing

    @property
    def passed(self) -> bool:
        return self.error is None and all(v.passed for v in self.verdicts)

    def to_json(self, **kwargs) -> str:
        return self.model_dump_json(by_alias=True, **kwargs)


class RunSummary(BaseModel):
    """Aggregate of a run over several scenarios, ordered by name."""
    reports: List[ScenarioReport]
    passed: int
    failed: int

    @property
    def all_passed(self) -> bool:
        return self.failed == 0


class CliConfig(BaseModel):
    """Validated command line."""
    command: Command
    input_path: Optional[str] = None
    scenario_name: Optional[str] = None
    params: ScenarioParams = ScenarioParams()
    output: OutputFormat = OutputFormat.PRETTY

    @model_validator(mode="after")
    def check_arguments(self) -> "CliConfig":
        if self.command == Command.ANALYZE and not self.input_path:
            raise ValueError("analyze requires an algebra file")
        if self.command == Command.SCENARIO and not self.scenario_name:
            raise ValueError("scenario requires a scenario name")
        if self.command == Command.TOWER and not (self.scenario_name or self.input_path):
            raise ValueError("tower requires a scenario name or --config")
        return self
