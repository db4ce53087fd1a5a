import hashlib
import math
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.utils.enums import DatasetFormat, Measure, OovPolicy, PosPolicy, Scheme, WindowOver

# ────────────────────────────
# ░░ Pipeline configuration ░░
# ────────────────────────────
BUILD_FIELDS = ("corpus", "window", "window_over", "min_context_freq", "tagmap", "targets", "target_datasets")
WEIGHT_FIELDS = BUILD_FIELDS + ("scheme",)
SVD_FIELDS = WEIGHT_FIELDS + ("svd_k", "svd_p", "seed", "svd_dense_cutoff")
SCORE_FIELDS = ("measure", "apsyn_n", "pos_policy", "oov_policy")

STAGE_FIELDS: Dict[str, tuple] = {
    "build": BUILD_FIELDS,
    "weight": WEIGHT_FIELDS,
    "svd": SVD_FIELDS,
}

WINDOW_GRID = (2, 3, 5)
APSYN_N_GRID = (100, 500, 1000)
EIGEN_WEIGHTS = (0.0, 0.5, 1.0)


class PipelineConfig(BaseModel):
    """Every knob of the build → weight → svd → score pipeline.

    Values are validated on construction; `fingerprint(stage)` hashes the
    canonical `key=value` form of the fields that stage depends on.
    """
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    corpus: List[str] = Field(default_factory=list)
    window: int = 2
    window_over: WindowOver = WindowOver.FILTERED
    min_context_freq: int = 100
    tagmap: Optional[str] = None
    targets: str = "all"
    target_datasets: List[str] = Field(default_factory=list)

    scheme: Scheme = Scheme.PPMI

    svd_k: int = 300
    svd_p: float = 1.0
    seed: int = 0
    svd_dense_cutoff: int = 1000

    measure: Measure = Measure.COSINE
    apsyn_n: int = 500
    pos_policy: PosPolicy = PosPolicy.NOUN_FIRST
    oov_policy: OovPolicy = OovPolicy.SKIP
    hubness_k: int = 1000
    workers: int = 1

    @field_validator("corpus", "target_datasets", mode="before")
    @classmethod
    def _split_csv(cls, value):
        if value is None:
            return []
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    @field_validator("window")
    @classmethod
    def _window_in_grid(cls, value: int) -> int:
        if value not in WINDOW_GRID:
            raise ValueError(f"window must be one of {WINDOW_GRID}, got {value}")
        return value

    @field_validator("min_context_freq", "seed")
    @classmethod
    def _non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("svd_k", "svd_dense_cutoff", "hubness_k", "workers")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("svd_p")
    @classmethod
    def _eigen_weight(cls, value: float) -> float:
        if float(value) not in EIGEN_WEIGHTS:
            raise ValueError(f"svd_p must be one of {EIGEN_WEIGHTS}")
        return float(value)

    @field_validator("apsyn_n")
    @classmethod
    def _apsyn_range(cls, value: int) -> int:
        if not APSYN_N_GRID[0] <= value <= APSYN_N_GRID[-1]:
            raise ValueError(f"apsyn_n must lie in [{APSYN_N_GRID[0]}, {APSYN_N_GRID[-1]}]")
        return value

    def canonical(self, fields) -> str:
        lines = []
        for name in sorted(fields):
            value = getattr(self, name)
            if isinstance(value, list):
                value = ",".join(value)
            elif hasattr(value, "value"):
                value = value.value
            elif value is None:
                value = ""
            lines.append(f"{name}={value}")
        return "\n".join(lines) + "\n"

    def fingerprint(self, stage: str) -> str:
        if stage == "score":
            fields = SVD_FIELDS + SCORE_FIELDS
        else:
            fields = STAGE_FIELDS[stage]
        return hashlib.sha256(self.canonical(fields).encode("utf-8")).hexdigest()

    def fingerprints(self, upto: str) -> Dict[str, str]:
        stages = ["build", "weight", "svd", "score"]
        return {s: self.fingerprint(s) for s in stages[: stages.index(upto) + 1]}


class MeasureParams(BaseModel):
    apsyn_n: int = Field(default=500, ge=1)


# ────────────────────────────
# ░░ Evaluation data ░░
# ────────────────────────────
class EvalPair(BaseModel):
    word1: str
    word2: str
    pos1: Optional[str] = None
    pos2: Optional[str] = None
    gold: float

    @field_validator("gold")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("gold score must be finite")
        return value


class EvalDataset(BaseModel):
    name: str
    format: DatasetFormat
    pairs: List[EvalPair] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)


class PairScore(BaseModel):
    word1: str
    word2: str
    pos1: Optional[str] = None      # POS actually used (after backoff)
    pos2: Optional[str] = None
    gold: float
    score: Optional[float] = None
    skipped: bool = False
    reason: str = ""                # "oov:<word>", "zero-vector", or the POS backoff note


class EvalResult(BaseModel):
    dataset: str
    measure: Measure
    apsyn_n: Optional[int] = None
    rho: float
    n_scored: int
    n_skipped: int
    per_pair: List[PairScore] = Field(default_factory=list)

    @property
    def coverage(self) -> float:
        total = self.n_scored + self.n_skipped
        return self.n_scored / total if total else 0.0


class EvalSummary(BaseModel):
    dataset: str
    measure: Measure
    apsyn_n: Optional[int] = None
    rho: float
    n_pairs: int
    n_scored: int
    n_skipped: int
    coverage: float
    fingerprints: Dict[str, str] = Field(default_factory=dict)


class SweepRow(BaseModel):
    model: str
    window: int
    measure: str
    dataset: str
    rho: Optional[float] = None
    coverage: float = 0.0
    fingerprint: str = ""


class HubnessSummary(BaseModel):
    measure: Measure
    apsyn_n: Optional[int] = None
    K: int
    n_queries: int
    n_skipped: int
    n_points: int
    n_zero_score: int = 0
    skewness: float
    fingerprints: Dict[str, str] = Field(default_factory=dict)
