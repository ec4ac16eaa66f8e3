"""Pydantic records for transcripts, experiment rows and reports.

Services build these and the command layer serialises them to JSONL and tables.
"""

from typing import List, Optional

from pydantic import BaseModel, Field


class ParamsRecord(BaseModel):
    """Generated CSIDH parameters."""
    p: int
    ells: List[int]
    discriminant: int


class KeyRecord(BaseModel):
    """A generated key pair."""
    p: int
    ells: List[int]
    seed: Optional[int] = None
    index: int = 0
    m: int
    secret: List[int] = Field(..., description="Exponent vector e_1, ..., e_u")
    public_A: int = Field(..., description="Montgomery coefficient of the public curve")


class ExchangeTranscript(BaseModel):
    """Both sides of one in-process key exchange."""
    p: int
    ells: List[int]
    seed: Optional[int] = None
    index: int = 0
    m: int
    alice_secret: List[int]
    alice_public: int
    bob_secret: List[int]
    bob_public: int
    alice_shared: int
    bob_shared: int
    agreed: bool


class AttackRecord(BaseModel):
    """Transcript of one key-recovery attack."""
    p: int
    ells: List[int]
    seed: Optional[int] = None
    index: int = 0
    solver: str
    public_A: int
    recovered: bool = False
    first_attempt: Optional[bool] = None
    true_shift: Optional[List[int]] = Field(None, description="Class of the generated secret, when known")
    shift: Optional[List[int]] = None
    divisors: List[int] = Field(default_factory=list)
    exponents: Optional[List[int]] = Field(None, description="Recovered exponents aligned with ells")
    decomposition: Optional[List[int]] = Field(None, description="Short exponents over the generating primes")
    generating_primes: List[int] = Field(default_factory=list)
    attempts: Optional[int] = None
    queries: Optional[int] = None
    setup_queries: Optional[int] = None
    verification_queries: Optional[int] = None
    peak_pool: Optional[int] = None
    memory_budget: Optional[int] = None
    pool_trace: List[int] = Field(default_factory=list)
    chain_length: Optional[int] = None
    chain_degree: Optional[int] = None
    error: Optional[str] = None


class Table2Row(BaseModel):
    """Measured maximal exponent for one discriminant."""
    delta: int
    log10_delta: float
    generator_count: int
    max_coefficient: Optional[int] = None
    exponent_bound: int
    within_bound: Optional[bool] = None
    mode: str
    trials: int = 0
    mean_max: Optional[float] = None
    raw_max_coefficient: Optional[int] = None
    raw_mean_max: Optional[float] = None
    class_number: Optional[int] = None
    divisors: List[int] = Field(default_factory=list)
    primes: List[int] = Field(default_factory=list)
    error: Optional[str] = None


class TrialLine(BaseModel):
    """One random class and its short decomposition."""
    delta: int
    trial: int
    y: List[int]
    exponents: List[int]
    max_abs: int
    raw_max_abs: Optional[int] = None


class ReferenceRow(BaseModel):
    """Published maximal exponents, shown next to measured rows."""
    log10_delta: int
    generator_count: int
    max_coefficient: int
    exponent_bound: int


class AuditCheck(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ParamsReport(BaseModel):
    """Parameter audit outcome."""
    p: int
    ells: List[int] = Field(default_factory=list)
    discriminant: int
    class_number: Optional[int] = None
    checks: List[AuditCheck] = Field(default_factory=list)
    passed: bool = False


class CostRow(BaseModel):
    """Classical and quantum cost exponents (log2) for one size of p."""
    log_p: int
    classical_log2: float = Field(..., description="log2 sqrt(N) with N ~ sqrt(p)")
    reference_quantum_log2: Optional[int] = Field(None, description="Published quantum cost, reference only")
    subexp_log2: float = Field(..., description="log2 of exp(sqrt(ln|D| lnln|D|)/sqrt(2)), lower-order terms dropped")
    query_log2: float = Field(..., description="log2 of exp(sqrt(2 ln N)) queries, lower-order terms dropped")


class ErrorRecord(BaseModel):
    """Structured failure emitted on a non-zero exit."""
    success: bool = False
    command: str
    error_type: str
    error: str


class FormResult(BaseModel):
    operation: str
    argument: str
    result: str


class ClassGroupReport(BaseModel):
    """Class number, structure and requested form operations for one discriminant."""
    delta: int
    class_number: int
    divisors: List[int]
    generators: List[str]
    operations: List[FormResult] = Field(default_factory=list)


class LatticeReport(BaseModel):
    """Result of one lattice operation on a row basis."""
    operation: str
    basis: List[List[int]]
    result: List[List[int]] = Field(default_factory=list)
    divisors: List[int] = Field(default_factory=list)
    vector: Optional[List[int]] = None
    norm_squared: Optional[int] = None
