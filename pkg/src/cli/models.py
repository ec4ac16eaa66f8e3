"""Run configuration: defaults, --config files and command-line flags."""

import logging
from typing import Any, Dict, List, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field, field_validator, model_validator

from src.config import settings
from src.services.isogeny import CsidhParams

logger = logging.getLogger(__name__)

PARAMETER_SETS: Dict[str, tuple] = {
    "toy419": (3, 5, 7),
    "toy78539": (3, 5, 7, 11, 17),
}

SOLVER_NAMES = ("kuperberg", "regev", "mitm")


def _split_ints(value: Any) -> Any:
    if isinstance(value, str):
        return [int(v) for v in value.replace(" ", "").split(",") if v]
    return value


class RunConfig(BaseModel):
    """Options shared by every subcommand, layered: defaults < --config file < flags."""

    params: Optional[str] = Field(None, description="Named parameter set, e.g. toy419")
    p: Optional[int] = Field(None, description="Explicit prime p = 4 * prod(ells) - 1")
    ells: Optional[List[int]] = Field(None, description="Small odd primes l_1, ..., l_u")
    solver: str = Field("mitm", description="Hidden shift solver: kuperberg, regev or mitm")
    seed: Optional[int] = Field(None, description="Seed fixing all randomness of a run")
    out: Optional[str] = Field(None, description="Directory for JSONL records")
    budget: Optional[int] = Field(None, description="Work budget of the command (queries or candidates)")
    trials: int = Field(1000, description="Random classes per discriminant")
    keys: int = Field(1, description="Number of random keys to generate, exchange or attack")
    m: Optional[int] = Field(None, description="Secret exponent bound; derived from h when omitted")
    digits: List[int] = Field(default_factory=lambda: [20], description="Sizes log10|delta| to sample")
    count: int = Field(3, description="Discriminants sampled per size")
    deltas: Optional[List[int]] = Field(None, description="Explicit discriminants for the experiment")
    mode: str = Field("consecutive", description="Prime set: consecutive or reordered")
    persist: bool = Field(True, description="Store trials and transcripts in the database")
    settings_overrides: Dict[str, Any] = Field(default_factory=dict,
                                               description="Settings fields set from the config file")

    @field_validator("ells", "digits", "deltas", mode="before")
    @classmethod
    def _parse_lists(cls, value):
        return _split_ints(value)

    @field_validator("solver")
    @classmethod
    def _check_solver(cls, value: str) -> str:
        if value not in SOLVER_NAMES:
            raise ValueError(f"solver must be one of {SOLVER_NAMES}")
        return value

    @field_validator("mode")
    @classmethod
    def _check_mode(cls, value: str) -> str:
        if value not in ("consecutive", "reordered"):
            raise ValueError("mode must be consecutive or reordered")
        return value

    @model_validator(mode="after")
    def _check_positive(self) -> "RunConfig":
        for name in ("budget", "trials", "keys", "count", "m"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.params is not None and self.params not in PARAMETER_SETS:
            raise ValueError(f"Unknown parameter set {self.params!r}, known: {sorted(PARAMETER_SETS)}")
        return self

    @classmethod
    def load(cls, config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """Build from a flat key=value file plus command-line overrides.

        Keys naming a Settings field (e.g. kuperberg_max_pool) go to
        settings_overrides; anything else must be a RunConfig field.
        """
        data: Dict[str, Any] = {}
        tuned: Dict[str, Any] = {}
        if config_path:
            for key, value in dotenv_values(config_path).items():
                key = key.lower()
                if key in cls.model_fields and key != "settings_overrides":
                    data[key] = value
                elif key in _settings_fields():
                    tuned[key] = value
                else:
                    raise ValueError(f"Unknown configuration key {key!r} in {config_path}")
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        data["settings_overrides"] = tuned
        return cls(**data)

    def apply_settings(self) -> None:
        """Push config-file tuning and the run seed into the global settings."""
        for key, value in self.settings_overrides.items():
            field = type(settings).model_fields[key]
            setattr(settings, key, _coerce(value, field.annotation))
        if self.seed is not None:
            settings.seed = self.seed
        if self.budget is not None:
            settings.query_budget = self.budget

    def csidh_params(self) -> CsidhParams:
        if self.ells:
            params = CsidhParams.from_ells(self.ells)
            if self.p is not None and self.p != params.p:
                raise ValueError(f"p={self.p} disagrees with 4*prod(ells)-1={params.p}")
            return params
        return CsidhParams.from_ells(PARAMETER_SETS[self.params or "toy419"])


def _settings_fields() -> List[str]:
    return list(type(settings).model_fields)


def _coerce(value: Any, annotation: Any) -> Any:
    if value is None or not isinstance(value, str):
        return value
    if annotation is bool:
        return value.strip().lower() in ("1", "true", "yes", "on")
    if annotation is int:
        return int(value)
    if annotation is float:
        return float(value)
    if annotation == Optional[int]:
        return int(value) if value.strip() else None
    return value
