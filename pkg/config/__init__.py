"""
Configuration settings for levelforge.
"""

import os
from typing import Any, Dict, Optional, Tuple

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator

load_dotenv()


class Config:
    """Application configuration."""

    # Gröbner budgets
    BUDGET_PAIRS = int(os.getenv("LEVELFORGE_BUDGET_PAIRS", "200000"))
    BUDGET_DEGREE = int(os.getenv("LEVELFORGE_BUDGET_DEGREE", "64"))
    BUDGET_SECONDS = float(os.getenv("LEVELFORGE_BUDGET_SECONDS", "0"))  # 0 = unlimited

    # Runtime
    LOG_LEVEL = os.getenv("LEVELFORGE_LOG_LEVEL", "WARNING")
    JOBS = int(os.getenv("LEVELFORGE_JOBS", "1"))

    # Test suite
    RUN_SLOW_TESTS = os.getenv("LEVELFORGE_RUN_SLOW_TESTS", "false").lower() == "true"

    ENGINE_VERSION = "1.0.0"
    SUPPORTED_ORDERS = ["degrevlex", "lex"]

    @classmethod
    def get_budget_config(cls) -> Dict[str, Any]:
        """Get Gröbner budget configuration dictionary."""
        return {
            "max_pairs": cls.BUDGET_PAIRS,
            "max_degree": cls.BUDGET_DEGREE,
            "max_seconds": cls.BUDGET_SECONDS,
        }

    @classmethod
    def get_run_defaults(cls) -> Dict[str, Any]:
        """Get default CLI run settings."""
        return {
            "p": 2,
            "n": 2,
            "k": 1,
            "order": "degrevlex",
            "jobs": cls.JOBS,
            "log_level": cls.LOG_LEVEL,
            "seed": 0,
            "output_format": "text",
            "heavy": False,
            **{f"budget_{key.split('_', 1)[1]}": value
               for key, value in cls.get_budget_config().items()},
        }


# Preset overrides for different run scenarios
QUICK_CONFIG = {
    "LEVELFORGE_BUDGET_PAIRS": "20000",
    "LEVELFORGE_BUDGET_DEGREE": "32",
    "LEVELFORGE_JOBS": "1",
}

PAPER_CONFIG = {
    "LEVELFORGE_BUDGET_PAIRS": "200000",
    "LEVELFORGE_BUDGET_DEGREE": "64",
    "LEVELFORGE_JOBS": "2",
}

HEAVY_CONFIG = {
    "LEVELFORGE_BUDGET_PAIRS": "50000000",
    "LEVELFORGE_BUDGET_DEGREE": "256",
    "LEVELFORGE_JOBS": "4",
}


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class RunConfig(BaseModel):
    """Validated configuration of one CLI run."""

    p: int = 2
    q: Optional[int] = None
    n: int = Field(2, ge=1, le=6)
    k: int = Field(1, ge=1, le=2)
    l: int = Field(2, ge=1, le=2)
    chart: Optional[Tuple[int, int]] = None
    order: str = "degrevlex"
    flavor: str = "multiplicative"
    orientation: str = "right"
    strategy: str = "elimination"
    dual: bool = True
    full_group: bool = False
    heavy: bool = False
    no_timings: bool = False
    output_format: str = "text"
    seed: int = 0
    jobs: int = Field(1, ge=1)
    log_level: str = "WARNING"
    budget_pairs: int = Field(200000, ge=1)
    budget_degree: int = Field(64, ge=1)
    budget_seconds: float = Field(0.0, ge=0)
    rational: bool = False
    vars: Optional[str] = None
    gens: Optional[str] = None
    relations: Optional[str] = None

    @field_validator("p")
    @classmethod
    def _check_prime(cls, value: int) -> int:
        if not _is_prime(value) or value > 97:
            raise ValueError(f"p must be a prime <= 97, got {value}")
        return value

    @field_validator("chart", mode="before")
    @classmethod
    def _parse_chart(cls, value):
        if isinstance(value, str):
            parts = [part.strip() for part in value.split(",")]
            if len(parts) != 2:
                raise ValueError(f"chart must be 's,t', got {value!r}")
            return int(parts[0]), int(parts[1])
        return value

    @field_validator("order")
    @classmethod
    def _check_order(cls, value: str) -> str:
        if value not in Config.SUPPORTED_ORDERS:
            raise ValueError(f"order must be one of {Config.SUPPORTED_ORDERS}")
        return value

    @field_validator("flavor")
    @classmethod
    def _check_flavor(cls, value: str) -> str:
        if value not in ("multiplicative", "constant"):
            raise ValueError("flavor must be 'multiplicative' or 'constant'")
        return value

    @field_validator("orientation")
    @classmethod
    def _check_orientation(cls, value: str) -> str:
        if value not in ("right", "left"):
            raise ValueError("orientation must be 'right' or 'left'")
        return value

    @field_validator("strategy")
    @classmethod
    def _check_strategy(cls, value: str) -> str:
        if value not in ("elimination", "linear"):
            raise ValueError("strategy must be 'elimination' or 'linear'")
        return value

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        if value.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return value.upper()

    @field_validator("output_format")
    @classmethod
    def _check_format(cls, value: str) -> str:
        if value not in ("text", "json"):
            raise ValueError("output format must be 'text' or 'json'")
        return value

    @model_validator(mode="after")
    def _check_q(self) -> "RunConfig":
        if self.q is not None and self.q not in (self.p, self.p ** 2):
            raise ValueError(f"q must be p or p^2, got {self.q} for p={self.p}")
        if self.q is not None and self.k > 1 and self.q != self.p ** self.k:
            raise ValueError(f"q={self.q} disagrees with k={self.k} for p={self.p}")
        return self

    def field_size(self) -> int:
        """Size of the fiber field: --q when given, else p^k."""
        return self.q or self.p ** self.k

    def budget(self) -> Dict[str, Any]:
        return {
            "max_pairs": self.budget_pairs,
            "max_degree": self.budget_degree,
            "max_seconds": self.budget_seconds,
        }

    def echo(self) -> Dict[str, Any]:
        """Inputs echoed into reports (stable, JSON-friendly)."""
        data = self.model_dump()
        data.pop("log_level")
        data.pop("jobs")
        if data["chart"] is not None:
            data["chart"] = list(data["chart"])
        return data


PRESETS = {"quick": QUICK_CONFIG, "paper": PAPER_CONFIG, "heavy": HEAVY_CONFIG}


def _run_fields(raw: Dict[str, Optional[str]]) -> Dict[str, Any]:
    """Map LEVELFORGE_* style keys onto RunConfig fields; unknown keys are dropped."""
    values = {}
    for key, value in raw.items():
        if value is None:
            continue
        name = key.lower()
        if name.startswith("levelforge_"):
            name = name[len("levelforge_"):]
        if name in RunConfig.model_fields:
            values[name] = value
    return values


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a key=value config file.

    Keys are matched case-insensitively against RunConfig fields, with an
    optional ``LEVELFORGE_`` prefix, so the same file can double as a .env.
    """
    return _run_fields(dotenv_values(path))


def preset_values(name: str) -> Dict[str, Any]:
    """RunConfig values of a named preset (quick, paper or heavy)."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return _run_fields(PRESETS[name])


def create_run_config(overrides: Optional[Dict[str, Any]] = None,
                      config_file: Optional[str] = None,
                      preset: Optional[str] = None) -> RunConfig:
    """
    Build a RunConfig from environment defaults, a preset, an optional file and overrides.

    Command-line overrides win over file values, file values over the preset,
    and the preset over the environment.
    """
    values = Config.get_run_defaults()
    if preset:
        values.update(preset_values(preset))
    if config_file:
        values.update(load_config_file(config_file))
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return RunConfig(**values)
