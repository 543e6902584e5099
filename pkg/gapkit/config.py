"""Configuration: numeric tolerances, environment settings and run configs.

Environment variables are read once from the process environment, after
loading an optional ``.env`` file with python-dotenv:

    GAPKIT_THREADS   worker cap for thread pools (default 1)
    GAPKIT_PROGRESS  set to 1 to show tqdm progress bars
    GAPKIT_FFT_SIZE  discrete transform size (default 4096)
"""

import json
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from gapkit.errors import GapkitError

load_dotenv(override=False)
logger = logging.getLogger(__name__)


class Tolerances(BaseModel):
    """Numeric thresholds shared by the estimators."""

    model_config = ConfigDict(frozen=True)

    absolute: float = 1e-12
    slope_threshold: float = 0.05
    ridge: float = 1e-10
    trend_factor: float = 10.0
    defect_trend_factor: float = 5.0
    coefficient_floor: float = 1e-14
    eigen_floor: float = 1e-10
    defect_floor: float = 1e-4
    bisection_steps: int = 12


TOLERANCES = Tolerances()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


def thread_count() -> int:
    """Worker cap from GAPKIT_THREADS (at least 1)."""
    return max(1, _env_int("GAPKIT_THREADS", 1))


def progress_enabled() -> bool:
    return os.getenv("GAPKIT_PROGRESS", "0").strip().lower() in ("1", "true", "yes")


def fft_size() -> int:
    """Discrete transform size used by witness building and the bridges."""
    size = _env_int("GAPKIT_FFT_SIZE", 4096)
    if size < 64 or size & (size - 1):
        logger.warning(f"GAPKIT_FFT_SIZE={size} is not a power of two >= 64, using 4096")
        return 4096
    return size


class Command(str, Enum):
    DENSITY = "density"
    GAP = "gap"
    RADIUS = "radius"
    GAPTEST = "gaptest"
    TRANSPORT = "transport"
    VERIFY = "verify"


class RunConfig(BaseModel):
    """Everything a CLI run depends on. Identical configs give identical JSON."""

    model_config = ConfigDict(frozen=True, use_enum_values=True)

    command: Command
    set_spec: Optional[str] = None
    suite: Optional[str] = None
    measure_path: Optional[str] = None
    radius: float = Field(default=1000.0, gt=0, le=1e6)
    window: int = Field(default=256, ge=4, le=4096)
    delta: float = Field(default=0.2, ge=0)
    gap: Optional[float] = Field(default=None, gt=0)
    b: Optional[float] = Field(default=None, ge=0)
    alpha: float = Field(default=1.0, gt=0)
    removed: Optional[str] = None
    trials: int = Field(default=5, ge=0, le=1000)
    seed: int = 0
    json_path: Optional[str] = None
    csv_path: Optional[str] = None
    witness_path: Optional[str] = None

    @field_validator("set_spec")
    @classmethod
    def _strip_spec(cls, value: Optional[str]) -> Optional[str]:
        return value.strip() if value is not None else None


def load_run_config(path: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    """Merge a JSON config file with command-line overrides (flags win).

    Args:
        path: Optional path to a JSON object with RunConfig keys
        overrides: Values taken from flags; None values do not override

    Returns:
        The validated RunConfig
    """
    values: Dict[str, Any] = {}
    if path:
        config_file = Path(path)
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                loaded = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise GapkitError(f"Cannot read config file {config_file}: {e}") from e
        if not isinstance(loaded, dict):
            raise GapkitError(f"Config file {config_file} must contain a JSON object")
        values.update(loaded)
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise GapkitError(f"Invalid run configuration: {e}") from e
