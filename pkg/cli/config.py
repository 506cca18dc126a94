import os
import logging
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from core.errors import ParseError
from core.extreal import DEFAULT_TOLERANCE

VERSION = "0.1.0"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

COMMANDS = ("classify", "minorant", "assoc", "trace", "phireg", "compare")
DEFAULT_WINDOW = 64
DEFAULT_WORKERS = 4
DEFAULT_GRID = "0:10:0.1"


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Literal["classify", "minorant", "assoc", "trace", "phireg", "compare"]
    inputs: List[str]
    window: int = DEFAULT_WINDOW
    tolerance: float = DEFAULT_TOLERANCE
    emit: Optional[Literal["json", "csv"]] = None
    verify: bool = False
    extended: bool = False
    grid: Optional[str] = None
    loggrid: Optional[str] = None
    phi: str = "exp"
    phi1: Optional[str] = None
    phi2: Optional[str] = None
    reconstruct: bool = False
    workers: int = DEFAULT_WORKERS
    log_level: str = "WARNING"

    @field_validator("window")
    @classmethod
    def _window(cls, value: int) -> int:
        if value < 4:
            raise ValueError("window must be at least 4")
        return value

    @field_validator("tolerance")
    @classmethod
    def _tolerance(cls, value: float) -> float:
        if not 0 < value <= 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3]")
        return value

    @field_validator("workers")
    @classmethod
    def _workers(cls, value: int) -> int:
        if value < 1:
            raise ValueError("at least one worker is needed")
        return value

    @field_validator("log_level")
    @classmethod
    def _log_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value}")
        return value

    @property
    def output_format(self) -> str:
        """assoc dumps functions, so it defaults to CSV; every other command to JSON."""
        if self.emit is not None:
            return self.emit
        return "csv" if self.command == "assoc" else "json"

    @property
    def grid_spec(self) -> str:
        return self.grid or DEFAULT_GRID


def env_defaults() -> dict:
    """Defaults read from the environment (a .env file is loaded by the entry script)."""
    defaults = {}
    for key, name, cast in (
        ("tolerance", "SEQREG_TOLERANCE", float),
        ("window", "SEQREG_WINDOW", int),
        ("workers", "SEQREG_WORKERS", int),
        ("log_level", "SEQREG_LOG_LEVEL", str),
    ):
        raw = os.getenv(name)
        if raw is None or raw == "":
            continue
        try:
            defaults[key] = cast(raw)
        except ValueError as e:
            raise ParseError(f"invalid value {raw!r}", field=name) from e
    return defaults


def build_config(**values) -> RunConfig:
    """Explicit values win over environment defaults; validation failures become parse errors."""
    merged = env_defaults()
    merged.update({k: v for k, v in values.items() if v is not None})
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        error = e.errors()[0]
        field = ".".join(str(part) for part in error["loc"])
        raise ParseError(error["msg"], field=field) from e


def configure_logging(level: str):
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
