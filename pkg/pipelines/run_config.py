"""
Run Configuration

Validated, serializable description of one CLI run. The config is echoed
into every artifact header, so an artifact can be regenerated from it.
"""

import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from formatters.artifact_writer import CONFIG_PREFIX
from models.moment_core import MAX_ORDER_CEILING, as_intensity
from models.spectral_sim import MAX_DENSE_N, MAX_SEED
from models.walk_oracle import MAX_ORACLE_ORDER


class Subcommand(str, Enum):
    MOMENTS = 'moments'
    ORACLE_CHECK = 'oracle-check'
    SIMULATE = 'simulate'
    BOUNDS = 'bounds'
    DEGREES = 'degrees'


class OutputFormat(str, Enum):
    CSV = 'csv'
    JSON = 'json'


class RunConfig(BaseModel):
    """One subcommand invocation with all of its numeric inputs."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    subcommand: Subcommand
    max_k: int = Field(4, ge=0, le=MAX_ORDER_CEILING)
    intensity: str = '1'
    n: int = Field(500, ge=1, le=MAX_DENSE_N)
    sample_count: int = Field(100, ge=2)
    base_seed: int = Field(0, ge=0, le=MAX_SEED)
    bin_count: int = Field(50, ge=1)
    output_path: str = Field(..., min_length=1)
    output_format: OutputFormat = OutputFormat.CSV

    @field_validator('intensity', mode='before')
    @classmethod
    def _normalize_intensity(cls, value) -> str:
        # "0.5", 0.5 and "1/2" all become "1/2"
        return str(as_intensity(value))

    @property
    def exact_intensity(self) -> Fraction:
        return Fraction(self.intensity)

    @model_validator(mode='after')
    def _check_subcommand_guards(self) -> 'RunConfig':
        p = self.exact_intensity
        error: Optional[str] = None

        if self.subcommand == Subcommand.ORACLE_CHECK:
            if not 1 <= self.max_k <= MAX_ORACLE_ORDER:
                error = f"oracle-check needs 1 <= max_k <= {MAX_ORACLE_ORDER}, got {self.max_k}"
            elif p != 1:
                error = f"oracle-check runs at intensity 1, got {p}"
        elif self.subcommand == Subcommand.BOUNDS:
            if self.max_k < 2:
                error = f"bounds needs max_k >= 2, got {self.max_k}"
            elif p != 1:
                error = f"bounds are checked at intensity 1, got {p}"
        elif self.subcommand in (Subcommand.SIMULATE, Subcommand.DEGREES):
            if not 0 < p <= self.n:
                error = f"{self.subcommand.value} needs 0 < intensity <= n={self.n}, got {p}"
            elif self.subcommand == Subcommand.SIMULATE and self.max_k < 1:
                error = f"simulate needs max_k >= 1, got {self.max_k}"
            elif self.base_seed + self.sample_count - 1 > MAX_SEED:
                error = f"Seeds starting at {self.base_seed} overflow 64 bits"

        if error:
            raise ValueError(error)
        return self


def load_config_header(path: Union[str, Path]) -> RunConfig:
    """
    Rebuild the RunConfig embedded in an artifact.

    Raises:
        ValueError: the file carries no config header
    """
    text = Path(path).read_text()
    if text.lstrip().startswith('{'):
        payload = json.loads(text)
        if 'config' not in payload:
            raise ValueError(f"No config in JSON artifact {path}")
        return RunConfig.model_validate(payload['config'])

    first_line = text.split('\n', 1)[0]
    if not first_line.startswith(CONFIG_PREFIX):
        raise ValueError(f"No config header in CSV artifact {path}")
    return RunConfig.model_validate_json(first_line[len(CONFIG_PREFIX):])
