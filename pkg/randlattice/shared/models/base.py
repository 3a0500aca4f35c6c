"""Base models for randlattice services."""

from typing import Optional

from pydantic import BaseModel as PydanticBaseModel, ConfigDict, Field

from ..config import settings


class BaseModel(PydanticBaseModel):
    """Base model with common configuration."""

    model_config = ConfigDict(
        # Values are immutable after construction and safe to share across threads
        frozen=True,
        # Use enum values instead of names
        use_enum_values=True,
        # Allow population by field name or alias
        populate_by_name=True,
        # Validate default values
        validate_default=True,
        # Extra fields are forbidden
        extra="forbid",
        # Complex coefficients and callables
        arbitrary_types_allowed=True,
    )


class Estimate(BaseModel):
    """A Monte Carlo estimate with its standard error."""

    value: float = Field(..., ge=0, description="Point estimate")
    stderr: float = Field(..., ge=0, description="Standard error of the estimate")
    repetitions: int = Field(..., ge=1, description="Number of independent realisations used")

    def agrees_with(self, target: float, tolerance: Optional[float] = None, absolute: float = 1e-12) -> bool:
        """Check whether the target lies within ``tolerance`` standard errors (settings default)."""
        tolerance = settings.stat_tolerance_stderr if tolerance is None else tolerance
        return abs(self.value - target) <= tolerance * self.stderr + absolute
