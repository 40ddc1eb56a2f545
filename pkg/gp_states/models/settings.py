"""Configuration models for tolerances and application settings."""

from typing import Literal

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class ToleranceConfig(BaseModel):
    """Numerical tolerances shared by every service."""
    prune_threshold: float = Field(default=1e-14, gt=0.0, description="Coefficients below this magnitude are dropped from polynomials")
    comparison: float = Field(default=1e-9, gt=0.0, description="Default tolerance for coordinatewise and state comparisons")
    boundary: float = Field(default=1e-9, gt=0.0, description="|z_m| >= 1 - boundary counts as the boundary |z_m| = 1")
    closed_form: float = Field(default=1e-8, gt=0.0, description="Minimal 1 - |z_m| accepted by the closed-form moment formulas")
    unitarity: float = Field(default=1e-9, gt=0.0, description="Tolerance for g*g = I on user-supplied unitaries")
    unit_norm: float = Field(default=1e-12, gt=0.0, description="Tolerance for ||z|| = 1 on finite vectors")
    l2_norm: float = Field(default=1e-9, gt=0.0, description="Bracketing tolerance for prefix + tail bound of l2 vectors")
    rank: float = Field(default=1e-9, gt=0.0, description="Relative singular value cutoff for the Gram rank")
    psd: float = Field(default=1e-8, gt=0.0, description="Smallest admissible eigenvalue (negated) of a moment matrix")
    oracle: float = Field(default=1e-10, gt=0.0, description="Maximal closed-form vs oracle discrepancy before reporting a mismatch")
    l2_evaluation: float = Field(default=1e-11, gt=0.0, description="Target error of truncated l2 inner sums during evaluation")
    covariance: float = Field(default=1e-8, gt=0.0, description="Largest accepted gauge covariance residual")


class SystemSettings(BaseSettings):
    """Application-wide settings."""

    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)

    # Word and l2 horizons
    default_max_len: int = Field(default=6, ge=0, le=12, description="Default bound on |J| + |K| for exhaustive monomial tables")
    l2_prefix_length: int = Field(default=64, ge=1, description="Entries materialised when a closed-form l2 family is printed")
    max_horizon: int = Field(default=1 << 20, ge=16, description="Largest truncation index for l2 inner sums")

    # Output
    output_format: Literal["text", "structured"] = Field(default="text", description="Default report format")
    enable_logging: bool = Field(default=True, description="Enable logging to stderr")
    log_level: str = Field(default="WARNING", description="Logging level")

    model_config = SettingsConfigDict(
        env_prefix="GP_STATES_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def with_tolerance(self, tolerance: float) -> "SystemSettings":
        """Copy of these settings with a different comparison tolerance."""
        tolerances = self.tolerances.model_copy(update={"comparison": tolerance})
        return self.model_copy(update={"tolerances": tolerances})
