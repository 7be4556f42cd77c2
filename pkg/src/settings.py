"""Process-wide defaults read from the environment (and an optional .env file)."""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables
load_dotenv()


class Settings(BaseModel):
    """Defaults used when neither the CLI nor a config file sets a value."""

    output_dir: str = Field("results", description="Directory for CSV and metadata files")
    workers: int = Field(1, ge=1, description="Monte-Carlo worker processes")
    trials: int = Field(1000, ge=1, description="Monte-Carlo trials per point")
    log_level: str = Field("INFO", description="Root logging level")

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from WL_CDMA_* environment variables."""
        return cls(
            output_dir=os.getenv("WL_CDMA_OUTPUT_DIR", "results"),
            workers=int(os.getenv("WL_CDMA_WORKERS", "1")),
            trials=int(os.getenv("WL_CDMA_TRIALS", "1000")),
            log_level=os.getenv("WL_CDMA_LOG_LEVEL", "INFO").upper(),
        )


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Return the cached settings, reading the environment on first use."""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings
