"""CSV dataset export with a metadata sidecar per run."""

import hashlib
import json
import logging
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from .. import __version__
from .config import ExperimentConfig

logger = logging.getLogger(__name__)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical config JSON."""
    return hashlib.sha256(config.fingerprint().encode("utf-8")).hexdigest()


class DatasetWriter:
    """
    Writes datasets as UTF-8 CSV files next to a JSON metadata file.

    Every CSV ``<name>.csv`` gets ``<name>.meta.json`` recording the config
    hash, master seed, command and package version.
    """

    def __init__(self, output_dir: str):
        """
        Initialize writer.

        Args:
            output_dir: Directory for the files (created if missing)
        """
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)
        logger.debug("Dataset writer initialized at: %s", output_dir)

    def _path(self, name: str, suffix: str) -> str:
        return os.path.join(self.output_dir, f"{name}{suffix}")

    def write(
        self,
        frame: pd.DataFrame,
        name: str,
        config: ExperimentConfig,
        command: str,
        extra: Optional[Dict[str, Any]] = None,
    ) -> str:
        """
        Write one dataset and its metadata.

        Returns:
            Path of the CSV file
        """
        csv_path = self._path(name, ".csv")
        frame.to_csv(csv_path, index=False, encoding="utf-8")

        metadata = {
            "dataset": name,
            "command": command,
            "figure": config.figure,
            "config_hash": config_hash(config),
            "master_seed": config.master_seed,
            "trials": config.effective_trials,
            "rows": int(len(frame)),
            "columns": list(frame.columns),
            "version": __version__,
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "config": json.loads(config.fingerprint()),
        }
        if extra:
            metadata.update(extra)
        try:
            with open(self._path(name, ".meta.json"), "w", encoding="utf-8") as f:
                json.dump(metadata, f, indent=2, default=str)
        except (OSError, TypeError) as e:
            logger.warning("Failed to write metadata for %s: %s", name, e)

        logger.info("Wrote %d rows to %s", len(frame), csv_path)
        return csv_path


def write_dataset(frame: pd.DataFrame, output_dir: str, name: str, config: ExperimentConfig, command: str) -> Path:
    """Convenience wrapper around DatasetWriter.write."""
    return Path(DatasetWriter(output_dir).write(frame, name, config, command))
