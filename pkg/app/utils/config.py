# app/utils/config.py
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values, load_dotenv
from pydantic import ValidationError

from app.schemas.dsm_schemas import PipelineConfig
from app.utils.error_handling import ConfigurationError, FingerprintMismatchError
from app.utils.logger import logger

load_dotenv()

# ────────────────────────────
# ░░ Constants / Settings ░░
# ────────────────────────────
DEFAULT_WORKERS = int(os.getenv("DSM_WORKERS", "1"))


def read_key_value_file(path) -> Dict[str, str]:
    """Flat `key=value` file (comments with #) parsed the way `.env` files are."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    values = dotenv_values(path)
    return {key.strip(): (value or "").strip() for key, value in values.items()}


def build_config(base: Optional[Mapping[str, Any]] = None, overrides: Optional[Mapping[str, Any]] = None) -> PipelineConfig:
    """Merge base values with overrides (None values are ignored) and validate."""
    merged: Dict[str, Any] = {"workers": DEFAULT_WORKERS}
    merged.update(base or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return PipelineConfig(**merged)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid pipeline config: {exc}") from exc


def load_pipeline_config(path=None, overrides: Optional[Mapping[str, Any]] = None) -> PipelineConfig:
    base = read_key_value_file(path) if path else {}
    config = build_config(base, overrides)
    logger.debug("Pipeline config: %s", config.model_dump(mode="json"))
    return config


def config_from_meta(meta: Mapping[str, Any]) -> Dict[str, Any]:
    """Config recorded in a model container (may be empty for hand-built models)."""
    return dict(meta.get("config") or {})


def resolve_stage_config(
    meta: Mapping[str, Any],
    stage: str,
    config_path=None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> PipelineConfig:
    """Effective config for a downstream stage.

    With an explicit config file the input model's upstream fingerprint must
    match it. Without one the stage inherits the model's config; flags that
    change upstream fields are then caught by the same fingerprint check.
    """
    if config_path:
        config = load_pipeline_config(config_path, overrides)
    else:
        config = build_config(config_from_meta(meta), overrides)

    found = (meta.get("fingerprints") or {}).get(stage)
    if found is None:
        logger.debug("Input model carries no '%s' fingerprint; skipping check", stage)
        return config
    expected = config.fingerprint(stage)
    if expected != found:
        raise FingerprintMismatchError(stage, expected, found)
    return config
