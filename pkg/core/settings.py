"""
Runtime settings
Defaults, optionally overridden by config/settings.json and GRICCI_* environment variables
"""

import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, ValidationError

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).parent.parent / 'config'
SETTINGS_FILE = CONFIG_DIR / 'settings.json'
ENV_PREFIX = 'GRICCI_'


class Settings(BaseModel):
    """Tunable parameters shared by the library and the CLI"""

    degree_cap: int = Field(16, ge=1)
    random_trials: int = Field(10, ge=0)
    random_degree: int = Field(2, ge=0)
    random_coeff_bound: int = Field(3, ge=0)
    seed: int = 0
    flow_tolerance: float = Field(1e-8, gt=0)
    anticommutation_tolerance: float = Field(1e-10, gt=0)
    log_dir: str = 'logs'
    log_level: str = 'INFO'


def _load_file(path: Path) -> Dict[str, Any]:
    """Load overrides from a JSON file; missing file means no overrides"""
    if not path.exists():
        return {}
    try:
        with open(path, 'r') as f:
            data = json.load(f)
        return data if isinstance(data, dict) else {}
    except Exception as e:
        logger.error(f"Failed to load settings file {path}: {e}")
        return {}


def _load_env() -> Dict[str, Any]:
    overrides = {}
    for name in Settings.model_fields:
        value = os.environ.get(ENV_PREFIX + name.upper())
        if value is not None:
            overrides[name] = value
    return overrides


def load_settings(path: Optional[Path] = None) -> Settings:
    """
    Build settings from defaults, the settings file and the environment

    Args:
        path: settings file (defaults to config/settings.json)

    Returns:
        Settings instance
    """
    data = _load_file(path or SETTINGS_FILE)
    data.update(_load_env())
    try:
        return Settings(**data)
    except ValidationError as e:
        logger.error(f"Invalid settings, using defaults: {e}")
        return Settings()


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings"""
    return load_settings()
