"""Utility helper functions for the matroid toolkit."""

import copy
import json
import os
import sys
from typing import Dict, Any, Optional
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    "solver": {
        "epsilon": None,
    },
    "oracle": {
        "pin_distance": 64,
        "max_auto_pins": 256,
    },
    "bench": {
        "trials": 100,
        "workers": 4,
        "max_n": 12,
    },
    "logging": {
        "level": "WARNING",
    },
    "output": {
        "stats_only": False,
    },
    "seed": 0,
}


def get_resource_path(relative_path: str) -> Path:
    """
    Get absolute path to resource, works for dev and for PyInstaller.

    When running as a frozen executable, bundled files live in a temp folder.

    Args:
        relative_path: Relative path to resource (e.g., 'data/instances/k4.graph')

    Returns:
        Absolute path to the resource
    """
    if getattr(sys, 'frozen', False):
        base_path = Path(sys._MEIPASS)
    else:
        base_path = Path(__file__).parent.parent.parent

    return base_path / relative_path.replace('/', os.sep)


def load_json_safe(filepath: str) -> Optional[Dict[str, Any]]:
    """
    Load JSON file safely with error handling.

    Args:
        filepath: Path to JSON file

    Returns:
        Parsed JSON dict or None if file doesn't exist or is invalid
    """
    if not os.path.exists(filepath):
        return None

    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (json.JSONDecodeError, IOError) as e:
        logger.warning("could not load %s: %s", filepath, e)
        return None


def save_json_atomic(filepath: str, data: Dict[str, Any]) -> bool:
    """
    Save JSON with atomic write to prevent corruption.

    Writes to a temporary file first, then renames it over the target.

    Args:
        filepath: Target file path
        data: Dictionary to save as JSON

    Returns:
        True if successful, False otherwise
    """
    temp_path = filepath + '.tmp'
    try:
        directory = os.path.dirname(filepath)
        if directory:
            os.makedirs(directory, exist_ok=True)

        with open(temp_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
            f.flush()
            os.fsync(f.fileno())

        os.replace(temp_path, filepath)
        return True

    except (IOError, OSError) as e:
        logger.warning("could not save %s: %s", filepath, e)
        if os.path.exists(temp_path):
            try:
                os.remove(temp_path)
            except OSError:
                pass
        return False


def get_data_dir() -> Path:
    """Get the data directory path."""
    # A frozen executable writes into the user's profile instead of the bundle
    if getattr(sys, 'frozen', False):
        base = os.getenv('APPDATA') or os.path.join(Path.home(), '.config')
        app_data = Path(base) / 'MatroidKit'
        app_data.mkdir(parents=True, exist_ok=True)
        return app_data
    project_root = Path(__file__).parent.parent.parent
    return project_root / 'data'


def get_instances_dir() -> Path:
    """Bundled example instances (read-only)."""
    return get_resource_path('data') / 'instances'


def get_config_path() -> Path:
    """Get the config file path."""
    return get_data_dir() / 'config.json'


def ensure_data_files_exist() -> None:
    """Write the default config if there is none yet."""
    config_path = get_config_path()
    if not config_path.exists():
        save_json_atomic(str(config_path), DEFAULT_CONFIG)


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Built-in defaults, overlaid by data/config.json and then by path.

    Args:
        path: Optional extra config file (the CLI's --config)

    Returns:
        The merged configuration
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    for source in (str(get_config_path()), path):
        if source is None:
            continue
        data = load_json_safe(source)
        if data is None:
            if source == path:
                logger.warning("config file %s missing or invalid, using defaults", path)
            continue
        _merge(config, data)
    return config
