"""Configuration manager: per-environment JSON files validated by a JSON Schema."""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from jsonschema import Draft202012Validator

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

SCHEMA_FILE = 'config.schema.json'


class ConfigManager:
    """Per-environment settings for the CLI and the property suite."""

    ENVIRONMENTS = ['local', 'ci']

    def __init__(self, config_dir: Optional[str] = None):
        self.config_dir = Path(config_dir or self._get_default_config_dir())
        self.environment = self._detect_environment()
        self.config: Dict[str, Any] = {}
        self._schema: Optional[Dict[str, Any]] = None

    def _get_default_config_dir(self) -> str:
        """MMT_CONFIG_DIR, or the config directory next to the package."""
        return os.getenv('MMT_CONFIG_DIR', str(Path(__file__).parent.parent / 'config'))

    def _detect_environment(self) -> str:
        env = os.getenv('MMT_ENV', 'local').lower()
        return env if env in self.ENVIRONMENTS else 'local'

    def _read_json(self, path: Path) -> Dict[str, Any]:
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}", {"path": str(path)})
        try:
            with open(path) as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid JSON in {path}: {e}", {"path": str(path)}) from e

    @property
    def schema(self) -> Dict[str, Any]:
        if self._schema is None:
            self._schema = self._read_json(self.config_dir / SCHEMA_FILE)
        return self._schema

    def load_config(self, environment: Optional[str] = None) -> Dict[str, Any]:
        """
        Load and validate the configuration for an environment.

        Args:
            environment: One of ENVIRONMENTS; defaults to the detected one

        Returns:
            The configuration dictionary

        Raises:
            ConfigurationError: missing file, bad JSON or schema violations
        """
        env = environment or self.environment
        if env not in self.ENVIRONMENTS:
            raise ConfigurationError(f"Unknown environment: {env}", {"environment": env})

        config = self._read_json(self.config_dir / f'config.{env}.json')
        config = self._recursive_substitute(config)
        errors = self.validate_config(config)
        if errors:
            raise ConfigurationError(f"Invalid configuration for {env}: {'; '.join(errors)}",
                                     {"environment": env, "errors": errors})
        self.config = config
        logger.debug(f"Loaded {env} configuration from {self.config_dir}")
        return self.config

    def _recursive_substitute(self, obj):
        """Replace "${VAR}" strings with environment variables."""
        if isinstance(obj, dict):
            return {k: self._recursive_substitute(v) for k, v in obj.items()}
        elif isinstance(obj, list):
            return [self._recursive_substitute(item) for item in obj]
        elif isinstance(obj, str) and obj.startswith('${') and obj.endswith('}'):
            return os.getenv(obj[2:-1], obj)
        return obj

    def validate_config(self, config: Optional[Dict[str, Any]] = None) -> List[str]:
        """Schema errors as 'path: message' strings; empty when valid."""
        config = self.config if config is None else config
        validator = Draft202012Validator(self.schema)
        errors = []
        for error in sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path)):
            path = '.'.join(str(part) for part in error.absolute_path) or '<root>'
            errors.append(f"{path}: {error.message}")
        return errors

    def get(self, key: str, default: Any = None) -> Any:
        """Read a value by dotted key, e.g. 'defaults.field'."""
        value = self.config
        for k in key.split('.'):
            if not isinstance(value, dict):
                return default
            value = value.get(k)
            if value is None:
                return default
        return value

    def set(self, key: str, value: Any):
        """Override a value by dotted key, creating sections as needed."""
        keys = key.split('.')
        config = self.config
        for k in keys[:-1]:
            config = config.setdefault(k, {})
        config[keys[-1]] = value


def configure_logging(config: Dict[str, Any]):
    """Apply the logging section; output goes to standard error."""
    section = config.get('logging', {})
    logging.basicConfig(
        level=getattr(logging, section.get('level', 'WARNING').upper()),
        format=section.get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s'),
        force=True,
    )
