"""
Configuration for ratlin.

Settings come from three layers, later ones winning:
dataclass defaults, an optional YAML file (see config_example.yaml) and
RATLIN_* environment variables.
"""

import logging
import os
import sys
from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional

import yaml

from .errors import FormatError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass
class RatlinConfig:
    """Runtime settings for the CLI and the analysis routines."""
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    log_console: bool = True
    grade_search_bound: Optional[int] = None  # None: derived from entry degrees
    verify_builds: bool = True
    report_witness: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _as_bool(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


def _apply_yaml(config: RatlinConfig, data: Dict[str, Any]) -> None:
    logging_section = data.get('logging') or {}
    analysis_section = data.get('analysis') or {}
    output_section = data.get('output') or {}

    if 'level' in logging_section:
        config.log_level = str(logging_section['level']).upper()
    if 'file' in logging_section:
        config.log_file = logging_section['file'] or None
    if 'console' in logging_section:
        config.log_console = bool(logging_section['console'])
    if 'grade_search_bound' in analysis_section:
        bound = analysis_section['grade_search_bound']
        config.grade_search_bound = None if bound is None else int(bound)
    if 'verify_builds' in analysis_section:
        config.verify_builds = bool(analysis_section['verify_builds'])
    if 'report_witness' in output_section:
        config.report_witness = bool(output_section['report_witness'])


def _apply_environment(config: RatlinConfig) -> None:
    if 'RATLIN_LOG_LEVEL' in os.environ:
        config.log_level = os.environ['RATLIN_LOG_LEVEL'].upper()
    if 'RATLIN_LOG_FILE' in os.environ:
        config.log_file = os.environ['RATLIN_LOG_FILE'] or None
    if 'RATLIN_GRADE_SEARCH_BOUND' in os.environ:
        config.grade_search_bound = int(os.environ['RATLIN_GRADE_SEARCH_BOUND'])
    if 'RATLIN_VERIFY_BUILDS' in os.environ:
        config.verify_builds = _as_bool(os.environ['RATLIN_VERIFY_BUILDS'])


def load_config(path: Optional[str] = None) -> RatlinConfig:
    """
    Build the effective configuration.

    Args:
        path: Optional YAML file with `logging`, `analysis` and `output` sections

    Returns:
        RatlinConfig with file and environment overrides applied
    """
    config = RatlinConfig()

    if path:
        try:
            with open(path, 'r') as handle:
                data = yaml.safe_load(handle) or {}
        except OSError as e:
            raise FormatError(f"cannot read config file {path}: {e}")
        except yaml.YAMLError as e:
            raise FormatError(f"invalid YAML in config file {path}: {e}")
        if not isinstance(data, dict):
            raise FormatError(f"config file {path} must contain a mapping")
        _apply_yaml(config, data)

    _apply_environment(config)
    return config


def configure_logging(config: RatlinConfig) -> None:
    """Install root handlers once; reports use stdout so logs go to stderr."""
    handlers = []
    if config.log_console:
        handlers.append(logging.StreamHandler(sys.stderr))
    if config.log_file:
        handlers.append(logging.FileHandler(config.log_file))
    if not handlers:
        handlers.append(logging.NullHandler())

    logging.basicConfig(
        level=getattr(logging, config.log_level, logging.WARNING),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True
    )
    logger.debug(f"Logging configured: level={config.log_level}, file={config.log_file}")
