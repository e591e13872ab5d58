"""Scenario-driven command line front end."""

from .cli import main
from .config import ConfigError, ScenarioConfig, describe_models, load
from .runner import run_config, sweep_config

__all__ = ["ConfigError", "ScenarioConfig", "describe_models", "load", "main", "run_config", "sweep_config"]
