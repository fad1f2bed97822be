"""
Configuration for jcells.

Defaults come from config/defaults.yaml; a .env file and JCELLS_* environment
variables override them.

Usage:
    from jcells.config import get_settings
    bound = get_settings().max_character_table_order
"""

import os
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config" / "defaults.yaml"
CONFIG_PATH = os.getenv("JCELLS_CONFIG", str(DEFAULT_CONFIG_PATH))
LOG_LEVEL = os.getenv("JCELLS_LOG_LEVEL", "INFO")

FIXTURE_DIR = Path(os.getenv("JCELLS_FIXTURE_DIR", str(Path(__file__).parent.parent / "data" / "fixtures")))

# Environment variable -> (yaml section, key)
ENV_OVERRIDES = {
    "JCELLS_MAX_GROUP_ORDER": ("fingroup", "max_character_table_order"),
    "JCELLS_DIVIDES_POWER_BOUND": ("arith", "divides_power_bound"),
    "JCELLS_RANK_BUDGET": ("repring", "rank_budget"),
    "JCELLS_PRODUCT_DEPTH": ("jmodels", "product_depth"),
    "JCELLS_MAX_LATTICE_ORDER": ("adjquot", "max_lattice_order"),
}


@dataclass(frozen=True)
class Settings:
    """Resolved numeric bounds."""
    max_character_table_order: int = 64
    exhaustive_associativity_order: int = 64
    associativity_sample: int = 20000
    divides_power_bound: int = 32
    rank_budget: int = 4
    product_depth: int = 2
    max_lattice_order: int = 60
    brute_force_rank: int = 4


def load_config(config_path: str = CONFIG_PATH) -> dict:
    """
    Read the YAML configuration file.

    Args:
        config_path: Path to a YAML file laid out like config/defaults.yaml

    Returns:
        Parsed configuration as nested dicts
    """
    try:
        with open(config_path, 'r') as f:
            config = yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise FileNotFoundError(
            f"Configuration file not found: {config_path}. "
            f"Set JCELLS_CONFIG or run from the project root."
        )
    except yaml.YAMLError as e:
        raise ValueError(f"Invalid YAML in configuration file: {e}")

    for env_var, (section, key) in ENV_OVERRIDES.items():
        raw = os.getenv(env_var)
        if raw is None:
            continue
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"Invalid value for {env_var}: {raw}. Expected an integer")
        config.setdefault(section, {})[key] = value
        logger.debug(f"{env_var} overrides {section}.{key} = {value}")

    return config


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings built from the configuration file plus environment overrides."""
    config = load_config(CONFIG_PATH)
    fingroup = config.get('fingroup', {})
    return Settings(
        max_character_table_order=int(fingroup.get('max_character_table_order', 64)),
        exhaustive_associativity_order=int(fingroup.get('exhaustive_associativity_order', 64)),
        associativity_sample=int(fingroup.get('associativity_sample', 20000)),
        divides_power_bound=int(config.get('arith', {}).get('divides_power_bound', 32)),
        rank_budget=int(config.get('repring', {}).get('rank_budget', 4)),
        product_depth=int(config.get('jmodels', {}).get('product_depth', 2)),
        max_lattice_order=int(config.get('adjquot', {}).get('max_lattice_order', 60)),
        brute_force_rank=int(config.get('classgrp', {}).get('brute_force_rank', 4)),
    )
