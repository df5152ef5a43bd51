#!/usr/bin/env python3
"""
Загрузка конфигурации (config.yaml) и настройка логирования
"""

import copy
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from errors import ConfigError

DEFAULT_CONFIG_PATH = Path(__file__).with_name("config.yaml")

# Значения по умолчанию; секции из файла накладываются поверх
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "precision": {"default": 12},
    "solver": {"lookahead": 2},
    "isomorphism": {"trials": 32, "box": 2 ** 31, "exact_limit": 4, "max_failure": 1e-30},
    "decomposition": {"trials": 24, "progress": False, "headroom": 1},
    "regularity": {"max_steps_factor": 1},
    "random": {"seed": 20240101},
    "logging": {
        "level": "WARNING",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "file": None,
    },
}


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Читает YAML и сливает его с DEFAULTS по секциям"""
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    try:
        with open(path, 'r', encoding='utf-8') as f:
            loaded = yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise ConfigError(f"Конфигурационный файл {path} не найден")
    except yaml.YAMLError as e:
        raise ConfigError(f"Ошибка разбора {path}: {e}")

    if not isinstance(loaded, dict):
        raise ConfigError(f"{path}: ожидался словарь секций")

    config = copy.deepcopy(DEFAULTS)
    for section, values in loaded.items():
        if isinstance(values, dict):
            config.setdefault(section, {}).update(values)
        else:
            config[section] = values
    return config


_active: Optional[Dict[str, Any]] = None


@lru_cache(maxsize=1)
def _default_config() -> Dict[str, Any]:
    try:
        return load_config()
    except ConfigError:
        return copy.deepcopy(DEFAULTS)


def get_config() -> Dict[str, Any]:
    """Глобальная конфигурация библиотеки (config.yaml читается один раз)"""
    return _active if _active is not None else _default_config()


def use_config(config: Optional[Dict[str, Any]]) -> None:
    """Подменяет глобальную конфигурацию (None - вернуть config.yaml)"""
    global _active
    _active = config


def option(section: str, key: str, value: Any = None) -> Any:
    """Явно переданное значение или значение из конфигурации"""
    if value is not None:
        return value
    return get_config().get(section, {}).get(key, DEFAULTS.get(section, {}).get(key))


def setup_logging(config: Optional[Dict[str, Any]] = None, level: Optional[str] = None) -> None:
    log_config = (config or get_config()).get('logging', {})
    level_name = (level or log_config.get('level') or 'WARNING').upper()
    handlers = [logging.StreamHandler()]
    if log_config.get('file'):
        Path(log_config['file']).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_config['file'], encoding='utf-8'))
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format=log_config.get('format', DEFAULTS['logging']['format']),
        handlers=handlers,
        force=True,
    )
