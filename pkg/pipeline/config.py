"""
Pipeline run configuration

An INI file with sections [corpus] [detections] [filter] [prompt]
[generation] [evaluation] [output] maps onto PipelineConfig. Relative paths
in the file are resolved against the file's directory; "section.key=value"
overrides (the CLI's --set and dedicated flags) are taken as given.
Generation and worker limits fall back to the process settings.
"""

import configparser
import logging
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple, Union

from pydantic import ValidationError

from config import settings
from core.errors import ConfigError
from models.pipeline import BUILTIN_RULES, PipelineConfig
from models.prompt import PromptOptions

logger = logging.getLogger(__name__)

ConfigKey = Tuple[str, str]

# (section, key) -> PipelineConfig field; "prompt." fields go to PromptOptions
KEY_MAP: Dict[ConfigKey, str] = {
    ("corpus", "path"): "corpus_path",
    ("corpus", "split_seed"): "split_seed",
    ("corpus", "split_group"): "split_group",
    ("detections", "path"): "detections_path",
    ("detections", "mock_seed"): "mock_seed",
    ("filter", "rules"): "rules",
    ("filter", "enabled"): "filter_enabled",
    ("prompt", "decimals"): "prompt.probability_decimals",
    ("prompt", "include_bbox"): "prompt.include_bbox",
    ("prompt", "include_undetected"): "prompt.include_undetected",
    ("prompt", "threshold"): "prompt.threshold",
    ("prompt", "terminator"): "prompt.terminator",
    ("generation", "backend"): "backend",
    ("generation", "endpoint"): "endpoint",
    ("generation", "max_new_tokens"): "max_new_tokens",
    ("generation", "timeout_seconds"): "timeout_seconds",
    ("generation", "retries"): "retries",
    ("generation", "max_in_flight"): "max_in_flight",
    ("evaluation", "beta"): "beta",
    ("evaluation", "split"): "eval_split",
    ("evaluation", "baselines"): "baselines_path",
    ("evaluation", "system_name"): "system_name",
    ("output", "dir"): "output_dir",
    ("output", "workers"): "workers",
    ("output", "strict"): "strict",
}

PATH_KEYS = {("corpus", "path"), ("detections", "path"), ("evaluation", "baselines"), ("output", "dir")}


def _settings_defaults() -> Dict[str, object]:
    return {
        "max_new_tokens": settings.MAX_NEW_TOKENS,
        "timeout_seconds": settings.GENERATION_TIMEOUT_SECONDS,
        "retries": settings.GENERATION_RETRIES,
        "max_in_flight": settings.GENERATION_MAX_IN_FLIGHT,
        "workers": settings.PIPELINE_WORKERS,
    }


def parse_override(text: str) -> Tuple[ConfigKey, str]:
    """'section.key=value' -> ((section, key), value)"""
    name, sep, value = text.partition("=")
    section, dot, key = name.strip().partition(".")
    if not sep or not dot or not section or not key:
        raise ConfigError(f"Override must look like section.key=value, got {text!r}")
    return (section.lower(), key.lower()), value.strip()


def read_ini(path: Union[str, Path]) -> Dict[ConfigKey, str]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file does not exist: {path}", path=path)

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"Cannot parse config file {path}: {e}", path=path)

    values: Dict[ConfigKey, str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            values[(section.lower(), key.lower())] = value
            if (section.lower(), key.lower()) in PATH_KEYS and value:
                values[(section.lower(), key.lower())] = str((path.parent / value).resolve())
    if ("filter", "rules") in values and values[("filter", "rules")] != BUILTIN_RULES:
        values[("filter", "rules")] = str((path.parent / values[("filter", "rules")]).resolve())
    return values


def build_config(values: Dict[ConfigKey, str]) -> PipelineConfig:
    """Validate raw key/value pairs into a PipelineConfig, raising ConfigError"""
    unknown = sorted(f"{s}.{k}" for s, k in values if (s, k) not in KEY_MAP)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")

    fields: Dict[str, object] = _settings_defaults()
    prompt_fields: Dict[str, object] = {}
    for config_key, value in values.items():
        if value == "":
            continue
        field = KEY_MAP[config_key]
        if field.startswith("prompt."):
            prompt_fields[field.split(".", 1)[1]] = value
        else:
            fields[field] = value

    for required in ("corpus_path", "output_dir"):
        if required not in fields:
            raise ConfigError(f"Missing required config key: {_key_for(required)}")
    if fields.get("backend") == "remote" and "endpoint" not in fields:
        fields["endpoint"] = settings.GENERATION_ENDPOINT

    try:
        fields["prompt"] = PromptOptions(**prompt_fields)
        return PipelineConfig(**fields)
    except ValidationError as e:
        raise ConfigError(f"Invalid pipeline config: {_describe(e)}")


def load_pipeline_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
) -> PipelineConfig:
    values: Dict[ConfigKey, str] = read_ini(path) if path is not None else {}
    for override in overrides:
        key, value = parse_override(override)
        values[key] = value

    config = build_config(values)
    logger.info(f"⚙️ Pipeline config loaded{f' from {path}' if path else ''}: output_dir={config.output_dir}")
    return config


def _key_for(field: str) -> str:
    for (section, key), name in KEY_MAP.items():
        if name == field:
            return f"{section}.{key}"
    return field


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        loc = ".".join(str(p) for p in item.get("loc", ()))
        message = item.get("msg", "invalid").removeprefix("Value error, ")
        parts.append(f"{_key_for(loc)}: {message}" if loc else message)
    return "; ".join(parts)
