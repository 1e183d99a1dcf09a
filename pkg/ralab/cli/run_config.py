"""Run configuration: a TOML or JSON file, a preset and command line overrides.

    scenario = "demo"
    steps = 1000
    seed = 7

    [backend]
    kind = "stale_file"

    [backend.latency]
    set_action = 15.105
    get_state = { kind = "normal", ms = 0.3, std_ms = 0.05 }

    [agent]
    kind = "dqn"

Unknown keys are rejected. Every validation failure is reported as a
ConfigError naming the dotted key at fault.
"""
import json
import tomllib
from pathlib import Path
from typing import Any

from pydantic import Field, ValidationError, field_validator

from ralab.errors import ConfigError
from ralab.parsers.bench import BenchConfig
from ralab.profiler.experiment import ExperimentConfig
from ralab.profiler.export import ReportFormat
from ralab.cli.presets import PRESET_GROUPS, PRESETS, deep_merge


class RunConfig(ExperimentConfig):
    out: Path = Field(default=Path("out"), description="Directory receiving every output file")
    formats: tuple[ReportFormat, ...] = Field(default=("csv", "json", "table"), min_length=1)
    bench: BenchConfig = BenchConfig()
    preset: str | None = None
    tensorboard_dir: Path | None = Field(default=None, description="Write tensorboard events here")

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, value: str | None) -> str | None:
        if value is not None and value not in PRESET_GROUPS:
            raise ValueError(f"unknown preset {value!r}, expected one of {sorted(PRESET_GROUPS)}")
        return value


def read_config_file(path: Path) -> dict[str, Any]:
    """Key-value tree of a TOML file, or of a JSON file such as a report's config echo"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e}") from e

    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8"))
            # a whole JSON report: take its config echo
            if isinstance(data, dict) and isinstance(data.get("config"), dict) and "stages" in data:
                data = data["config"]
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError("config", f"{path} is not valid {path.suffix.lstrip('.') or 'toml'}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} does not hold a table of settings")
    return data


def _config_error(error: ValidationError) -> ConfigError:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "config"
    return ConfigError(key, first["msg"])


def validate_run_config(data: dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise _config_error(e) from e


def load_run_configs(path: Path | None = None, overrides: dict[str, Any] | None = None) -> list[RunConfig]:
    """One RunConfig per scenario to run.

    Precedence, lowest first: preset, config file, overrides. A preset group
    such as `pair` yields one scenario per member preset.
    """
    data = read_config_file(path) if path is not None else {}
    data = deep_merge(data, overrides or {})

    preset = data.get("preset")
    if preset is None:
        return [validate_run_config(data)]
    if preset not in PRESET_GROUPS:
        raise ConfigError("preset", f"unknown preset {preset!r}, expected one of {sorted(PRESET_GROUPS)}")

    group = PRESET_GROUPS[preset]
    configs = []
    for name in group:
        merged = deep_merge(PRESETS[name], data)
        # the echoed config must reproduce this one scenario
        merged["preset"] = name
        if len(group) > 1:
            merged["scenario"] = name
        configs.append(validate_run_config(merged))
    return configs
