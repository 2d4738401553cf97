"""
Configuration of check horizons, grids and tolerances.

Every check reads its horizons from one immutable ApplicationConfig. The
JSON file in the user configuration directory holds the defaults; the
command line overrides single fields through `update_config`. The module
also reads `name = spec` files, keeping the position of every entry so
parse errors can point into the file.
"""

import json
import os
import re
import sys
from dataclasses import asdict, fields
from pathlib import Path
from typing import Dict, Literal, NamedTuple, Optional, cast

from gsinclusion.core.data_structures import (
    JSON_VALUE,
    AdvancedConfig,
    ApplicationConfig,
    ConfigDict,
    FunctionConfig,
    SequenceConfig,
    SpaceConfig,
    SystemConfig,
)
from gsinclusion.core.exceptions import SpecParseError
from gsinclusion.core.logging_config import get_module_logger

logger = get_module_logger(__name__)

SectionName = Literal["sequences", "functions", "systems", "spaces", "advanced"]

SECTION_CLASSES = {
    "sequences": SequenceConfig,
    "functions": FunctionConfig,
    "systems": SystemConfig,
    "spaces": SpaceConfig,
    "advanced": AdvancedConfig,
}

CONFIG_FILE_NAME = "config.json"

_SPEC_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


def create_default_config() -> ApplicationConfig:
    """Every section at its defaults."""
    return ApplicationConfig(SequenceConfig(), FunctionConfig(), SystemConfig(), SpaceConfig(), AdvancedConfig())


def get_default_config_directory() -> Path:
    """%APPDATA%/GSInclusion, ~/Library/Application Support/GSInclusion or ~/.config/gsinclusion."""
    if sys.platform == "win32":
        return Path(os.environ.get("APPDATA", os.path.expanduser("~"))) / "GSInclusion"
    if sys.platform == "darwin":
        return Path.home() / "Library" / "Application Support" / "GSInclusion"
    return Path.home() / ".config" / "gsinclusion"


def get_config_file_path(config_dir: Optional[Path] = None) -> Path:
    """Path of the JSON configuration file inside `config_dir` (default: per-user directory)."""
    return (config_dir or get_default_config_directory()) / CONFIG_FILE_NAME


def config_to_dict(config: ApplicationConfig) -> ConfigDict:
    """Plain JSON-ready form of `config`, one mapping per section."""
    config_dict = cast(ConfigDict, {"config_version": config.config_version})
    for section_name in SECTION_CLASSES:
        config_dict[cast(SectionName, section_name)] = cast(
            Dict[str, JSON_VALUE], asdict(getattr(config, section_name))
        )
    return config_dict


def _dict_to_section(section_name: str, data: Dict[str, JSON_VALUE]) -> object:
    """One section from its mapping; missing keys keep their defaults and retired keys are dropped."""
    section_class = SECTION_CLASSES[section_name]
    known = {f.name for f in fields(section_class)}
    return section_class(**{key: value for key, value in data.items() if key in known})


def dict_to_config(config_dict: ConfigDict) -> ApplicationConfig:
    """Inverse of `config_to_dict`; absent keys keep their defaults, so partial and older files load."""
    sections = {name: _dict_to_section(name, config_dict.get(name, {})) for name in SECTION_CLASSES}
    return ApplicationConfig(
        sequences=cast(SequenceConfig, sections["sequences"]),
        functions=cast(FunctionConfig, sections["functions"]),
        systems=cast(SystemConfig, sections["systems"]),
        spaces=cast(SpaceConfig, sections["spaces"]),
        advanced=cast(AdvancedConfig, sections["advanced"]),
        config_version=config_dict.get("config_version", "1.0"),
    )


def save_config(config: ApplicationConfig, config_file: Optional[Path] = None) -> bool:
    """Write `config` as indented JSON (the per-user file by default); False if the write failed."""
    config_file = config_file or get_config_file_path()
    try:
        config_file.parent.mkdir(parents=True, exist_ok=True)
        with open(config_file, "w", encoding="utf-8") as f:
            json.dump(config_to_dict(config), f, indent=2, ensure_ascii=False)
    except OSError as e:
        logger.error(f"Configuration not written to {config_file}: {e}")
        return False
    logger.debug(f"Configuration written to {config_file}")
    return True


def load_config(config_file: Optional[Path] = None) -> ApplicationConfig:
    """
    Read a configuration file written by `save_config`.

    A missing or unreadable file gives the defaults, so a broken user file
    never stops a check from running.
    """
    config_file = config_file or get_config_file_path()
    if not config_file.exists():
        return create_default_config()
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            return dict_to_config(json.load(f))
    except (OSError, ValueError, TypeError) as e:
        logger.warning(f"Configuration {config_file} unreadable, using defaults: {e}")
        return create_default_config()


def update_config(
    current_config: ApplicationConfig, section: str, updates_dict: Dict[str, JSON_VALUE]
) -> ApplicationConfig:
    """
    Copy of `current_config` with fields of one section replaced.

    Unknown sections raise ValueError, unknown fields TypeError.
    """
    if section not in SECTION_CLASSES:
        raise ValueError(f"Unknown configuration section: {section}")
    section_dict = asdict(getattr(current_config, section))
    section_dict.update(updates_dict)
    return current_config._replace(**{section: SECTION_CLASSES[section](**section_dict)})


def validate_config(config: ApplicationConfig) -> tuple[bool, list[str]]:
    """Horizons and grids that no check can run with; (True, []) when there are none."""
    errors = []

    # Sequences
    if config.sequences.q_max < 4:
        errors.append("Sequence horizon q_max must be at least 4")

    if config.sequences.tail_window < 2 or config.sequences.tail_window >= config.sequences.q_max:
        errors.append("Tail window must be at least 2 and below q_max")

    if config.sequences.tolerance <= 0:
        errors.append("Sequence tolerance must be positive")

    if config.sequences.h_exponent_min > config.sequences.h_exponent_max:
        errors.append("H grid exponents are reversed")

    # Functions
    if config.functions.t_max <= 10:
        errors.append("Weight function horizon t_max must exceed 10")

    if config.functions.points_per_decade < 4:
        errors.append("At least 4 points per decade are required")

    if config.functions.x_points < 16:
        errors.append("The phi grid needs at least 16 points")

    # Systems
    if config.systems.lambda_exponent_min > config.systems.lambda_exponent_max:
        errors.append("Lambda grid exponents are reversed")

    if not (
        config.systems.lambda_exponent_min
        <= config.systems.probe_exponent_min
        <= config.systems.probe_exponent_max
        <= config.systems.lambda_exponent_max
    ):
        errors.append("Probe grid must lie inside the lambda grid")

    if config.systems.r_exponent_max < 1:
        errors.append("R grid must contain R = 2")

    if config.systems.replay_slack < 1:
        errors.append("Replay slack must be at least 1")

    # Spaces
    if config.spaces.saturation_window < 2:
        errors.append("Saturation window must be at least 2")

    if config.spaces.alpha_max <= config.spaces.saturation_window:
        errors.append("alpha_max must exceed the saturation window")

    if config.spaces.tail_tolerance <= 0:
        errors.append("Tail tolerance must be positive")

    # Advanced
    if config.advanced.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"Unknown log level: {config.advanced.log_level}")

    return len(errors) == 0, errors


class SpecEntry(NamedTuple):
    """A named spec with the line and column where its text starts."""

    text: str
    line: int
    column: int


def load_spec_entries(path: Path) -> Dict[str, SpecEntry]:
    """
    Load named specs from a `name = spec` text file.

    Blank lines and `#` comments are ignored.

    Args:
        path: Path of the UTF-8 spec file

    Returns:
        Mapping from name to spec entry, in file order
    """
    specs: Dict[str, SpecEntry] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, raw_line in enumerate(f, start=1):
            line = raw_line.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            if "=" not in line:
                raise SpecParseError("expected 'name = spec'", line_number, len(line) + 1, raw_line)
            name, _, spec = line.partition("=")
            stripped = name.strip()
            if not _SPEC_NAME.fullmatch(stripped):
                column = len(name) - len(name.lstrip()) + 1
                raise SpecParseError(f"invalid spec name '{stripped}'", line_number, column, raw_line)
            if stripped in specs:
                raise SpecParseError(f"duplicate spec name '{stripped}'", line_number, 1, raw_line)
            if not spec.strip():
                raise SpecParseError("empty spec", line_number, len(line) + 1, raw_line)
            column = len(name) + 2 + len(spec) - len(spec.lstrip())
            specs[stripped] = SpecEntry(spec.strip(), line_number, column)
    return specs


def load_spec_file(path: Path) -> Dict[str, str]:
    """Spec texts of `load_spec_entries`, by name."""
    return {name: entry.text for name, entry in load_spec_entries(path).items()}


def get_user_config() -> ApplicationConfig:
    """Configuration from the per-user file, or the defaults."""
    return load_config()
