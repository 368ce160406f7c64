"""Scenario configuration: sectioned key-value text with line-aware errors.

Format, one directive per line:

    # comment (also allowed after a value)
    [section.name]
    key = value

Values stay strings until a typed getter pulls them; every complaint a
getter raises carries the line number the offending value came from, so
a bad `duration_s = ten` points at its own line rather than at the
loader.  Unknown keys are rejected when the scenario is assembled,
catching typos like `druation_s` early.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "ConfigError",
    "RawConfig",
    "parse_config",
    "load_config",
]


class ConfigError(ValueError):
    """Malformed configuration; .line is 1-based, 0 for file-level faults."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_REQUIRED = object()


@dataclass
class RawConfig:
    """Parsed key-value store: (section, key) -> (value, line)."""

    entries: dict[tuple[str, str], tuple[str, int]] = field(default_factory=dict)
    sections: dict[str, int] = field(default_factory=dict)
    source: str = "<config>"

    def has(self, section: str, key: str) -> bool:
        return (section, key) in self.entries

    def _fetch(self, section: str, key: str, default):
        if (section, key) in self.entries:
            return self.entries[(section, key)]
        if default is _REQUIRED:
            where = self.sections.get(section)
            if where is None:
                raise ConfigError(f"missing section [{section}] (for key '{key}')")
            raise ConfigError(f"missing key '{key}' in section [{section}]", where)
        return None

    def get_str(self, section: str, key: str, default=_REQUIRED) -> str:
        got = self._fetch(section, key, default)
        return default if got is None else got[0]

    def get_float(self, section: str, key: str, default=_REQUIRED) -> float:
        got = self._fetch(section, key, default)
        if got is None:
            return default
        value, line = got
        try:
            return float(value)
        except ValueError:
            raise ConfigError(
                f"'{key}' expects a number, got {value!r}", line
            ) from None

    def get_int(self, section: str, key: str, default=_REQUIRED) -> int:
        got = self._fetch(section, key, default)
        if got is None:
            return default
        value, line = got
        try:
            return int(value)
        except ValueError:
            raise ConfigError(
                f"'{key}' expects an integer, got {value!r}", line
            ) from None

    def get_floats(self, section: str, key: str, default=_REQUIRED) -> tuple:
        """Comma-separated list of numbers."""
        got = self._fetch(section, key, default)
        if got is None:
            return default
        value, line = got
        try:
            return tuple(float(tok) for tok in value.split(","))
        except ValueError:
            raise ConfigError(
                f"'{key}' expects comma-separated numbers, got {value!r}", line
            ) from None

    def get_bool(self, section: str, key: str, default=_REQUIRED) -> bool:
        got = self._fetch(section, key, default)
        if got is None:
            return default
        value, line = got
        lowered = value.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"'{key}' expects a boolean, got {value!r}", line)

    def get_choice(self, section: str, key: str, choices, default=_REQUIRED) -> str:
        got = self._fetch(section, key, default)
        if got is None:
            return default
        value, line = got
        if value not in choices:
            raise ConfigError(
                f"'{key}' must be one of {sorted(choices)}, got {value!r}", line
            )
        return value

    def line_of(self, section: str, key: str) -> int:
        return self.entries[(section, key)][1]

    def check_known(self, known: dict[str, set[str]]) -> None:
        """Reject unknown sections and keys (typo guard)."""
        for name, line in self.sections.items():
            if name not in known:
                raise ConfigError(f"unknown section [{name}]", line)
        for (section, key), (_v, line) in self.entries.items():
            if key not in known[section]:
                raise ConfigError(
                    f"unknown key '{key}' in section [{section}]", line
                )


def parse_config(text: str, source: str = "<config>") -> RawConfig:
    raw = RawConfig(source=source)
    section = None
    for lineno, full_line in enumerate(text.splitlines(), start=1):
        line = full_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {full_line.strip()!r}", lineno)
            section = line[1:-1].strip()
            if not section:
                raise ConfigError("empty section name", lineno)
            if section in raw.sections:
                raise ConfigError(f"duplicate section [{section}]", lineno)
            raw.sections[section] = lineno
            continue
        if "=" not in line:
            raise ConfigError(
                f"expected 'key = value' or '[section]', got {full_line.strip()!r}",
                lineno,
            )
        if section is None:
            raise ConfigError("key-value pair before any [section]", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError("empty key", lineno)
        if not value:
            raise ConfigError(f"empty value for key '{key}'", lineno)
        if (section, key) in raw.entries:
            raise ConfigError(
                f"duplicate key '{key}' in section [{section}]", lineno
            )
        raw.entries[(section, key)] = (value, lineno)
    return raw


def load_config(path) -> RawConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, source=str(path))
