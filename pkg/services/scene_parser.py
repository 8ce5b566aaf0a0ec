"""Flat key/value text used by scene files and config files"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from errors import InputValidationError, SceneParseError

logger = logging.getLogger(__name__)

COMMENT = "#"
SEPARATORS = ("=", ":")


@dataclass
class KeyValueDocument:
    entries: Dict[str, str] = field(default_factory=dict)
    lines: Dict[str, int] = field(default_factory=dict)
    source: Optional[str] = None

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def keys(self) -> List[str]:
        return list(self.entries.keys())

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.entries.get(key, default)

    def require(self, key: str) -> str:
        if key not in self.entries:
            raise SceneParseError(f"Missing required key '{key}'")
        return self.entries[key]

    def convert(self, key: str, parser, default=None):
        """Parse one value, reporting the line it came from on failure"""
        if key not in self.entries:
            return default
        try:
            return parser(self.entries[key])
        except (InputValidationError, ValueError) as e:
            raise SceneParseError(f"Invalid value for '{key}': {e}", line=self.lines.get(key)) from e


def clean_key(key: str, lowercase: bool = True) -> str:
    key = key.strip().replace(" ", "_")
    return key.lower() if lowercase else key


def parse_key_value_text(text: str, lowercase_keys: bool = True, source: Optional[str] = None) -> KeyValueDocument:
    """Parse `key = value` or `key: value` lines; blank lines and # comments are skipped"""
    doc = KeyValueDocument(source=source)
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(COMMENT, 1)[0].strip()
        if not line:
            continue
        positions = [line.find(sep) for sep in SEPARATORS if sep in line]
        if not positions:
            raise SceneParseError(f"Expected 'key = value', got '{line}'", line=number)
        cut = min(positions)
        key = clean_key(line[:cut], lowercase_keys)
        value = line[cut + 1:].strip()
        if not key:
            raise SceneParseError("Empty key", line=number)
        if key in doc.entries:
            raise SceneParseError(f"Duplicate key '{key}' (first on line {doc.lines[key]})", line=number)
        doc.entries[key] = value
        doc.lines[key] = number
    return doc


def load_key_value_file(path: str, lowercase_keys: bool = True) -> KeyValueDocument:
    file_path = Path(path)
    if not file_path.is_file():
        raise InputValidationError(f"File not found: {path}")
    return parse_key_value_text(file_path.read_text(), lowercase_keys, source=str(file_path))


def parse_complex(text: str) -> complex:
    """Parse `a+bi`, `a-bi`, `bi`, `a` or `i` (j accepted as well)"""
    cleaned = str(text).strip().replace(" ", "").lower().replace("i", "j")
    if not cleaned:
        raise InputValidationError("Empty complex value")
    try:
        value = complex(cleaned)
    except ValueError as e:
        raise InputValidationError(f"Cannot parse complex number '{text}'") from e
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InputValidationError(f"Complex value must be finite, got '{text}'")
    return value


def parse_float_list(text: str) -> List[float]:
    parts = [p for p in str(text).replace(";", ",").split(",") if p.strip()]
    if not parts:
        raise InputValidationError("Expected a comma-separated list of numbers")
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise InputValidationError(f"Cannot parse number list '{text}'") from e
    if not all(math.isfinite(v) for v in values):
        raise InputValidationError(f"Numbers must be finite in '{text}'")
    return values


def parse_points(text: str) -> np.ndarray:
    """Semicolon-separated `x,y` pairs as an (m, 2) array"""
    pairs = [p.strip() for p in str(text).split(";") if p.strip()]
    if not pairs:
        raise InputValidationError("Expected at least one 'x,y' pair")
    points = []
    for pair in pairs:
        coords = parse_float_list(pair)
        if len(coords) != 2:
            raise InputValidationError(f"Expected 'x,y', got '{pair}'")
        points.append(coords)
    return np.array(points)


def parse_point(text: str) -> np.ndarray:
    points = parse_points(text)
    if len(points) != 1:
        raise InputValidationError(f"Expected a single 'x,y' point, got {len(points)}")
    return points[0]
