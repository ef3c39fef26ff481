"""
Utility functions for the Frobenius manifold toolkit
"""

import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields, is_dataclass
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from config import LOG_DIR, LOG_LEVEL, LOG_FORMAT, LOG_TO_FILE


def setup_logging(name: str = 'frobenius', level: str = LOG_LEVEL,
                  log_to_file: bool = LOG_TO_FILE) -> logging.Logger:
    """
    Setup logging with console and optional file handlers

    Args:
        name: Logger name
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_to_file: Also write a DEBUG log under LOG_DIR

    Handlers go on the root logger so the module loggers propagate to them.

    Returns:
        Logger called name
    """
    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper()))
    logger = logging.getLogger(name)

    # Clear existing handlers
    root.handlers.clear()

    # Console handler (INFO and above); stdout is reserved for reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO if level.upper() != 'DEBUG' else logging.DEBUG)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(console_handler)

    if log_to_file:
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        log_file = LOG_DIR / f"frobenius_{timestamp}.log"

        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(file_handler)

        logger.info(f"Logging initialized. Log file: {log_file}")

    return logger


@dataclass
class Violation:
    """One failed identity together with the inputs that witness it."""

    identity: str
    witness: str

    def to_dict(self) -> dict:
        return {'identity': self.identity, 'witness': self.witness}


@dataclass
class CheckReport:
    """
    Outcome of a checker

    Checkers never raise on mathematical failures; they collect violations
    here and leave the decision to the caller.
    """

    name: str
    violations: List[Violation] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, identity: str, witness: str) -> None:
        self.violations.append(Violation(identity, witness))

    def expect(self, condition: bool, identity: str, witness: str) -> bool:
        self.checked += 1
        if not condition:
            self.fail(identity, witness)
        return condition

    def merge(self, other: 'CheckReport') -> 'CheckReport':
        self.violations.extend(other.violations)
        self.checked += other.checked
        return self

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'checked': self.checked,
            'violations': self.violations,
            'details': self.details,
        }


def format_fraction(value: Fraction) -> str:
    """Render an exact rational as "p/q" (or "p" for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Inverse of format_fraction; also accepts plain integers."""
    return Fraction(text.strip())


def to_jsonable(value: Any) -> Any:
    """
    Convert report values to JSON-ready structures

    Rationals become "p/q" strings, complex numbers [re, im] pairs, numpy
    arrays nested lists and dataclasses dictionaries of their fields.

    Args:
        value: Any report value

    Returns:
        Structure made of dicts, lists, strings, numbers and booleans
    """
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, int):
        return value
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(item) for item in items]
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict())
    if is_dataclass(value):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in fields(value)}
    return str(value)


def dump_report(report: dict) -> str:
    """Deterministic JSON rendering (sorted keys, fixed indentation)."""
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, ensure_ascii=False)


def write_report(report: dict, path: Path) -> None:
    """
    Write a report atomically (temp file + rename)

    Args:
        report: Report dictionary
        path: Destination file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + '.tmp')

    with open(temp_path, 'w', encoding='utf-8') as f:
        f.write(dump_report(report))
        f.write("\n")

    os.replace(temp_path, path)


def format_report(report: dict) -> str:
    """
    Format a report dictionary for display

    Args:
        report: Report dictionary produced by a CLI command

    Returns:
        Formatted string
    """
    lines = [
        "=" * 60,
        f"{report.get('command', 'report').upper()} REPORT",
        "=" * 60,
        f"Status: {report.get('status', 'unknown')}",
        "",
    ]

    for key, item in sorted(report.items()):
        if key in ('command', 'status', 'schema'):
            continue
        rendered = json.dumps(to_jsonable(item), sort_keys=True, ensure_ascii=False)
        if len(rendered) > 200:
            rendered = rendered[:197] + "..."
        lines.append(f"  {key}: {rendered}")

    lines.append("=" * 60)

    return "\n".join(lines)


def format_duration(seconds: float) -> str:
    """
    Format duration in seconds to human-readable string

    Args:
        seconds: Duration in seconds

    Returns:
        Formatted string (e.g., "2m 3.5s")
    """
    minutes = int(seconds // 60)
    secs = seconds - 60 * minutes

    if minutes > 0:
        return f"{minutes}m {secs:.1f}s"
    return f"{secs:.2f}s"
