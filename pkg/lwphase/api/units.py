"""
Unit resolution for scenario files.

A numeric field may be a bare number (already SI), a string such as
"1.5 cm", or an object {"value": 1.5, "unit": "cm"}. Everything is converted
to SI here; the engine never sees unit strings.
"""
import enum
from typing import Any, Dict, Tuple

from ..core.exceptions import ScenarioError
from ..models.constants import ELECTRON_MASS, ELEMENTARY_CHARGE, SPEED_OF_LIGHT


class Dimension(str, enum.Enum):
    TIME = "time"
    LENGTH = "length"
    MASS = "mass"
    CHARGE = "charge"
    VELOCITY = "velocity"


UNITS: Dict[Dimension, Dict[str, float]] = {
    Dimension.TIME: {"s": 1.0, "ns": 1e-9},
    Dimension.LENGTH: {"m": 1.0, "cm": 1e-2, "um": 1e-6, "nm": 1e-9},
    Dimension.MASS: {"kg": 1.0, "m_e": ELECTRON_MASS},
    Dimension.CHARGE: {"C": 1.0, "e": ELEMENTARY_CHARGE},
    # "c" is a fraction of the speed of light; scaled by the run's c at parse time
    Dimension.VELOCITY: {"m/s": 1.0, "c": SPEED_OF_LIGHT},
}


def split_quantity(raw: Any, field: str) -> Tuple[float, str]:
    """Return (number, unit) with unit "" for bare numbers."""
    if isinstance(raw, bool):
        raise ScenarioError(f"expected a number or quantity, got {raw!r}", field=field)
    if isinstance(raw, (int, float)):
        return float(raw), ""
    if isinstance(raw, str):
        parts = raw.split()
        if len(parts) not in (1, 2):
            raise ScenarioError(f"cannot parse quantity {raw!r}", field=field)
        try:
            value = float(parts[0])
        except ValueError:
            raise ScenarioError(f"cannot parse number in {raw!r}", field=field)
        return value, parts[1] if len(parts) == 2 else ""
    if isinstance(raw, dict) and set(raw) == {"value", "unit"}:
        value, unit = raw["value"], raw["unit"]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not isinstance(unit, str):
            raise ScenarioError(f"malformed quantity {raw!r}", field=field)
        return float(value), unit
    raise ScenarioError(f"expected a number, 'value unit' string or {{value, unit}} object, got {raw!r}", field=field)


def to_si(raw: Any, dimension: Dimension, field: str, c: float = SPEED_OF_LIGHT) -> float:
    """
    Convert a quantity to SI.

    Args:
        raw: number, "value unit" string or {"value", "unit"} mapping
        dimension: expected dimension
        field: dotted path of the field, used in error messages
        c: speed of light for the "c" velocity unit

    Raises:
        ScenarioError: unknown unit or unit of the wrong dimension
    """
    value, unit = split_quantity(raw, field)
    if not unit:
        return value
    table = UNITS[Dimension(dimension)]
    if unit not in table:
        raise ScenarioError(
            f"unit {unit!r} is not a {Dimension(dimension).value} unit; accepted: {sorted(table)}",
            field=field,
        )
    if unit == "c":
        return value * c
    return value * table[unit]
