"""Unit conversion at the boundary between lab units and internal SI.

Frequencies quoted in Hz/kHz/MHz are ordinary frequencies and are converted
to angular frequency (rad/s) by a factor ``2*pi``. With that reading a
"Delta H of 2.5 kHz" is ``2*pi*2500`` rad/s, the Rabi frequency is 5 kHz and
``q(2 us) = cos(2*pi*2500*2e-6)**2``.
"""

import math
import re

from .exceptions import ConfigError

TWO_PI = 2.0 * math.pi

FREQUENCY_UNITS = {
    "rad/s": 1.0,
    "Hz": TWO_PI,
    "kHz": TWO_PI * 1e3,
    "MHz": TWO_PI * 1e6,
}

TIME_UNITS = {
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "ns": 1e-9,
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]+)\s*$")


def khz_to_rad_per_s(value):
    return float(value) * FREQUENCY_UNITS["kHz"]


def us_to_s(value):
    return float(value) * 1e-6


def s_to_us(value):
    return float(value) / 1e-6


def parse_quantity(text, table, field=None):
    """Parse ``"2.5 kHz"``-style strings into an SI float using ``table``."""
    if not isinstance(text, str):
        raise ConfigError(f"expected a quantity with a unit suffix, got {text!r}", field)
    match = _QUANTITY.match(text)
    if match is None:
        raise ConfigError(f"cannot parse quantity {text!r}", field)
    number, unit = match.groups()
    if unit not in table:
        raise ConfigError(f"unknown unit {unit!r}; expected one of {sorted(table)}", field)
    return float(number) * table[unit]


def parse_frequency(text, field=None):
    return parse_quantity(text, FREQUENCY_UNITS, field)


def parse_time(text, field=None):
    return parse_quantity(text, TIME_UNITS, field)
