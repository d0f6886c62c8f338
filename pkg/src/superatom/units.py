"""Unit conventions.

Configs quote ordinary frequencies in MHz and times in ns; everything internal
runs in angular frequency (rad/us) and time (us), so that typical numbers stay
O(1)-O(100) for the integrator.  1 MHz of ordinary frequency is 2*pi rad/us.
"""

import math

TWO_PI = 2.0 * math.pi


def mhz_to_radus(f_mhz: float) -> float:
    """Ordinary frequency in MHz -> angular frequency in rad/us."""
    return TWO_PI * f_mhz


def radus_to_mhz(omega: float) -> float:
    """Angular frequency in rad/us -> ordinary frequency in MHz."""
    return omega / TWO_PI


def ns_to_us(t_ns: float) -> float:
    return 1e-3 * t_ns


def us_to_ns(t_us: float) -> float:
    return 1e3 * t_us


# Chirp rate unit used throughout the scan scenarios: 2*pi * 12 MHz/us.
CHIRP_UNIT_RADUS_PER_US = mhz_to_radus(12.0)
