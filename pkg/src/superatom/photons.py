"""Excitation-number statistics through retrieval, detection and HBT splitting.

Everything here is exact enumeration over photon numbers n <= 3; no sampling,
so acceptance comparisons carry no statistical noise.  Detectors are threshold
(non-number-resolving) devices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError

MAX_N = 3
_NORM_TOL = 1e-9


@dataclass(frozen=True)
class ExcitationDistribution:
    """Probabilities p_n over excitation number n = 0..n_max (n_max <= 3)."""

    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.probabilities)
        if len(p) == 0 or len(p) > MAX_N + 1:
            raise ModelError(f"need 1..{MAX_N + 1} probabilities, got {len(p)}")
        if any(x < -_NORM_TOL for x in p):
            raise ModelError("probabilities must be >= 0")
        if abs(sum(p) - 1.0) > _NORM_TOL:
            raise ModelError(f"probabilities sum to {sum(p)!r}, not 1")
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_mapping(cls, dist: dict[int, float]) -> "ExcitationDistribution":
        n_max = max(dist) if dist else 0
        return cls(tuple(dist.get(n, 0.0) for n in range(n_max + 1)))

    @property
    def n_max(self) -> int:
        return len(self.probabilities) - 1

    def p(self, n: int) -> float:
        return self.probabilities[n] if n <= self.n_max else 0.0

    def mean(self) -> float:
        return sum(n * p for n, p in enumerate(self.probabilities))


@dataclass(frozen=True)
class RetrievalModel:
    """Scalar efficiencies of the read-out chain plus the HBT splitter."""

    eta_retrieval: float = 1.0
    eta_detection: float = 1.0
    splitter_ratio: float = 0.5

    def __post_init__(self):
        for name in ("eta_retrieval", "eta_detection", "splitter_ratio"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ModelError(f"{name} must lie in [0, 1], got {v}")


def thin_distribution(d: ExcitationDistribution, eta: float) -> ExcitationDistribution:
    """Binomial loss channel: each quantum independently survives with ``eta``."""
    if not 0.0 <= eta <= 1.0:
        raise ModelError(f"eta must lie in [0, 1], got {eta}")
    out = [0.0] * (d.n_max + 1)
    for n, p_n in enumerate(d.probabilities):
        for m in range(n + 1):
            out[m] += p_n * math.comb(n, m) * eta**m * (1.0 - eta) ** (n - m)
    return ExcitationDistribution(tuple(out))


def g2_of_distribution(d: ExcitationDistribution) -> float:
    """Second-order correlation, <n(n-1)> / <n>^2."""
    mean = d.mean()
    if mean <= 0.0:
        raise ModelError("g2 undefined for zero mean photon number")
    factorial2 = sum(n * (n - 1) * p for n, p in enumerate(d.probabilities))
    return factorial2 / mean**2


@dataclass(frozen=True)
class HbtResult:
    p_click_sum: float
    p_click_a: float
    p_click_b: float
    p_coincidence: float
    g2_measured: float | None
    photon_distribution: ExcitationDistribution


def hbt_probabilities(d: ExcitationDistribution, r: RetrievalModel) -> HbtResult:
    """Threshold-detector HBT observables after retrieval and detection loss.

    Photons survive the retrieval and detection thinnings, then each routes to
    detector A with probability ``splitter_ratio`` (else B).  Returns the
    summed click probability (the Rabi-scan observable), the two-detector
    coincidence probability, and g2_measured = p_AB / (p_A * p_B).
    """
    photons = thin_distribution(thin_distribution(d, r.eta_retrieval), r.eta_detection)
    s = r.splitter_ratio
    p_no_a = sum(p * (1.0 - s) ** m for m, p in enumerate(photons.probabilities))
    p_no_b = sum(p * s**m for m, p in enumerate(photons.probabilities))
    p_a = 1.0 - p_no_a
    p_b = 1.0 - p_no_b
    p_coinc = 1.0 - p_no_a - p_no_b + photons.p(0)
    g2 = p_coinc / (p_a * p_b) if p_a > 0.0 and p_b > 0.0 else None
    return HbtResult(
        p_click_sum=p_a + p_b,
        p_click_a=p_a,
        p_click_b=p_b,
        p_coincidence=p_coinc,
        g2_measured=g2,
        photon_distribution=photons,
    )


def distribution_from_populations(final_distribution: dict[int, float]) -> ExcitationDistribution:
    """Clamp tiny integrator noise and renormalize a raw excitation map."""
    values = np.array([max(final_distribution.get(n, 0.0), 0.0) for n in range(MAX_N + 1)])
    total = values.sum()
    if total <= 0:
        raise ModelError("empty excitation distribution")
    return ExcitationDistribution(tuple(values / total))
