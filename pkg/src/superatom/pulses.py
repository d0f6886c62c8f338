"""Parametric pulse shapes, linear chirp, pulse area and adiabaticity.

Shapes are pure functions of time and accept scalars or arrays.  The
"smoothed-square" shape is a flat top with raised-cosine edges; a plain
rectangle would break the smoothness the adiabatic condition requires, so the
edge width is an explicit parameter (default set in the config layer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError

GAUSS_COEF = 4.0 * math.log(2.0)  # exp(-GAUSS_COEF * (t/fwhm)^2) has the stated FWHM

SHAPE_KINDS = ("gaussian", "smoothed-square", "constant")


@dataclass(frozen=True)
class PulseShape:
    """One laser envelope.  ``peak`` in rad/us, times in us.

    kind:
        gaussian         peak * exp(-4 ln2 (t-center)^2 / fwhm^2)
        smoothed-square  flat top, raised-cosine edges of width ``edge``,
                         half-amplitude points at center +- fwhm/2
        constant         peak everywhere
    """

    kind: str
    peak: float
    center: float = 0.0
    fwhm: float = 1.0
    edge: float = 0.0

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ModelError(f"unknown pulse shape kind: {self.kind!r}")
        if self.peak < 0:
            raise ModelError("pulse peak must be >= 0")
        if self.kind != "constant" and self.fwhm <= 0:
            raise ModelError("pulse fwhm must be > 0")
        if self.kind == "smoothed-square":
            if self.edge < 0:
                raise ModelError("edge width must be >= 0")
            if self.edge > self.fwhm:
                raise ModelError("edge width larger than fwhm leaves no flat top")

    def support(self) -> tuple[float, float] | None:
        """Interval outside which the shape is (essentially) zero.

        Gaussian tails are unbounded; we report the FWHM interval, which is
        what the schedule containment check uses.  Constant shapes have no
        support bound.
        """
        if self.kind == "constant":
            return None
        if self.kind == "gaussian":
            return (self.center - self.fwhm / 2.0, self.center + self.fwhm / 2.0)
        half = (self.fwhm + self.edge) / 2.0
        return (self.center - half, self.center + half)


def shape_value(s: PulseShape, t):
    """Evaluate the shape at time(s) ``t`` (us)."""
    t = np.asarray(t, dtype=float)
    if s.kind == "constant":
        out = np.full_like(t, s.peak)
    elif s.kind == "gaussian":
        u = (t - s.center) / s.fwhm
        out = s.peak * np.exp(-GAUSS_COEF * u * u)
    else:  # smoothed-square
        x = np.abs(t - s.center)
        flat_end = s.fwhm / 2.0 - s.edge / 2.0
        zero_start = s.fwhm / 2.0 + s.edge / 2.0
        if s.edge == 0.0:
            out = np.where(x <= flat_end, s.peak, 0.0)
        else:
            ramp = 0.5 * (1.0 + np.cos(np.pi * (x - flat_end) / s.edge))
            out = s.peak * np.where(
                x <= flat_end, 1.0, np.where(x >= zero_start, 0.0, ramp)
            )
    return out if out.ndim else float(out)


def gaussian_sigma(fwhm: float) -> float:
    """Standard deviation of a Gaussian with the given FWHM."""
    return fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class ChirpSpec:
    """Linear detuning sweep: delta2(t) = center + rate*(t - window midpoint).

    Clamped constant outside [t0, t1]; ``rate`` is signed (rad/us per us).
    """

    center_detuning: float
    rate: float
    window: tuple[float, float]

    def __post_init__(self):
        t0, t1 = self.window
        if not t1 > t0:
            raise ModelError("chirp window must be ordered (t0 < t1)")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.window[0] + self.window[1])

    def span(self) -> tuple[float, float]:
        """delta2 values at the window ends."""
        half = 0.5 * (self.window[1] - self.window[0])
        lo = self.center_detuning - self.rate * half
        hi = self.center_detuning + self.rate * half
        return (lo, hi) if lo <= hi else (hi, lo)


def chirp_value(c: ChirpSpec, t):
    """delta2 at time(s) ``t``; linear inside the window, clamped outside."""
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, c.window[0], c.window[1])
    out = c.center_detuning + c.rate * (tc - c.midpoint)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PulseSchedule:
    """Full drive definition over t in [0, duration] (us).

    omega1_shape drives |g>-|e> (the smoothed-square 795 nm leg in the default
    scenario), omega2_shape drives |e>-|r> (the Gaussian 474 nm leg, which
    also carries the chirp).  delta1 is constant.
    """

    omega1_shape: PulseShape
    omega2_shape: PulseShape
    delta1: float
    chirp: ChirpSpec
    duration: float

    _EDGE_TOL = 1e-9

    def __post_init__(self):
        if self.duration <= 0:
            raise ModelError("schedule duration must be > 0")
        for name, shape in (("omega1", self.omega1_shape), ("omega2", self.omega2_shape)):
            sup = shape.support()
            if sup is not None and (sup[0] < -self._EDGE_TOL or sup[1] > self.duration + self._EDGE_TOL):
                raise ModelError(
                    f"{name} support {sup} exceeds the schedule window [0, {self.duration}]"
                )
        w0, w1 = self.chirp.window
        if w0 < -self._EDGE_TOL or w1 > self.duration + self._EDGE_TOL:
            raise ModelError("chirp window exceeds the schedule window")

    def _check_domain(self, t) -> None:
        t = np.asarray(t, dtype=float)
        if np.any(t < -self._EDGE_TOL) or np.any(t > self.duration + self._EDGE_TOL):
            raise ModelError(f"time outside schedule support [0, {self.duration}]")

    def sample(self, t):
        """(omega1, omega2, delta2) at time(s) ``t``; errors outside support."""
        self._check_domain(t)
        return (
            shape_value(self.omega1_shape, t),
            shape_value(self.omega2_shape, t),
            chirp_value(self.chirp, t),
        )


def effective_rabi_and_delta(schedule: PulseSchedule, t, n_atoms: float = 1.0):
    """Collective effective drive at time(s) ``t``.

    omega_n(t) = sqrt(N) * omega1(t)*omega2(t) / (2*delta1)  (sign preserved)
    delta(t)   = delta1 + delta2(t)
    """
    if schedule.delta1 == 0:
        raise ModelError("effective drive undefined at delta1 = 0")
    o1, o2, d2 = schedule.sample(t)
    omega_n = math.sqrt(n_atoms) * o1 * o2 / (2.0 * schedule.delta1)
    return omega_n, schedule.delta1 + d2


def adiabaticity_ratio(omega_n, delta, times) -> np.ndarray:
    """Pointwise adiabaticity ratio on a sampled drive.

    r(t) = |d(omega_n)/dt * delta - omega_n * d(delta)/dt|
           / (2 (omega_n^2 + delta^2)^(3/2))

    Derivatives by central finite differences on the given grid (one-sided at
    the ends).  Samples where the gap vanishes get +inf.
    """
    omega_n = np.asarray(omega_n, dtype=float)
    delta = np.asarray(delta, dtype=float)
    times = np.asarray(times, dtype=float)
    if omega_n.shape != delta.shape or omega_n.shape != times.shape:
        raise ModelError("omega_n, delta and times must have matching shapes")
    gap_sq = omega_n**2 + delta**2
    if omega_n.size < 2:
        raise ModelError("at least two samples are required")
    d_omega = np.gradient(omega_n, times)
    d_delta = np.gradient(delta, times)
    num = np.abs(d_omega * delta - omega_n * d_delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / (2.0 * gap_sq**1.5)
    r[gap_sq == 0.0] = np.inf
    return r


def pulse_area(omega_n, times) -> float:
    """Integral of |omega_n(t)| dt by the trapezoidal rule (rad)."""
    return float(np.trapezoid(np.abs(np.asarray(omega_n, dtype=float)),
                              np.asarray(times, dtype=float)))
