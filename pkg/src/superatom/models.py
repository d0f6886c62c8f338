"""Model tiers: superatom Dicke ladder, 3-level ladder atom, full N-atom oracle.

A model turns a drive (a :class:`PulseSchedule` or an :class:`EffectiveDrive`)
into a sum of constant matrices with scalar time-dependent coefficients,
which is what the integrator consumes:  H(t) = sum_k c_k(t) * M_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ModelError
from .hamiltonians import (
    FullEnsembleParams,
    LadderParams,
    full_n_matrix,
    ladder3_matrix,
    superatom_matrix,
)
from .pulses import PulseSchedule, chirp_value, effective_rabi_and_delta, shape_value

Coefficient = Callable[[np.ndarray], np.ndarray] | float


def intermediate_scattering_rate(schedule: PulseSchedule, gamma_e: float):
    """Decay rate of a Rydberg excitation through its off-resonant
    intermediate-state admixture: gamma_e * omega2(t)^2 / (4 delta2(t)^2).

    This is the second-order elimination result for the upper leg; the
    admixture is capped at 1/2 (saturation) so a chirp approaching the
    intermediate resonance cannot produce an unphysical rate."""

    def rate(t):
        omega2 = np.asarray(shape_value(schedule.omega2_shape, t), dtype=float)
        delta2 = np.asarray(chirp_value(schedule.chirp, t), dtype=float)
        with np.errstate(divide="ignore"):
            mixing = np.where(delta2 != 0.0, omega2**2 / (4.0 * delta2**2), np.inf)
        return gamma_e * np.minimum(mixing, 0.5)

    return rate


@dataclass(frozen=True)
class EffectiveDrive:
    """Reduced two-level drive: single-atom omega(t) and two-photon delta(t).

    ``omega_single`` and ``delta`` must accept numpy arrays.  The collective
    coupling is sqrt(n_atoms) * omega_single(t).
    """

    omega_single: Callable[[np.ndarray], np.ndarray]
    delta: Callable[[np.ndarray], np.ndarray]
    duration: float
    n_atoms: float = 1.0

    def omega_collective(self, t):
        return math.sqrt(self.n_atoms) * np.asarray(self.omega_single(t))

    @classmethod
    def from_schedule(cls, schedule: PulseSchedule, n_atoms: float = 1.0):
        def omega(t):
            w, _ = effective_rabi_and_delta(schedule, t, n_atoms=1.0)
            return w

        def delta(t):
            _, d = effective_rabi_and_delta(schedule, t, n_atoms=1.0)
            return d

        return cls(omega, delta, schedule.duration, n_atoms)

    @classmethod
    def constant(cls, omega: float, delta: float, duration: float,
                 n_atoms: float = 1.0):
        return cls(
            lambda t: np.full_like(np.asarray(t, dtype=float), omega),
            lambda t: np.full_like(np.asarray(t, dtype=float), delta),
            duration,
            n_atoms,
        )

    @classmethod
    def linear_chirp(cls, omega: float, rate: float, duration: float,
                     center_delta: float = 0.0, n_atoms: float = 1.0):
        """Constant coupling, delta(t) = center + rate*(t - duration/2)."""
        mid = duration / 2.0

        return cls(
            lambda t: np.full_like(np.asarray(t, dtype=float), omega),
            lambda t: center_delta + rate * (np.asarray(t, dtype=float) - mid),
            duration,
            n_atoms,
        )


def _as_drive(model_n_atoms: float, schedule) -> EffectiveDrive:
    if isinstance(schedule, EffectiveDrive):
        return schedule
    if isinstance(schedule, PulseSchedule):
        return EffectiveDrive.from_schedule(schedule, model_n_atoms)
    raise ModelError(f"unsupported drive object: {type(schedule).__name__}")


@dataclass(frozen=True)
class SuperatomModel:
    """Blockaded ensemble as a two- or three-level Dicke ladder.

    ``include_loss`` appends a dark level |D> (zero Hamiltonian row) used as
    the target of scattering from the doubly excited state: a pair that
    scatters is no longer phase-matched and retrieves nothing."""

    n_atoms: float = 1.0
    include_double: bool = False
    blockade_shift: float = 0.0
    include_loss: bool = False

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ModelError("n_atoms must be >= 1")
        if self.include_loss and not self.include_double:
            raise ModelError("the loss level only accompanies the doubly excited level")

    @property
    def basis(self) -> tuple[str, ...]:
        if not self.include_double:
            return ("G", "R")
        return ("G", "R", "RR", "D") if self.include_loss else ("G", "R", "RR")

    @property
    def excitations(self) -> tuple[int, ...]:
        if not self.include_double:
            return (0, 1)
        return (0, 1, 2, 0) if self.include_loss else (0, 1, 2)

    def with_noise(self, n_atoms: float, blockade_shift: float) -> "SuperatomModel":
        return replace(self, n_atoms=max(n_atoms, 1.0), blockade_shift=blockade_shift)

    def _pad(self, matrix: np.ndarray) -> np.ndarray:
        if not self.include_loss:
            return matrix
        padded = np.zeros((4, 4), dtype=complex)
        padded[:3, :3] = matrix
        return padded

    def hamiltonian_terms(self, schedule) -> list[tuple[np.ndarray, Coefficient]]:
        drive = _as_drive(self.n_atoms, schedule)
        coupling = superatom_matrix(self.n_atoms, 1.0, 0.0, 0.0, self.include_double)
        detuning = superatom_matrix(self.n_atoms, 0.0, 1.0, 0.0, self.include_double)
        terms: list[tuple[np.ndarray, Coefficient]] = [
            (self._pad(coupling), drive.omega_collective),
            (self._pad(detuning), drive.delta),
        ]
        if self.include_double and self.blockade_shift != 0.0:
            shift = superatom_matrix(self.n_atoms, 0.0, 0.0, 1.0, True)
            terms.append((self._pad(shift), self.blockade_shift))
        return terms

    def effective_drive(self, schedule) -> EffectiveDrive:
        return _as_drive(self.n_atoms, schedule)


@dataclass(frozen=True)
class LadderModel:
    """Single three-level ladder atom |g>, |e>, |r> driven by the lasers.

    ``collective_boost`` scales omega1, modelling the sqrt(N)-enhanced
    coupling of the ensemble ground state to the symmetric singly excited
    manifold; the reduced collective Rabi frequency then matches
    sqrt(N) * omega1*omega2/(2*delta1).
    """

    params: LadderParams
    collective_boost: float = 1.0

    basis = ("g", "e", "r")
    excitations = (0, 0, 1)

    def with_noise(self, n_atoms: float, blockade_shift: float) -> "LadderModel":
        del blockade_shift  # no doubly excited level in this tier
        return replace(self, collective_boost=math.sqrt(max(n_atoms, 1.0)))

    def hamiltonian_terms(self, schedule) -> list[tuple[np.ndarray, Coefficient]]:
        if not isinstance(schedule, PulseSchedule):
            raise ModelError("the ladder tier needs a laser PulseSchedule")
        boost = self.collective_boost
        coupling1 = ladder3_matrix(1.0, 0.0, 0.0, 0.0)
        coupling2 = ladder3_matrix(0.0, 1.0, 0.0, 0.0)
        detuning1 = ladder3_matrix(0.0, 0.0, 1.0, 0.0)
        detuning2 = ladder3_matrix(0.0, 0.0, 0.0, 1.0)

        def omega1(t):
            return boost * np.asarray(schedule.sample(t)[0])

        def omega2(t):
            return np.asarray(schedule.sample(t)[1])

        def delta2(t):
            return np.asarray(schedule.sample(t)[2])

        return [
            (coupling1, omega1),
            (coupling2, omega2),
            (detuning1, schedule.delta1),
            (detuning2, delta2),
        ]

    def effective_drive(self, schedule) -> EffectiveDrive:
        return _as_drive(self.collective_boost**2, schedule)

    def collapse_operators(self) -> list[np.ndarray]:
        """Default dissipation: |e> decays to |g>, pure dephasing on |r>."""
        ops = []
        if self.params.gamma_e > 0:
            decay = np.zeros((3, 3), dtype=complex)
            decay[0, 1] = math.sqrt(self.params.gamma_e)
            ops.append(decay)
        if self.params.gamma_r > 0:
            deph = np.zeros((3, 3), dtype=complex)
            deph[2, 2] = math.sqrt(self.params.gamma_r)
            ops.append(deph)
        return ops


@dataclass(frozen=True)
class FullEnsembleModel:
    """Brute-force N-atom model (N <= 8), truncated at two excitations."""

    params: FullEnsembleParams

    @property
    def basis(self) -> tuple[str, ...]:
        return tuple(self.params.basis())

    @property
    def excitations(self) -> tuple[int, ...]:
        n = self.params.n_atoms
        return tuple([0] + [1] * n + [2] * (n * (n - 1) // 2))

    def with_noise(self, n_atoms: float, blockade_shift: float) -> "FullEnsembleModel":
        if round(n_atoms) != self.params.n_atoms:
            raise ModelError("atom-number noise would change the basis size")
        p = FullEnsembleParams.uniform(
            self.params.n_atoms, self.params.omega_eff,
            self.params.delta_two_photon, blockade_shift,
        )
        return FullEnsembleModel(p)

    def hamiltonian_terms(self, schedule) -> list[tuple[np.ndarray, Coefficient]]:
        drive = _as_drive(self.params.n_atoms, schedule)
        bare = replace(self.params, pair_shifts={})
        coupling = full_n_matrix(bare, omega_eff=1.0, delta=0.0)
        detuning = full_n_matrix(bare, omega_eff=0.0, delta=1.0)
        terms: list[tuple[np.ndarray, Coefficient]] = [
            (coupling, drive.omega_single),
            (detuning, drive.delta),
        ]
        if self.params.pair_shifts:
            shifts = full_n_matrix(self.params, omega_eff=0.0, delta=0.0)
            terms.append((shifts, 1.0))
        return terms

    def effective_drive(self, schedule) -> EffectiveDrive:
        return _as_drive(self.params.n_atoms, schedule)


Model = SuperatomModel | LadderModel | FullEnsembleModel


def ground_state(model: Model) -> np.ndarray:
    psi = np.zeros(len(model.basis), dtype=complex)
    psi[0] = 1.0
    return psi
