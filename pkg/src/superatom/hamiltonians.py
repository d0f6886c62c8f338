"""Rotating-frame Hamiltonians for the three model tiers.

All frequencies are angular (rad/us).  Sign convention, fixed once for the
whole package: excited-state diagonal entries carry ``-detuning``, i.e. the
two-level reduction reads

    H = [[0, omega_N/2], [omega_N/2, -delta]]

so a red single-photon detuning (delta1 < 0) appears as a positive diagonal
entry for the intermediate state, and a positive chirp of delta2 sweeps the
two-photon detuning delta = delta1 + delta2 upward through resonance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ModelError

HERMITICITY_TOL = 1e-12


# ---------------------------------------------------------------------------
# parameter containers


@dataclass(frozen=True)
class LadderParams:
    """Single-atom two-photon ladder parameters (rad/us)."""

    omega1: float
    omega2: float
    delta1: float
    delta2: float = 0.0
    gamma_e: float = 0.0
    gamma_r: float = 0.0

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0:
            raise ModelError("Rabi frequencies omega1, omega2 must be >= 0")
        if self.gamma_e < 0 or self.gamma_r < 0:
            raise ModelError("decay rates must be >= 0")


@dataclass(frozen=True)
class SuperatomParams:
    """Collective two/three-level (Dicke ladder) parameters (rad/us).

    ``omega_eff`` is the single-atom effective Rabi frequency; it may be
    negative (red intermediate detuning).  ``blockade_shift`` is the energy
    penalty of the doubly excited level; it only matters when
    ``include_double`` is set.
    """

    n_atoms: float
    omega_eff: float
    delta_two_photon: float = 0.0
    blockade_shift: float = 0.0
    include_double: bool = False

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ModelError("n_atoms must be >= 1")

    @property
    def omega_collective(self) -> float:
        return math.sqrt(self.n_atoms) * self.omega_eff

    def basis(self) -> list[str]:
        return ["G", "R", "RR"] if self.include_double else ["G", "R"]


@dataclass(frozen=True)
class FullEnsembleParams:
    """Brute-force N-atom parameters, truncated at two Rydberg excitations.

    ``pair_shifts`` maps unordered atom pairs (i, j), i < j, to the
    interaction shift V_ij (rad/us).  Missing pairs default to 0.
    """

    n_atoms: int
    omega_eff: float
    delta_two_photon: float = 0.0
    pair_shifts: dict[tuple[int, int], float] = field(default_factory=dict)

    MAX_ATOMS = 8

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ModelError("n_atoms must be >= 1")
        if self.n_atoms > self.MAX_ATOMS:
            raise ModelError(
                f"full ensemble model supports at most {self.MAX_ATOMS} atoms, "
                f"got {self.n_atoms}"
            )
        normalized = {}
        for (i, j), v in self.pair_shifts.items():
            if i == j:
                raise ModelError(f"pair shift with identical indices ({i},{j})")
            key = (min(i, j), max(i, j))
            if key in normalized and normalized[key] != v:
                raise ModelError(f"conflicting pair shifts for {key}")
            normalized[key] = v
        object.__setattr__(self, "pair_shifts", normalized)

    @classmethod
    def uniform(cls, n_atoms: int, omega_eff: float, delta: float, shift: float):
        pairs = {(i, j): shift for i in range(n_atoms) for j in range(i + 1, n_atoms)}
        return cls(n_atoms, omega_eff, delta, pairs)

    def basis(self) -> list[str]:
        n = self.n_atoms
        labels = ["G"] + [f"r{i}" for i in range(n)]
        labels += [f"r{i}r{j}" for i in range(n) for j in range(i + 1, n)]
        return labels


@dataclass(frozen=True)
class LabeledOperator:
    """Dense Hermitian operator over an ordered, labeled basis."""

    basis: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (len(self.basis), len(self.basis)):
            raise ModelError(
                f"matrix shape {m.shape} does not match basis of length {len(self.basis)}"
            )
        if np.max(np.abs(m - m.conj().T)) >= HERMITICITY_TOL:
            raise ModelError("operator is not Hermitian within 1e-12")
        m.flags.writeable = False
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "matrix", m)

    def index(self, label: str) -> int:
        return self.basis.index(label)


# ---------------------------------------------------------------------------
# two-level reduction and dressed states


def effective_two_level(p: LadderParams) -> tuple[float, float]:
    """Adiabatic elimination of the intermediate state.

    Returns (omega_eff, delta_two_photon) with
    omega_eff = omega1*omega2/(2*delta1) (sign preserved) and
    delta = delta1 + delta2.  Warns when |delta1| < 5*max(omega1, omega2),
    where the elimination becomes questionable.
    """
    if p.delta1 == 0:
        raise ModelError("adiabatic elimination undefined at delta1 = 0")
    drive = max(p.omega1, p.omega2)
    if drive > 0 and abs(p.delta1) < 5.0 * drive:
        warnings.warn(
            "adiabatic elimination marginal: |delta1| < 5*max(omega1, omega2)",
            stacklevel=2,
        )
    omega = p.omega1 * p.omega2 / (2.0 * p.delta1)
    return omega, p.delta1 + p.delta2


def estimate_atom_number(omega_collective: float, omega_eff: float) -> float:
    """Atom number from the collective enhancement, N = (Omega_N/Omega)^2."""
    if omega_eff == 0:
        raise ModelError("atom number undefined for omega_eff = 0")
    return (omega_collective / omega_eff) ** 2


def mixing_angle(omega_n: float, delta: float) -> float:
    """Dressed-state mixing angle, theta = atan2(omega_n, delta) / 2.

    Continuous branch: for omega_n > 0, sweeping delta from +inf to -inf moves
    theta monotonically from 0 to pi/2.
    """
    if omega_n == 0 and delta == 0:
        raise ModelError("mixing angle undefined at omega_n = delta = 0")
    return 0.5 * math.atan2(omega_n, delta)


def dressed_states(
    omega_n: float, delta: float
) -> tuple[np.ndarray, np.ndarray, tuple[float, float]]:
    """Instantaneous eigenstates of the two-level rotating-frame Hamiltonian.

    Returns (plus, minus, (lambda_plus, lambda_minus)) in the (|G>, |R>)
    basis, with |+> the upper-eigenvalue branch:

        |+> = cos(theta)|G> + sin(theta)|R>,   lambda_+ = (-delta + W)/2
        |-> = sin(theta)|G> - cos(theta)|R>,   lambda_- = (-delta - W)/2

    where W = sqrt(omega_n^2 + delta^2).  At delta = 0 these are
    (|G> +- |R>)/sqrt(2).  With this package's sign convention (-delta on the
    |R> diagonal) a positive chirp starts on |-> ~ |G> at delta << 0 and
    follows it adiabatically into |R>; negative chirping follows |+>.
    """
    theta = mixing_angle(omega_n, delta)
    gap = math.hypot(omega_n, delta)
    plus = np.array([math.cos(theta), math.sin(theta)], dtype=complex)
    minus = np.array([math.sin(theta), -math.cos(theta)], dtype=complex)
    return plus, minus, ((-delta + gap) / 2.0, (-delta - gap) / 2.0)


# ---------------------------------------------------------------------------
# matrix builders (raw ndarray versions feed the time-dependent terms)


def superatom_matrix(
    n_atoms: float, omega_collective: float, delta: float,
    blockade_shift: float = 0.0, include_double: bool = False,
) -> np.ndarray:
    if not include_double:
        return np.array(
            [[0.0, omega_collective / 2.0], [omega_collective / 2.0, -delta]],
            dtype=complex,
        )
    # Dicke-ladder coupling to the second excitation: sqrt(2(N-1)/N) * Omega_N / 2
    g2 = math.sqrt(max(2.0 * (n_atoms - 1.0) / n_atoms, 0.0)) * omega_collective / 2.0
    return np.array(
        [
            [0.0, omega_collective / 2.0, 0.0],
            [omega_collective / 2.0, -delta, g2],
            [0.0, g2, -2.0 * delta + blockade_shift],
        ],
        dtype=complex,
    )


def ladder3_matrix(omega1: float, omega2: float, delta1: float, delta2: float) -> np.ndarray:
    return np.array(
        [
            [0.0, omega1 / 2.0, 0.0],
            [omega1 / 2.0, -delta1, omega2 / 2.0],
            [0.0, omega2 / 2.0, -(delta1 + delta2)],
        ],
        dtype=complex,
    )


def full_n_matrix(p: FullEnsembleParams, omega_eff: float | None = None,
                  delta: float | None = None) -> np.ndarray:
    """Ground + single + double excitation manifold of N individually coupled atoms."""
    n = p.n_atoms
    omega = p.omega_eff if omega_eff is None else omega_eff
    dlt = p.delta_two_photon if delta is None else delta
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    dim = 1 + n + len(pairs)
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(n):
        h[0, 1 + i] = h[1 + i, 0] = omega / 2.0
        h[1 + i, 1 + i] = -dlt
    for k, (i, j) in enumerate(pairs):
        col = 1 + n + k
        h[1 + i, col] = h[col, 1 + i] = omega / 2.0
        h[1 + j, col] = h[col, 1 + j] = omega / 2.0
        h[col, col] = -2.0 * dlt + p.pair_shifts.get((i, j), 0.0)
    return h


# ---------------------------------------------------------------------------
# [labeled] builder operations


def hamiltonian_superatom(
    p: SuperatomParams, omega_collective: float | None = None,
    delta: float | None = None,
) -> LabeledOperator:
    """Superatom Hamiltonian at given instantaneous drive values.

    ``omega_collective``/``delta`` default to the static values in ``p``; pass
    per-sample values when building a time-dependent evolution by hand.
    """
    w = p.omega_collective if omega_collective is None else omega_collective
    d = p.delta_two_photon if delta is None else delta
    m = superatom_matrix(p.n_atoms, w, d, p.blockade_shift, p.include_double)
    return LabeledOperator(tuple(p.basis()), m)


def hamiltonian_ladder3(p: LadderParams, t: float | None = None,
                        schedule=None) -> LabeledOperator:
    """Three-level ladder Hamiltonian |g>, |e>, |r>.

    With a schedule, evaluates omega1(t), omega2(t), delta2(t) at ``t`` (which
    must lie inside the schedule support); otherwise uses the static params.
    """
    if schedule is not None:
        if t is None:
            raise ModelError("a time is required when a schedule is given")
        o1, o2, d2 = schedule.sample(t)
        m = ladder3_matrix(o1, o2, schedule.delta1, d2)
    else:
        m = ladder3_matrix(p.omega1, p.omega2, p.delta1, p.delta2)
    return LabeledOperator(("g", "e", "r"), m)


def hamiltonian_full_n(p: FullEnsembleParams) -> LabeledOperator:
    return LabeledOperator(tuple(p.basis()), full_n_matrix(p))


def with_noise(p: SuperatomParams, n_atoms: float,
               blockade_shift: float) -> SuperatomParams:
    """Copy of ``p`` with sampled atom number and blockade shift."""
    return replace(p, n_atoms=n_atoms, blockade_shift=blockade_shift)
