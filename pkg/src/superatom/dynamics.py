"""Fixed-step integration of the Schrodinger and Lindblad equations.

Classic 4th-order Runge-Kutta on a uniform grid.  Both equations are driven
through one linear stepper y' = A(t) y: the wavefunction directly
(A = -i H), the density matrix in vectorized form (A = Liouvillian built by
Kronecker products).  Coefficients are sampled once at half-step resolution
and the A(t) nodes are assembled in memory-bounded chunks.

States are never renormalized; norm (or trace) drift is a diagnostic and
raises :class:`NumericFailure` beyond the configured tolerance.  Pure-state
runs use the traceless gauge H -> H - tr(H)/d, which removes a global phase
and the norm drift the large chirped detunings would otherwise cause; the
phase is restored on the stored amplitudes (Simpson rule on the same nodes).
The commutator makes Lindblad evolution gauge-free automatically.

Dissipators may carry time-dependent rates: a collapse channel is either a
plain matrix L (rate fixed, amplitude included in L) or a pair
``(L, rate_fn)`` with gamma(t) >= 0 multiplying the whole dissipator of L.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, NumericFailure
from .models import EffectiveDrive, Model, ground_state
from .pulses import PulseSchedule, adiabaticity_ratio

MAX_LINDBLAD_DIM = 6
_CHUNK_BYTES = 24 * 2**20


@dataclass(frozen=True)
class IntegratorOptions:
    step: float = 5e-4          # us; 0.5 ns default
    norm_tolerance: float = 1e-6
    dense_output_stride: int = 10

    def __post_init__(self):
        if self.step <= 0:
            raise ModelError("integrator step must be > 0")
        if self.norm_tolerance <= 0:
            raise ModelError("norm tolerance must be > 0")
        if self.dense_output_stride < 1:
            raise ModelError("output stride must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled evolution: populations per basis label plus diagnostics."""

    times: np.ndarray
    basis: tuple[str, ...]
    populations: dict[str, np.ndarray]
    amplitudes: np.ndarray | None
    adiabaticity: np.ndarray | None
    final_distribution: dict[int, float]
    norm_drift: float

    def population(self, label: str) -> np.ndarray:
        return self.populations[label]

    @property
    def final_populations(self) -> dict[str, float]:
        return {k: float(v[-1]) for k, v in self.populations.items()}


def _duration(schedule) -> float:
    if isinstance(schedule, PulseSchedule):
        return schedule.duration
    if isinstance(schedule, EffectiveDrive):
        return schedule.duration
    raise ModelError(f"unsupported drive object: {type(schedule).__name__}")


def _grid(duration: float, step: float) -> tuple[int, float]:
    n_steps = max(1, round(duration / step))
    return n_steps, duration / n_steps


def _coefficient_table(terms, node_times: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    mats, vals = [], []
    for matrix, coeff in terms:
        mats.append(np.asarray(matrix, dtype=complex))
        if callable(coeff):
            vals.append(np.asarray(coeff(node_times), dtype=float))
        else:
            vals.append(np.full(node_times.size, float(coeff)))
    return mats, np.array(vals)


def _output_indices(n_steps: int, stride: int) -> np.ndarray:
    idx = np.arange(0, n_steps + 1, stride)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    return idx


def _rk4_propagate(mats, vals, y0: np.ndarray, h: float, n_steps: int,
                   out_idx: np.ndarray, check):
    """March y' = A(t) y, A(t) = sum_k vals[k, node] * mats[k].

    ``check(step_index, output_position, y)`` runs at each stored sample and
    may raise.  Returns the stored samples (len(out_idx), dim)."""
    dim = y0.size
    stacked = np.stack(mats)
    samples = np.zeros((out_idx.size, dim), dtype=complex)
    out_pos = {int(step): k for k, step in enumerate(out_idx)}
    if 0 in out_pos:
        samples[0] = y0
        check(0, 0, y0)

    chunk_steps = max(1, int(_CHUNK_BYTES // (2 * dim * dim * 16)) or 1)
    y = y0.copy()
    sixth = h / 6.0
    step = 0
    while step < n_steps:
        count = min(chunk_steps, n_steps - step)
        lo, hi = 2 * step, 2 * (step + count) + 1
        nodes = np.einsum("kt,kij->tij", vals[:, lo:hi], stacked)
        for j in range(count):
            a0, a_half, a1 = nodes[2 * j], nodes[2 * j + 1], nodes[2 * j + 2]
            k1 = a0 @ y
            k2 = a_half @ (y + (0.5 * h) * k1)
            k3 = a_half @ (y + (0.5 * h) * k2)
            k4 = a1 @ (y + h * k3)
            y = y + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            pos = out_pos.get(step + j + 1)
            if pos is not None:
                check(step + j + 1, pos, y)
                samples[pos] = y
        step += count
    return samples


def _drive_trace(model: Model, schedule, times: np.ndarray) -> np.ndarray | None:
    """Adiabaticity ratio of the reduced drive along the output grid."""
    if times.size < 2:
        return None
    try:
        drive = model.effective_drive(schedule)
    except ModelError:
        return None
    omega_n = np.abs(np.asarray(drive.omega_collective(times), dtype=float))
    delta = np.asarray(drive.delta(times), dtype=float)
    return adiabaticity_ratio(omega_n, delta, times)


def _excitation_distribution(model: Model, pops_final: np.ndarray) -> dict[int, float]:
    dist = {0: 0.0, 1: 0.0, 2: 0.0}
    for value, n_exc in zip(pops_final, model.excitations):
        dist[n_exc] += float(value)
    return dist


def evolve_schrodinger(
    model: Model,
    schedule,
    psi0: np.ndarray | None = None,
    opts: IntegratorOptions | None = None,
) -> Trajectory:
    """Integrate i d(psi)/dt = H(t) psi over the schedule window."""
    opts = opts or IntegratorOptions()
    duration = _duration(schedule)
    n_steps, h = _grid(duration, opts.step)
    node_times = 0.5 * h * np.arange(2 * n_steps + 1)
    dim = len(model.basis)

    psi = ground_state(model) if psi0 is None else np.asarray(psi0, dtype=complex).copy()
    if psi.shape != (dim,):
        raise ModelError(f"psi0 must have shape ({dim},)")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ModelError("psi0 must be normalized")

    mats, vals = _coefficient_table(model.hamiltonian_terms(schedule), node_times)
    # traceless gauge: A = -i (H - tr(H)/d); accumulated phase restored below
    trace_rate = np.zeros(node_times.size)
    gauged_mats = []
    eye = np.eye(dim)
    for matrix, values in zip(mats, vals):
        tau = np.trace(matrix).real / dim
        trace_rate += tau * values
        gauged_mats.append(-1j * (matrix - tau * eye))

    out_idx = _output_indices(n_steps, opts.dense_output_stride)
    drift_holder = [0.0]

    def check(step: int, pos: int, y: np.ndarray) -> None:
        drift = abs(np.linalg.norm(y) - 1.0)
        drift_holder[0] = max(drift_holder[0], drift)
        if drift > opts.norm_tolerance:
            raise NumericFailure(
                f"norm drift {drift:.3e} exceeds tolerance "
                f"{opts.norm_tolerance:.3e} at step {step}"
            )

    samples = _rk4_propagate(gauged_mats, vals, psi, h, n_steps, out_idx, check)

    # Simpson phase per step, then cumulative phase at the stored samples
    steps = np.arange(n_steps)
    phase_steps = (h / 6.0) * (trace_rate[2 * steps] + 4.0 * trace_rate[2 * steps + 1]
                               + trace_rate[2 * steps + 2])
    phase_cum = np.concatenate([[0.0], np.cumsum(phase_steps)])
    amplitudes = samples * np.exp(-1j * phase_cum[out_idx])[:, None]

    times = out_idx * h
    pops = np.abs(amplitudes) ** 2
    populations = {label: pops[:, i] for i, label in enumerate(model.basis)}
    return Trajectory(
        times=times,
        basis=tuple(model.basis),
        populations=populations,
        amplitudes=amplitudes,
        adiabaticity=_drive_trace(model, schedule, times),
        final_distribution=_excitation_distribution(model, pops[-1]),
        norm_drift=drift_holder[0],
    )


def _normalize_collapse(collapse_ops) -> list[tuple[np.ndarray, object]]:
    channels = []
    for op in collapse_ops or ():
        if isinstance(op, tuple):
            matrix, coeff = op
        else:
            matrix, coeff = op, 1.0
        channels.append((np.asarray(matrix, dtype=complex), coeff))
    return channels


def evolve_lindblad(
    model: Model,
    schedule,
    rho0: np.ndarray | None = None,
    collapse_ops=(),
    opts: IntegratorOptions | None = None,
) -> Trajectory:
    """Integrate the Lindblad master equation with the same fixed-step RK4.

    ``collapse_ops`` entries are matrices (fixed channels) or ``(L, rate_fn)``
    pairs with a time-dependent non-negative rate multiplying the dissipator.
    """
    opts = opts or IntegratorOptions()
    dim = len(model.basis)
    if dim > MAX_LINDBLAD_DIM:
        raise ModelError(
            f"density-matrix path supports dimension <= {MAX_LINDBLAD_DIM}, got {dim}"
        )
    duration = _duration(schedule)
    n_steps, h = _grid(duration, opts.step)
    node_times = 0.5 * h * np.arange(2 * n_steps + 1)

    if rho0 is None:
        psi = ground_state(model)
        rho = np.outer(psi, psi.conj())
    else:
        rho = np.asarray(rho0, dtype=complex).copy()
    if rho.shape != (dim, dim):
        raise ModelError(f"rho0 must have shape ({dim}, {dim})")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
        raise ModelError("rho0 must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise ModelError("rho0 must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-9:
        raise ModelError("rho0 must be positive semidefinite")

    eye = np.eye(dim)
    terms = []
    for matrix, coeff in model.hamiltonian_terms(schedule):
        matrix = np.asarray(matrix, dtype=complex)
        sup = -1j * (np.kron(matrix, eye) - np.kron(eye, matrix.T))
        terms.append((sup, coeff))
    for lop, coeff in _normalize_collapse(collapse_ops):
        ldl = lop.conj().T @ lop
        sup = np.kron(lop, lop.conj()) - 0.5 * (
            np.kron(ldl, eye) + np.kron(eye, ldl.T)
        )
        terms.append((sup, coeff))
    mats, vals = _coefficient_table(terms, node_times)

    out_idx = _output_indices(n_steps, opts.dense_output_stride)
    drift_holder = [0.0]

    def check(step: int, pos: int, y: np.ndarray) -> None:
        rho_s = y.reshape(dim, dim)
        drift = abs(np.trace(rho_s).real - 1.0)
        drift_holder[0] = max(drift_holder[0], drift)
        if drift > opts.norm_tolerance:
            raise NumericFailure(
                f"trace drift {drift:.3e} exceeds tolerance "
                f"{opts.norm_tolerance:.3e} at step {step}"
            )
        min_eig = float(np.linalg.eigvalsh(0.5 * (rho_s + rho_s.conj().T)).min())
        if min_eig < -1e-8:
            raise NumericFailure(
                f"density matrix negativity {min_eig:.3e} below -1e-8 at step {step}"
            )

    samples = _rk4_propagate(mats, vals, rho.reshape(-1), h, n_steps, out_idx, check)

    times = out_idx * h
    pops = samples.reshape(out_idx.size, dim, dim)
    pops = np.einsum("kii->ki", pops).real
    populations = {label: pops[:, i] for i, label in enumerate(model.basis)}
    return Trajectory(
        times=times,
        basis=tuple(model.basis),
        populations=populations,
        amplitudes=None,
        adiabaticity=_drive_trace(model, schedule, times),
        final_distribution=_excitation_distribution(model, pops[-1]),
        norm_drift=drift_holder[0],
    )


def landau_zener_probability(omega_n: float, alpha: float) -> float:
    """Asymptotic transfer probability of a linear sweep, 1 - exp(-pi W^2 / 2|a|)."""
    if alpha == 0:
        raise ModelError("Landau-Zener probability undefined at zero sweep rate")
    return 1.0 - math.exp(-math.pi * omega_n**2 / (2.0 * abs(alpha)))


# ---------------------------------------------------------------------------
# noise and Monte Carlo


@dataclass(frozen=True)
class BlockadeNoise:
    """Sampling law for the blockade shift V (rad/us).

    kind 'point': always ``value``; 'normal': mean/sigma, clipped at >= 0;
    'log-uniform': log-uniform over [low, high].
    """

    kind: str = "point"
    value: float = 0.0
    mean: float = 0.0
    sigma: float = 0.0
    low: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        if self.kind not in ("point", "normal", "log-uniform"):
            raise ModelError(f"unknown blockade noise kind: {self.kind!r}")
        if self.kind == "normal" and self.sigma < 0:
            raise ModelError("sigma must be >= 0")
        if self.kind == "log-uniform" and not (0 < self.low <= self.high):
            raise ModelError("log-uniform bounds must satisfy 0 < low <= high")

    def sample(self, rng: np.random.Generator) -> float:
        if self.kind == "point":
            return self.value
        if self.kind == "normal":
            return max(0.0, self.mean + self.sigma * rng.standard_normal())
        u = rng.uniform(math.log(self.low), math.log(self.high))
        return math.exp(u)


@dataclass(frozen=True)
class NoiseSpec:
    """Trial-to-trial fluctuations: Poisson atom number plus blockade sampling."""

    atom_number_mean: float = 1.0
    poisson_atom_number: bool = False
    blockade: BlockadeNoise = field(default_factory=BlockadeNoise)
    seed: int = 0

    def trial_rng(self, trial: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64((self.seed ^ trial) & 0xFFFFFFFFFFFFFFFF))

    def sample(self, rng: np.random.Generator) -> tuple[float, float]:
        if self.poisson_atom_number:
            n = float(max(1, rng.poisson(self.atom_number_mean)))
        else:
            n = float(self.atom_number_mean)
        return n, self.blockade.sample(rng)


@dataclass(frozen=True)
class MonteCarloResult:
    mean: Trajectory
    trial_distributions: list[dict[int, float]]

    @property
    def mean_distribution(self) -> dict[int, float]:
        return self.mean.final_distribution


def run_monte_carlo(
    model: Model,
    schedule,
    noise: NoiseSpec,
    trials: int,
    opts: IntegratorOptions | None = None,
    collapse_ops=None,
    workers: int = 1,
) -> MonteCarloResult:
    """Average seeded noisy trials of one schedule.

    Each trial draws (atom number, blockade shift) from ``noise`` with an RNG
    seeded by ``noise.seed XOR trial_index``, rebuilds the model, and evolves
    (Lindblad when ``collapse_ops`` is given, Schrodinger otherwise).  Trials
    merge by index, so the result does not depend on worker count.
    """
    if trials < 1:
        raise ModelError("trials must be >= 1")
    opts = opts or IntegratorOptions()

    def one_trial(trial: int) -> Trajectory:
        rng = noise.trial_rng(trial)
        n_atoms, shift = noise.sample(rng)
        trial_model = model.with_noise(n_atoms, shift)
        ops = collapse_ops(trial_model) if callable(collapse_ops) else collapse_ops
        try:
            if ops:
                return evolve_lindblad(trial_model, schedule,
                                       collapse_ops=ops, opts=opts)
            return evolve_schrodinger(trial_model, schedule, opts=opts)
        except NumericFailure as exc:
            raise NumericFailure(f"trial {trial}: {exc}") from exc

    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_trial, range(trials)))
    else:
        results = [one_trial(t) for t in range(trials)]

    first = results[0]
    mean_pops = {
        label: np.mean([r.populations[label] for r in results], axis=0)
        for label in first.basis
    }
    dists = [r.final_distribution for r in results]
    mean_dist = {n: float(np.mean([d[n] for d in dists])) for n in (0, 1, 2)}
    mean_traj = Trajectory(
        times=first.times,
        basis=first.basis,
        populations=mean_pops,
        amplitudes=None,
        adiabaticity=_drive_trace(model, schedule, first.times),
        final_distribution=mean_dist,
        norm_drift=max(r.norm_drift for r in results),
    )
    return MonteCarloResult(mean=mean_traj, trial_distributions=dists)
