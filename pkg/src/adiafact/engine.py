"""Discrete adiabatic evolution of interpolated Hamiltonians.

Implements the dimensionless passage H(s) = (1 - s) H0 + s Hp on a linear
grid s_l = l/L: the state starts in the transverse-field ground state and is
propagated exactly (dense eigendecomposition, not product formulas) under
each H(s_l) for a step of duration tau. Per-step records capture basis
populations, energy, and fidelity against the instantaneous ground
subspace; a spectrum sweep supports level-diagram output.

Fidelity convention: ground_subspace_fidelity returns sqrt(<psi|P|psi>),
the amplitude overlap with the ground subspace, so that a 50/50
superposition over a 2-fold degenerate ground space still scores 1 and a
single degenerate branch scores 1/sqrt(2) of nothing lost. All fidelity
figures in this package use this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .pauli import PauliAxis, PauliSum, PauliTerm, eigendecompose, propagate, to_matrix

__all__ = [
    "Schedule",
    "TrajectoryRecord",
    "Trajectory",
    "SpectrumCurve",
    "DEFAULT_STAGES",
    "transverse_field",
    "interpolate",
    "initial_state",
    "ground_subspace_fidelity",
    "run",
    "spectrum",
    "interpolation_lipschitz_bound",
    "flip_sector_leakage",
    "stage_records",
]

DEFAULT_STAGES = tuple(round(0.1 * k, 10) for k in range(11))


@dataclass(frozen=True)
class Schedule:
    """Linear discretization: L steps of duration tau, s_l = l / L."""

    L: int
    tau: float

    def __post_init__(self) -> None:
        if not isinstance(self.L, int) or self.L < 1:
            raise ConfigError(f"step count L={self.L} must be a positive integer")
        if not (self.tau > 0.0 and math.isfinite(self.tau)):
            raise ConfigError(f"step duration tau={self.tau} must be positive and finite")

    @property
    def s_values(self) -> tuple[float, ...]:
        """Grid points s_1 ... s_L (the s=0 endpoint is the initial state)."""
        return tuple(l / self.L for l in range(1, self.L + 1))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Snapshot after one step: state plus derived observables."""

    step: int
    s: float
    state: np.ndarray = field(repr=False)
    populations: np.ndarray = field(repr=False)
    ground_fidelity: float
    energy: float


@dataclass(frozen=True)
class Trajectory:
    """L+1 records (the s=0 initial snapshot plus one per step)."""

    schedule: Schedule
    records: tuple[TrajectoryRecord, ...]

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]

    def fidelities(self) -> np.ndarray:
        return np.array([r.ground_fidelity for r in self.records])

    def minimum_fidelity(self) -> float:
        return float(min(r.ground_fidelity for r in self.records))


@dataclass(frozen=True)
class SpectrumCurve:
    """Ascending eigenvalue lists of H(s) on a grid of s values."""

    grid: tuple[float, ...]
    levels: np.ndarray = field(repr=False)


def transverse_field(qubit_count: int) -> PauliSum:
    """H0 = sum_i sigma_x^i."""
    if qubit_count < 1:
        raise ConfigError("qubit_count must be >= 1")
    terms = [
        PauliTerm.make(1.0, {q: PauliAxis.X}, qubit_count)
        for q in range(1, qubit_count + 1)
    ]
    return PauliSum.from_terms(terms, qubit_count)


def interpolate(s: float, h0: PauliSum, hp: PauliSum) -> PauliSum:
    """(1 - s) h0 + s hp in canonical merged form."""
    if not 0.0 <= s <= 1.0:
        raise ConfigError(f"interpolation parameter s={s} outside [0, 1]")
    if h0.qubit_count != hp.qubit_count:
        raise ConfigError("h0 and hp act on different register sizes")
    return h0.scaled(1.0 - s) + hp.scaled(s)


def initial_state(qubit_count: int) -> np.ndarray:
    """Tensor power of (|0> - |1>)/sqrt(2), the ground state of sum sigma_x.

    Amplitude at index i is (-1)^popcount(i) / 2^(n/2).
    """
    if qubit_count < 1:
        raise ConfigError("qubit_count must be >= 1")
    dim = 2**qubit_count
    signs = np.array([(-1.0) ** bin(i).count("1") for i in range(dim)])
    return (signs / math.sqrt(dim)).astype(complex)


def _ground_projector_overlap(state: np.ndarray, eigenvalues: np.ndarray,
                              eigenvectors: np.ndarray, degeneracy_tol: float) -> float:
    ground = eigenvalues <= eigenvalues[0] + degeneracy_tol
    amplitudes = eigenvectors[:, ground].conj().T @ state
    weight = float(np.real(np.vdot(amplitudes, amplitudes)))
    return math.sqrt(min(max(weight, 0.0), 1.0))


def ground_subspace_fidelity(state: np.ndarray, h: PauliSum,
                             degeneracy_tol: float = 1e-9) -> float:
    """Amplitude overlap of ``state`` with the ground subspace of ``h``.

    The subspace spans all eigenvectors within ``degeneracy_tol`` (absolute)
    of the minimum eigenvalue. Returns sqrt(<psi|P|psi>), in [0, 1].
    """
    es = eigendecompose(to_matrix(h))
    return _ground_projector_overlap(state, es.eigenvalues, es.eigenvectors, degeneracy_tol)


def run(schedule: Schedule, h0: PauliSum, hp: PauliSum,
        degeneracy_tol: float = 1e-9) -> Trajectory:
    """Piecewise-constant passage: hold H(s_l) for tau, l = 1 ... L.

    The first record is the initial state scored against H(0) = h0; record l
    is the state after step l scored against H(s_l).
    """
    state = initial_state(h0.qubit_count)
    records = []
    for l in range(schedule.L + 1):
        s = l / schedule.L
        h_s = interpolate(s, h0, hp)
        matrix = to_matrix(h_s)
        es = eigendecompose(matrix)
        if l > 0:
            phases = np.exp(-1j * es.eigenvalues * schedule.tau)
            state = es.eigenvectors @ (phases * (es.eigenvectors.conj().T @ state))
        populations = np.abs(state) ** 2
        fidelity = _ground_projector_overlap(state, es.eigenvalues, es.eigenvectors,
                                             degeneracy_tol)
        energy = float(np.real(np.vdot(state, matrix @ state)))
        records.append(TrajectoryRecord(l, s, state.copy(), populations, fidelity, energy))
    return Trajectory(schedule, tuple(records))


def spectrum(h0: PauliSum, hp: PauliSum, grid) -> SpectrumCurve:
    """Ascending eigenvalues of H(s) at each grid point."""
    grid = tuple(float(s) for s in grid)
    for s in grid:
        if not 0.0 <= s <= 1.0:
            raise ConfigError(f"grid point s={s} outside [0, 1]")
    levels = np.empty((len(grid), 2**h0.qubit_count))
    for i, s in enumerate(grid):
        levels[i] = eigendecompose(to_matrix(interpolate(s, h0, hp))).eigenvalues
    return SpectrumCurve(grid, levels)


def interpolation_lipschitz_bound(h0: PauliSum, hp: PauliSum) -> float:
    """Operator norm of hp - h0: per-level eigenvalue drift per unit of s.

    Weyl's inequality gives |lambda_k(s) - lambda_k(s')| <= |s - s'| times
    this bound, which the spectrum-continuity tests lean on.
    """
    difference = to_matrix(hp) - to_matrix(h0)
    return float(np.linalg.norm(difference, 2))


def flip_sector_leakage(state: np.ndarray) -> float:
    """Weight of ``state`` outside its conserved global-flip sector.

    The flip F = X tensored over all qubits maps index i to its bitwise
    complement; the transverse-field ground state is an F eigenstate with
    eigenvalue (-1)^n. Every interpolated Hamiltonian here commutes with F,
    so along a trajectory this weight, (1 - (-1)^n <F>)/2, stays at zero.
    """
    qubit_count = state.size.bit_length() - 1
    parity = -1.0 if qubit_count % 2 else 1.0
    expectation = float(np.real(np.vdot(state, state[::-1])))
    return max(0.0, (1.0 - parity * expectation) / 2.0)


def stage_records(trajectory: Trajectory, stages=DEFAULT_STAGES):
    """Pick, for each requested stage value, the record with the closest s.

    With L a multiple of 10 and the default 11 stages the match is exact.
    """
    picked = []
    for stage in stages:
        if not 0.0 <= stage <= 1.0:
            raise ConfigError(f"stage value {stage} outside [0, 1]")
        record = min(trajectory.records, key=lambda r: abs(r.s - stage))
        picked.append((float(stage), record))
    return picked
