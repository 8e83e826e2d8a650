"""Map the dimensionless schedule onto a physical rf pulse program.

A spin system with fixed ZZ couplings J = (48, -196, 160) Hz plus a
transverse rf drive of amplitude nu realizes, slice by slice, the
interpolated Hamiltonian of the engine module: choosing

    nu_l = 40 (1 - s_l) / s_l   [Hz]
    t_l  = tau * s_l / (40 pi)  [s]

makes H_phys(nu_l) * t_l equal tau * H(s_l) exactly, so the physical
evolution over slice l reproduces one dimensionless step. Physical
Hamiltonians here carry angular-frequency units (rad/s) and pair with
durations in seconds; the engine's are dimensionless and pair with tau.

Also included: the analytic population model for weakly polarized
(pseudo-pure) initial states, populations = (1-eps)/2^n + eps |amp|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import Schedule, initial_state, transverse_field
from .errors import ConfigError
from .pauli import PauliAxis, PauliSum, PauliTerm, propagate, to_matrix

__all__ = [
    "BASE_FREQUENCY_HZ",
    "PhysicalCouplings",
    "DEFAULT_COUPLINGS",
    "PulseSlice",
    "PulseProgram",
    "PseudoPureState",
    "coupling_hamiltonian",
    "dimensionless_problem",
    "pulse_program",
    "physical_hamiltonian",
    "verify_step_equivalence",
    "run_physical",
    "pseudo_pure_populations",
]

BASE_FREQUENCY_HZ = 40.0


@dataclass(frozen=True)
class PhysicalCouplings:
    """Scalar couplings of the three-spin system, in Hz."""

    J12: float = 48.0
    J23: float = -196.0
    J13: float = 160.0

    def pairs(self) -> tuple[tuple[int, int, float], ...]:
        return ((1, 2, self.J12), (2, 3, self.J23), (1, 3, self.J13))


DEFAULT_COUPLINGS = PhysicalCouplings()


@dataclass(frozen=True)
class PulseSlice:
    """One piecewise-constant rf segment: amplitude in Hz, duration in s.

    The final slice of a linear schedule has s = 1 and therefore amplitude
    exactly 0 (pure coupling evolution); all earlier slices are > 0.
    """

    index: int
    amplitude: float
    duration: float

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ConfigError("slice index starts at 1")
        if self.amplitude < 0.0:
            raise ConfigError(f"slice {self.index}: negative amplitude {self.amplitude}")
        if self.duration <= 0.0:
            raise ConfigError(f"slice {self.index}: non-positive duration {self.duration}")


@dataclass(frozen=True)
class PulseProgram:
    """The full slice table plus the coupling constants it assumes."""

    slices: tuple[PulseSlice, ...]
    couplings: PhysicalCouplings
    clamped_slices: int = 0

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.slices))

    def amplitudes(self) -> np.ndarray:
        return np.array([s.amplitude for s in self.slices])

    def durations(self) -> np.ndarray:
        return np.array([s.duration for s in self.slices])


@dataclass(frozen=True)
class PseudoPureState:
    """Weakly polarized density model: (1-eps)/2^n identity + eps pure part."""

    epsilon: float
    pure_part: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"polarization epsilon={self.epsilon} outside [0, 1]")


def coupling_hamiltonian(couplings: PhysicalCouplings = DEFAULT_COUPLINGS) -> PauliSum:
    """ZZ part in rad/s: sum over pairs of (pi/2) J_jk sigma_z^j sigma_z^k."""
    terms = [
        PauliTerm.make(0.5 * math.pi * j_value, {a: PauliAxis.Z, b: PauliAxis.Z}, 3)
        for a, b, j_value in couplings.pairs()
    ]
    return PauliSum.from_terms(terms, 3)


def dimensionless_problem(couplings: PhysicalCouplings = DEFAULT_COUPLINGS) -> tuple[PauliSum, PauliSum]:
    """The (h0, hp) pair these couplings realize: hp = (1/2) sum (J/40) zz."""
    terms = [
        PauliTerm.make(0.5 * j_value / BASE_FREQUENCY_HZ,
                       {a: PauliAxis.Z, b: PauliAxis.Z}, 3)
        for a, b, j_value in couplings.pairs()
    ]
    return transverse_field(3), PauliSum.from_terms(terms, 3)


def pulse_program(schedule: Schedule,
                  couplings: PhysicalCouplings = DEFAULT_COUPLINGS) -> PulseProgram:
    """Slice table nu_l = 40 (1 - s_l)/s_l, t_l = tau s_l / (40 pi).

    The linear grid starts at s_1 = 1/L > 0; an s = 0 entry would need an
    infinite amplitude and is rejected — that endpoint is realized by state
    preparation, not by a pulse.
    """
    slices = []
    for l, s in enumerate(schedule.s_values, start=1):
        if s <= 0.0:
            raise ConfigError(
                "s = 0 has no pulse realization; the initial point is prepared, not evolved"
            )
        amplitude = BASE_FREQUENCY_HZ * (1.0 - s) / s
        duration = schedule.tau * s / (BASE_FREQUENCY_HZ * math.pi)
        slices.append(PulseSlice(l, amplitude, duration))
    return PulseProgram(tuple(slices), couplings)


def physical_hamiltonian(nu: float,
                         couplings: PhysicalCouplings = DEFAULT_COUPLINGS) -> PauliSum:
    """Drive plus couplings, rad/s: pi nu sum sigma_x + (pi/2) sum J zz."""
    if nu < 0.0:
        raise ConfigError(f"rf amplitude nu={nu} must be non-negative")
    drive = transverse_field(3).scaled(math.pi * nu)
    return drive + coupling_hamiltonian(couplings)


def verify_step_equivalence(schedule: Schedule,
                            couplings: PhysicalCouplings = DEFAULT_COUPLINGS) -> float:
    """Max entrywise |H_phys(nu_l) t_l - tau H(s_l)| over all slices.

    The identity is exact in this model (H_phys(nu_l) = (40 pi / s_l) H(s_l)
    in matching units), so the return value is numerical dust (<= 1e-12).
    """
    from .engine import interpolate

    h0, hp = dimensionless_problem(couplings)
    program = pulse_program(schedule, couplings)
    worst = 0.0
    for pulse_slice, s in zip(program.slices, schedule.s_values):
        physical = to_matrix(physical_hamiltonian(pulse_slice.amplitude, couplings))
        dimensionless = to_matrix(interpolate(s, h0, hp))
        deviation = np.max(np.abs(physical * pulse_slice.duration
                                  - dimensionless * schedule.tau))
        worst = max(worst, float(deviation))
    return worst


def run_physical(schedule: Schedule,
                 couplings: PhysicalCouplings = DEFAULT_COUPLINGS) -> np.ndarray:
    """Evolve through the physical slices; returns the final state vector.

    Equal (up to global phase) to the dimensionless engine's final state:
    each slice's generator times its duration matches tau H(s_l) exactly.
    """
    program = pulse_program(schedule, couplings)
    state = initial_state(3)
    for pulse_slice in program.slices:
        h = physical_hamiltonian(pulse_slice.amplitude, couplings)
        state = propagate(state, h, pulse_slice.duration)
    return state


def pseudo_pure_populations(pps: PseudoPureState) -> np.ndarray:
    """Measured populations (1 - eps)/2^n + eps |amplitude_i|^2; sums to 1."""
    pure = np.abs(pps.pure_part) ** 2
    dim = pure.size
    return (1.0 - pps.epsilon) / dim + pps.epsilon * pure
