"""Vectorized numpy implementations of the Monte-Carlo sweep kernels.

Shared conventions (both backends):
  - ``multipliers`` are per-sample, per-event amplitude scale factors
    (already clamped at 0); shape (samples, events).
  - ``projectors`` holds the ideal instantaneous ground-subspace projector
    for each step l = 1..L, complex, shape (L, dim, dim); fidelities are
    amplitude overlaps sqrt(<psi|P|psi>).
  - States use the bit convention of the rest of the package: qubit 1 is
    the most significant bit.

The intrinsic kernel diagonalizes the perturbed step Hamiltonian; the
Trotter kernels use closed-form single-qubit rotations and diagonal
coupling phases, so they never call eigh.
"""

from __future__ import annotations

import numpy as np


def _subspace_fidelities(states: np.ndarray, projector: np.ndarray) -> np.ndarray:
    """sqrt(<psi|P|psi>) for a batch of states, clipped into [0, 1]."""
    weights = np.einsum("si,ij,sj->s", states.conj(), projector, states).real
    return np.sqrt(np.clip(weights, 0.0, 1.0))


def intrinsic_sweep(h0: np.ndarray, hp: np.ndarray, psi0: np.ndarray,
                    s_values: np.ndarray, tau: float,
                    multipliers: np.ndarray, projectors: np.ndarray) -> np.ndarray:
    """Evolve every sample under m_l (1-s_l) H0 + s_l Hp, one eigh per step.

    Returns fidelities of shape (samples, L): entry [j, l-1] is sample j's
    ground-subspace fidelity after step l, measured against the ideal
    (unperturbed) H(s_l).
    """
    samples, steps = multipliers.shape
    coeff = multipliers * (1.0 - s_values)[None, :]
    hamiltonians = (coeff[:, :, None, None] * h0[None, None]
                    + s_values[None, :, None, None] * hp[None, None])
    eigenvalues, eigenvectors = np.linalg.eigh(hamiltonians)

    states = np.broadcast_to(psi0, (samples, psi0.size)).astype(np.complex128)
    fidelities = np.empty((samples, steps))
    for l in range(steps):
        v = eigenvectors[:, l]
        phases = np.exp(-1j * eigenvalues[:, l] * tau)
        amplitudes = np.einsum("sji,sj->si", v.conj(), states)
        states = np.einsum("sij,sj->si", v, phases * amplitudes)
        fidelities[:, l] = _subspace_fidelities(states, projectors[l])
    return fidelities


def _apply_single_qubit(states: np.ndarray, gates: np.ndarray, qubit: int,
                        qubit_count: int) -> np.ndarray:
    """Apply per-sample 2x2 gates to one qubit of a batch of states.

    ``qubit`` is 1-based with qubit 1 the most significant bit; ``gates``
    has shape (samples, 2, 2).
    """
    samples = states.shape[0]
    left = 2 ** (qubit - 1)
    right = 2 ** (qubit_count - qubit)
    reshaped = states.reshape(samples, left, 2, right)
    rotated = np.einsum("sab,slbr->slar", gates, reshaped)
    return rotated.reshape(samples, -1)


def _x_rotations(angles: np.ndarray) -> np.ndarray:
    """exp(-i angle sigma_x) as a (samples, 2, 2) batch."""
    c = np.cos(angles)
    s = -1j * np.sin(angles)
    return np.stack([np.stack([c, s], axis=-1), np.stack([s, c], axis=-1)], axis=-2)


def _y_rotations(angles: np.ndarray) -> np.ndarray:
    """exp(-i angle sigma_y) as a (samples, 2, 2) batch (real entries)."""
    c = np.cos(angles) + 0j
    s = np.sin(angles) + 0j
    return np.stack([np.stack([c, -s], axis=-1), np.stack([s, c], axis=-1)], axis=-2)


def trotter_plain_sweep(hp_diag: np.ndarray, psi0: np.ndarray,
                        s_values: np.ndarray, tau: float,
                        multipliers: np.ndarray, projectors: np.ndarray,
                        qubit_count: int) -> np.ndarray:
    """First-order split: transverse factor (noise-scaled), then coupling.

    Returns sub-record fidelities of shape (samples, L, 2): after the
    transverse propagator and after the diagonal coupling propagator.
    """
    samples, steps = multipliers.shape
    states = np.broadcast_to(psi0, (samples, psi0.size)).astype(np.complex128)
    fidelities = np.empty((samples, steps, 2))
    for l, s in enumerate(s_values):
        angles = multipliers[:, l] * (1.0 - s) * tau
        gates = _x_rotations(angles)
        for qubit in range(1, qubit_count + 1):
            states = _apply_single_qubit(states, gates, qubit, qubit_count)
        fidelities[:, l, 0] = _subspace_fidelities(states, projectors[l])
        states = states * np.exp(-1j * s * tau * hp_diag)[None, :]
        fidelities[:, l, 1] = _subspace_fidelities(states, projectors[l])
    return fidelities


def trotter_pulse_sweep(hp_diag: np.ndarray, psi0: np.ndarray,
                        s_values: np.ndarray, tau: float,
                        multipliers: np.ndarray, projectors: np.ndarray,
                        qubit_count: int) -> np.ndarray:
    """Hard-pulse compiled split: the transverse factor becomes a pi/4
    y-pulse pair sandwiching a z rotation, each hard pulse carrying its own
    amplitude noise; the coupling factor is unchanged.

    ``multipliers`` has shape (samples, 2L): entries 2l, 2l+1 scale the two
    hard pulses of step l+1. Returns fidelities of shape (samples, L, 4):
    after the first y pulse, the z rotation, the second y pulse, and the
    coupling propagator.
    """
    samples = multipliers.shape[0]
    states = np.broadcast_to(psi0, (samples, psi0.size)).astype(np.complex128)
    steps = s_values.size
    fidelities = np.empty((samples, steps, 4))
    for l, s in enumerate(s_values):
        first = _y_rotations(-0.25 * np.pi * multipliers[:, 2 * l])
        second = _y_rotations(0.25 * np.pi * multipliers[:, 2 * l + 1])
        z_gate = np.zeros((samples, 2, 2), dtype=np.complex128)
        z_gate[:, 0, 0] = np.exp(-1j * (1.0 - s) * tau)
        z_gate[:, 1, 1] = np.exp(1j * (1.0 - s) * tau)
        for stage, gates in enumerate((first, z_gate, second)):
            for qubit in range(1, qubit_count + 1):
                states = _apply_single_qubit(states, gates, qubit, qubit_count)
            fidelities[:, l, stage] = _subspace_fidelities(states, projectors[l])
        states = states * np.exp(-1j * s * tau * hp_diag)[None, :]
        fidelities[:, l, 3] = _subspace_fidelities(states, projectors[l])
    return fidelities
