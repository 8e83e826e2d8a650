"""numba-compiled sweep kernels; same contracts as the numpy backend.

Samples are embarrassingly parallel, so each sweep uses ``prange`` over the
sample axis with per-thread state buffers. Inner products are hand-rolled
loops rather than matmul calls: the matrices are tiny (2^n with n = 3 for
the built-in problem) and this sidesteps mixed real/complex dtype
restrictions in nopython mode. ``np.linalg.eigh`` on the real symmetric
step Hamiltonian is supported natively.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

__all__ = ["intrinsic_sweep", "trotter_plain_sweep", "trotter_pulse_sweep"]


@njit(cache=True)
def _projector_fidelity(state, projector):
    """sqrt(<psi|P|psi>), clipped into [0, 1]."""
    dim = state.size
    total = 0.0
    for a in range(dim):
        acc = 0.0 + 0.0j
        for b in range(dim):
            acc += projector[a, b] * state[b]
        total += (np.conj(state[a]) * acc).real
    if total < 0.0:
        total = 0.0
    elif total > 1.0:
        total = 1.0
    return np.sqrt(total)


@njit(cache=True)
def _apply_single_qubit(state, u00, u01, u10, u11, qubit, qubit_count):
    """In-place 2x2 gate on one qubit (1-based, MSB-first convention)."""
    stride = 1 << (qubit_count - qubit)
    dim = state.size
    block = 0
    while block < dim:
        for offset in range(stride):
            lo = state[block + offset]
            hi = state[block + offset + stride]
            state[block + offset] = u00 * lo + u01 * hi
            state[block + offset + stride] = u10 * lo + u11 * hi
        block += 2 * stride


@njit(cache=True, parallel=True)
def intrinsic_sweep(h0, hp, psi0, s_values, tau, multipliers, projectors):
    samples, steps = multipliers.shape
    dim = psi0.size
    fidelities = np.empty((samples, steps))
    for j in prange(samples):
        state = psi0.astype(np.complex128)
        hamiltonian = np.empty((dim, dim))
        amplitudes = np.empty(dim, dtype=np.complex128)
        for l in range(steps):
            s = s_values[l]
            transverse = multipliers[j, l] * (1.0 - s)
            for a in range(dim):
                for b in range(dim):
                    hamiltonian[a, b] = transverse * h0[a, b] + s * hp[a, b]
            eigenvalues, eigenvectors = np.linalg.eigh(hamiltonian)
            for k in range(dim):
                acc = 0.0 + 0.0j
                for a in range(dim):
                    acc += eigenvectors[a, k] * state[a]
                amplitudes[k] = acc * np.exp(-1j * eigenvalues[k] * tau)
            for a in range(dim):
                acc = 0.0 + 0.0j
                for k in range(dim):
                    acc += eigenvectors[a, k] * amplitudes[k]
                state[a] = acc
            fidelities[j, l] = _projector_fidelity(state, projectors[l])
    return fidelities


@njit(cache=True, parallel=True)
def trotter_plain_sweep(hp_diag, psi0, s_values, tau, multipliers, projectors,
                        qubit_count):
    samples, steps = multipliers.shape
    dim = psi0.size
    fidelities = np.empty((samples, steps, 2))
    for j in prange(samples):
        state = psi0.astype(np.complex128)
        for l in range(steps):
            s = s_values[l]
            theta = multipliers[j, l] * (1.0 - s) * tau
            c = np.cos(theta) + 0.0j
            ims = -1j * np.sin(theta)
            for qubit in range(1, qubit_count + 1):
                _apply_single_qubit(state, c, ims, ims, c, qubit, qubit_count)
            fidelities[j, l, 0] = _projector_fidelity(state, projectors[l])
            for a in range(dim):
                state[a] *= np.exp(-1j * s * tau * hp_diag[a])
            fidelities[j, l, 1] = _projector_fidelity(state, projectors[l])
    return fidelities


@njit(cache=True, parallel=True)
def trotter_pulse_sweep(hp_diag, psi0, s_values, tau, multipliers, projectors,
                        qubit_count):
    samples = multipliers.shape[0]
    steps = s_values.size
    dim = psi0.size
    fidelities = np.empty((samples, steps, 4))
    for j in prange(samples):
        state = psi0.astype(np.complex128)
        for l in range(steps):
            s = s_values[l]
            angle = -0.25 * np.pi * multipliers[j, 2 * l]
            c = np.cos(angle) + 0.0j
            sn = np.sin(angle) + 0.0j
            for qubit in range(1, qubit_count + 1):
                _apply_single_qubit(state, c, -sn, sn, c, qubit, qubit_count)
            fidelities[j, l, 0] = _projector_fidelity(state, projectors[l])

            lo = np.exp(-1j * (1.0 - s) * tau)
            hi = np.exp(1j * (1.0 - s) * tau)
            zero = 0.0 + 0.0j
            for qubit in range(1, qubit_count + 1):
                _apply_single_qubit(state, lo, zero, zero, hi, qubit, qubit_count)
            fidelities[j, l, 1] = _projector_fidelity(state, projectors[l])

            angle = 0.25 * np.pi * multipliers[j, 2 * l + 1]
            c = np.cos(angle) + 0.0j
            sn = np.sin(angle) + 0.0j
            for qubit in range(1, qubit_count + 1):
                _apply_single_qubit(state, c, -sn, sn, c, qubit, qubit_count)
            fidelities[j, l, 2] = _projector_fidelity(state, projectors[l])

            for a in range(dim):
                state[a] *= np.exp(-1j * s * tau * hp_diag[a])
            fidelities[j, l, 3] = _projector_fidelity(state, projectors[l])
    return fidelities
