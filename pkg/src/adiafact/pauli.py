"""Weighted sums of Pauli products realized as dense Hermitian matrices.

Conventions fixed here and relied on everywhere else:

* Qubits are numbered from 1. Qubit 1 is the most significant bit of a
  computational-basis index, so for three qubits ``|011>`` is index 3 and
  ``|100>`` is index 4.
* ``sigma_z`` has eigenvalue +1 on ``|0>`` and -1 on ``|1>``.
* Propagation is exact: a full Hermitian eigendecomposition builds
  ``V exp(-i L t) V^dagger``; no series approximations.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, ResourceLimitError

__all__ = [
    "PauliAxis",
    "PauliTerm",
    "PauliSum",
    "EigenSystem",
    "to_matrix",
    "eigendecompose",
    "propagate",
    "pauli_sum_to_dict",
    "pauli_sum_from_dict",
    "pauli_sum_to_json",
    "pauli_sum_from_json",
]

DEFAULT_QUBIT_CAP = 12

_HERMITICITY_ATOL = 1e-12


class PauliAxis(enum.Enum):
    """One of the four single-qubit Pauli symbols."""

    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"


_AXIS_MATRICES = {
    PauliAxis.I: np.eye(2, dtype=complex),
    PauliAxis.X: np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    PauliAxis.Y: np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    PauliAxis.Z: np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    """A single weighted Pauli product.

    Parameters
    ----------
    coefficient
        Real weight of the product (dimensionless unless the caller
        documents otherwise).
    factors
        Mapping ``qubit index -> PauliAxis`` for the non-identity factors.
        Qubit indices are 1-based; absent indices act as identity.
    qubit_count
        Number of qubits the term acts on.
    """

    coefficient: float
    factors: tuple[tuple[int, PauliAxis], ...]
    qubit_count: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.coefficient):
            raise ContractViolationError("term coefficient must be finite")
        if self.qubit_count < 1:
            raise ContractViolationError("qubit_count must be positive")
        seen = set()
        for qubit, axis in self.factors:
            if not 1 <= qubit <= self.qubit_count:
                raise ContractViolationError(
                    f"qubit index {qubit} outside 1..{self.qubit_count}"
                )
            if qubit in seen:
                raise ContractViolationError(f"duplicate factor for qubit {qubit}")
            if not isinstance(axis, PauliAxis):
                raise ContractViolationError(f"invalid axis {axis!r}")
            seen.add(qubit)

    @staticmethod
    def make(coefficient: float, factors: dict[int, PauliAxis], qubit_count: int) -> "PauliTerm":
        """Build a term from a mapping, dropping identity factors and sorting."""
        cleaned = tuple(
            sorted((q, a) for q, a in factors.items() if a is not PauliAxis.I)
        )
        return PauliTerm(float(coefficient), cleaned, qubit_count)

    def factor_map(self) -> dict[int, PauliAxis]:
        return dict(self.factors)


@dataclass(frozen=True)
class PauliSum:
    """Canonical weighted sum of Pauli products on a fixed qubit register.

    Canonical form: terms are merged by factor map, zero coefficients are
    dropped, and terms are sorted by their factor tuples, so two equal
    operators compare equal structurally.
    """

    terms: tuple[PauliTerm, ...]
    qubit_count: int

    def __post_init__(self) -> None:
        for term in self.terms:
            if term.qubit_count != self.qubit_count:
                raise ContractViolationError("all terms must share qubit_count")

    @staticmethod
    def from_terms(terms, qubit_count: int) -> "PauliSum":
        """Canonicalize an iterable of PauliTerm into a PauliSum."""
        merged: dict[tuple[tuple[int, PauliAxis], ...], float] = {}
        for term in terms:
            merged[term.factors] = merged.get(term.factors, 0.0) + term.coefficient
        canon = tuple(
            PauliTerm(c, f, qubit_count)
            for f, c in sorted(merged.items(), key=lambda kv: _factor_key(kv[0]))
            if c != 0.0
        )
        return PauliSum(canon, qubit_count)

    def scaled(self, factor: float) -> "PauliSum":
        """Return ``factor * self`` in canonical form."""
        return PauliSum.from_terms(
            (PauliTerm(factor * t.coefficient, t.factors, self.qubit_count) for t in self.terms),
            self.qubit_count,
        )

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.qubit_count != self.qubit_count:
            raise ContractViolationError("qubit_count mismatch in PauliSum addition")
        return PauliSum.from_terms(self.terms + other.terms, self.qubit_count)


def _factor_key(factors: tuple[tuple[int, PauliAxis], ...]):
    return tuple((q, a.value) for q, a in factors)


def to_matrix(h: PauliSum, max_qubits: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """Realize a PauliSum as a dense complex matrix.

    The basis index of a bit string is ``sum_i q_i 2^(n - i)`` with qubit 1
    contributing the most significant bit.

    Parameters
    ----------
    h
        Operator to realize.
    max_qubits
        Resource cap; dimensions grow as ``2**n``.

    Returns
    -------
    numpy.ndarray
        Hermitian ``(2**n, 2**n)`` complex matrix.
    """
    n = h.qubit_count
    if n > max_qubits:
        raise ResourceLimitError(
            f"qubit count {n} exceeds the dense-matrix cap of {max_qubits}"
        )
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for term in h.terms:
        factors = term.factor_map()
        acc = np.array([[term.coefficient]], dtype=complex)
        for qubit in range(1, n + 1):
            acc = np.kron(acc, _AXIS_MATRICES[factors.get(qubit, PauliAxis.I)])
        out += acc
    return out


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)


def eigendecompose(matrix: np.ndarray, check: bool = True) -> EigenSystem:
    """Exact Hermitian eigendecomposition with deterministic column phases.

    Each eigenvector column is rotated so that its first component of
    magnitude above 1e-12 is real and positive; with a fixed backing
    algorithm this makes the output a pure function of the input.

    Raises
    ------
    ContractViolationError
        If the matrix is not Hermitian within 1e-12 per entry.
    """
    m = np.asarray(matrix, dtype=complex)
    if check and not np.allclose(m, m.conj().T, rtol=0.0, atol=_HERMITICITY_ATOL):
        raise ContractViolationError("matrix is not Hermitian within 1e-12")
    eigenvalues, eigenvectors = np.linalg.eigh(m)
    eigenvectors = eigenvectors.copy()
    for col in range(eigenvectors.shape[1]):
        vec = eigenvectors[:, col]
        nonzero = np.flatnonzero(np.abs(vec) > 1e-12)
        if nonzero.size:
            pivot = vec[nonzero[0]]
            eigenvectors[:, col] = vec * (pivot.conjugate() / abs(pivot))
    return EigenSystem(eigenvalues, eigenvectors)


def propagate(state: np.ndarray, h: PauliSum, duration: float) -> np.ndarray:
    """Evolve a normalized state under ``exp(-i * h * duration)``.

    ``duration`` is dimensionless when ``h`` is dimensionless and in
    seconds when ``h`` carries angular-frequency units; each call site
    documents which pairing it uses.
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (2**h.qubit_count,):
        raise ContractViolationError(
            f"state dimension {psi.shape} does not match {h.qubit_count} qubits"
        )
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ContractViolationError("state is not normalized within 1e-10")
    if not math.isfinite(duration):
        raise ContractViolationError("duration must be finite")
    system = eigendecompose(to_matrix(h), check=False)
    phases = np.exp(-1.0j * system.eigenvalues * duration)
    v = system.eigenvectors
    return v @ (phases * (v.conj().T @ psi))


def pauli_sum_to_dict(h: PauliSum) -> dict:
    """JSON-ready dict form: list of ``{coefficient, factors}`` records."""
    return {
        "qubit_count": h.qubit_count,
        "terms": [
            {
                "coefficient": t.coefficient,
                "factors": [[q, a.value] for q, a in t.factors],
            }
            for t in h.terms
        ],
    }


def pauli_sum_from_dict(data: dict) -> PauliSum:
    """Inverse of :func:`pauli_sum_to_dict`; exact round-trip."""
    n = int(data["qubit_count"])
    terms = [
        PauliTerm(
            float(rec["coefficient"]),
            tuple((int(q), PauliAxis(a)) for q, a in rec["factors"]),
            n,
        )
        for rec in data["terms"]
    ]
    return PauliSum.from_terms(terms, n)


def pauli_sum_to_json(h: PauliSum) -> str:
    return json.dumps(pauli_sum_to_dict(h), indent=2)


def pauli_sum_from_json(text: str) -> PauliSum:
    return pauli_sum_from_dict(json.loads(text))
