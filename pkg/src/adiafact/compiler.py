"""Compile factoring instances into weighted penalty Hamiltonians.

Pipeline: binary clauses over factor bits -> complement substitution
(``x + y = 1`` pairs collapse onto one variable) -> weighted sum of squared
clause residuals -> diagonal Pauli operator via ``q -> (1 - sigma_z)/2``.
A brute-force enumerator doubles as the ground-state oracle for tests and
the CLI.

The built-in instance is N = 291311 with factor interiors reduced to the
three variables q1, q2, q5; its compiled operator with clause weights
(1.2, 4.9, 4) is the reference Hamiltonian used by the simulation modules.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    ContractViolationError,
    DecodeVerificationError,
    ResourceLimitError,
    UnsatisfiableInstanceError,
)
from .pauli import PauliAxis, PauliSum, PauliTerm

__all__ = [
    "BitVariable",
    "BinaryPolynomial",
    "FactoringInstance",
    "Clause",
    "ClauseSet",
    "CompiledProblem",
    "GroundSolution",
    "REFERENCE_N",
    "REFERENCE_WEIGHTS",
    "clauses_291311",
    "substitute_complements",
    "build_bit_equations",
    "compile_problem",
    "brute_force_ground",
    "decode_factors",
    "reference_problem",
    "compiled_problem_to_dict",
    "compiled_problem_from_dict",
    "compiled_problem_to_json",
    "compiled_problem_from_json",
    "ising_export",
]

REFERENCE_N = 291311
REFERENCE_WEIGHTS = (1.2, 4.9, 4.0)

_BRUTE_FORCE_CAP = 24


@dataclass(frozen=True)
class BitVariable:
    """A named binary unknown, e.g. ``p1`` or ``q5``."""

    name: str
    index: int


@dataclass(frozen=True)
class BinaryPolynomial:
    """Multilinear polynomial over binary variables.

    ``terms`` maps a frozenset of variable names to its coefficient; the
    idempotency reduction ``x**2 -> x`` is automatic because monomials are
    sets. Zero-coefficient terms are dropped on construction.
    """

    terms: tuple[tuple[frozenset[str], float], ...]
    constant: float = 0.0

    @staticmethod
    def make(terms: dict[frozenset[str], float], constant: float = 0.0) -> "BinaryPolynomial":
        # the empty monomial is a constant; fold it so every polynomial has
        # one canonical form and constant-only clauses are recognizable
        folded = float(constant) + terms.get(frozenset(), 0.0)
        canon = tuple(
            sorted(
                ((vs, c) for vs, c in terms.items() if vs and c != 0.0),
                key=lambda vc: (len(vc[0]), tuple(sorted(vc[0]))),
            )
        )
        return BinaryPolynomial(canon, folded)

    @staticmethod
    def variable(name: str) -> "BinaryPolynomial":
        return BinaryPolynomial.make({frozenset([name]): 1.0})

    @staticmethod
    def const(value: float) -> "BinaryPolynomial":
        return BinaryPolynomial.make({}, value)

    def term_map(self) -> dict[frozenset[str], float]:
        return dict(self.terms)

    def variables(self) -> tuple[str, ...]:
        names: set[str] = set()
        for vs, _ in self.terms:
            names |= vs
        return tuple(sorted(names))

    def __add__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        merged = self.term_map()
        for vs, c in other.terms:
            merged[vs] = merged.get(vs, 0.0) + c
        return BinaryPolynomial.make(merged, self.constant + other.constant)

    def __sub__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        return self + other.scaled(-1.0)

    def scaled(self, factor: float) -> "BinaryPolynomial":
        return BinaryPolynomial.make(
            {vs: factor * c for vs, c in self.terms}, factor * self.constant
        )

    def __mul__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        out: dict[frozenset[str], float] = {}
        constant = self.constant * other.constant
        for vs, c in self.terms:
            constant_part = c * other.constant
            if constant_part != 0.0:
                out[vs] = out.get(vs, 0.0) + constant_part
            for ws, d in other.terms:
                union = vs | ws
                out[union] = out.get(union, 0.0) + c * d
        for ws, d in other.terms:
            part = d * self.constant
            if part != 0.0:
                out[ws] = out.get(ws, 0.0) + part
        return BinaryPolynomial.make(out, constant)

    def substitute(self, name: str, replacement: "BinaryPolynomial") -> "BinaryPolynomial":
        """Replace every occurrence of ``name`` by ``replacement``."""
        result = BinaryPolynomial.const(self.constant)
        for vs, c in self.terms:
            factor = BinaryPolynomial.make({frozenset(vs - {name}): c}) if name in vs else None
            if factor is None:
                result = result + BinaryPolynomial.make({vs: c})
            else:
                result = result + factor * replacement
        return result

    def evaluate(self, assignment: dict[str, int]) -> float:
        total = self.constant
        for vs, c in self.terms:
            prod = c
            for name in vs:
                prod *= assignment[name]
            total += prod
        return total


@dataclass(frozen=True)
class FactoringInstance:
    """An odd composite N with factor bit layouts ``p = {1 p_m..p_1 1}``.

    ``m`` and ``n`` count the unknown interior bits of p and q; the outer
    bits of both factors are fixed to 1 (odd factors of known bit length).
    """

    N: int
    m: int
    n: int

    def __post_init__(self) -> None:
        if self.N % 2 == 0:
            raise ConfigError(f"N={self.N} is even; both factors must be odd")
        if self.N < 9:
            raise ConfigError(f"N={self.N} too small; factors must each be >= 3")
        if self.m < 0 or self.n < 0:
            raise ConfigError("interior bit counts m, n must be non-negative")


@dataclass(frozen=True)
class Clause:
    """A residual polynomial constrained to equal a target value."""

    residual: BinaryPolynomial
    target: float

    def satisfied_by(self, assignment: dict[str, int], atol: float = 1e-9) -> bool:
        return abs(self.residual.evaluate(assignment) - self.target) <= atol


@dataclass(frozen=True)
class ClauseSet:
    """Ordered clauses plus the record of complement eliminations applied."""

    clauses: tuple[Clause, ...]
    eliminations: tuple[tuple[str, str], ...] = ()

    def variables(self) -> tuple[str, ...]:
        names: set[str] = set()
        for clause in self.clauses:
            names |= set(clause.residual.variables())
        return tuple(sorted(names))


@dataclass(frozen=True)
class GroundSolution:
    """Exhaustive-search result: minimum value and every argmin assignment."""

    minimum: float
    variables: tuple[str, ...]
    assignments: tuple[tuple[int, ...], ...]

    def assignment_dicts(self) -> tuple[dict[str, int], ...]:
        return tuple(dict(zip(self.variables, bits)) for bits in self.assignments)


@dataclass(frozen=True)
class CompiledProblem:
    """A clause system compiled into a weighted penalty and its Pauli form.

    ``penalty`` is ``sum_k weight_k * (residual_k - target_k)**2`` in
    multilinear form; ``hamiltonian`` is the same function of the qubit
    register under ``q_i -> (1 - sigma_z_i)/2`` with the constant term
    split off into ``dropped_constant``.
    """

    clause_set: ClauseSet
    weights: tuple[float, ...]
    penalty: BinaryPolynomial
    hamiltonian: PauliSum
    variable_map: tuple[tuple[str, int], ...]
    dropped_constant: float

    def variable_dict(self) -> dict[str, int]:
        return dict(self.variable_map)


def clauses_291311() -> ClauseSet:
    """The six fixed bit equations of the built-in N = 291311 instance.

    Residuals are over the factor interior bits p1, p2, p5, q1, q2, q5 with
    targets (1, 1, 1, 1, 0, 1).
    """
    v = BinaryPolynomial.variable
    clauses = (
        Clause(v("p1") + v("q1"), 1.0),
        Clause(v("p2") + v("q2"), 1.0),
        Clause(v("p5") + v("q5"), 1.0),
        Clause(v("p1") * v("q2") + v("p2") * v("q1"), 1.0),
        Clause(v("p2") * v("q5") + v("p5") * v("q2"), 0.0),
        Clause(v("p5") * v("q1") + v("p1") * v("q5"), 1.0),
    )
    return ClauseSet(clauses)


def _normalize(clause: Clause) -> Clause:
    """Fold the residual's constant into the target and fix the leading sign."""
    residual = clause.residual
    target = clause.target - residual.constant
    residual = BinaryPolynomial.make(residual.term_map(), 0.0)
    if residual.terms and residual.terms[0][1] < 0.0:
        residual = residual.scaled(-1.0)
        target = -target
    return Clause(residual, target)


def _complement_pair(clause: Clause) -> tuple[str, str] | None:
    """Match the exact pattern ``x + y = 1`` over two distinct variables."""
    if clause.target != 1.0 or clause.residual.constant != 0.0:
        return None
    terms = clause.residual.terms
    if len(terms) != 2:
        return None
    names = []
    for vs, c in terms:
        if len(vs) != 1 or c != 1.0:
            return None
        names.append(next(iter(vs)))
    if names[0] == names[1]:
        return None
    first, second = sorted(names)
    return first, second


def substitute_complements(cs: ClauseSet) -> ClauseSet:
    """Eliminate complement pairs ``x + y = 1`` by substituting ``x = 1 - y``.

    The lexicographically earlier variable is always the one eliminated, so
    repeated application is deterministic. Raises
    UnsatisfiableInstanceError when a clause collapses to a violated
    constant equation.
    """
    clauses = [_normalize(c) for c in cs.clauses]
    eliminations = list(cs.eliminations)
    while True:
        pair = None
        pair_at = None
        for i, clause in enumerate(clauses):
            pair = _complement_pair(clause)
            if pair is not None:
                pair_at = i
                break
        if pair is None:
            break
        eliminated, kept = pair
        replacement = BinaryPolynomial.const(1.0) - BinaryPolynomial.variable(kept)
        del clauses[pair_at]
        clauses = [
            _normalize(Clause(c.residual.substitute(eliminated, replacement), c.target))
            for c in clauses
        ]
        eliminations.append((eliminated, kept))
    for clause in clauses:
        if not clause.residual.terms and clause.residual.constant != clause.target:
            raise UnsatisfiableInstanceError(
                f"clause reduces to {clause.residual.constant} = {clause.target}"
            )
    return ClauseSet(tuple(clauses), tuple(eliminations))


def _factor_polynomial(prefix: str, interior_bits: int) -> BinaryPolynomial:
    """Odd factor ``2**(m+1) + sum_i b_i 2**i + 1`` as a polynomial."""
    poly = BinaryPolynomial.const(float(2 ** (interior_bits + 1) + 1))
    for i in range(1, interior_bits + 1):
        poly = poly + BinaryPolynomial.variable(f"{prefix}{i}").scaled(float(2**i))
    return poly


def build_bit_equations(inst: FactoringInstance) -> ClauseSet:
    """Single global clause ``p(bits) * q(bits) - N = 0`` for a generic N.

    No column/carry decomposition is attempted; the residual is the direct
    product expansion, multilinear-reduced.
    """
    p = _factor_polynomial("p", inst.m)
    q = _factor_polynomial("q", inst.n)
    residual = p * q - BinaryPolynomial.const(float(inst.N))
    return ClauseSet((Clause(residual, 0.0),))


def compile_problem(cs: ClauseSet, weights) -> CompiledProblem:
    """Build the weighted squared-residual penalty and its Pauli realization.

    Parameters
    ----------
    cs
        Clause system to penalize.
    weights
        One strictly positive weight per clause. Any positive choice leaves
        the satisfiable ground set unchanged; the built-in instance uses
        (1.2, 4.9, 4) to land on physically realizable couplings.
    """
    weights = tuple(float(w) for w in weights)
    if len(weights) != len(cs.clauses):
        raise ConfigError(
            f"{len(weights)} weights for {len(cs.clauses)} clauses"
        )
    if any(w <= 0.0 for w in weights):
        raise ConfigError("clause weights must be strictly positive")

    penalty = BinaryPolynomial.const(0.0)
    for clause, w in zip(cs.clauses, weights):
        deviation = clause.residual - BinaryPolynomial.const(clause.target)
        penalty = penalty + (deviation * deviation).scaled(w)

    variable_map: dict[str, int] = {}
    for clause in cs.clauses:
        for name in clause.residual.variables():
            if name not in variable_map:
                variable_map[name] = len(variable_map) + 1
    qubit_count = max(len(variable_map), 1)

    z_coeffs: dict[frozenset[int], float] = {}
    constant = penalty.constant
    for vs, c in penalty.terms:
        qubits = [variable_map[name] for name in vs]
        scale = c / 2 ** len(qubits)
        for r in range(len(qubits) + 1):
            for subset in itertools.combinations(sorted(qubits), r):
                key = frozenset(subset)
                z_coeffs[key] = z_coeffs.get(key, 0.0) + scale * (-1.0) ** r
    constant += z_coeffs.pop(frozenset(), 0.0)

    terms = [
        PauliTerm.make(c, {q: PauliAxis.Z for q in qubits}, qubit_count)
        for qubits, c in z_coeffs.items()
    ]
    hamiltonian = PauliSum.from_terms(terms, qubit_count)
    return CompiledProblem(
        clause_set=cs,
        weights=weights,
        penalty=penalty,
        hamiltonian=hamiltonian,
        variable_map=tuple(sorted(variable_map.items(), key=lambda kv: kv[1])),
        dropped_constant=constant,
    )


def brute_force_ground(p: BinaryPolynomial, atol: float = 1e-12) -> GroundSolution:
    """Exhaustively minimize a multilinear polynomial over binary inputs.

    Enumeration is vectorized (one pass per monomial over all 2^k
    assignments). Assignments within ``atol`` of the minimum are all
    reported, sorted by bit pattern, so the result is deterministic.
    """
    variables = p.variables()
    k = len(variables)
    if k > _BRUTE_FORCE_CAP:
        raise ResourceLimitError(
            f"{k} variables exceeds the enumeration cap of {_BRUTE_FORCE_CAP}"
        )
    if k == 0:
        return GroundSolution(p.constant, (), ((),))
    column = {name: i for i, name in enumerate(variables)}
    codes = np.arange(1 << k, dtype=np.uint32)
    bits = ((codes[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1).astype(float)
    values = np.full(1 << k, p.constant)
    for vs, c in p.terms:
        values += c * bits[:, [column[n] for n in vs]].prod(axis=1)
    best = float(values.min())
    argmins = tuple(
        tuple(int(b) for b in bits[i]) for i in np.nonzero(values <= best + atol)[0]
    )
    return GroundSolution(best, variables, argmins)


_TEMPLATE_FIXED = 2**9 + 2**3 + 1  # 521: the fixed bits {1 0 0 0 _ 0 1 _ _ 1}
_TEMPLATE_WEIGHTS = {"q1": 2, "q2": 4, "q5": 32}


def decode_factors(assignment: dict[str, int], inst: FactoringInstance | None = None) -> tuple[int, int]:
    """Map a bit assignment back to integer factors and verify the product.

    With ``inst=None`` the built-in N = 291311 layout is used: q carries the
    assignment bits at positions 1, 2 and 5, and p the complements. Raises
    DecodeVerificationError when ``p * q != N`` (the assignment was not a
    ground state).
    """
    if inst is None:
        missing = [k for k in _TEMPLATE_WEIGHTS if k not in assignment]
        if missing:
            raise ConfigError(f"assignment missing variables {missing}")
        q = _TEMPLATE_FIXED + sum(w * assignment[k] for k, w in _TEMPLATE_WEIGHTS.items())
        p = _TEMPLATE_FIXED + sum(w * (1 - assignment[k]) for k, w in _TEMPLATE_WEIGHTS.items())
        n = REFERENCE_N
    else:
        full = dict(assignment)
        p = 2 ** (inst.m + 1) + 1 + sum(
            2**i * full[f"p{i}"] for i in range(1, inst.m + 1)
        )
        q = 2 ** (inst.n + 1) + 1 + sum(
            2**i * full[f"q{i}"] for i in range(1, inst.n + 1)
        )
        n = inst.N
    if p * q != n:
        raise DecodeVerificationError(
            f"decoded factors {p} x {q} = {p * q} != {n}"
        )
    return p, q


def reference_problem(weights=REFERENCE_WEIGHTS) -> CompiledProblem:
    """The built-in instance, reduced and compiled with the given weights."""
    return compile_problem(substitute_complements(clauses_291311()), weights)


def _polynomial_to_lists(p: BinaryPolynomial) -> dict:
    return {
        "terms": [[sorted(vs), c] for vs, c in p.terms],
        "constant": p.constant,
    }


def _polynomial_from_lists(data: dict) -> BinaryPolynomial:
    return BinaryPolynomial.make(
        {frozenset(names): float(c) for names, c in data["terms"]},
        float(data["constant"]),
    )


def compiled_problem_to_dict(cp: CompiledProblem) -> dict:
    """JSON-ready structured form; exact round-trip via the ``from`` twin."""
    from .pauli import pauli_sum_to_dict

    return {
        "clauses": [
            {"residual": _polynomial_to_lists(c.residual), "target": c.target}
            for c in cp.clause_set.clauses
        ],
        "eliminations": [list(e) for e in cp.clause_set.eliminations],
        "weights": list(cp.weights),
        "penalty": _polynomial_to_lists(cp.penalty),
        "hamiltonian": pauli_sum_to_dict(cp.hamiltonian),
        "variable_map": [list(kv) for kv in cp.variable_map],
        "dropped_constant": cp.dropped_constant,
    }


def compiled_problem_from_dict(data: dict) -> CompiledProblem:
    from .pauli import pauli_sum_from_dict

    clause_set = ClauseSet(
        tuple(
            Clause(_polynomial_from_lists(c["residual"]), float(c["target"]))
            for c in data["clauses"]
        ),
        tuple((a, b) for a, b in data["eliminations"]),
    )
    return CompiledProblem(
        clause_set=clause_set,
        weights=tuple(float(w) for w in data["weights"]),
        penalty=_polynomial_from_lists(data["penalty"]),
        hamiltonian=pauli_sum_from_dict(data["hamiltonian"]),
        variable_map=tuple((name, int(q)) for name, q in data["variable_map"]),
        dropped_constant=float(data["dropped_constant"]),
    )


def compiled_problem_to_json(cp: CompiledProblem) -> str:
    return json.dumps(compiled_problem_to_dict(cp), indent=2)


def compiled_problem_from_json(text: str) -> CompiledProblem:
    return compiled_problem_from_dict(json.loads(text))


def ising_export(cp: CompiledProblem) -> dict:
    """Linear/quadratic coefficient lists for an at-most-2-local compile.

    Raises ContractViolationError when the compiled operator has terms on
    more than two qubits (generic large-N compiles are higher order).
    """
    linear: list[list] = []
    quadratic: list[list] = []
    for term in cp.hamiltonian.terms:
        qubits = [q for q, _ in term.factors]
        if any(axis is not PauliAxis.Z for _, axis in term.factors):
            raise ContractViolationError("Ising export requires pure Z terms")
        if len(qubits) == 1:
            linear.append([qubits[0], term.coefficient])
        elif len(qubits) == 2:
            quadratic.append([qubits[0], qubits[1], term.coefficient])
        else:
            raise ContractViolationError(
                f"Ising export requires 2-local terms; found {len(qubits)}-local"
            )
    return {
        "linear": sorted(linear),
        "quadratic": sorted(quadratic),
        "offset": cp.dropped_constant,
        "variable_map": [list(kv) for kv in cp.variable_map],
    }
