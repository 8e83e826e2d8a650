"""Clause compilation: polynomial algebra, complement elimination, penalty
construction, brute-force oracle agreement, factor decoding, exports."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adiafact.compiler import (
    REFERENCE_N,
    REFERENCE_WEIGHTS,
    BinaryPolynomial,
    Clause,
    ClauseSet,
    FactoringInstance,
    brute_force_ground,
    build_bit_equations,
    clauses_291311,
    compile_problem,
    compiled_problem_from_json,
    compiled_problem_to_json,
    decode_factors,
    ising_export,
    reference_problem,
    substitute_complements,
)
from adiafact.errors import (
    ConfigError,
    ContractViolationError,
    DecodeVerificationError,
    ResourceLimitError,
    UnsatisfiableInstanceError,
)
from adiafact.pauli import PauliAxis, PauliSum, PauliTerm, to_matrix

# the built-in instance: 291311 = 523 x 557, factor interiors on bits 1, 2, 5
TRUE_BITS = {"p1": 1, "p2": 0, "p5": 0, "q1": 0, "q2": 1, "q5": 1}
SWAPPED_BITS = {"p1": 0, "p2": 1, "p5": 1, "q1": 1, "q2": 0, "q5": 0}


def coefficient_map(h: PauliSum) -> dict[tuple[int, ...], float]:
    return {tuple(q for q, _ in t.factors): t.coefficient for t in h.terms}


# ---------------------------------------------------------------- polynomials

def test_polynomial_product_is_idempotent_in_each_variable():
    x = BinaryPolynomial.variable("x")
    one = BinaryPolynomial.const(1.0)
    # (x + 1)(x - 1) = x^2 - 1 = x - 1 over binary x
    assert (x + one) * (x - one) == x - one


def test_polynomial_substitute_and_evaluate_agree():
    x, y, z = (BinaryPolynomial.variable(n) for n in "xyz")
    replaced = (x * y).substitute("x", BinaryPolynomial.const(1.0) - z)
    assert replaced == y - z * y
    for yv in (0, 1):
        for zv in (0, 1):
            assert replaced.evaluate({"y": yv, "z": zv}) == yv * (1 - zv)


def test_polynomial_zero_coefficients_vanish():
    x = BinaryPolynomial.variable("x")
    assert (x - x).terms == ()
    assert (x - x).variables() == ()


# --------------------------------------------------------------- instance set

def test_builtin_clauses_have_the_fixed_targets():
    cs = clauses_291311()
    assert [c.target for c in cs.clauses] == [1.0, 1.0, 1.0, 1.0, 0.0, 1.0]
    assert cs.variables() == ("p1", "p2", "p5", "q1", "q2", "q5")


def test_true_factor_bits_satisfy_every_builtin_clause():
    for clause in clauses_291311().clauses:
        assert clause.satisfied_by(TRUE_BITS)
        assert clause.satisfied_by(SWAPPED_BITS)


def test_all_zero_bits_violate_the_builtin_clauses():
    zeros = {name: 0 for name in TRUE_BITS}
    assert not clauses_291311().clauses[0].satisfied_by(zeros)


def test_instance_validation():
    with pytest.raises(ConfigError):
        FactoringInstance(N=291310, m=8, n=8)  # even
    with pytest.raises(ConfigError):
        FactoringInstance(N=7, m=1, n=1)  # too small
    with pytest.raises(ConfigError):
        FactoringInstance(N=35, m=-1, n=1)


# -------------------------------------------------------------- substitution

def test_complement_elimination_reaches_three_xor_clauses():
    reduced = substitute_complements(clauses_291311())
    assert reduced.eliminations == (("p1", "q1"), ("p2", "q2"), ("p5", "q5"))
    assert reduced.variables() == ("q1", "q2", "q5")
    assert len(reduced.clauses) == 3
    # surviving clauses are the cross terms turned into XOR constraints
    q1, q2, q5 = (BinaryPolynomial.variable(n) for n in ("q1", "q2", "q5"))
    two = BinaryPolynomial.const(2.0)
    assert reduced.clauses[0] == Clause(q1 + q2 - two * q1 * q2, 1.0)
    assert reduced.clauses[1] == Clause(q2 + q5 - two * q2 * q5, 0.0)
    assert reduced.clauses[2] == Clause(q1 + q5 - two * q1 * q5, 1.0)


def test_reduced_clauses_keep_the_true_solution():
    for clause in substitute_complements(clauses_291311()).clauses:
        assert clause.satisfied_by({"q1": 0, "q2": 1, "q5": 1})
        assert clause.satisfied_by({"q1": 1, "q2": 0, "q5": 0})


def test_elimination_propagates_into_single_variable_clauses():
    x, y = BinaryPolynomial.variable("x"), BinaryPolynomial.variable("y")
    cs = ClauseSet((Clause(x + y, 1.0), Clause(x, 1.0)))
    reduced = substitute_complements(cs)
    assert reduced.eliminations == (("x", "y"),)
    assert reduced.clauses == (Clause(y, 0.0),)


def test_contradictory_clauses_are_detected():
    x, y = BinaryPolynomial.variable("x"), BinaryPolynomial.variable("y")
    cs = ClauseSet((Clause(x + y, 1.0), Clause(x + y, 0.0)))
    with pytest.raises(UnsatisfiableInstanceError):
        substitute_complements(cs)


def test_elimination_is_idempotent():
    reduced = substitute_complements(clauses_291311())
    assert substitute_complements(reduced) == reduced


# ------------------------------------------------------------------- compile

def test_reference_hamiltonian_coefficients(reference):
    assert coefficient_map(reference.hamiltonian) == {
        (1, 2): pytest.approx(0.6),
        (1, 3): pytest.approx(2.0),
        (2, 3): pytest.approx(-2.45),
    }
    assert reference.dropped_constant == pytest.approx(5.05, abs=1e-12)
    assert reference.variable_map == (("q1", 1), ("q2", 2), ("q5", 3))
    assert reference.weights == REFERENCE_WEIGHTS


def test_reference_diagonal_from_independent_enumeration(reference):
    # oracle: evaluate the weighted squared residuals directly per assignment
    reduced = substitute_complements(clauses_291311())
    diag = np.real(np.diag(to_matrix(reference.hamiltonian)))
    for index in range(8):
        bits = {
            "q1": (index >> 2) & 1,
            "q2": (index >> 1) & 1,
            "q5": index & 1,
        }
        penalty = sum(
            w * (c.residual.evaluate(bits) - c.target) ** 2
            for c, w in zip(reduced.clauses, REFERENCE_WEIGHTS)
        )
        assert diag[index] + reference.dropped_constant == pytest.approx(
            penalty, abs=1e-12
        )
        assert reference.penalty.evaluate(bits) == pytest.approx(penalty, abs=1e-12)


def test_reference_ground_pair_sits_at_minus_offset(reference):
    diag = np.real(np.diag(to_matrix(reference.hamiltonian)))
    assert diag[3] == pytest.approx(-5.05, abs=1e-12)  # |011> -> q = 557
    assert diag[4] == pytest.approx(-5.05, abs=1e-12)  # |100> -> q = 523
    assert np.partition(diag, 2)[2] > -5.05 + 1.0


def test_single_clause_compiles_to_half_sigma_z():
    cp = compile_problem(ClauseSet((Clause(BinaryPolynomial.variable("x"), 0.0),)), (1.0,))
    assert coefficient_map(cp.hamiltonian) == {(1,): pytest.approx(-0.5)}
    assert cp.dropped_constant == pytest.approx(0.5)


def test_compile_weight_validation():
    cs = substitute_complements(clauses_291311())
    with pytest.raises(ConfigError):
        compile_problem(cs, (1.0, 1.0))  # wrong count
    with pytest.raises(ConfigError):
        compile_problem(cs, (1.0, -1.0, 1.0))
    with pytest.raises(ConfigError):
        compile_problem(cs, (1.0, 0.0, 1.0))


# -------------------------------------------------------------- brute force

def test_brute_force_pins_a_tiny_polynomial():
    x1, x2 = BinaryPolynomial.variable("x1"), BinaryPolynomial.variable("x2")
    p = x1 + x2.scaled(2.0) - (x1 * x2).scaled(3.0)
    ground = brute_force_ground(p)
    assert ground.minimum == 0.0
    assert ground.variables == ("x1", "x2")
    assert ground.assignments == ((0, 0), (1, 1))


def test_brute_force_constant_polynomial():
    ground = brute_force_ground(BinaryPolynomial.const(7.0))
    assert ground == type(ground)(7.0, (), ((),))


def test_brute_force_enumeration_cap():
    wide = BinaryPolynomial.make(
        {frozenset([f"x{i:02d}"]): 1.0 for i in range(25)}
    )
    with pytest.raises(ResourceLimitError, match="25"):
        brute_force_ground(wide)


def test_reference_oracle_finds_both_factor_orders(reference):
    ground = brute_force_ground(reference.penalty)
    assert ground.minimum == pytest.approx(0.0, abs=1e-12)
    assert ground.variables == ("q1", "q2", "q5")
    assert ground.assignments == ((0, 1, 1), (1, 0, 0))
    decoded = {decode_factors(a) for a in ground.assignment_dicts()}
    assert decoded == {(523, 557), (557, 523)}


# ------------------------------------------------------------- generic builds

def test_generic_35_recovers_5_times_7():
    inst = FactoringInstance(N=35, m=1, n=1)
    cp = compile_problem(build_bit_equations(inst), (1.0,))
    ground = brute_force_ground(cp.penalty)
    assert ground.minimum == pytest.approx(0.0, abs=1e-12)
    decoded = {decode_factors(a, inst) for a in ground.assignment_dicts()}
    assert decoded == {(5, 7), (7, 5)}


def test_generic_143_recovers_11_times_13():
    inst = FactoringInstance(N=143, m=2, n=2)
    cp = compile_problem(build_bit_equations(inst), (1.0,))
    ground = brute_force_ground(cp.penalty)
    assert ground.minimum == pytest.approx(0.0, abs=1e-12)
    decoded = {decode_factors(a, inst) for a in ground.assignment_dicts()}
    assert decoded == {(11, 13), (13, 11)}


def test_generic_15_has_no_valid_bit_layout():
    # both factors are forced >= 5 by the fixed outer bits, so 15 = 3 x 5
    # cannot be represented; the oracle reports a strictly positive floor
    inst = FactoringInstance(N=15, m=1, n=1)
    cp = compile_problem(build_bit_equations(inst), (1.0,))
    ground = brute_force_ground(cp.penalty)
    assert ground.minimum == pytest.approx(100.0, abs=1e-9)  # (25 - 15)^2


def test_seven_interior_bits_cannot_reach_291311():
    # largest representable product is 511 * 511; the squared shortfall
    # (291311 - 261121)^2 is the exact penalty floor, reached at all-ones
    inst = FactoringInstance(N=REFERENCE_N, m=7, n=7)
    cp = compile_problem(build_bit_equations(inst), (1.0,))
    ground = brute_force_ground(cp.penalty)
    assert ground.minimum == pytest.approx((291311 - 511 * 511) ** 2, rel=1e-12)
    assert ground.assignments == ((1,) * 14,)


def test_eight_interior_bits_recover_the_reference_factors():
    inst = FactoringInstance(N=REFERENCE_N, m=8, n=8)
    cp = compile_problem(build_bit_equations(inst), (1.0,))
    ground = brute_force_ground(cp.penalty)
    assert ground.minimum == pytest.approx(0.0, abs=1e-9)
    decoded = {decode_factors(a, inst) for a in ground.assignment_dicts()}
    assert decoded == {(523, 557), (557, 523)}


# ------------------------------------------------------------------ decoding

def test_builtin_decode_pins():
    assert decode_factors({"q1": 0, "q2": 1, "q5": 1}) == (523, 557)
    assert decode_factors({"q1": 1, "q2": 0, "q5": 0}) == (557, 523)


def test_builtin_decode_rejects_non_ground_bits():
    with pytest.raises(DecodeVerificationError, match="559 x 521"):
        decode_factors({"q1": 0, "q2": 0, "q5": 0})


def test_builtin_decode_requires_all_three_bits():
    with pytest.raises(ConfigError):
        decode_factors({"q1": 0, "q2": 1})


def test_generic_decode_verifies_the_product():
    inst = FactoringInstance(N=35, m=1, n=1)
    assert decode_factors({"p1": 0, "q1": 1}, inst) == (5, 7)
    with pytest.raises(DecodeVerificationError):
        decode_factors({"p1": 1, "q1": 1}, inst)


# ------------------------------------------------------------ weight freedom

def test_weights_leave_the_satisfiable_ground_set_unchanged(reference):
    baseline = brute_force_ground(reference.penalty)
    for weights in ((1.0, 1.0, 1.0), (0.3, 7.0, 2.5), (10.0, 0.1, 0.1)):
        other = brute_force_ground(reference_problem(weights).penalty)
        assert other.minimum == pytest.approx(0.0, abs=1e-12)
        assert other.assignments == baseline.assignments


def test_weights_do_shift_unsatisfiable_argmins():
    # with no zero-penalty assignment the argmin tracks the weights, which
    # is why weight freedom only holds for satisfiable systems
    x = BinaryPolynomial.variable("x")
    cs = ClauseSet((Clause(x, 1.0), Clause(x, 0.0)))
    heavy_first = brute_force_ground(compile_problem(cs, (5.0, 1.0)).penalty)
    heavy_second = brute_force_ground(compile_problem(cs, (1.0, 5.0)).penalty)
    assert heavy_first.assignments == ((1,),)
    assert heavy_second.assignments == ((0,),)


# -------------------------------------------------------------------- export

def test_serialization_round_trip(reference):
    assert compiled_problem_from_json(compiled_problem_to_json(reference)) == reference


def test_ising_export_of_the_reference(reference):
    data = ising_export(reference)
    assert data["linear"] == []
    assert data["quadratic"] == [
        [1, 2, pytest.approx(0.6)],
        [1, 3, pytest.approx(2.0)],
        [2, 3, pytest.approx(-2.45)],
    ]
    assert data["offset"] == pytest.approx(5.05)
    assert data["variable_map"] == [["q1", 1], ["q2", 2], ["q5", 3]]


def test_ising_export_rejects_higher_order_terms():
    inst = FactoringInstance(N=143, m=2, n=2)
    cp = compile_problem(build_bit_equations(inst), (1.0,))
    with pytest.raises(ContractViolationError, match="2-local"):
        ising_export(cp)


def test_ising_export_rejects_non_diagonal_operators(reference):
    h = PauliSum.from_terms([PauliTerm.make(1.0, {1: PauliAxis.X}, 3)], 3)
    fake = dataclasses.replace(reference, hamiltonian=h)
    with pytest.raises(ContractViolationError, match="Z"):
        ising_export(fake)


# ---------------------------------------------------------------- properties

_names = tuple(f"v{i}" for i in range(4))


@st.composite
def satisfiable_clause_sets(draw):
    """Random clause sets with targets chosen from a planted assignment."""
    assignment = {n: draw(st.integers(0, 1)) for n in _names}
    clause_count = draw(st.integers(min_value=1, max_value=4))
    clauses = []
    for _ in range(clause_count):
        monomials = draw(
            st.lists(
                st.tuples(
                    st.sets(st.sampled_from(_names), min_size=1, max_size=3),
                    st.integers(-3, 3).filter(lambda c: c != 0),
                ),
                min_size=1,
                max_size=4,
            )
        )
        residual = BinaryPolynomial.make(
            {}, 0.0
        )
        for names, coeff in monomials:
            residual = residual + BinaryPolynomial.make(
                {frozenset(names): float(coeff)}
            )
        clauses.append(Clause(residual, residual.evaluate(assignment)))
    return ClauseSet(tuple(clauses)), assignment


@given(satisfiable_clause_sets(), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_planted_assignment_is_always_a_ground_state(case, seed):
    cs, assignment = case
    rng = np.random.default_rng(seed)
    weights = tuple(rng.uniform(0.1, 10.0, size=len(cs.clauses)))
    cp = compile_problem(cs, weights)
    assert cp.penalty.evaluate(assignment) == pytest.approx(0.0, abs=1e-9)
    ground = brute_force_ground(cp.penalty)
    assert ground.minimum <= 1e-9
    if ground.variables:
        planted = tuple(assignment[n] for n in ground.variables)
        assert planted in ground.assignments


@given(satisfiable_clause_sets())
@settings(max_examples=40, deadline=None)
def test_ground_set_is_invariant_under_positive_weights(case):
    cs, _ = case
    first = brute_force_ground(compile_problem(cs, (1.0,) * len(cs.clauses)).penalty)
    second = brute_force_ground(
        compile_problem(cs, tuple(range(2, len(cs.clauses) + 2))).penalty
    )
    assert first.variables == second.variables
    assert first.assignments == second.assignments
