import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampm_errors import CapabilityError, ValidationError
from ampm_schedule import PhaseSchedule, build_schedule, l_min, single_phase_sequence
from success_model import grover_success_probability, reduced_propagator, success_probability
from statevector_simulator import (
    SearchInstance,
    StateVector,
    apply_generalized_grover,
    apply_oracle_phase,
    apply_zero_phase,
    basis_state,
    grover_iteration_matrix,
    hadamard_all,
    prepare_uniform,
    run_phases,
    run_schedule,
    sample_counts,
    target_probability,
    to_distribution,
)

R = 1 / math.sqrt(2)


def random_instance(rng, max_qubits):
    n = int(rng.integers(1, max_qubits + 1))
    N = 1 << n
    M = int(rng.integers(1, N + 1))
    return SearchInstance(n, tuple(rng.choice(N, size=M, replace=False).tolist()))


@st.composite
def instances(draw, max_qubits=6):
    n = draw(st.integers(1, max_qubits))
    targets = draw(st.sets(st.integers(0, (1 << n) - 1), min_size=1))
    return SearchInstance(n, tuple(targets))


# =============================================================================
# SearchInstance
# =============================================================================

def test_instance_properties():
    instance = SearchInstance(3, (5, 1))
    assert instance.targets == (1, 5)
    assert (instance.N, instance.M, instance.lam) == (8, 2, 0.25)


@pytest.mark.parametrize("n, targets", [(0, (0,)), (2, ()), (2, (1, 1)), (2, (4,)), (2, (-1,))])
def test_instance_rejects_invalid(n, targets):
    with pytest.raises(ValidationError):
        SearchInstance(n, targets)


# =============================================================================
# Single operations
# =============================================================================

def test_prepare_uniform():
    np.testing.assert_allclose(prepare_uniform(SearchInstance(1, (0,))).amplitudes, [R, R])
    np.testing.assert_allclose(prepare_uniform(SearchInstance(2, (0,))).amplitudes, [0.5] * 4)

    state = prepare_uniform(SearchInstance(3, (5,)))
    assert state.amplitudes[5] == pytest.approx(math.sqrt(1 / 8))


def test_prepare_uniform_respects_qubit_limit():
    with pytest.raises(CapabilityError):
        prepare_uniform(SearchInstance(3, (0,)), max_qubits=2)


def test_hadamard_all_matches_dense_product():
    h = np.array([[1, 1], [1, -1]]) * R
    dense = np.kron(np.kron(h, h), h)
    rng = np.random.default_rng(3)
    vector = rng.normal(size=8) + 1j * rng.normal(size=8)
    np.testing.assert_allclose(hadamard_all(vector, 3), dense @ vector, atol=1e-12)


def test_oracle_phase_examples():
    instance = SearchInstance(1, (1,))
    uniform = prepare_uniform(instance)

    np.testing.assert_allclose(apply_oracle_phase(uniform, instance, 0.0).amplitudes, [R, R])
    np.testing.assert_allclose(apply_oracle_phase(uniform, instance, math.pi).amplitudes, [R, -R], atol=1e-15)
    np.testing.assert_allclose(apply_oracle_phase(uniform, instance, math.pi / 2).amplitudes, [R, 1j * R], atol=1e-15)


def test_zero_phase_examples():
    state = StateVector(np.array([0.6, 0.8j]))
    np.testing.assert_allclose(apply_zero_phase(state, 0.0).amplitudes, [0.6, 0.8j])
    np.testing.assert_allclose(apply_zero_phase(state, math.pi).amplitudes, [-0.6, 0.8j], atol=1e-15)

    uniform = prepare_uniform(SearchInstance(1, (0,)))
    np.testing.assert_allclose(apply_zero_phase(uniform, math.pi / 2).amplitudes, [1j * R, R], atol=1e-15)


def test_generalized_grover_examples():
    instance = SearchInstance(2, (3,))
    out = apply_generalized_grover(prepare_uniform(instance), instance, math.pi, math.pi)
    assert target_probability(out, instance) == pytest.approx(1.0, abs=1e-12)

    state = prepare_uniform(instance)
    out = apply_generalized_grover(state, instance, 0.0, 0.0)
    np.testing.assert_allclose(out.amplitudes, -state.amplitudes, atol=1e-15)

    instance = SearchInstance(1, (1,))
    out = apply_generalized_grover(prepare_uniform(instance), instance, math.pi / 2, math.pi / 2)
    assert target_probability(out, instance) == pytest.approx(1.0, abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        apply_oracle_phase(prepare_uniform(SearchInstance(2, (0,))), SearchInstance(3, (0,)), 1.0)


def test_distribution_and_probability():
    assert to_distribution(StateVector(np.array([0.6, 0.8j]))).probs == pytest.approx((0.36, 0.64))
    assert to_distribution(StateVector(np.array([1.0, 0.0]))).probs == (1.0, 0.0)
    assert target_probability(basis_state(1, 1), SearchInstance(1, (1,))) == 1.0
    assert target_probability(prepare_uniform(SearchInstance(2, (0, 3))), SearchInstance(2, (0, 3))) == pytest.approx(0.5)

    with pytest.raises(ValidationError):
        to_distribution(StateVector(np.array([1.0, 1.0])))


# =============================================================================
# Schedules
# =============================================================================

def test_run_schedule_examples(single_qubit_instances):
    zero, one = single_qubit_instances
    assert target_probability(run_schedule(one, build_schedule(1, 0.5)), one) == pytest.approx(1.0, abs=1e-12)
    assert target_probability(run_schedule(zero, build_schedule(3, 0.5)), zero) == pytest.approx(1.0, abs=1e-12)

    instance = SearchInstance(4, (0, 2, 3, 7, 9, 10, 12, 15))
    schedule = build_schedule(1, 0.5)
    p = target_probability(run_schedule(instance, schedule), instance)
    assert p == pytest.approx(1.0, abs=1e-12)
    assert p == pytest.approx(success_probability(schedule, 0.5), abs=1e-12)
    assert p == pytest.approx(abs(reduced_propagator(schedule, 0.5)[0]) ** 2, abs=1e-12)


def test_empty_schedule_keeps_uniform_state():
    instance = SearchInstance(2, (0, 1, 2, 3))
    state = run_schedule(instance, PhaseSchedule.empty())
    assert target_probability(state, instance) == pytest.approx(1.0)


def test_exact_on_matching_instances():
    n = 10
    N = 1 << n
    for M in sorted(set(np.linspace(0.01 * N + 1, 0.99 * N - 1, 200).astype(int).tolist())):
        instance = SearchInstance(n, tuple(range(M)))
        lam = instance.lam
        for l in range(l_min(lam), l_min(lam) + 3):
            state = run_schedule(instance, build_schedule(l, lam))
            assert target_probability(state, instance) == pytest.approx(1.0, abs=1e-9), (M, l)


def test_mismatched_instances_follow_closed_form():
    rng = np.random.default_rng(20)
    for _ in range(50):
        design = float(rng.uniform(0.02, 0.98))
        schedule = build_schedule(l_min(design) + int(rng.integers(0, 3)), design)
        instance = random_instance(rng, 10)
        p = target_probability(run_schedule(instance, schedule), instance)
        assert p == pytest.approx(success_probability(schedule, instance.lam), abs=1e-9)


def test_reduced_dynamics_agree_with_full_simulation():
    rng = np.random.default_rng(7)
    for _ in range(500):
        design = float(rng.uniform(0.02, 0.98))
        schedule = build_schedule(l_min(design) + int(rng.integers(0, 3)), design)
        instance = random_instance(rng, 6)
        a_target, _ = reduced_propagator(schedule, instance.lam)
        p = target_probability(run_schedule(instance, schedule), instance)
        assert abs(a_target) ** 2 == pytest.approx(p, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    instance=instances(),
    phis=st.lists(st.floats(-math.pi, math.pi), min_size=1, max_size=5),
    data=st.data(),
)
def test_operations_preserve_norm(instance, phis, data):
    varphis = data.draw(st.lists(st.floats(-math.pi, math.pi), min_size=len(phis), max_size=len(phis)))
    state = prepare_uniform(instance)
    for phi, varphi in zip(phis, varphis):
        state = apply_generalized_grover(state, instance, phi, varphi)
        assert state.norm_squared() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(instance=instances(), lam=st.floats(0.02, 0.98), extra=st.integers(0, 2))
def test_dynamics_stay_in_two_dimensional_subspace(instance, lam, extra):
    state = run_schedule(instance, build_schedule(l_min(lam) + extra, lam))
    amplitudes = state.amplitudes
    mask = np.zeros(instance.N, dtype=bool)
    mask[list(instance.targets)] = True

    for group in (amplitudes[mask], amplitudes[~mask]):
        if group.size:
            np.testing.assert_allclose(group, group[0], atol=1e-10)


def test_swapped_phase_lists():
    # l = 1 has a single palindromic pair
    instance = SearchInstance(1, (1,))
    schedule = build_schedule(1, 0.5)
    assert target_probability(run_schedule(instance, schedule.swapped()), instance) == pytest.approx(1.0, abs=1e-10)

    # Longer schedules are not palindromic in this sense; l = 2 drops well
    # below 1 while the reduced model still tracks the simulation
    instance = SearchInstance(3, (0, 1, 2, 3))
    swapped = build_schedule(2, 0.5).swapped()
    assert target_probability(run_schedule(instance, swapped), instance) < 0.99

    for l in (2, 3, 4):
        swapped = build_schedule(l, 0.5).swapped()
        p = target_probability(run_schedule(instance, swapped), instance)
        assert p == pytest.approx(abs(reduced_propagator(swapped, 0.5)[0]) ** 2, abs=1e-10)


@pytest.mark.parametrize("M, n", [(1, 2), (3, 3), (1, 3), (4, 4), (5, 4), (1, 5)])
def test_single_phase_algorithm_is_exact(M, n):
    instance = SearchInstance(n, tuple(range(M)))
    lam = instance.lam
    for l in range(l_min(lam), l_min(lam) + 3):
        for sign in (1, -1):
            phis, varphis = single_phase_sequence(l, lam, sign)
            state = run_phases(instance, phis, varphis)
            assert target_probability(state, instance) == pytest.approx(1.0, abs=1e-10)


def test_run_phases_rejects_length_mismatch():
    with pytest.raises(ValidationError):
        run_phases(SearchInstance(1, (0,)), [0.1], [])


# =============================================================================
# Standard Grover reference
# =============================================================================

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_standard_phases_match_dense_grover(n):
    rng = np.random.default_rng(n)
    size = int(rng.integers(1, (1 << n) + 1))
    instance = SearchInstance(n, tuple(rng.choice(1 << n, size=size, replace=False).tolist()))
    matrix = grover_iteration_matrix(instance)

    for index in range(instance.N):
        out = apply_generalized_grover(basis_state(n, index), instance, math.pi, math.pi)
        np.testing.assert_allclose(out.amplitudes, matrix[:, index], atol=1e-12)


def test_dense_reference_is_bounded():
    with pytest.raises(CapabilityError):
        grover_iteration_matrix(SearchInstance(6, (0,)))


@pytest.mark.parametrize("n, M, l", [(3, 1, 1), (3, 1, 2), (4, 3, 2), (5, 2, 4)])
def test_standard_grover_probability(n, M, l):
    instance = SearchInstance(n, tuple(range(M)))
    state = run_phases(instance, [math.pi] * l, [math.pi] * l)
    expected = grover_success_probability(l, instance.lam)
    assert target_probability(state, instance) == pytest.approx(expected, abs=1e-12)


# =============================================================================
# Sampling
# =============================================================================

def test_sampling_is_deterministic():
    instance = SearchInstance(2, (1,))
    distribution = to_distribution(prepare_uniform(instance))

    first = sample_counts(distribution, 1000, seed=11)
    assert first == sample_counts(distribution, 1000, seed=11)
    assert sum(first) == 1000 and len(first) == 4

    with pytest.raises(ValidationError):
        sample_counts(distribution, 0, seed=1)


def test_sampling_exact_state():
    instance = SearchInstance(1, (1,))
    distribution = to_distribution(run_schedule(instance, build_schedule(1, 0.5)))
    counts = sample_counts(distribution, 512, seed=5)
    assert counts[1] >= 511
