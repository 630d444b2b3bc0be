"""
Statevector Simulator
=====================
Dense execution of the exact matched-multiphase search on the query register.

    |psi> = H^n |0>                          prepare_uniform
    G(phi, varphi) = -H^n S_0^phi H^n S_f^varphi   apply_generalized_grover
    prod_j G(phi_j, varphi_j) |psi>          run_schedule
    measurement statistics                   target_probability / to_distribution

Basis index x corresponds to qubit k holding bit (x >> k) & 1.
H^n is applied as n butterfly passes over a (-1, 2, 2^k) view of the vector.
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from ampm_config import get_settings
from ampm_errors import CapabilityError, ValidationError
from success_model import Distribution, NORMALIZATION_TOLERANCE

logger = logging.getLogger(__name__)

INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Dense reference operators are only built for small registers
MAX_DENSE_QUBITS = 5


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class SearchInstance:
    """n-qubit database with a non-empty set of marked basis indices."""
    n: int
    targets: tuple

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")

        targets = tuple(int(t) for t in self.targets)
        if not targets:
            raise ValidationError("at least one target index is required")
        if len(set(targets)) != len(targets):
            raise ValidationError(f"target indices must be distinct: {list(targets)}")
        bad = [t for t in targets if not 0 <= t < (1 << self.n)]
        if bad:
            raise ValidationError(f"target indices out of range [0, {1 << self.n}): {bad}")

        object.__setattr__(self, "targets", tuple(sorted(targets)))

    @property
    def N(self):
        return 1 << self.n

    @property
    def M(self):
        return len(self.targets)

    @property
    def lam(self):
        return self.M / self.N

    def target_indices(self):
        return np.fromiter(self.targets, dtype=np.int64, count=self.M)


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    @property
    def dimension(self):
        return self.amplitudes.shape[0]

    def norm_squared(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


# =============================================================================
# HELPERS
# =============================================================================

def _check_dimension(state, instance):
    if state.dimension != instance.N:
        raise ValidationError(f"state has {state.dimension} amplitudes, instance needs {instance.N}")


def _check_size(n, max_qubits=None):
    limit = max_qubits if max_qubits is not None else get_settings().max_qubits
    if n > limit:
        raise CapabilityError(f"n={n} exceeds the configured maximum of {limit} qubits")


def hadamard_all(amplitudes, n):
    """H on every qubit: n butterfly passes, cost n * 2^n."""
    psi = np.array(amplitudes, dtype=complex, copy=True)
    for k in range(n):
        view = psi.reshape(-1, 2, 1 << k)
        low = view[:, 0, :].copy()
        high = view[:, 1, :]
        view[:, 0, :] = (low + high) * INV_SQRT2
        view[:, 1, :] = (low - high) * INV_SQRT2
    return psi


def basis_state(n, index):
    amplitudes = np.zeros(1 << n, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(amplitudes)


# =============================================================================
# OPERATIONS
# =============================================================================

def prepare_uniform(instance, max_qubits=None):
    """
    H^n |0>: every amplitude 1/sqrt(N).

    Raises:
        CapabilityError: n above the configured maximum
    """
    _check_size(instance.n, max_qubits)
    amplitudes = np.full(instance.N, 1.0 / math.sqrt(instance.N), dtype=complex)
    return StateVector(amplitudes)


def apply_oracle_phase(state, instance, varphi):
    """S_f^varphi: multiply target amplitudes by e^{i varphi}."""
    _check_dimension(state, instance)
    amplitudes = state.amplitudes.copy()
    amplitudes[instance.target_indices()] *= np.exp(1j * varphi)
    return StateVector(amplitudes)


def apply_zero_phase(state, phi):
    """S_0^phi: multiply the |0...0> amplitude by e^{i phi}."""
    amplitudes = state.amplitudes.copy()
    amplitudes[0] *= np.exp(1j * phi)
    return StateVector(amplitudes)


def apply_generalized_grover(state, instance, phi, varphi):
    """G(phi, varphi) = -H^n S_0^phi H^n S_f^varphi, global -1 included."""
    _check_dimension(state, instance)
    marked = apply_oracle_phase(state, instance, varphi)
    mixed = StateVector(hadamard_all(marked.amplitudes, instance.n))
    shifted = apply_zero_phase(mixed, phi)
    return StateVector(-hadamard_all(shifted.amplitudes, instance.n))


def run_phases(instance, phis, varphis, max_qubits=None):
    """Apply G(phis[j], varphis[j]) for ascending j to the uniform state."""
    if len(phis) != len(varphis):
        raise ValidationError("phase lists must have equal length")

    state = prepare_uniform(instance, max_qubits)
    for phi, varphi in zip(phis, varphis):
        state = apply_generalized_grover(state, instance, phi, varphi)

    logger.debug("ran %d iterations on n=%d, M=%d", len(phis), instance.n, instance.M)
    return state


def run_schedule(instance, schedule, max_qubits=None):
    """
    Execute a phase schedule. The schedule's design lambda may differ from
    the instance's M/N.
    """
    return run_phases(instance, schedule.phi, schedule.varphi, max_qubits)


def target_probability(state, instance):
    _check_dimension(state, instance)
    return float(np.sum(np.abs(state.amplitudes[instance.target_indices()]) ** 2))


def to_distribution(state):
    """
    Exact measurement distribution |amplitude_j|^2.

    Raises:
        ValidationError: state norm off by more than 1e-6
    """
    norm = state.norm_squared()
    if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
        raise ValidationError(f"state is not normalized (norm^2 = {norm})")
    return Distribution(tuple(state.probabilities().tolist()))


def sample_counts(distribution, shots, seed):
    """
    Multinomial shot counts from an exact distribution.

    Args:
        distribution: Distribution to sample
        shots: Number of shots (> 0)
        seed: Seed for numpy.random.default_rng (PCG64)

    Returns:
        List of integer counts, one per basis state
    """
    if shots < 1:
        raise ValidationError(f"shots must be positive, got {shots}")
    probs = np.asarray(distribution.probs, dtype=float)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    return [int(c) for c in rng.multinomial(shots, probs)]


# =============================================================================
# DENSE REFERENCE
# =============================================================================

def grover_iteration_matrix(instance):
    """
    Textbook Grover iteration (2|psi><psi| - I)(I - 2 sum_t |t><t|) as a
    dense matrix, for n <= 5.
    """
    if instance.n > MAX_DENSE_QUBITS:
        raise CapabilityError(f"dense reference limited to n <= {MAX_DENSE_QUBITS}")

    N = instance.N
    psi = np.full(N, 1.0 / math.sqrt(N), dtype=complex)
    diffusion = 2.0 * np.outer(psi, psi.conj()) - np.eye(N, dtype=complex)

    oracle = np.eye(N, dtype=complex)
    for t in instance.targets:
        oracle[t, t] = -1.0

    return diffusion @ oracle
