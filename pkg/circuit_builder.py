"""
Circuit Builder
===============
Lowers the exact matched-multiphase search to a gate list over a query
register (qubits 0..n-1) and one oracle ancilla (qubit n), and simulates
gate lists exactly.

One iteration G(phi, varphi), up to a global phase:

    U_f  ->  U1(varphi) on ancilla  ->  U_f        (S_f^varphi by phase kickback)
    H on every query qubit
    S_0^phi:  n = 1 : U1(-phi)                     (equals S_0^phi times e^{-i phi})
              n > 1 : X^n . MCU1(phi) . X^n         (exact)
    H on every query qubit

U_f |x>|y> = |x>|y XOR f(x)>: for each target, an MCX onto the ancilla
conjugated by X on the query qubits whose bit is 0 in that target.
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from ampm_config import get_settings
from ampm_errors import CapabilityError, ValidationError
from statevector_simulator import StateVector

logger = logging.getLogger(__name__)

SINGLE_QUBIT_KINDS = ("H", "X", "U1")
CONTROLLED_KINDS = ("CX", "MCX", "MCU1")
GATE_KINDS = SINGLE_QUBIT_KINDS + CONTROLLED_KINDS
ANGLE_KINDS = ("U1", "MCU1")

# Ancilla population allowed at circuit end
ANCILLA_TOLERANCE = 1e-10


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class Gate:
    """
    kind: H, X, U1, CX, MCX or MCU1
    qubits: operands; for controlled kinds the controls come first and the
            target last
    angle: rotation for U1 / MCU1
    """
    kind: str
    qubits: tuple
    angle: float = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))

        if self.kind not in GATE_KINDS:
            raise ValidationError(f"unknown gate kind: {self.kind}")
        if self.kind in SINGLE_QUBIT_KINDS and len(self.qubits) != 1:
            raise ValidationError(f"{self.kind} acts on one qubit, got {self.qubits}")
        if self.kind == "CX" and len(self.qubits) != 2:
            raise ValidationError(f"CX needs control and target, got {self.qubits}")
        if self.kind in ("MCX", "MCU1") and len(self.qubits) < 2:
            raise ValidationError(f"{self.kind} needs at least one control, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits) or min(self.qubits) < 0:
            raise ValidationError(f"operands must be distinct non-negative indices: {self.qubits}")

        if self.kind in ANGLE_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValidationError(f"{self.kind} needs a finite angle, got {self.angle}")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValidationError(f"{self.kind} takes no angle")

    @property
    def controls(self):
        return self.qubits[:-1] if self.kind in CONTROLLED_KINDS else ()

    @property
    def target(self):
        return self.qubits[-1]


@dataclass(frozen=True)
class GateCircuit:
    n_query: int
    n_ancilla: int
    gates: tuple

    def __post_init__(self):
        if self.n_query < 1:
            raise ValidationError(f"query register needs at least one qubit, got {self.n_query}")
        if self.n_ancilla not in (0, 1):
            raise ValidationError(f"ancilla register holds 0 or 1 qubits, got {self.n_ancilla}")
        gates = tuple(self.gates)
        for gate in gates:
            if max(gate.qubits) >= self.n_qubits:
                raise ValidationError(f"{gate.kind} on {gate.qubits} is outside {self.n_qubits} qubits")
        object.__setattr__(self, "gates", gates)

    @property
    def n_qubits(self):
        return self.n_query + self.n_ancilla

    @property
    def ancilla(self):
        return self.n_query if self.n_ancilla else None

    def then(self, other):
        if (other.n_query, other.n_ancilla) != (self.n_query, self.n_ancilla):
            raise ValidationError("cannot concatenate circuits over different registers")
        return GateCircuit(self.n_query, self.n_ancilla, self.gates + other.gates)


# =============================================================================
# SYNTHESIS
# =============================================================================

def controlled_x(controls, target):
    controls = tuple(controls)
    if len(controls) == 1:
        return Gate("CX", (controls[0], target))
    return Gate("MCX", controls + (target,))


def _check_synthesis_scope(instance):
    limit = get_settings().max_synthesis_qubits
    if instance.n > limit:
        raise CapabilityError(f"oracle synthesis is limited to {limit} query qubits, got n={instance.n}")


def _oracle_gates(instance):
    n = instance.n
    query = tuple(range(n))
    gates = []
    for t in instance.targets:
        zero_bits = [q for q in query if not (t >> q) & 1]
        gates.extend(Gate("X", (q,)) for q in zero_bits)
        gates.append(controlled_x(query, n))
        gates.extend(Gate("X", (q,)) for q in zero_bits)
    return gates


def build_oracle(instance):
    """
    U_f |x>|y> = |x>|y XOR f(x)> with the ancilla at index n.

    Raises:
        CapabilityError: n above the synthesis scope
    """
    _check_synthesis_scope(instance)
    return GateCircuit(instance.n, 1, tuple(_oracle_gates(instance)))


def _zero_phase_gates(n, phi):
    if n == 1:
        return [Gate("U1", (0,), -phi)]

    flips = [Gate("X", (q,)) for q in range(n)]
    return flips + [Gate("MCU1", tuple(range(n)), phi)] + flips


def build_iteration(instance, phi, varphi):
    """G(phi, varphi) on the query register, up to a global phase."""
    _check_synthesis_scope(instance)
    n = instance.n
    oracle = _oracle_gates(instance)
    layer = [Gate("H", (q,)) for q in range(n)]

    gates = oracle + [Gate("U1", (n,), varphi)] + oracle
    gates += layer + _zero_phase_gates(n, phi) + layer
    return GateCircuit(n, 1, tuple(gates))


def build_full(instance, schedule):
    """Uniform preparation followed by one iteration per schedule entry."""
    _check_synthesis_scope(instance)
    circuit = GateCircuit(instance.n, 1, tuple(Gate("H", (q,)) for q in range(instance.n)))
    for phi, varphi in zip(schedule.phi, schedule.varphi):
        circuit = circuit.then(build_iteration(instance, phi, varphi))

    logger.debug("built %d gates for n=%d, l=%d", len(circuit.gates), instance.n, schedule.l)
    return circuit


# =============================================================================
# GATE-LEVEL SIMULATION
# =============================================================================

def _bit_view(psi, qubit):
    return psi.reshape(-1, 2, 1 << qubit)


def _apply_gate(psi, gate, indices):
    if gate.kind == "H":
        view = _bit_view(psi, gate.target)
        low = view[:, 0, :].copy()
        high = view[:, 1, :].copy()
        view[:, 0, :] = (low + high) / math.sqrt(2.0)
        view[:, 1, :] = (low - high) / math.sqrt(2.0)
    elif gate.kind == "X":
        view = _bit_view(psi, gate.target)
        view[:, [0, 1], :] = view[:, [1, 0], :]
    elif gate.kind == "U1":
        _bit_view(psi, gate.target)[:, 1, :] *= np.exp(1j * gate.angle)
    elif gate.kind in ("CX", "MCX"):
        control_mask = sum(1 << c for c in gate.controls)
        target_bit = 1 << gate.target
        selected = indices[((indices & control_mask) == control_mask) & ((indices & target_bit) == 0)]
        flipped = selected | target_bit
        psi[selected], psi[flipped] = psi[flipped].copy(), psi[selected].copy()
    elif gate.kind == "MCU1":
        mask = sum(1 << q for q in gate.qubits)
        psi[(indices & mask) == mask] *= np.exp(1j * gate.angle)
    return psi


def simulate_gates(circuit, input_basis_index=0):
    """
    Exact statevector over query + ancilla after running the circuit on a
    basis state (ancilla is the most significant qubit).

    Raises:
        CapabilityError: total qubits above the configured gate-level bound
    """
    limit = get_settings().max_gate_qubits
    if circuit.n_qubits > limit:
        raise CapabilityError(f"gate-level simulation is limited to {limit} qubits, got {circuit.n_qubits}")

    dimension = 1 << circuit.n_qubits
    if not 0 <= input_basis_index < dimension:
        raise ValidationError(f"basis index {input_basis_index} outside [0, {dimension})")

    psi = np.zeros(dimension, dtype=complex)
    psi[input_basis_index] = 1.0
    indices = np.arange(dimension, dtype=np.int64)

    for gate in circuit.gates:
        psi = _apply_gate(psi, gate, indices)

    return StateVector(psi)


def query_marginal(state, circuit):
    """Probabilities of the query register with the ancilla traced out."""
    probs = state.probabilities().reshape(-1, 1 << circuit.n_query)
    return probs.sum(axis=0)


def query_unitary(circuit):
    """
    Query-register block of the circuit unitary with the ancilla in |0>,
    one column per simulated basis input.
    """
    size = 1 << circuit.n_query
    columns = [simulate_gates(circuit, x).amplitudes[:size] for x in range(size)]
    return np.column_stack(columns)


def ancilla_restored(circuit):
    """True if the ancilla ends in |0> for every query basis input."""
    if not circuit.n_ancilla:
        return True
    size = 1 << circuit.n_query
    for x in range(size):
        leaked = np.sum(np.abs(simulate_gates(circuit, x).amplitudes[size:]) ** 2)
        if leaked > ANCILLA_TOLERANCE:
            logger.warning("ancilla left excited with probability %.3g for input %d", leaked, x)
            return False
    return True
