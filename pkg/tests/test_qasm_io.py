import math

import numpy as np
import pytest

from ampm_errors import CapabilityError, QasmParseError
from ampm_schedule import build_schedule
from statevector_simulator import SearchInstance
from circuit_builder import Gate, GateCircuit, build_full, build_iteration, query_marginal, simulate_gates
from qasm_io import HEADER, format_angle, from_qasm, parse_angle, to_qasm


ONE_QUBIT_QASM = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[1];
qreg a[1];
creg c[1];
h q[0];
cx q[0],a[0];
u1(pi/2) a[0];
cx q[0],a[0];
h q[0];
u1(-pi/2) q[0];
h q[0];
measure q[0] -> c[0];
"""


def test_emits_basic_gates():
    assert "h q[0];" in to_qasm(GateCircuit(1, 0, (Gate("H", (0,)),)))
    assert "u1(pi/2) a[0];" in to_qasm(GateCircuit(1, 1, (Gate("U1", (1,), math.pi / 2),)))


def test_emits_one_iteration_circuit():
    circuit = build_full(SearchInstance(1, (1,)), build_schedule(1, 0.5))
    assert to_qasm(circuit) == ONE_QUBIT_QASM


def test_register_layout():
    text = to_qasm(GateCircuit(3, 0, ()))
    assert text.startswith(HEADER)
    assert "qreg q[3];" in text and "creg c[3];" in text
    assert "qreg a" not in text
    assert text.count("measure") == 3


def test_two_qubit_iteration_uses_native_gates():
    text = to_qasm(build_iteration(SearchInstance(2, (2,)), 0.3, -1.1))
    assert "ccx q[0],q[1],a[0];" in text
    assert "cu1(0.3) q[0],q[1];" in text
    assert "u1(-1.1) a[0];" in text


def test_larger_controls_are_not_exported():
    circuit = build_full(SearchInstance(3, (5,)), build_schedule(2, 0.125))
    with pytest.raises(CapabilityError):
        to_qasm(circuit)


@pytest.mark.parametrize("angle, text", [
    (0.0, "0"),
    (math.pi, "pi"),
    (-math.pi / 2, "-pi/2"),
    (3 * math.pi / 4, "3*pi/4"),
    (math.pi / 16, "pi/16"),
    (0.123, "0.123"),
    (2.23703598059, "2.23703598059"),
])
def test_format_angle(angle, text):
    assert format_angle(angle) == text


@pytest.mark.parametrize("text, angle", [
    ("0", 0.0),
    ("pi", math.pi),
    ("-pi/2", -math.pi / 2),
    ("3*pi/4", 3 * math.pi / 4),
    ("-0.904557", -0.904557),
    ("1e-05", 1e-5),
])
def test_parse_angle(text, angle):
    assert parse_angle(text) == pytest.approx(angle, abs=1e-15)


def test_parse_angle_rejects_expressions():
    with pytest.raises(QasmParseError):
        parse_angle("sin(pi)")


@pytest.mark.parametrize("n, targets, l, lam", [
    (1, (0,), 1, 0.5),
    (1, (1,), 3, 0.5),
    (2, (3,), 1, 0.25),
    (2, (0, 2), 2, 0.5),
    (2, (1,), 2, 0.3),
])
def test_round_trip_preserves_state(n, targets, l, lam):
    circuit = build_full(SearchInstance(n, targets), build_schedule(l, lam))
    parsed = from_qasm(to_qasm(circuit))

    assert (parsed.n_query, parsed.n_ancilla) == (circuit.n_query, circuit.n_ancilla)
    assert [g.kind for g in parsed.gates] == [
        "CX" if g.kind == "MCX" and len(g.controls) == 1 else g.kind for g in circuit.gates
    ]
    np.testing.assert_allclose(
        simulate_gates(parsed).amplitudes, simulate_gates(circuit).amplitudes, atol=1e-12
    )


@pytest.mark.parametrize("l", [1, 2, 3])
@pytest.mark.parametrize("target", [0, 1])
def test_single_qubit_round_trip_finds_target(target, l):
    circuit = build_full(SearchInstance(1, (target,)), build_schedule(l, 0.5))
    parsed = from_qasm(to_qasm(circuit))

    parsed_state = simulate_gates(parsed)
    np.testing.assert_allclose(parsed_state.amplitudes, simulate_gates(circuit).amplitudes, atol=1e-12)

    marginal = query_marginal(parsed_state, parsed)
    assert marginal[target] == pytest.approx(1.0, abs=1e-9)
    assert marginal[1 - target] == pytest.approx(0.0, abs=1e-9)


def test_parsed_one_iteration_circuit_finds_target():
    circuit = from_qasm(ONE_QUBIT_QASM)
    marginal = query_marginal(simulate_gates(circuit), circuit)
    assert marginal[1] == pytest.approx(1.0, abs=1e-12)


def test_reader_accepts_comments_and_spacing():
    text = "// exported\nOPENQASM 2.0;\ninclude \"qelib1.inc\";\n\nqreg q[1];\ncreg c[1];\nh  q[0]; // superpose\n"
    circuit = from_qasm(text)
    assert circuit.gates == (Gate("H", (0,)),)
    assert circuit.n_ancilla == 0


@pytest.mark.parametrize("text", [
    "qreg q[1];\nh q[0];\n",
    "OPENQASM 2.0;\nqreg q[1];\nrz(0.1) q[0];\n",
    "OPENQASM 2.0;\nqreg q[1];\nh q[1];\n",
    "OPENQASM 2.0;\nqreg q[1];\nh r[0];\n",
    "OPENQASM 2.0;\nqreg q[2];\ncx q[0];\n",
    "OPENQASM 2.0;\nqreg q[1];\nu1 q[0];\n",
    "OPENQASM 2.0;\nqreg q[1];\nqreg a[1];\nqreg b[1];\n",
    "OPENQASM 2.0;\ncreg c[1];\n",
])
def test_reader_rejects_other_dialects(text):
    with pytest.raises(QasmParseError):
        from_qasm(text)
