"""
OpenQASM 2.0 I/O
================
to_qasm writes a GateCircuit for the IBM qelib1 gate set; from_qasm reads
back exactly that dialect so circuits can be replayed through the gate-level
simulator.

Register layout:
    qreg q[n];    query register
    qreg a[1];    oracle ancilla (only if present)
    creg c[n];    measurement of the query register

Gate mapping:
    H -> h, X -> x, U1 -> u1, CX -> cx, MCX(2 controls) -> ccx,
    MCU1(1 control) -> cu1
Larger multi-controlled gates are not exported.
"""

import re
import math
import logging
from fractions import Fraction

from ampm_errors import CapabilityError, QasmParseError
from circuit_builder import Gate, GateCircuit

logger = logging.getLogger(__name__)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

# Angles within this distance of p*pi/q (q <= 16) are printed symbolically
PI_TOLERANCE = 1e-12
MAX_PI_DENOMINATOR = 16

QUERY_REG = "q"
ANCILLA_REG = "a"
CLASSICAL_REG = "c"


# =============================================================================
# WRITER
# =============================================================================

def format_angle(angle):
    """Print as a multiple of pi when it is one (denominator <= 16), else 15 significant digits."""
    for denominator in range(1, MAX_PI_DENOMINATOR + 1):
        numerator = round(angle * denominator / math.pi)
        if abs(angle - numerator * math.pi / denominator) <= PI_TOLERANCE:
            return _pi_multiple(Fraction(numerator, denominator))
    return f"{angle:.15g}"


def _pi_multiple(ratio):
    if ratio == 0:
        return "0"
    sign = "-" if ratio < 0 else ""
    num, den = abs(ratio.numerator), ratio.denominator
    text = "pi" if num == 1 else f"{num}*pi"
    if den != 1:
        text += f"/{den}"
    return sign + text


def _operand(circuit, qubit):
    if qubit < circuit.n_query:
        return f"{QUERY_REG}[{qubit}]"
    return f"{ANCILLA_REG}[{qubit - circuit.n_query}]"


def _statement(circuit, gate):
    operands = ",".join(_operand(circuit, q) for q in gate.qubits)
    n_controls = len(gate.controls)

    if gate.kind == "H":
        return f"h {operands};"
    if gate.kind == "X":
        return f"x {operands};"
    if gate.kind == "U1":
        return f"u1({format_angle(gate.angle)}) {operands};"
    if gate.kind == "CX" or (gate.kind == "MCX" and n_controls == 1):
        return f"cx {operands};"
    if gate.kind == "MCX" and n_controls == 2:
        return f"ccx {operands};"
    if gate.kind == "MCU1" and n_controls == 1:
        return f"cu1({format_angle(gate.angle)}) {operands};"

    raise CapabilityError(
        f"{gate.kind} with {n_controls} controls has no qelib1 equivalent; decompose before export"
    )


def to_qasm(circuit):
    """
    Render a circuit as OpenQASM 2.0 text with trailing measurements of
    the query register.

    Raises:
        CapabilityError: a gate exceeds the exportable control count
    """
    lines = [HEADER.rstrip("\n"), f"qreg {QUERY_REG}[{circuit.n_query}];"]
    if circuit.n_ancilla:
        lines.append(f"qreg {ANCILLA_REG}[{circuit.n_ancilla}];")
    lines.append(f"creg {CLASSICAL_REG}[{circuit.n_query}];")

    lines.extend(_statement(circuit, gate) for gate in circuit.gates)
    lines.extend(
        f"measure {QUERY_REG}[{q}] -> {CLASSICAL_REG}[{q}];" for q in range(circuit.n_query)
    )
    return "\n".join(lines) + "\n"


# =============================================================================
# READER
# =============================================================================

_GATE_RE = re.compile(r"^(h|x|u1|cx|ccx|cu1)\s*(?:\(([^)]*)\))?\s+(.+)$")
_REG_RE = re.compile(r"^(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_OPERAND_RE = re.compile(r"^([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_MEASURE_RE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")
_PI_RE = re.compile(r"^(-)?(?:(\d+)\s*\*\s*)?pi(?:\s*/\s*(\d+))?$")

_ARITY = {"h": 1, "x": 1, "u1": 1, "cx": 2, "ccx": 3, "cu1": 2}
_KIND = {"h": "H", "x": "X", "u1": "U1", "cx": "CX", "ccx": "MCX", "cu1": "MCU1"}


def parse_angle(text):
    """Accepts "0", decimals, and [-][k*]pi[/d]."""
    text = text.strip()
    match = _PI_RE.match(text)
    if match:
        sign, num, den = match.groups()
        value = int(num or 1) * math.pi / int(den or 1)
        return -value if sign else value
    try:
        return float(text)
    except ValueError:
        raise QasmParseError(f"unsupported angle expression: {text!r}") from None


def _statements(text):
    body = "\n".join(line.split("//", 1)[0] for line in text.splitlines())
    for raw in body.split(";"):
        statement = " ".join(raw.split())
        if statement:
            yield statement


def from_qasm(text):
    """
    Parse OpenQASM text written by to_qasm back into a GateCircuit.

    The first qreg is the query register, an optional second qreg the
    ancilla. Measurements are accepted and dropped.

    Raises:
        QasmParseError: anything outside the emitted dialect
    """
    statements = list(_statements(text))
    if not statements or statements[0] != "OPENQASM 2.0":
        raise QasmParseError("missing 'OPENQASM 2.0;' header")

    qregs = {}
    gates = []

    def resolve(operand):
        match = _OPERAND_RE.match(operand.strip())
        if not match or match.group(1) not in qregs:
            raise QasmParseError(f"unknown operand: {operand!r}")
        offset, size = qregs[match.group(1)]
        index = int(match.group(2))
        if index >= size:
            raise QasmParseError(f"operand out of range: {operand!r}")
        return offset + index

    for statement in statements[1:]:
        if statement == 'include "qelib1.inc"':
            continue

        reg = _REG_RE.match(statement)
        if reg:
            kind, name, size = reg.group(1), reg.group(2), int(reg.group(3))
            if kind == "creg":
                continue
            if len(qregs) == 2:
                raise QasmParseError("at most two quantum registers are supported")
            if gates:
                raise QasmParseError("registers must be declared before gates")
            qregs[name] = (sum(s for _, s in qregs.values()), size)
            continue

        if _MEASURE_RE.match(statement):
            continue

        gate = _GATE_RE.match(statement)
        if not gate:
            raise QasmParseError(f"unsupported statement: {statement!r}")

        name, params, operand_text = gate.groups()
        qubits = [resolve(op) for op in operand_text.split(",")]
        if len(qubits) != _ARITY[name]:
            raise QasmParseError(f"{name} expects {_ARITY[name]} operands: {statement!r}")

        has_angle = name in ("u1", "cu1")
        if has_angle != (params is not None):
            raise QasmParseError(f"bad parameter list: {statement!r}")
        angle = parse_angle(params) if has_angle else None
        gates.append(Gate(_KIND[name], tuple(qubits), angle))

    if not qregs:
        raise QasmParseError("no quantum register declared")

    sizes = [size for _, size in qregs.values()]
    n_ancilla = sizes[1] if len(sizes) == 2 else 0
    logger.debug("parsed %d gates over %s", len(gates), sizes)
    return GateCircuit(sizes[0], n_ancilla, tuple(gates))
