import os
import sys
import math

import pytest

# Run from the repo root or from tests/
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from statevector_simulator import SearchInstance


# Parameters of the exact search at lambda = 0.5 (l -> delta, phi)
REFERENCE_SCHEDULES = {
    1: (0.272166, [math.pi / 2]),
    2: (0.035103, [-0.904557, 2.237036]),
    3: (0.005398, [-1.717287, 0.640265, 2.501328]),
}

REFERENCE_TOLERANCE = 5e-6


@pytest.fixture
def reference_schedules():
    return REFERENCE_SCHEDULES


@pytest.fixture
def single_qubit_instances():
    """The two single-qubit oracles: f(0) = 1 and f(1) = 1."""
    return [SearchInstance(1, (0,)), SearchInstance(1, (1,))]


@pytest.fixture
def isolated_settings(monkeypatch, tmp_path):
    """Default settings regardless of the caller's environment or config file."""
    for name in ("AMPM_MAX_QUBITS", "AMPM_MAX_GATE_QUBITS", "AMPM_MAX_SYNTHESIS_QUBITS",
                 "AMPM_DEFAULT_SEED", "AMPM_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("AMPM_CONFIG_FILE", str(tmp_path / "no-such-config.json"))
    return tmp_path
