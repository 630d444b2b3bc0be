"""
Error types shared by every module.

main.py maps them onto exit codes:
    ValidationError    -> 2
    ConfigurationError -> 2
    CapabilityError    -> 3
"""


class AmpmError(Exception):
    """Base class for all toolkit errors"""


class ValidationError(AmpmError, ValueError):
    """Input outside the domain of an operation (bad lambda, l < l_min, ...)"""


class CapabilityError(AmpmError):
    """A configured size bound or export limitation was exceeded"""


class ConfigurationError(AmpmError):
    """Malformed configuration file or environment value"""


class QasmParseError(ValidationError):
    """OpenQASM text outside the dialect written by qasm_io.to_qasm"""
