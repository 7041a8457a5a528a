class ZZPulseError(Exception):
    """Base class for package errors."""


class ResourceLimitError(ZZPulseError):
    """A requested state or simulation exceeds the configured size cap."""


class CompileError(ZZPulseError):
    def __init__(self, message: str, gate_index: int | None = None):
        self.gate_index = gate_index
        prefix = f"gate {gate_index}: " if gate_index is not None else ""
        super().__init__(prefix + message)


class UnsupportedOperation(CompileError):
    """No verified pulse sequence exists for the requested operation."""


class ParseError(ZZPulseError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")
