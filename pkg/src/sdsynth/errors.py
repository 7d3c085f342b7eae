"""Exception hierarchy shared by the package."""


class SynthError(Exception):
    pass


class ParseError(SynthError):
    """Syntax or name-resolution error, with a source position when known."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class SubstitutionError(SynthError, TypeError):
    pass


class FragmentError(SynthError):
    """A formula left the linear fragment the decision procedures handle."""


class UnboundVariableError(SynthError, KeyError):
    pass


class FlowError(SynthError, ArithmeticError):
    """Non-finite value during plant integration."""


class InputDomainError(SynthError, ValueError):
    pass


class UnsatisfiableError(SynthError, ValueError):
    pass


class DriftError(SynthError):
    """Replay of a successful path diverged from the symbolic prediction."""

    def __init__(self, message, step=None, diagnostics=None):
        self.step = step
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class ProblemFileError(SynthError):
    def __init__(self, message, section=None, line=None):
        self.section = section
        self.line = line
        where = []
        if section is not None:
            where.append(f"section [{section}]")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
