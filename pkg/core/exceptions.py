# core/exceptions.py


class QpbcError(Exception):
    """Base class for custom errors raised by the qudit PBC toolkit."""

    def __init__(self, message="An error occurred in the qudit PBC toolkit."):
        self.message = message
        super().__init__(self.message)


# --- Input errors (CLI exit code 2, HTTP 400) ---


class InputError(QpbcError):
    """Raised when user-supplied data cannot be processed."""


class InvalidInputDataError(InputError):
    """Raised for invalid arguments not caught by Pydantic model validation."""

    def __init__(self, field_name, field_value, reason="Invalid data provided."):
        self.field_name = field_name
        self.field_value = field_value
        self.reason = reason
        self.message = f"{reason} Field: '{field_name}', Value: '{field_value}'."
        super().__init__(self.message)


class InvalidModulusError(InvalidInputDataError):
    """Raised when the qudit dimension is not an odd prime."""

    def __init__(self, p):
        super().__init__(
            field_name="p",
            field_value=p,
            reason="Qudit dimension must be an odd prime.",
        )


class InverseOfZero(InputError):
    """Raised when the multiplicative inverse of 0 is requested."""

    def __init__(self, p):
        self.p = p
        self.message = f"0 has no multiplicative inverse modulo {p}."
        super().__init__(self.message)


class ShapeError(InputError):
    """Raised when operands disagree on modulus, qudit count or wire count."""


class NotMagic(InputError):
    """Raised when U_v parameters describe a Clifford gate (gamma' = 0)."""

    def __init__(self, p, params):
        self.p = p
        self.params = params
        self.message = (
            f"U_v parameters {params} with gamma'=0 give a Clifford gate, "
            f"not a magic gate (p={p})."
        )
        super().__init__(self.message)


class NoOpObservable(InputError):
    """Raised when an identity observable is handed to an optimizer."""

    def __init__(self, message="The identity observable has nothing to measure."):
        super().__init__(message)


class NotAStabilizerGroup(InputError):
    """Raised when tableau generators fail to commute, are dependent or too few."""

    def __init__(self, reason):
        self.reason = reason
        self.message = f"Generators do not define a stabilizer state: {reason}"
        super().__init__(self.message)


class NormalizationError(InputError):
    """Raised when a state vector is not of unit norm."""

    def __init__(self, norm):
        self.norm = norm
        self.message = f"State vector must have unit norm. Received norm {norm:.12g}."
        super().__init__(self.message)


class ParseError(InputError):
    """Raised for malformed circuit text or serialized circuit documents."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        location = ""
        if line is not None:
            location = f" (line {line}" + (
                f", column {column})" if column is not None else ")"
            )
        self.detail = message
        self.message = f"{message}{location}"
        super().__init__(self.message)

    def location(self):
        if self.line is None:
            return None
        return {"line": self.line, "column": self.column}


# --- Resource limit errors (CLI exit code 3, HTTP 413) ---


class ResourceLimitError(QpbcError):
    """Raised when a request exceeds a configured size limit."""

    def __init__(self, what, requested, limit):
        self.what = what
        self.requested = requested
        self.limit = limit
        self.message = f"{what} of size {requested} exceeds the configured limit {limit}."
        super().__init__(self.message)


class OracleTooLarge(ResourceLimitError):
    """Raised when a dense vector or matrix would exceed the oracle limit."""

    def __init__(self, requested, limit):
        super().__init__("Dense state dimension", requested, limit)


class EnumerationTooLarge(ResourceLimitError):
    """Raised when a stabilizer-state enumeration would exceed its limit."""

    def __init__(self, requested, limit):
        super().__init__("Stabilizer state enumeration", requested, limit)


# --- Execution errors ---


class ExecutionError(QpbcError):
    """Raised for failures inside the compiler, backends or solvers."""


class BackendError(ExecutionError):
    """Raised if a measurement backend fails to produce an outcome."""

    def __init__(self, detail_message, original_exception=None):
        message = f"Backend failure: {detail_message}"
        if original_exception:
            message += f" (Caused by: {type(original_exception).__name__})"
        super().__init__(message)
        self.original_exception = original_exception


class NumericalFailure(ExecutionError):
    """Raised when a linear program cannot be solved to tolerance."""

    def __init__(self, detail_message, original_exception=None):
        message = f"Numerical failure: {detail_message}"
        if original_exception:
            message += f" (Caused by: {type(original_exception).__name__})"
        super().__init__(message)
        self.original_exception = original_exception


class InternalInvariantViolation(ExecutionError):
    """Raised when a compiler self-check fails. Always indicates a bug."""


class MissingConfigurationError(QpbcError):
    """Raised if a configuration value is missing or malformed."""

    def __init__(self, missing_item, message="Required configuration is missing."):
        self.missing_item = missing_item
        self.message = f"{message} Missing item: '{missing_item}'."
        super().__init__(self.message)
