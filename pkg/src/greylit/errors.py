"""Exception hierarchy shared across the package."""


class GreylitError(Exception):
    """Base class for all package errors."""


class InvalidIntentError(GreylitError):
    pass


class InvalidOptionsError(GreylitError):
    pass


class QueryValidationError(GreylitError):
    """Raised when an operation requires a valid query but got violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ParseError(GreylitError):
    """Schema violation in an imported document; names the offending path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class CredentialError(GreylitError):
    pass


class RateLimitError(GreylitError):
    def __init__(self, message, retry_after=None, attempt_count=None):
        self.retry_after = retry_after
        self.attempt_count = attempt_count
        super().__init__(message)


class TransportError(GreylitError):
    """Network-level failure (connection reset, DNS, timeout)."""


class RequestFailedError(GreylitError):
    """Attempts exhausted or non-retryable status; carries the last status."""

    def __init__(self, message, status=None, attempt_count=None):
        self.status = status
        self.attempt_count = attempt_count
        super().__init__(message)


class PayloadError(GreylitError):
    def __init__(self, message, request_id=None):
        self.request_id = request_id
        super().__init__(message)


class DimensionError(GreylitError):
    pass


class DegenerateInputError(GreylitError):
    pass


class EmbeddingError(GreylitError):
    pass


class InvalidInputError(GreylitError):
    pass


class DegenerateTrainingError(GreylitError):
    pass


class ContractError(GreylitError):
    pass


class BaselineError(GreylitError):
    pass


class BaselineParseError(BaselineError):
    pass


class SplitError(GreylitError):
    pass


class FoldError(GreylitError):
    pass


class ManifestError(GreylitError):
    def __init__(self, message, expected=None, actual=None):
        self.expected = expected
        self.actual = actual
        super().__init__(message)


class NotFoundError(GreylitError):
    pass


class FormatError(GreylitError):
    pass


class PairingError(GreylitError):
    pass
