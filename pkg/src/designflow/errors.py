"""Exception hierarchy shared by every module.

Each error carries a stable ``code`` string that the HTTP layer maps onto
structured error bodies and the CLI onto exit messages.
"""

from __future__ import annotations


class DesignFlowError(Exception):
    """Base class for all package errors."""

    code = "Error"

    def __init__(self, message: str, *, node_id: str | None = None):
        super().__init__(message)
        self.message = message
        self.node_id = node_id


class NotFoundError(DesignFlowError):
    code = "NotFound"


class KindMismatchError(DesignFlowError):
    code = "KindMismatch"


class InvalidContentError(DesignFlowError):
    code = "InvalidContent"


class EdgeIllegalError(DesignFlowError):
    code = "EdgeIllegal"


class EdgeExistsError(DesignFlowError):
    code = "EdgeExists"


class NoDirtyMarkError(DesignFlowError):
    code = "NoDirtyMark"


class AlreadyIncorporatedError(DesignFlowError):
    code = "AlreadyIncorporated"


class PreconditionError(DesignFlowError):
    code = "Precondition"


class UnknownTemplateError(DesignFlowError):
    code = "UnknownTemplate"


class MissingBindingError(DesignFlowError):
    code = "MissingBinding"


class UnknownStyleError(DesignFlowError):
    code = "UnknownStyle"


class ProviderError(DesignFlowError):
    """A text or image model call failed."""

    code = "ProviderFailure"

    def __init__(self, message: str, *, raw_payload: object = None, node_id: str | None = None):
        super().__init__(message, node_id=node_id)
        self.raw_payload = raw_payload


class SchemaViolationError(ProviderError):
    """Provider returned a value that does not validate against the named schema."""

    code = "SchemaViolation"


class MigrationError(DesignFlowError):
    code = "UnsupportedFormatVersion"


class ParseError(DesignFlowError):
    code = "ParseError"
