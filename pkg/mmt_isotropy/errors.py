"""Error codes, exception hierarchy and structured error responses."""

from typing import Dict, Any, Optional
from enum import Enum


class ErrorCode(str, Enum):
    """Error codes used across the package."""

    # Input/Parse Errors (1xxx)
    PARSE_ERROR = "ERR_1001"
    INVALID_INPUT = "ERR_1002"
    DIMENSION_MISMATCH = "ERR_1003"
    FIELD_MISMATCH = "ERR_1004"

    # Algebraic Errors (2xxx)
    NOT_INVERTIBLE = "ERR_2001"
    INADMISSIBLE_PERMUTATION = "ERR_2002"
    NOT_RANK_ONE_PRESERVING = "ERR_2003"
    NOT_MULTIPLICATIVE = "ERR_2004"
    NOT_SANDWICH_FORM = "ERR_2005"
    NOT_A_DECOMPOSITION = "ERR_2006"

    # Resource Errors (3xxx)
    BUDGET_EXCEEDED = "ERR_3001"

    # System Errors (4xxx)
    CONFIGURATION_ERROR = "ERR_4001"
    INTERNAL_ERROR = "ERR_4002"


# Error code to process exit status
ERROR_EXIT_MAP = {
    ErrorCode.PARSE_ERROR: 2,
    ErrorCode.INVALID_INPUT: 2,
    ErrorCode.CONFIGURATION_ERROR: 2,
    ErrorCode.BUDGET_EXCEEDED: 3,
}


def exit_code_for(code: ErrorCode) -> int:
    """Map an error code to the CLI exit status (1 for algebraic failures)."""
    return ERROR_EXIT_MAP.get(code, 1)


def create_error_response(
    code: ErrorCode,
    message: str,
    details: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """
    Create a structured error response.

    Args:
        code: Error code from ErrorCode enum
        message: Human-readable error message
        details: Optional additional context

    Returns:
        Structured error response dictionary
    """
    response = {
        "error": {
            "code": code.value if isinstance(code, ErrorCode) else code,
            "message": message,
            "exit_code": exit_code_for(code),
        }
    }
    if details:
        response["error"]["details"] = details
    return response


def validate_error_response(response: Dict[str, Any]) -> bool:
    """Check the structure produced by create_error_response."""
    if not isinstance(response, dict) or "error" not in response:
        return False

    error = response["error"]
    if not all(key in error for key in ("code", "message", "exit_code")):
        return False
    if not isinstance(error["code"], str) or not isinstance(error["message"], str):
        return False
    if not isinstance(error["exit_code"], int):
        return False
    if "details" in error and not isinstance(error["details"], dict):
        return False
    return True


class IsotropyError(Exception):
    """Base class for every error raised by the package."""

    code = ErrorCode.INTERNAL_ERROR

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    @property
    def exit_code(self) -> int:
        return exit_code_for(self.code)

    def to_response(self) -> Dict[str, Any]:
        return create_error_response(self.code, self.message, self.details)


class ParseError(IsotropyError, ValueError):
    """Malformed input file or literal."""
    code = ErrorCode.PARSE_ERROR


class InvalidInput(IsotropyError, ValueError):
    code = ErrorCode.INVALID_INPUT


class DimensionMismatch(IsotropyError, ValueError):
    code = ErrorCode.DIMENSION_MISMATCH


class FieldMismatch(IsotropyError, ValueError):
    code = ErrorCode.FIELD_MISMATCH


class NotInvertible(IsotropyError):
    """A matrix or linear map that must lie in GL is singular."""
    code = ErrorCode.NOT_INVERTIBLE


class InadmissiblePermutation(IsotropyError):
    """The factor permutation does not preserve the factor dimensions."""
    code = ErrorCode.INADMISSIBLE_PERMUTATION


class NotRankOnePreserving(IsotropyError):
    code = ErrorCode.NOT_RANK_ONE_PRESERVING


class NotMultiplicative(IsotropyError):
    code = ErrorCode.NOT_MULTIPLICATIVE


class NotSandwichForm(IsotropyError):
    code = ErrorCode.NOT_SANDWICH_FORM


class NotADecompositionOfT(IsotropyError):
    """A decomposition does not sum to the matrix multiplication tensor."""
    code = ErrorCode.NOT_A_DECOMPOSITION


class BudgetExceeded(IsotropyError):
    code = ErrorCode.BUDGET_EXCEEDED


class ConfigurationError(IsotropyError):
    code = ErrorCode.CONFIGURATION_ERROR
