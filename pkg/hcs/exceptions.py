"""
HCS Exceptions

This module defines custom exceptions used by the hcs library, the bench
runner and the CLI for error handling. Every exception carries a
machine-readable code and the process exit code the CLI reports for it.
"""

USAGE_EXIT_CODE = 2
DATA_EXIT_CODE = 3


class HcsError(Exception):
    """
    Base exception for Hamming compressed sensing operations.

    Attributes:
        message (str): Error message
        code (str): Error code for structured output
        exit_code (int): CLI exit code (2 usage/validation, 3 data/dimension)
    """

    exit_code = USAGE_EXIT_CODE

    def __init__(self, message: str, code: str = "hcs_error"):
        super().__init__(message)
        self.message = message
        self.code = code


class InvalidDimensionError(HcsError):
    """
    Raised when a dimension or measurement count is zero or negative.
    """

    def __init__(self, message: str):
        super().__init__(message, code="invalid_dimension")


class DimensionMismatchError(HcsError):
    """
    Raised when signals, ensembles, measurements or quantized signals disagree in size.
    """

    exit_code = DATA_EXIT_CODE

    def __init__(self, message: str, code: str = "dimension_mismatch"):
        super().__init__(message, code=code)


class LengthMismatchError(DimensionMismatchError):
    """
    Raised when two measurement vectors have different lengths.
    """

    def __init__(self, message: str):
        super().__init__(message, code="length_mismatch")


class IndexOutOfRangeError(HcsError):
    """
    Raised when a dimension index or interval index lies outside its valid range.
    """

    def __init__(self, message: str):
        super().__init__(message, code="index_out_of_range")


class InvalidConfigError(HcsError):
    """
    Raised when a quantizer or dequantizer configuration violates its preconditions.
    """

    def __init__(self, message: str):
        super().__init__(message, code="invalid_config")


class NumericFailureError(HcsError):
    """
    Raised when a computed boundary leaves its admissible range beyond tolerance.
    """

    def __init__(self, message: str):
        super().__init__(message, code="numeric_failure")


class DomainError(HcsError):
    """
    Raised when a function is evaluated outside its mathematical domain.
    """

    def __init__(self, message: str, code: str = "domain_error"):
        super().__init__(message, code=code)


class OutOfRangeError(HcsError):
    """
    Raised when a signal entry lies outside the quantizer range [x_inf, x_sup].

    Attributes:
        index (int): 1-based index of the first offending entry
    """

    exit_code = DATA_EXIT_CODE

    def __init__(self, message: str, index: int):
        super().__init__(message, code="out_of_range")
        self.index = index


class MismatchedQuantizerError(HcsError):
    """
    Raised when two quantized signals were produced by different quantizers.
    """

    exit_code = DATA_EXIT_CODE

    def __init__(self, message: str):
        super().__init__(message, code="mismatched_quantizer")


class ZeroVectorError(HcsError):
    """
    Raised when a dequantized vector is zero and cannot be normalized.
    """

    exit_code = DATA_EXIT_CODE

    def __init__(self, message: str = "Dequantized vector is zero; normalization is undefined."):
        super().__init__(message, code="zero_vector")


class InvalidCandidateError(HcsError):
    """
    Raised when a failure bound is requested for the true interval itself.
    """

    def __init__(self, message: str):
        super().__init__(message, code="invalid_candidate")


class DegeneratePositionError(DomainError):
    """
    Raised when a coordinate sits exactly on a decision boundary (zero gap).
    """

    def __init__(self, message: str):
        super().__init__(message, code="degenerate_position")


class InvalidSignalError(HcsError):
    """
    Raised when a signal is not unit norm or violates its sparsity hint.
    """

    def __init__(self, message: str):
        super().__init__(message, code="invalid_signal")


class SpecInvalidError(HcsError):
    """
    Raised when an experiment specification cannot be run.
    """

    def __init__(self, message: str):
        super().__init__(message, code="spec_invalid")


class OutputWriteError(HcsError):
    """
    Raised when a result file cannot be written.

    Attributes:
        path (str): Destination that failed
    """

    def __init__(self, message: str, path: str):
        super().__init__(message, code="output_write_failed")
        self.path = path
