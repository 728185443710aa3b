import sys
from typing import Sequence

from src.logging.logger import logger


def get_error_message_detail(error, error_detail=sys):
    """
    Generates a detailed error message including the script name, line number, and error message.

    When no exception is being handled (a domain error raised directly), the plain
    message is returned.

    Args:
        error: The exception/error object or message.
        error_detail: The sys module to extract exception details.

    Returns:
        str: A formatted error message.
    """
    try:
        _, _, exc_tb = error_detail.exc_info()

        if exc_tb is None:
            return str(error)

        file_name = exc_tb.tb_frame.f_code.co_filename
        line_number = exc_tb.tb_lineno

        error_message = (
            f"Exception in script: [{file_name}] "
            f"at line: [{line_number}] "
            f"with error: [{str(error)}]"
        )
        logger.error(error_message)
        return error_message

    except Exception as internal_error:
        logger.error(f"Error while generating detailed error message: {internal_error}")
        return f"Failed to generate detailed error message: {str(error)}"


class CustomException(Exception):
    """
    Base exception for the VAR selection project.

    Args:
        error_message: The error message or exception object.
        error_detail: The sys module to extract exception details.
    """
    def __init__(self, error_message, error_detail=sys):
        super().__init__(str(error_message))

        # Generate a detailed error message
        self.error_message = get_error_message_detail(error_message, error_detail)

    def __str__(self):
        """
        Return the detailed error message string representation.
        """
        return self.error_message


# ----------------------- Model and estimation errors -----------------------

class DatasetError(CustomException):
    """A TimeSeriesDataset invariant is violated."""


class InvalidConfigError(CustomException):
    """A ModelConfig is not valid for a dataset."""
    def __init__(self, violations: Sequence[str]):
        self.violations = tuple(violations)
        super().__init__("invalid model configuration: " + "; ".join(self.violations))


class DimensionMismatchError(CustomException):
    """Matrix or vector dimensions disagree."""


class RankDeficientError(CustomException):
    """The design matrix is numerically rank deficient."""
    def __init__(self, rank: int, n_columns: int):
        self.rank = rank
        self.n_columns = n_columns
        super().__init__(f"design matrix is rank deficient: rank {rank} < {n_columns} columns")


class HQCUndefinedError(CustomException):
    """Hannan-Quinn penalty needs ln(ln T') > 0."""
    def __init__(self, effective_T: int):
        self.effective_T = effective_T
        super().__init__(f"HQC undefined for effective sample size {effective_T} (needs T' > e)")


class EstimationError(CustomException):
    """An OLS fit failed on an unexpected numerical error."""


# ----------------------- Search errors -----------------------

class SearchError(CustomException):
    """A search run failed on an unexpected error."""


class EmptySpaceError(CustomException):
    """No valid configuration remains in the search space."""


class TooLargeError(CustomException):
    """The search space does not fit the evaluation budget."""
    def __init__(self, space_size: int, max_evaluations: int):
        self.space_size = space_size
        self.max_evaluations = max_evaluations
        super().__init__(
            f"search space has {space_size} configs but the budget allows {max_evaluations} evaluations"
        )


class NoFeasibleCandidateError(CustomException):
    """Every evaluated candidate failed."""


class OptimalityGapError(CustomException):
    """Searched coefficients beat OLS beyond numerical tolerance."""
    def __init__(self, gap: float):
        self.gap = gap
        super().__init__(f"coefficient search beat OLS by {-gap:.3e}; OLS optimality violated")


# ----------------------- Simulation and forecasting errors -----------------------

class UnstableProcessError(CustomException):
    """Companion spectral radius is outside the stability margin."""
    def __init__(self, radius: float, margin: float):
        self.radius = radius
        self.margin = margin
        super().__init__(f"process is not stable: spectral radius {radius:.6f} >= {margin}")


class SpectralRadiusConvergenceError(CustomException):
    """Power iteration did not converge."""
    def __init__(self, estimate: float, iterations: int):
        self.estimate = estimate
        self.iterations = iterations
        super().__init__(
            f"power iteration did not converge after {iterations} iterations (best estimate {estimate:.10f})"
        )


class MissingExogenousError(CustomException):
    """Future exogenous values are needed but were not supplied."""


# ----------------------- Ingestion and report errors -----------------------

class DataIngestionError(CustomException):
    """Base class of CSV ingestion errors."""


class EmptyFileError(DataIngestionError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"file has no header or no data rows: {path}")


class DuplicateNameError(DataIngestionError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate column name in header: {name!r}")


class InvalidNameError(DataIngestionError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column name must match [A-Za-z0-9_]+: {name!r}")


class MissingColumnError(DataIngestionError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column not found in header: {name!r}")


class NonNumericCellError(DataIngestionError):
    def __init__(self, row: int, column: str, cell: str):
        self.row = row
        self.column = column
        self.cell = cell
        super().__init__(f"non-numeric cell {cell!r} at row {row}, column {column!r}")


class RaggedRowError(DataIngestionError):
    def __init__(self, row: int, expected: int, found: int):
        self.row = row
        self.expected = expected
        self.found = found
        super().__init__(f"row {row} has {found} fields, expected {expected}")


class ReportWriteError(CustomException):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"could not write report to {path}: {reason}")
