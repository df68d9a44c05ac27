"""Project-wide error classification.

Maps exceptions to a small set of categories so the CLI can emit one
machine-parseable error line and a stable exit code per category.
"""

from enum import StrEnum

import yaml
from loguru import logger
from pydantic import ValidationError

from src.core.exceptions import (
    ConfigurationError,
    ContractError,
    DataError,
    DimensionError,
    NumericError,
)


class ErrorCategory(StrEnum):
    """Category reported on the CLI error line."""

    CONFIGURATION = "configuration"
    DATA = "data"
    DIMENSION = "dimension"
    NUMERIC = "numeric"
    CONTRACT = "contract"
    IO = "io"
    INTERNAL = "internal"


class ErrorClassifier:
    """Classifies exceptions into categories and exit codes."""

    # Order matters for the inheritance scan: specific types first.
    CATEGORY_MAP: dict[type[BaseException], ErrorCategory] = {
        ConfigurationError: ErrorCategory.CONFIGURATION,
        ValidationError: ErrorCategory.CONFIGURATION,
        yaml.YAMLError: ErrorCategory.CONFIGURATION,
        DataError: ErrorCategory.DATA,
        DimensionError: ErrorCategory.DIMENSION,
        NumericError: ErrorCategory.NUMERIC,
        FloatingPointError: ErrorCategory.NUMERIC,
        ContractError: ErrorCategory.CONTRACT,
        FileNotFoundError: ErrorCategory.IO,
        PermissionError: ErrorCategory.IO,
        OSError: ErrorCategory.IO,
    }

    EXIT_CODES: dict[ErrorCategory, int] = {
        ErrorCategory.CONFIGURATION: 2,
        ErrorCategory.DATA: 3,
        ErrorCategory.DIMENSION: 4,
        ErrorCategory.NUMERIC: 5,
        ErrorCategory.CONTRACT: 6,
        ErrorCategory.IO: 7,
        ErrorCategory.INTERNAL: 1,
    }

    @classmethod
    def classify(cls, exc: BaseException) -> ErrorCategory:
        """Classify an exception into an error category.

        Args:
            exc: The exception to classify.

        Returns:
            ErrorCategory: Category of the exception, ``INTERNAL`` when unknown.
        """
        exc_type = type(exc)

        if exc_type in cls.CATEGORY_MAP:
            category = cls.CATEGORY_MAP[exc_type]
            logger.debug(f"Classified {exc_type.__name__} as {category}")
            return category

        for mapped_type, category in cls.CATEGORY_MAP.items():
            if isinstance(exc, mapped_type):
                logger.debug(
                    f"Classified {exc_type.__name__} (subclass of {mapped_type.__name__}) as {category}"
                )
                return category

        logger.warning(
            f"Unknown exception type {exc_type.__name__}, defaulting to INTERNAL: {exc}"
        )
        return ErrorCategory.INTERNAL

    @classmethod
    def exit_code(cls, exc: BaseException) -> int:
        """Return the process exit code for an exception."""
        return cls.EXIT_CODES[cls.classify(exc)]

    @classmethod
    def error_line(cls, exc: BaseException) -> str:
        """Render the single-line error report written to stderr.

        Format: ``error category=<category> message=<text>`` with newlines in
        the message collapsed so the line stays parseable.
        """
        message = " ".join(str(exc).split()) or type(exc).__name__
        return f"error category={cls.classify(exc)} message={message}"
