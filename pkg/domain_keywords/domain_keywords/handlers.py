from typing import NoReturn

from .constants import EXIT_CONFIG_ERROR
from .exceptions import DomainKeywordsError, ValidationError
from .logger import keyword_logger


def throw(
    message: str,
    exc: type[DomainKeywordsError] = ValidationError,
    title: str | None = None,
) -> NoReturn:
    """Logs the message and raises it as the given error type

    Args:
        message (str): The error message
        exc (type[DomainKeywordsError], optional): The error raised. Defaults to ValidationError.
        title (str | None, optional): A short error title. Defaults to the error's own title.
    """
    error = exc(message, title=title)
    keyword_logger.error("%s: %s", error.title, message)

    raise error


def handle_errors(error: Exception) -> int:
    """Maps an error caught at the command boundary to an exit code.

    Args:
        error (Exception): The error caught at the command boundary

    Returns:
        int: The process exit status
    """
    if isinstance(error, DomainKeywordsError):
        # the diagnostic line itself was emitted by throw()
        keyword_logger.debug("exiting with %s after %s", error.exit_code, error.title)

        return error.exit_code

    keyword_logger.exception(error, exc_info=True)

    return EXIT_CONFIG_ERROR
