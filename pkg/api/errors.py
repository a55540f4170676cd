# api/errors.py

import logging

from fastapi import HTTPException, status

from core.exceptions import InputError, ParseError, QpbcError, ResourceLimitError

logger = logging.getLogger(__name__)


def http_error(e: Exception, context: str) -> HTTPException:
    """Maps toolkit exceptions to HTTP errors; use as `raise http_error(e, ...) from e`."""
    if isinstance(e, ResourceLimitError):
        logger.warning(f"Resource limit in {context}: {e.message}")
        code = status.HTTP_413_REQUEST_ENTITY_TOO_LARGE
    elif isinstance(e, InputError):
        logger.warning(f"Input error in {context} ({type(e).__name__}): {e.message}")
        code = status.HTTP_400_BAD_REQUEST
    else:
        logger.error(f"Unexpected error in {context}: {str(e)}", exc_info=True)
        code = status.HTTP_500_INTERNAL_SERVER_ERROR
    detail = {
        "error": type(e).__name__,
        "message": e.message if isinstance(e, QpbcError) else "An unexpected internal error occurred.",
        "location": e.location() if isinstance(e, ParseError) else None,
    }
    return HTTPException(status_code=code, detail=detail)
