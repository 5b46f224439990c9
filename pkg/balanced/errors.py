"""Domain exceptions and the uniform JSON error handlers for the HTTP app."""

import logging
from typing import Any

from fastapi import FastAPI, HTTPException, Request, status
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

logger = logging.getLogger(__name__)


class BalanceError(Exception):
    """Base class for every error raised by the library."""

    code = "balance_error"
    # HTTP status the API answers with.
    status_code = status.HTTP_422_UNPROCESSABLE_CONTENT

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def payload(self) -> dict[str, Any]:
        return {"error": self.code, "detail": self.message}


class GroupSpecError(BalanceError):
    code = "group_spec_error"

    def __init__(self, message: str, position: int | None = None) -> None:
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ShapeError(BalanceError):
    code = "shape_error"


class InfiniteGroupError(BalanceError):
    code = "infinite_group"


class GraphFormatError(BalanceError):
    code = "graph_format_error"

    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateIdError(GraphFormatError):
    code = "duplicate_id"


class UnknownVertexError(GraphFormatError):
    code = "unknown_vertex"


class MissingLabelError(BalanceError):
    code = "missing_label"

    def __init__(self, kind: str, ids: list[str]) -> None:
        shown = ", ".join(ids[:5]) + (", ..." if len(ids) > 5 else "")
        super().__init__(f"missing {kind} label(s): {shown}")
        self.kind = kind
        self.ids = ids


class ParameterError(BalanceError):
    code = "parameter_error"


class UnbalancedError(BalanceError):
    """Raised when an operation needs a balanced labeling and got a witness instead."""

    code = "unbalanced"

    def __init__(self, message: str, witness: Any = None) -> None:
        super().__init__(message)
        self.witness = witness


class CapExceededError(BalanceError):
    code = "cap_exceeded"
    status_code = status.HTTP_413_CONTENT_TOO_LARGE

    def __init__(self, cap: str, limit: int, requested: int) -> None:
        super().__init__(f"{cap} exceeded: requested {requested}, limit {limit}")
        self.cap = cap
        self.limit = limit
        self.requested = requested

    def payload(self) -> dict[str, Any]:
        return {**super().payload(), "cap": self.cap, "limit": self.limit, "requested": self.requested}


def add_exception_handlers(app: FastAPI) -> None:
    """Map request validation to 422, library errors to their own status, and anything else to 500."""

    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(_, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=status.HTTP_422_UNPROCESSABLE_CONTENT,
            content={"error": "validation_error", "detail": jsonable_encoder(exc.errors())},
        )

    @app.exception_handler(BalanceError)
    async def balance_exception_handler(_, exc: BalanceError) -> JSONResponse:
        logger.info("request rejected: %s", exc.code)
        return JSONResponse(status_code=exc.status_code, content=exc.payload())

    @app.exception_handler(HTTPException)
    async def http_exception_handler(_, exc: HTTPException) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": "http_error", "detail": exc.detail},
        )

    @app.exception_handler(Exception)
    async def unexpected_exception_handler(request: Request, exc: Exception) -> JSONResponse:
        logger.exception("unexpected error on %s %s", request.method, request.url.path, exc_info=exc)
        return JSONResponse(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            content={"error": "internal_server_error", "detail": "Unexpected server error."},
        )
