"""HTTP service layer: FastAPI app plus request/response schemas."""

from . import schemas  # noqa: F401

__all__ = ["schemas"]
