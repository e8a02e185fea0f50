"""Request/response and wire-protocol models for the preview service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel


class UpdateMessage(BaseModel):
    """One WebSocket frame.

    ``seq`` increases strictly per connection for hello/dsl_update frames;
    error frames are out-of-band and carry seq 0.
    """

    kind: Literal["dsl_update", "hello", "error"]
    seq: int
    payload: str = ""


class PublishResponse(BaseModel):
    seq: int


class CompileResponse(BaseModel):
    seq: int
    doc: dict
    html: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    seq: int
    clients: int
    has_doc: bool
