"""Request/response bodies of the REST API.

Answer offsets are Unicode scalar-value indices into the `snippet`
field of the same result object.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class AskRequest(BaseModel):
    question: str
    top_k: int | None = Field(default=None, ge=1)
    query_mode: Literal["baseline", "cw", "cw-union"] = "cw-union"


class AnswerPayload(BaseModel):
    text: str
    start: int
    end: int


class AskResult(BaseModel):
    #: 0-based index in the returned, q-descending order
    position: int
    url: str
    title: str
    snippet: str
    #: null when the extractor preferred the no-answer candidate
    answer: AnswerPayload | None
    #: extractor confidence
    c: float
    #: post-merge search rank
    r: int
    #: combined confidence c * (10 - r) / 10
    q: float


class AskResponse(BaseModel):
    #: terms of the primary generated query, in question order
    query_terms: list[str]
    results: list[AskResult]


class HealthResponse(BaseModel):
    status: str
