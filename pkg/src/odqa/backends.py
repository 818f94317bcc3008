"""Inference backends: a remote HTTP client and a deterministic stub.

The remote client speaks a small JSON protocol (POST /infer) to a
fine-tuned extractive-QA model served out-of-process. The stub maps
programmed (question, snippet) pairs to synthetic score vectors so
pipelines can run offline with fully reproducible output.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path
from typing import Any

import httpx
from pydantic import ValidationError

from .errors import BackendError
from .extractor import InferenceOutput

_WS_TOKEN_RE = re.compile(r"\S+")


class RemoteInferenceBackend:
    """Client for the inference wire protocol.

    POST {endpoint}/infer with {question, context, model}; the response
    carries tokens, per-token [start, end] character offsets into the
    context (scalar-value indices, [-1, -1] for special tokens), start
    and end score vectors, and the null-candidate score.
    """

    def __init__(
        self,
        endpoint: str,
        model_id: str = "covid-ro-v1",
        timeout_ms: int = 10000,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model_id = model_id
        self.timeout_s = timeout_ms / 1000
        self.transport = transport

    def ready(self) -> bool:
        """True when the endpoint answers HTTP at all (any status)."""
        try:
            with httpx.Client(timeout=2.0, transport=self.transport) as client:
                client.get(self.endpoint)
            return True
        except httpx.HTTPError:
            return False

    def infer(self, question: str, context: str) -> InferenceOutput:
        body = {"question": question, "context": context, "model": self.model_id}
        try:
            with httpx.Client(timeout=self.timeout_s, transport=self.transport) as client:
                resp = client.post(f"{self.endpoint}/infer", json=body)
        except httpx.HTTPError as exc:
            raise BackendError(f"inference backend unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise BackendError(f"inference backend returned {resp.status_code}")
        try:
            payload = resp.json()
            return InferenceOutput(
                tokens=tuple(payload["tokens"]),
                offsets=tuple((int(s), int(e)) for s, e in payload["offsets"]),
                start_scores=tuple(payload["start_scores"]),
                end_scores=tuple(payload["end_scores"]),
                null_score=payload["null_score"],
            )
        except (ValueError, TypeError, KeyError, ValidationError) as exc:
            raise BackendError(f"malformed inference response: {exc}") from exc


def _question_key(question: str) -> str:
    return hashlib.sha256(question.encode("utf-8")).hexdigest()


class StubInferenceBackend:
    """Deterministic test double for the inference contract.

    Contexts are whitespace-tokenized. A programmed (question, snippet)
    pair gets a score peak on the tokens spanning its answer and a
    strongly negative null score; any unprogrammed pair decodes to
    no-answer. Programmed snippets must fit within the decoder's
    max_context_chars, since extraction truncates before dispatch.
    """

    def __init__(self, model_id: str = "stub"):
        self.model_id = model_id
        self._programs: dict[tuple[str, str], tuple[int, int, float]] = {}

    def ready(self) -> bool:
        return True

    def program(
        self,
        question: str,
        snippet: str,
        answer: str,
        peak: float = 6.0,
    ) -> None:
        """Teach the stub to highlight `answer` (a substring of `snippet`)."""
        start = snippet.find(answer)
        if start < 0:
            raise ValueError(f"answer {answer!r} not found in snippet")
        key = (_question_key(question), snippet)
        self._programs[key] = (start, start + len(answer), peak)

    @classmethod
    def from_file(cls, path: str | Path, model_id: str = "stub") -> "StubInferenceBackend":
        """Load programs from a JSON list of {question, snippet, answer, peak?}."""
        backend = cls(model_id=model_id)
        records: Any = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(records, list):
            raise ValueError("stub program file must hold a JSON list")
        for record in records:
            backend.program(
                record["question"],
                record["snippet"],
                record["answer"],
                peak=float(record.get("peak", 6.0)),
            )
        return backend

    def infer(self, question: str, context: str) -> InferenceOutput:
        matches = list(_WS_TOKEN_RE.finditer(context))
        if not matches:
            return InferenceOutput(
                tokens=(), offsets=(), start_scores=(), end_scores=(), null_score=0.0
            )
        tokens = tuple(m.group() for m in matches)
        offsets = tuple((m.start(), m.end()) for m in matches)
        zeros = (0.0,) * len(tokens)
        programmed = self._programs.get((_question_key(question), context))
        if programmed is None:
            return InferenceOutput(
                tokens=tokens,
                offsets=offsets,
                start_scores=zeros,
                end_scores=zeros,
                null_score=6.0,
            )
        ans_start, ans_end, peak = programmed
        i = next(k for k, (s, e) in enumerate(offsets) if e > ans_start)
        j = max(k for k, (s, e) in enumerate(offsets) if s < ans_end)
        start_scores = list(zeros)
        end_scores = list(zeros)
        start_scores[i] = peak
        end_scores[j] = peak
        return InferenceOutput(
            tokens=tokens,
            offsets=offsets,
            start_scores=tuple(start_scores),
            end_scores=tuple(end_scores),
            null_score=-peak,
        )
