"""Answer-span decoding over backend start/end scores.

A backend scores every context token twice: once as a candidate span
start (the dot product of a learned start vector with the token's
contextualized embedding) and once as a candidate end. Softmaxing each
family of scores over the context positions yields start/end
probabilities; the decoder picks the span (i, j) with the highest raw
score sum subject to j >= i and j - i < max_span_tokens, then reports
the product of the two probabilities as its confidence.

j >= i (rather than strictly greater) is deliberate: one-token answers
such as "Da"/"Nu" are legitimate, and a max-span of 1 must still admit
them.
"""

from __future__ import annotations

import math
from typing import Protocol, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import BackendError, DomainError, NoContextTokens, NonFiniteInput
from .models import AnswerSpan, Question

SENTINEL = (-1, -1)


class InferenceOutput(BaseModel):
    """Per-token scores and character offsets returned by a backend.

    Offsets index into the context by Unicode scalar values; special
    (non-context) tokens carry the (-1, -1) sentinel.
    """

    model_config = ConfigDict(frozen=True)

    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]
    start_scores: tuple[float, ...]
    end_scores: tuple[float, ...]
    null_score: float

    @model_validator(mode="after")
    def _check(self) -> "InferenceOutput":
        n = len(self.tokens)
        if not (len(self.offsets) == len(self.start_scores) == len(self.end_scores) == n):
            raise ValueError("tokens, offsets and score vectors differ in length")
        scores = (*self.start_scores, *self.end_scores, self.null_score)
        if not all(math.isfinite(s) for s in scores):
            raise ValueError("scores must be finite")
        prev: tuple[int, int] | None = None
        for off in self.offsets:
            if off == SENTINEL:
                continue
            s, e = off
            if not (0 <= s < e):
                raise ValueError(f"invalid context offset {off}")
            if prev is not None and (s < prev[0] or e < prev[1]):
                raise ValueError("context offsets must be non-decreasing")
            prev = off
        return self

    def context_indices(self) -> list[int]:
        return [k for k, off in enumerate(self.offsets) if off != SENTINEL]


class DecoderConfig(BaseModel):
    """Span-decoding knobs."""

    model_config = ConfigDict(frozen=True)

    max_span_tokens: int = Field(default=30, ge=1)
    no_answer_threshold: float = 0.0
    max_context_chars: int = Field(default=2000, ge=1)


class InferenceBackend(Protocol):
    """Contract every extraction backend fulfils.

    Implementations must tolerate concurrent infer() calls (or queue
    them internally).
    """

    model_id: str

    def infer(self, question: str, context: str) -> InferenceOutput: ...

    def ready(self) -> bool: ...


def softmax(v: Sequence[float]) -> list[float]:
    """Numerically stable softmax: exp(v_i - max) / sum."""
    if len(v) == 0:
        raise DomainError("softmax needs a non-empty vector")
    if not all(math.isfinite(x) for x in v):
        raise NonFiniteInput("softmax input contains NaN or infinity")
    m = max(v)
    exps = [math.exp(x - m) for x in v]
    total = sum(exps)
    return [e / total for e in exps]


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def decode_span(out: InferenceOutput, cfg: DecoderConfig, context: str) -> AnswerSpan:
    """Pick the best answer span, or no-answer when the null wins.

    Over context tokens only: maximize start_scores[i] + end_scores[j]
    subject to j >= i and j - i < max_span_tokens (i, j are backend
    token positions). Ties break to the smallest i, then smallest j.
    Confidence is P(start_i) * P(end_j) with each P softmaxed over
    context positions, so it tops out at 1.

    When best span score - null_score < no_answer_threshold the null
    candidate wins and the confidence is the null's two-way softmax
    against the best span.
    """
    ctx = out.context_indices()
    if not ctx:
        raise NoContextTokens("inference output has no context tokens")

    p_start = softmax([out.start_scores[k] for k in ctx])
    p_end = softmax([out.end_scores[k] for k in ctx])

    best_score = -math.inf
    best: tuple[int, int] | None = None  # positions within ctx
    for a, i in enumerate(ctx):
        for b in range(a, len(ctx)):
            j = ctx[b]
            if j - i >= cfg.max_span_tokens:
                break
            score = out.start_scores[i] + out.end_scores[j]
            if score > best_score:
                best_score = score
                best = (a, b)
    assert best is not None  # (i, i) is always admissible since max_span_tokens >= 1

    if best_score - out.null_score < cfg.no_answer_threshold:
        return AnswerSpan(
            start_char=0,
            end_char=0,
            text="",
            confidence=_sigmoid(out.null_score - best_score),
            is_no_answer=True,
        )

    a, b = best
    start_char = out.offsets[ctx[a]][0]
    end_char = out.offsets[ctx[b]][1]
    return AnswerSpan(
        start_char=start_char,
        end_char=end_char,
        text=context[start_char:end_char],
        confidence=p_start[a] * p_end[b],
        is_no_answer=False,
    )


def extract(
    q: Question,
    snippet: str,
    backend: InferenceBackend,
    cfg: DecoderConfig,
) -> AnswerSpan:
    """Run the backend on (question, snippet) and decode the best span.

    The snippet is truncated to max_context_chars before dispatch; the
    returned offsets remain valid for the untruncated snippet because
    truncation only drops a suffix.
    """
    context = snippet[: cfg.max_context_chars]
    out = backend.infer(q.text, context)
    for off in out.offsets:
        if off != SENTINEL and off[1] > len(context):
            raise BackendError(
                f"backend offset {off} exceeds context length {len(context)}"
            )
    return decode_span(out, cfg, context)
