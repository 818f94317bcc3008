"""Core domain types shared by every stage of the engine.

All types are immutable (frozen pydantic models) and validate their
invariants at construction time, so a value that exists is a value that
is well-formed. Character offsets throughout are Unicode scalar-value
indices (Python string indices), never byte offsets.
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .errors import DomainError

MAX_QUESTION_CHARS = 1000

#: Search providers are asked for at most this many hits, and hit ranks
#: stay below it; the combined-confidence formula is only defined there.
MAX_HITS = 10


class Pos(str, Enum):
    """Collapsed part-of-speech tagset.

    The query generator only needs to distinguish content classes
    (nouns, numerals, verbs, adjectives, adverbs) from everything else,
    so richer upstream tagsets are folded into these eight values.
    """

    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    NUM = "NUM"
    FUNCTION = "FUNCTION"
    PUNCT = "PUNCT"
    OTHER = "OTHER"


#: Part-of-speech classes whose tokens count as content words.
CONTENT_POS = frozenset({Pos.NOUN, Pos.NUM, Pos.VERB, Pos.ADJ, Pos.ADV})


class Source(str, Enum):
    """Which tagger produced a ProcessedQuestion."""

    REMOTE = "REMOTE"
    FALLBACK = "FALLBACK"


class Question(BaseModel):
    """A raw user question. Text is stored whitespace-trimmed."""

    model_config = ConfigDict(frozen=True)

    text: str

    @field_validator("text")
    @classmethod
    def _trim_and_check(cls, v: str) -> str:
        v = v.strip()
        if not v:
            raise ValueError("question is empty after trimming whitespace")
        if len(v) > MAX_QUESTION_CHARS:
            raise ValueError(
                f"question exceeds {MAX_QUESTION_CHARS} characters ({len(v)})"
            )
        return v


class Token(BaseModel):
    """One question token with its lemma, tag and character span."""

    model_config = ConfigDict(frozen=True)

    surface: str
    lemma: str
    pos: Pos
    start_char: int
    end_char: int

    @model_validator(mode="after")
    def _check_span(self) -> "Token":
        if not (0 <= self.start_char < self.end_char):
            raise ValueError(
                f"invalid token span [{self.start_char}, {self.end_char})"
            )
        if len(self.surface) != self.end_char - self.start_char:
            raise ValueError("surface length does not match its span")
        return self


class ProcessedQuestion(BaseModel):
    """A question plus its ordered, non-overlapping token annotation.

    Construction verifies that token surfaces are exact slices of the
    question text and that everything between tokens is whitespace, so
    concatenating surfaces with the original gaps reconstructs the text.
    """

    model_config = ConfigDict(frozen=True)

    question: Question
    tokens: tuple[Token, ...]
    source: Source

    @model_validator(mode="after")
    def _check_tokens(self) -> "ProcessedQuestion":
        text = self.question.text
        prev_end = 0
        for tok in self.tokens:
            if tok.start_char < prev_end:
                raise ValueError("tokens overlap or are out of order")
            if tok.end_char > len(text):
                raise ValueError("token span exceeds question length")
            if text[tok.start_char : tok.end_char] != tok.surface:
                raise ValueError(
                    f"token surface {tok.surface!r} does not match question text"
                )
            if text[prev_end : tok.start_char].strip():
                raise ValueError("non-whitespace text between tokens")
            prev_end = tok.end_char
        if text[prev_end:].strip():
            raise ValueError("non-whitespace text after the last token")
        return self

    def content_tokens(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.pos in CONTENT_POS)


class SearchHit(BaseModel):
    """One retrieved document: rank within its result set, URL, title, snippet."""

    model_config = ConfigDict(frozen=True)

    rank: int
    url: str
    title: str
    snippet: str

    @model_validator(mode="after")
    def _check(self) -> "SearchHit":
        if not (0 <= self.rank < MAX_HITS):
            raise ValueError(f"rank {self.rank} outside [0, {MAX_HITS})")
        if not self.url:
            raise ValueError("url is empty")
        if not self.snippet:
            raise ValueError("snippet is empty")
        return self


def validate_result_set(hits: list[SearchHit]) -> None:
    """Check that ranks in one result set are exactly 0..n-1.

    Raises DomainError otherwise. Providers call this before returning.
    """
    ranks = [h.rank for h in hits]
    if ranks != list(range(len(hits))):
        raise DomainError(f"ranks are not contiguous from 0: {ranks}")


class AnswerSpan(BaseModel):
    """An extracted answer: character range into a snippet plus confidence.

    A no-answer span has an empty text and a zero range; its confidence
    reflects how strongly the extractor preferred the null candidate.
    """

    model_config = ConfigDict(frozen=True)

    start_char: int
    end_char: int
    text: str
    confidence: float
    is_no_answer: bool = False

    @model_validator(mode="after")
    def _check(self) -> "AnswerSpan":
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.is_no_answer:
            if self.start_char != 0 or self.end_char != 0 or self.text:
                raise ValueError("no-answer span must be empty with zero range")
        else:
            if not (0 <= self.start_char < self.end_char):
                raise ValueError(
                    f"invalid answer span [{self.start_char}, {self.end_char})"
                )
            if len(self.text) != self.end_char - self.start_char:
                raise ValueError("answer text length does not match its range")
        return self


def combined_confidence(c: float, r: int) -> float:
    """Blend extractor confidence c with search rank r: c * (10 - r) / 10.

    The top hit keeps its full confidence; each rank below it sheds a
    tenth. Defined only for 0 <= c <= 1 and integer 0 <= r < 10.
    """
    if not isinstance(r, int) or isinstance(r, bool):
        raise DomainError(f"rank must be an integer, got {r!r}")
    if not (0 <= r < MAX_HITS):
        raise DomainError(f"rank {r} outside [0, {MAX_HITS})")
    if not (0.0 <= c <= 1.0):
        raise DomainError(f"confidence {c} outside [0, 1]")
    return c * (10 - r) / 10


class RankedAnswer(BaseModel):
    """A hit, its extracted answer, and their combined confidence."""

    model_config = ConfigDict(frozen=True)

    hit: SearchHit
    answer: AnswerSpan
    combined: float

    @model_validator(mode="after")
    def _check(self) -> "RankedAnswer":
        a, h = self.answer, self.hit
        if not a.is_no_answer:
            if a.end_char > len(h.snippet):
                raise ValueError("answer range exceeds snippet length")
            if h.snippet[a.start_char : a.end_char] != a.text:
                raise ValueError("answer text is not the snippet slice it claims")
        expected = combined_confidence(a.confidence, h.rank)
        if self.combined != expected:
            raise ValueError(
                f"combined confidence {self.combined!r} != {expected!r}"
            )
        return self

    @classmethod
    def build(cls, hit: SearchHit, answer: AnswerSpan) -> "RankedAnswer":
        return cls(
            hit=hit,
            answer=answer,
            combined=combined_confidence(answer.confidence, hit.rank),
        )
