"""Question tokenization, lemmatization and POS tagging.

Two taggers produce a ProcessedQuestion: a client for a remote
TEPROLIN-compatible text-processing service, and a deterministic offline
fallback driven by a function-word lexicon. The processor tries the
remote service first (one retry, 3 s timeout) and falls back silently,
so the engine keeps answering when the service is down.

The fallback is a query-generation-grade approximation: it does not
really lemmatize or parse, it only separates content words from
function words well enough to build search queries.
"""

from __future__ import annotations

import logging
import re
from importlib import resources
from pathlib import Path
from typing import Iterable

import httpx
from pydantic import ValidationError

from .errors import NetworkError, ProtocolError
from .models import Pos, ProcessedQuestion, Question, Source, Token
from .querygen import fold_diacritics

log = logging.getLogger("odqa.textproc")

REMOTE_TIMEOUT_S = 3.0
REMOTE_RETRIES = 1

# A word is letters/digits possibly glued by hyphens or apostrophes
# ("COVID-19", "s-a"); anything else non-space is a one-char token.
_TOKEN_RE = re.compile(r"\w+(?:[-'’]\w+)*|[^\w\s]")
_NUMERAL_RE = re.compile(r"\d+(?:[.,:/-]\d+)*")
_WORD_CHAR_RE = re.compile(r"\w")


def load_word_list(source: str | Path | Iterable[str]) -> frozenset[str]:
    """Load a one-entry-per-line word list, `#` comments allowed.

    Entries are diacritic-folded and casefolded so lookups are
    insensitive to both.
    """
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    words = set()
    for line in lines:
        entry = line.split("#", 1)[0].strip()
        if entry:
            words.add(fold_diacritics(entry.casefold()))
    return frozenset(words)


def default_function_words() -> frozenset[str]:
    """The packaged Romanian function-word lexicon (incl. frequent-verb forms)."""
    text = resources.files("odqa.resources").joinpath("function_words_ro.txt")
    return load_word_list(text.read_text(encoding="utf-8").splitlines())


def default_excluded_verbs() -> frozenset[str]:
    """The packaged list of very frequent Romanian verbs (lemmas and forms)."""
    text = resources.files("odqa.resources").joinpath("excluded_verbs_ro.txt")
    return load_word_list(text.read_text(encoding="utf-8").splitlines())


def process_fallback(q: Question, lexicon: frozenset[str]) -> ProcessedQuestion:
    """Tag a question offline: split on whitespace/punctuation, classify.

    Numerals tag NUM, punctuation PUNCT, lexicon matches FUNCTION, and
    every other word defaults to NOUN: unknown words are most often the
    domain nouns the query needs. The lemma is the lowercased surface.
    Deterministic for a fixed lexicon.
    """
    tokens = []
    for m in _TOKEN_RE.finditer(q.text):
        surface = m.group()
        if not _WORD_CHAR_RE.search(surface):
            pos = Pos.PUNCT
        elif _NUMERAL_RE.fullmatch(surface):
            pos = Pos.NUM
        elif fold_diacritics(surface.casefold()) in lexicon:
            pos = Pos.FUNCTION
        else:
            pos = Pos.NOUN
        tokens.append(
            Token(
                surface=surface,
                lemma=surface.lower(),
                pos=pos,
                start_char=m.start(),
                end_char=m.end(),
            )
        )
    return ProcessedQuestion(question=q, tokens=tuple(tokens), source=Source.FALLBACK)


# Universal POS names and MSD leading letters, both collapsed onto the
# engine's 8-value tagset. Dependency annotations in the response are
# accepted and ignored.
_UPOS_MAP = {
    "NOUN": Pos.NOUN,
    "PROPN": Pos.NOUN,
    "VERB": Pos.VERB,
    "AUX": Pos.VERB,
    "ADJ": Pos.ADJ,
    "ADV": Pos.ADV,
    "NUM": Pos.NUM,
    "PUNCT": Pos.PUNCT,
    "ADP": Pos.FUNCTION,
    "DET": Pos.FUNCTION,
    "PRON": Pos.FUNCTION,
    "CCONJ": Pos.FUNCTION,
    "SCONJ": Pos.FUNCTION,
    "CONJ": Pos.FUNCTION,
    "PART": Pos.FUNCTION,
    "INTJ": Pos.OTHER,
    "SYM": Pos.OTHER,
    "X": Pos.OTHER,
}

_MSD_MAP = {
    "N": Pos.NOUN,
    "V": Pos.VERB,
    "A": Pos.ADJ,
    "R": Pos.ADV,
    "M": Pos.NUM,
    "P": Pos.FUNCTION,
    "D": Pos.FUNCTION,
    "T": Pos.FUNCTION,
    "S": Pos.FUNCTION,
    "C": Pos.FUNCTION,
    "Q": Pos.FUNCTION,
    "Z": Pos.PUNCT,
    "I": Pos.OTHER,
    "X": Pos.OTHER,
    "Y": Pos.OTHER,
}


def map_tag(tag: str) -> Pos:
    """Collapse a UPOS name or MSD tag onto the 8-value tagset."""
    if not tag:
        return Pos.OTHER
    upos = _UPOS_MAP.get(tag.upper())
    if upos is not None:
        return upos
    return _MSD_MAP.get(tag[0].upper(), Pos.OTHER)


def _parse_remote_tokens(payload: object) -> list[dict]:
    try:
        sentences = payload["teprolin-result"]["tokenized"]  # type: ignore[index]
        return [tok for sentence in sentences for tok in sentence]
    except (TypeError, KeyError) as exc:
        raise ProtocolError(f"unexpected response structure: {exc}") from exc


def process_remote(
    q: Question,
    endpoint: str,
    timeout_s: float = REMOTE_TIMEOUT_S,
    transport: httpx.BaseTransport | None = None,
) -> ProcessedQuestion:
    """Tag a question via a TEPROLIN-compatible service.

    The request is form-encoded text; the response carries per-token
    annotations (`_wordform`, `_lemma`, `_msd`/`_ctg`) which are mapped
    by name, tolerating extra fields. Character offsets are recovered by
    locating each word form left-to-right in the original question.

    Raises NetworkError on connect failure/timeout and ProtocolError
    when the response cannot be mapped back onto the question.
    """
    try:
        with httpx.Client(timeout=timeout_s, transport=transport) as client:
            resp = client.post(endpoint, data={"text": q.text})
    except httpx.TimeoutException as exc:
        raise NetworkError(f"text-processing service timed out: {exc}") from exc
    except httpx.HTTPError as exc:
        raise NetworkError(f"text-processing service unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise ProtocolError(f"text-processing service returned {resp.status_code}")
    try:
        payload = resp.json()
    except ValueError as exc:
        raise ProtocolError(f"response is not JSON: {exc}") from exc

    tokens = []
    cursor = 0
    for raw in _parse_remote_tokens(payload):
        if not isinstance(raw, dict):
            raise ProtocolError(f"token annotation is not an object: {raw!r}")
        surface = raw.get("_wordform") or raw.get("wordform")
        if not surface:
            raise ProtocolError(f"token annotation lacks a word form: {raw!r}")
        start = q.text.find(surface, cursor)
        if start < 0:
            raise ProtocolError(
                f"token {surface!r} not found in question after offset {cursor}"
            )
        cursor = start + len(surface)
        tag = raw.get("_msd") or raw.get("_ctg") or raw.get("pos") or ""
        tokens.append(
            Token(
                surface=surface,
                lemma=raw.get("_lemma") or raw.get("lemma") or surface.lower(),
                pos=map_tag(tag),
                start_char=start,
                end_char=cursor,
            )
        )
    try:
        return ProcessedQuestion(
            question=q, tokens=tuple(tokens), source=Source.REMOTE
        )
    except ValidationError as exc:
        raise ProtocolError(f"service tokens do not cover the question: {exc}") from exc


class QuestionProcessor:
    """Remote-then-fallback question tagging policy.

    With no endpoint configured the processor is purely offline.
    Stateless after construction; safe for concurrent use.
    """

    def __init__(
        self,
        lexicon: frozenset[str] | None = None,
        endpoint: str | None = None,
        timeout_s: float = REMOTE_TIMEOUT_S,
        transport: httpx.BaseTransport | None = None,
    ):
        self.lexicon = lexicon if lexicon is not None else default_function_words()
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self.transport = transport

    def process(self, q: Question) -> ProcessedQuestion:
        if self.endpoint:
            for attempt in range(1 + REMOTE_RETRIES):
                try:
                    return process_remote(
                        q, self.endpoint, self.timeout_s, self.transport
                    )
                except NetworkError as exc:
                    log.warning("remote tagging attempt %d failed: %s", attempt + 1, exc)
                except ProtocolError as exc:
                    log.warning("remote tagging response unusable: %s", exc)
                    break
        return process_fallback(q, self.lexicon)
