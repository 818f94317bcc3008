"""Search-query generation from a processed question.

Three procedures are supported: the baseline (the question verbatim),
content-word selection (nouns, numerals, verbs, adjectives and adverbs in
question order, minus very frequent verbs), and the diacritic-free variant
of the content-word query. Romanian web pages are written with or without
diacritics, so both variants are issued and their hit lists merged.
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, model_validator

from .errors import NoContentWords
from .models import CONTENT_POS, Pos, ProcessedQuestion, Question, Source

# Romanian diacritics to their base letters, including the legacy
# cedilla codepoints (U+015E/U+0162 family) still common in web text.
_FOLD_TABLE = str.maketrans({
    "ă": "a", "â": "a", "î": "i", "ș": "s", "ț": "t",
    "ş": "s", "ţ": "t",
    "Ă": "A", "Â": "A", "Î": "I", "Ș": "S", "Ț": "T",
    "Ş": "S", "Ţ": "T",
})


def fold_diacritics(s: str) -> str:
    """Replace Romanian diacritics with their ASCII base letters.

    Character-for-character: the output has the same length in scalar
    values, and characters outside the mapping are untouched. Idempotent.
    """
    return s.translate(_FOLD_TABLE)


class QueryKind(str, Enum):
    BASELINE = "BASELINE"
    CONTENT_WORDS = "CONTENT_WORDS"
    CONTENT_WORDS_NO_DIACRITICS = "CONTENT_WORDS_NO_DIACRITICS"


class Query(BaseModel):
    """An ordered list of terms sent to a search engine as one query.

    Terms are space-joined on the wire; no engine-specific operators.
    """

    model_config = ConfigDict(frozen=True)

    terms: tuple[str, ...]
    kind: QueryKind

    @model_validator(mode="after")
    def _check(self) -> "Query":
        if not self.terms:
            raise ValueError("query has no terms")
        if any(not t.strip() for t in self.terms):
            raise ValueError("query contains a blank term")
        return self

    @property
    def text(self) -> str:
        return " ".join(self.terms)


def generate_baseline(q: Question) -> Query:
    """The question itself, as a single query term."""
    return Query(terms=(q.text,), kind=QueryKind.BASELINE)


def generate_content_words(
    pq: ProcessedQuestion, excluded_verbs: frozenset[str]
) -> Query:
    """Select content-word surfaces in question order as query terms.

    Very frequent verbs are dropped: by lemma for remotely tagged
    questions, by diacritic-folded lowercase surface for fallback-tagged
    ones (the fallback has no real lemmas). `excluded_verbs` entries are
    expected already folded and lowercased (see `load_word_list`).

    Raises NoContentWords when the filter leaves zero terms.
    """
    terms: list[str] = []
    for tok in pq.tokens:
        if tok.pos not in CONTENT_POS:
            continue
        if pq.source is Source.REMOTE:
            if tok.pos is Pos.VERB and _fold_key(tok.lemma) in excluded_verbs:
                continue
        else:
            if _fold_key(tok.surface) in excluded_verbs:
                continue
        terms.append(tok.surface)
    if not terms:
        raise NoContentWords(
            f"no content words left in question: {pq.question.text!r}"
        )
    return Query(terms=tuple(terms), kind=QueryKind.CONTENT_WORDS)


def generate_query_set(
    pq: ProcessedQuestion, excluded_verbs: frozenset[str]
) -> list[Query]:
    """Content-word query plus its diacritic-free twin, deduplicated.

    When folding changes nothing the single content-word query is
    returned; when the question has no content words at all, the result
    degrades to the baseline query.
    """
    try:
        cw = generate_content_words(pq, excluded_verbs)
    except NoContentWords:
        return [generate_baseline(pq.question)]
    folded = tuple(fold_diacritics(t) for t in cw.terms)
    if folded == cw.terms:
        return [cw]
    return [
        cw,
        Query(terms=folded, kind=QueryKind.CONTENT_WORDS_NO_DIACRITICS),
    ]


def _fold_key(s: str) -> str:
    return fold_diacritics(s.casefold())
