"""End-to-end question answering: process, query, search, extract, re-rank.

Results are ordered by combined confidence q = c * (10 - r) / 10, which
blends the extractor's confidence c with the post-merge search rank r.
With the fixture provider and the stub backend the whole flow is
deterministic: repeated runs serialize byte-identically.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .errors import NoContentWords, NoResults, OdqaError, SearchFailed
from .extractor import DecoderConfig, InferenceBackend, extract
from .models import (
    MAX_HITS,
    AnswerSpan,
    Question,
    RankedAnswer,
    SearchHit,
    combined_confidence,
)
from .querygen import (
    Query,
    generate_baseline,
    generate_content_words,
    generate_query_set,
)
from .search import SearchProvider
from .textproc import QuestionProcessor

__all__ = [
    "QueryMode",
    "PipelineConfig",
    "QAPipeline",
    "combined_confidence",
    "merge_hits",
]

log = logging.getLogger("odqa.pipeline")


class QueryMode(str, Enum):
    BASELINE = "baseline"
    CONTENT_WORDS = "cw"
    CW_UNION = "cw-union"


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    decoder: DecoderConfig = DecoderConfig()
    #: keep this many best no-answer hits when nothing decodes to an answer
    min_results: int = Field(default=1, ge=0)
    max_parallel_extract: int = Field(default=4, ge=1)


def merge_hits(hit_lists: list[list[SearchHit]]) -> list[SearchHit]:
    """Union several result lists: best rank wins per URL, then re-rank.

    Hits are ordered by (original rank, source-list position) and
    re-ranked contiguously from 0; the merged list is capped at ten so
    ranks stay in the domain of the combined-confidence formula.
    """
    best: dict[str, tuple[int, int, SearchHit]] = {}
    for list_idx, hits in enumerate(hit_lists):
        for hit in hits:
            key = (hit.rank, list_idx)
            current = best.get(hit.url)
            if current is None or key < current[:2]:
                best[hit.url] = (hit.rank, list_idx, hit)
    ordered = sorted(best.values(), key=lambda entry: entry[:2])
    return [
        SearchHit(rank=new_rank, url=h.url, title=h.title, snippet=h.snippet)
        for new_rank, (_, _, h) in enumerate(ordered[:MAX_HITS])
    ]


class QAPipeline:
    """Immutable orchestration of the full answer flow.

    Safe to share across concurrent questions; the per-snippet
    extraction calls of one question run in a bounded thread pool.
    """

    def __init__(
        self,
        processor: QuestionProcessor,
        provider: SearchProvider,
        backend: InferenceBackend,
        excluded_verbs: frozenset[str],
        cfg: PipelineConfig | None = None,
    ):
        self.processor = processor
        self.provider = provider
        self.backend = backend
        self.excluded_verbs = excluded_verbs
        self.cfg = cfg or PipelineConfig()

    def build_queries(self, q: Question, mode: QueryMode) -> list[Query]:
        """Generate the query list for a mode, degrading to baseline
        when the question has no content words."""
        if mode is QueryMode.BASELINE:
            return [generate_baseline(q)]
        pq = self.processor.process(q)
        if mode is QueryMode.CONTENT_WORDS:
            try:
                return [generate_content_words(pq, self.excluded_verbs)]
            except NoContentWords:
                return [generate_baseline(q)]
        return generate_query_set(pq, self.excluded_verbs)

    def run_question(
        self, q: Question, mode: QueryMode = QueryMode.CW_UNION
    ) -> tuple[list[Query], list[RankedAnswer]]:
        """Answer a question, also returning the queries that were issued."""
        queries = self.build_queries(q, mode)

        hit_lists: list[list[SearchHit]] = []
        errors: list[OdqaError] = []
        for query in queries:
            try:
                hit_lists.append(self.provider.search(query))
            except OdqaError as exc:
                log.warning("search failed for query %r: %s", query.text, exc)
                errors.append(exc)
        if not hit_lists:
            raise SearchFailed(f"all {len(queries)} queries failed: {errors}")

        hits = merge_hits(hit_lists)
        if not hits:
            raise NoResults(f"no hits for question: {q.text!r}")

        workers = min(self.cfg.max_parallel_extract, len(hits))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            spans = list(pool.map(lambda h: self._extract_one(q, h), hits))

        ranked = [
            RankedAnswer.build(hit, span)
            for hit, span in zip(hits, spans)
            if span is not None
        ]
        ranked.sort(key=lambda ra: (-ra.combined, ra.hit.rank))
        answered = [ra for ra in ranked if not ra.answer.is_no_answer]
        if len(answered) < self.cfg.min_results:
            fillers = [ra for ra in ranked if ra.answer.is_no_answer]
            answered += fillers[: self.cfg.min_results - len(answered)]
            answered.sort(key=lambda ra: (-ra.combined, ra.hit.rank))
        return queries, answered

    def answer_question(
        self, q: Question, mode: QueryMode = QueryMode.CW_UNION
    ) -> list[RankedAnswer]:
        return self.run_question(q, mode)[1]

    def _extract_one(self, q: Question, hit: SearchHit) -> AnswerSpan | None:
        """Extract from one snippet; failures skip the snippet, not the question."""
        try:
            return extract(q, hit.snippet, self.backend, self.cfg.decoder)
        except OdqaError as exc:
            log.warning("extraction failed for %s: %s", hit.url, exc)
            return None
