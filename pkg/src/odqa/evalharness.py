"""Retrieval and answer-quality metrics over an annotated test set.

Per question the harness runs the pipeline, scores document retrieval by
reciprocal rank against the annotated gold URLs, and scores the answer
highlight (exact match plus character-overlap F1) against the gold
ranges of the best-ranked retrieved gold document. Questions whose gold
documents were not retrieved (or that have none) score zero on every
metric; aggregates are reported over all questions, with the covered
subset's denominators exposed alongside.
"""

from __future__ import annotations

import json
import logging
import unicodedata
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence
from urllib.parse import urlsplit, urlunsplit

from pydantic import BaseModel, ConfigDict, model_validator

from .errors import DomainError, OdqaError
from .models import AnswerSpan, Question, RankedAnswer
from .pipeline import QAPipeline, QueryMode
from .querygen import fold_diacritics

log = logging.getLogger("odqa.eval")


class CharRange(BaseModel):
    """Half-open [start, end) character range, scalar-value indices."""

    model_config = ConfigDict(frozen=True)

    start: int
    end: int

    @model_validator(mode="after")
    def _check(self) -> "CharRange":
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid range [{self.start}, {self.end})")
        return self

    def __len__(self) -> int:
        return self.end - self.start


class GoldDoc(BaseModel):
    url: str
    snippet: str
    answers: tuple[CharRange, ...]

    @model_validator(mode="after")
    def _ranges_fit(self) -> "GoldDoc":
        for r in self.answers:
            if r.end > len(self.snippet):
                raise ValueError(f"gold range {r} exceeds snippet length")
        return self


class GoldQuestion(BaseModel):
    question: str
    #: empty when no suitable documents exist for this question
    gold_docs: tuple[GoldDoc, ...] = ()


def load_testset(path: str | Path) -> list[GoldQuestion]:
    """Read the JSON test set: [{question, gold_docs: [{url, snippet, answers}]}]."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return [GoldQuestion.model_validate(item) for item in raw]


def normalize_url(url: str) -> str:
    """Canonical URL for gold matching: lowercase scheme and host,
    drop the fragment and any trailing slash."""
    parts = urlsplit(url.strip())
    return urlunsplit(
        (
            parts.scheme.lower(),
            parts.netloc.lower(),
            parts.path.rstrip("/"),
            parts.query,
            "",
        )
    )


def reciprocal_rank(results: Sequence[RankedAnswer], gold_urls: Iterable[str]) -> float:
    """1 / (1-based position of the first gold-URL result); 0 on miss."""
    gold = {normalize_url(u) for u in gold_urls}
    for position, ra in enumerate(results, start=1):
        if normalize_url(ra.hit.url) in gold:
            return 1.0 / position
    return 0.0


def exact_match(pred: AnswerSpan, golds: Sequence[CharRange]) -> bool:
    """True iff the predicted character range equals any gold range."""
    if pred.is_no_answer:
        return False
    return any(pred.start_char == g.start and pred.end_char == g.end for g in golds)


def f1_char_overlap(pred: CharRange, golds: Sequence[CharRange]) -> float:
    """Best F1 of overlapped characters between pred and any gold range."""
    if len(pred) == 0:
        raise DomainError("predicted range is empty")
    best = 0.0
    for gold in golds:
        overlap = min(pred.end, gold.end) - max(pred.start, gold.start)
        if overlap <= 0:
            continue
        precision = overlap / len(pred)
        recall = overlap / len(gold)
        best = max(best, 2 * precision * recall / (precision + recall))
    return best


def _normalize_answer_text(s: str) -> list[str]:
    s = fold_diacritics(s.lower())
    s = "".join(ch for ch in s if not unicodedata.category(ch).startswith("P"))
    return s.split()


def f1_token(pred_text: str, gold_text: str) -> float:
    """Token-multiset F1 on normalized text (lowercased, punctuation
    stripped, diacritics folded). Two empty strings match perfectly."""
    pred_tokens = _normalize_answer_text(pred_text)
    gold_tokens = _normalize_answer_text(gold_text)
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    common = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    if common == 0:
        return 0.0
    precision = common / len(pred_tokens)
    recall = common / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


class QuestionResult(BaseModel):
    question: str
    rr: float
    exact: bool
    f1: float
    covered: bool
    error: str | None = None


class EvalReport(BaseModel):
    """Aggregated metrics, all stored as fractions in [0, 1]."""

    label: str = ""
    mrr: float
    exact_pct: float
    f1_pct: float
    coverage_pct: float
    exact_pct_covered: float
    f1_pct_covered: float
    n_questions: int
    n_covered: int
    per_question: list[QuestionResult]


def run_eval(
    testset: Sequence[GoldQuestion],
    pipeline: QAPipeline,
    only_top1: bool = False,
    mode: QueryMode = QueryMode.CW_UNION,
    label: str = "",
) -> EvalReport:
    """Run the pipeline over every gold question and aggregate metrics.

    Exact/F1 are scored against the highest-ranked result whose URL is
    annotated gold; with only_top1 the candidate must additionally be
    the pipeline's #1 result. Per-question pipeline errors land in the
    breakdown (scoring zero) without aborting the run.
    """
    rows = []
    for gq in testset:
        rows.append(_eval_one(gq, pipeline, only_top1, mode))
    n = len(rows)
    covered = [r for r in rows if r.covered]
    return EvalReport(
        label=label or mode.value,
        mrr=_mean([r.rr for r in rows]),
        exact_pct=_mean([float(r.exact) for r in rows]),
        f1_pct=_mean([r.f1 for r in rows]),
        coverage_pct=len(covered) / n if n else 0.0,
        exact_pct_covered=_mean([float(r.exact) for r in covered]),
        f1_pct_covered=_mean([r.f1 for r in covered]),
        n_questions=n,
        n_covered=len(covered),
        per_question=rows,
    )


def _eval_one(
    gq: GoldQuestion, pipeline: QAPipeline, only_top1: bool, mode: QueryMode
) -> QuestionResult:
    try:
        results = pipeline.answer_question(Question(text=gq.question), mode)
    except OdqaError as exc:
        log.warning("pipeline failed on %r: %s", gq.question, exc)
        return QuestionResult(
            question=gq.question, rr=0.0, exact=False, f1=0.0, covered=False,
            error=str(exc),
        )
    by_url = {normalize_url(d.url): d for d in gq.gold_docs}
    rr = reciprocal_rank(results, by_url.keys())

    candidates = results[:1] if only_top1 else results
    exact, f1 = False, 0.0
    for ra in candidates:
        doc = by_url.get(normalize_url(ra.hit.url))
        if doc is None:
            continue
        pred = ra.answer
        if not pred.is_no_answer:
            exact = exact_match(pred, doc.answers)
            f1 = f1_char_overlap(
                CharRange(start=pred.start_char, end=pred.end_char), doc.answers
            )
        break
    return QuestionResult(
        question=gq.question, rr=rr, exact=exact, f1=f1, covered=rr > 0
    )


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def render_report(reports: Sequence[EvalReport] | EvalReport) -> str:
    """Plain-text metric table, one row per evaluated configuration."""
    if isinstance(reports, EvalReport):
        reports = [reports]
    width = max([len("Query gen.")] + [len(r.label) for r in reports])
    lines = [
        f"{'Query gen.':<{width}}  {'MRR':>6}  {'Exact %':>8}  {'F1 %':>6}",
    ]
    for r in reports:
        lines.append(
            f"{r.label:<{width}}  {r.mrr:>6.4f}  {100 * r.exact_pct:>8.2f}  "
            f"{100 * r.f1_pct:>6.2f}"
        )
    head = reports[0]
    lines.append("")
    lines.append(
        f"questions: {head.n_questions}  covered: {head.n_covered} "
        f"({100 * head.coverage_pct:.2f}%)"
    )
    return "\n".join(lines)
