"""Bracketed question-answer corpus parsing and SQuAD 2.0 emission.

Corpus format: blank-line-separated blocks of

    L: <label>
    Q: <question template, may contain [alt1/alt2/...] groups>
    Q: ...
    A: <answer paragraph with exactly one [bracket-marked] answer span>

Each template expands to the Cartesian product of its own bracket
groups; an entry's total formulations is the SUM of its templates'
products. Bracket groups never combine across templates: templates are
distinct sentences, and splicing alternatives between different
sentences would produce ungrammatical text. The expansion rule is
restated in every split report so downstream counts are auditable.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from enum import Enum
from itertools import product
from pathlib import Path

from pydantic import BaseModel, ConfigDict, model_validator

from .errors import BracketError, DomainError, ParseError

EXPANSION_RULE = (
    "formulations per entry = sum over templates of the product of "
    "bracket-group sizes within that template; groups never combine "
    "across templates"
)


class Label(str, Enum):
    COVID_SPREAD = "covid-spread"
    COVID_SYMPTOMS = "covid-symptoms"
    COVID_TREATMENT = "covid-treatment"
    COVID_VACCINATION = "covid-vaccination"
    COVID_LOGISTICS = "covid-logistics"
    COVID_PASSPORT = "covid-passport"
    COVID_TESTING = "covid-testing"
    COVID_OTHERS = "covid-others"


def scan_brackets(text: str) -> list[tuple[int, int, str]]:
    """Locate top-level [ ... ] groups as (start, end, inner) triples.

    Raises BracketError on unbalanced or nested brackets; the corpus
    format defines neither and silently mis-parsing them is worse.
    """
    groups = []
    open_at: int | None = None
    for idx, ch in enumerate(text):
        if ch == "[":
            if open_at is not None:
                raise BracketError(f"nested '[' at position {idx}")
            open_at = idx
        elif ch == "]":
            if open_at is None:
                raise BracketError(f"unmatched ']' at position {idx}")
            groups.append((open_at, idx + 1, text[open_at + 1 : idx]))
            open_at = None
    if open_at is not None:
        raise BracketError(f"unclosed '[' at position {open_at}")
    return groups


def _group_alternatives(inner: str) -> list[str]:
    alts = [a.strip() for a in inner.split("/")]
    if not alts or any(not a for a in alts):
        raise BracketError(f"bracket group [{inner}] has an empty alternative")
    return alts


def template_group_sizes(template: str) -> list[int]:
    return [len(_group_alternatives(inner)) for _, _, inner in scan_brackets(template)]


def expand_template(template: str) -> list[str]:
    """All formulations of one template: the product of its bracket groups.

    A template with no groups yields itself. Groups expand left to
    right with alternatives in listed order, so the output order is the
    lexicographic order of alternative choices.
    """
    groups = scan_brackets(template)
    if not groups:
        return [template]
    alternative_sets = [_group_alternatives(inner) for _, _, inner in groups]
    results = []
    for combo in product(*alternative_sets):
        parts = []
        cursor = 0
        for (start, end, _), alt in zip(groups, combo):
            parts.append(template[cursor:start])
            parts.append(alt)
            cursor = end
        parts.append(template[cursor:])
        results.append("".join(parts))
    return results


class DatasetEntry(BaseModel):
    """One corpus block: a label, question templates, and the answer paragraph."""

    model_config = ConfigDict(frozen=True)

    label: Label
    question_templates: tuple[str, ...]
    answer_paragraph: str

    @model_validator(mode="after")
    def _check(self) -> "DatasetEntry":
        if not self.question_templates:
            raise ValueError("entry has no question templates")
        for template in self.question_templates:
            for _, _, inner in scan_brackets(template):
                _group_alternatives(inner)
        answer_groups = scan_brackets(self.answer_paragraph)
        if len(answer_groups) != 1:
            raise ValueError(
                f"answer paragraph must mark exactly one span, found {len(answer_groups)}"
            )
        if not answer_groups[0][2].strip():
            raise ValueError("marked answer span is empty")
        return self

    def answer(self) -> tuple[str, str, int]:
        """(context, answer_text, answer_start) with brackets stripped."""
        start, end, inner = scan_brackets(self.answer_paragraph)[0]
        prefix = self.answer_paragraph[:start]
        suffix = self.answer_paragraph[end:]
        context = prefix + inner + suffix
        leading_ws = len(inner) - len(inner.lstrip())
        text = inner.strip()
        return context, text, len(prefix) + leading_ws


class QAPair(BaseModel):
    """One expanded formulation with its answer anchored in the context."""

    model_config = ConfigDict(frozen=True)

    question: str
    context: str
    answer_text: str
    answer_start: int


def expand_entry(entry: DatasetEntry) -> list[QAPair]:
    """All formulations of all templates, each paired with the entry's answer."""
    context, text, start = entry.answer()
    return [
        QAPair(question=question, context=context, answer_text=text, answer_start=start)
        for template in entry.question_templates
        for question in expand_template(template)
    ]


def parse_entries(src: str) -> list[DatasetEntry]:
    """Parse the corpus text into validated entries.

    Raises ParseError (with a line number) on stray lines, missing or
    duplicate L:/A: lines, zero Q: lines, unknown labels, and bad
    bracket structure.
    """
    entries = []
    block: list[tuple[int, str]] = []
    for line_no, raw in enumerate(src.splitlines() + [""], start=1):
        if raw.strip():
            block.append((line_no, raw))
            continue
        if block:
            entries.append(_parse_block(block))
            block = []
    return entries


def _parse_block(block: list[tuple[int, str]]) -> DatasetEntry:
    first_line = block[0][0]
    label: str | None = None
    templates: list[str] = []
    answer: str | None = None
    for line_no, raw in block:
        if raw.startswith("L:"):
            if label is not None:
                raise ParseError("duplicate L: line", line_no)
            label = raw[2:].strip()
        elif raw.startswith("Q:"):
            templates.append(raw[2:].strip())
        elif raw.startswith("A:"):
            if answer is not None:
                raise ParseError("duplicate A: line", line_no)
            answer = raw[2:].strip()
        else:
            raise ParseError(f"unrecognized line {raw!r}", line_no)
    if label is None:
        raise ParseError("block has no L: line", first_line)
    if not templates:
        raise ParseError("block has no Q: lines", first_line)
    if answer is None:
        raise ParseError("block has no A: line", first_line)
    try:
        label_value = Label(label)
    except ValueError:
        raise ParseError(f"unknown label {label!r}", first_line) from None
    try:
        return DatasetEntry(
            label=label_value,
            question_templates=tuple(templates),
            answer_paragraph=answer,
        )
    except (BracketError, ValueError) as exc:
        raise ParseError(str(exc), first_line) from exc


def format_entries(entries: list[DatasetEntry]) -> str:
    """Serialize entries back to the canonical corpus text (parse round-trips)."""
    blocks = []
    for entry in entries:
        lines = [f"L: {entry.label.value}"]
        lines += [f"Q: {t}" for t in entry.question_templates]
        lines.append(f"A: {entry.answer_paragraph}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


class SquadAnswer(BaseModel):
    text: str
    answer_start: int


class SquadQA(BaseModel):
    id: str
    question: str
    is_impossible: bool = False
    answers: list[SquadAnswer]


class SquadParagraph(BaseModel):
    context: str
    qas: list[SquadQA]

    @model_validator(mode="after")
    def _answers_anchor(self) -> "SquadParagraph":
        for qa in self.qas:
            for ans in qa.answers:
                sliced = self.context[ans.answer_start : ans.answer_start + len(ans.text)]
                if sliced != ans.text:
                    raise ValueError(
                        f"answer {ans.text!r} is not at offset {ans.answer_start}"
                    )
        return self


class SquadArticle(BaseModel):
    title: str
    paragraphs: list[SquadParagraph]


class SquadFile(BaseModel):
    version: str = "v2.0"
    data: list[SquadArticle]

    @model_validator(mode="after")
    def _version_tag(self) -> "SquadFile":
        if self.version != "v2.0":
            raise ValueError(f"unsupported version tag {self.version!r}")
        return self


def validate_squad_file(path: str | Path) -> SquadFile:
    """Re-read an emitted file and re-check every answer offset."""
    return SquadFile.model_validate_json(Path(path).read_text(encoding="utf-8"))


class EntryReport(BaseModel):
    label: Label
    templates: int
    group_sizes: list[list[int]]
    formulations: int
    dev: int


class SplitReport(BaseModel):
    seed: int
    dev_ratio: float
    expansion_rule: str = EXPANSION_RULE
    entries: int
    total_pairs: int
    train_pairs: int
    dev_pairs: int
    per_entry: list[EntryReport]


def dev_count(n_formulations: int, dev_ratio: float = 0.1) -> int:
    """Dev formulations per entry: max(1, floor(n * ratio)).

    Every entry keeps at least one formulation for the dev set even
    when a tenth of its formulations rounds down to zero.
    """
    return max(1, math.floor(n_formulations * dev_ratio))


def split_and_emit(
    entries: list[DatasetEntry],
    seed: int,
    out_train: str | Path,
    out_dev: str | Path,
    dev_ratio: float = 0.1,
) -> SplitReport:
    """Expand entries, split per entry, and write SQuAD 2.0 train/dev files.

    The dev picks are drawn uniformly per entry from a generator seeded
    once, so the same seed reproduces the same files byte for byte.
    Offsets in both emitted files are re-validated after writing.
    """
    if not entries:
        raise DomainError("no entries to split")
    rng = random.Random(seed)
    train_articles, dev_articles, per_entry = [], [], []
    total = train_total = dev_total = 0
    for entry_idx, entry in enumerate(entries):
        pairs = expand_entry(entry)
        n_dev = dev_count(len(pairs), dev_ratio)
        dev_picks = set(rng.sample(range(len(pairs)), n_dev))
        splits = {True: [], False: []}
        for pair_idx, pair in enumerate(pairs):
            qa = SquadQA(
                id=hashlib.sha1(f"{entry_idx}:{pair_idx}".encode()).hexdigest()[:16],
                question=pair.question,
                answers=[
                    SquadAnswer(text=pair.answer_text, answer_start=pair.answer_start)
                ],
            )
            splits[pair_idx in dev_picks].append(qa)
        title = f"{entry.label.value}-{entry_idx:04d}"
        context = pairs[0].context
        for is_dev, qas in splits.items():
            if qas:
                article = SquadArticle(
                    title=title,
                    paragraphs=[SquadParagraph(context=context, qas=qas)],
                )
                (dev_articles if is_dev else train_articles).append(article)
        per_entry.append(
            EntryReport(
                label=entry.label,
                templates=len(entry.question_templates),
                group_sizes=[template_group_sizes(t) for t in entry.question_templates],
                formulations=len(pairs),
                dev=n_dev,
            )
        )
        total += len(pairs)
        dev_total += n_dev
        train_total += len(pairs) - n_dev

    _write_squad(out_train, train_articles)
    _write_squad(out_dev, dev_articles)
    validate_squad_file(out_train)
    validate_squad_file(out_dev)
    return SplitReport(
        seed=seed,
        dev_ratio=dev_ratio,
        entries=len(entries),
        total_pairs=total,
        train_pairs=train_total,
        dev_pairs=dev_total,
        per_entry=per_entry,
    )


def _write_squad(path: str | Path, articles: list[SquadArticle]) -> None:
    squad = SquadFile(data=articles)
    Path(path).write_text(
        json.dumps(squad.model_dump(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
