"""Corpus parsing, template expansion, and SQuAD 2.0 emission."""

import json

import pytest

from odqa.dataset import (
    EXPANSION_RULE,
    DatasetEntry,
    Label,
    dev_count,
    expand_entry,
    expand_template,
    format_entries,
    parse_entries,
    scan_brackets,
    split_and_emit,
    template_group_sizes,
    validate_squad_file,
)
from odqa.errors import BracketError, ParseError

WORKED_EXAMPLE = """L: covid-spread
Q: Vremea caldă [previne/ne ferește de/ne protejează de] infectarea cu Coronavirus?
Q: Vara putem să [facem/ne îmbolnăvim de] COVID-19?
Q: Dispare covidul [pe vreme caldă/vara/la soare/la temperaturi mari]?
A: Datele existente arată că [infecția poate fi dobândită în toate zonele climatice, inclusiv în cele calde].
"""


class TestParse:
    def test_worked_example(self):
        entries = parse_entries(WORKED_EXAMPLE)
        assert len(entries) == 1
        entry = entries[0]
        assert entry.label is Label.COVID_SPREAD
        assert len(entry.question_templates) == 3
        assert [template_group_sizes(t) for t in entry.question_templates] == [
            [3], [2], [4]
        ]
        _, text, _ = entry.answer()
        assert text == (
            "infecția poate fi dobândită în toate zonele climatice, "
            "inclusiv în cele calde"
        )

    def test_multiple_blocks(self):
        src = WORKED_EXAMPLE + "\nL: covid-testing\nQ: Unde mă testez?\nA: La [centrele de testare].\n"
        entries = parse_entries(src)
        assert [e.label for e in entries] == [Label.COVID_SPREAD, Label.COVID_TESTING]

    def test_missing_answer_line(self):
        src = "L: covid-others\nQ: Ceva?\n"
        with pytest.raises(ParseError) as err:
            parse_entries(src)
        assert "A:" in str(err.value)
        assert err.value.line == 1

    def test_unknown_label(self):
        src = "L: covid-weather\nQ: Ceva?\nA: Un [răspuns].\n"
        with pytest.raises(ParseError) as err:
            parse_entries(src)
        assert "covid-weather" in str(err.value)

    def test_zero_questions(self):
        src = "L: covid-others\nA: Un [răspuns].\n"
        with pytest.raises(ParseError):
            parse_entries(src)

    def test_stray_line_reports_number(self):
        src = "L: covid-others\nQ: Ceva?\nX: ce e asta\nA: Un [răspuns].\n"
        with pytest.raises(ParseError) as err:
            parse_entries(src)
        assert err.value.line == 3

    def test_unbalanced_brackets(self):
        src = "L: covid-others\nQ: Ceva [a/b?\nA: Un [răspuns].\n"
        with pytest.raises(ParseError):
            parse_entries(src)

    def test_nested_brackets_rejected(self):
        with pytest.raises(BracketError):
            scan_brackets("a [b [c] d] e")

    def test_answer_must_mark_exactly_one_span(self):
        for answer in ("Fără marcaj.", "Un [a] și [b]."):
            src = f"L: covid-others\nQ: Ceva?\nA: {answer}\n"
            with pytest.raises(ParseError):
                parse_entries(src)

    def test_round_trip(self):
        entries = parse_entries(WORKED_EXAMPLE)
        assert parse_entries(format_entries(entries)) == entries


class TestExpandTemplate:
    def test_two_alternatives(self):
        out = expand_template("Vara putem să [facem/ne îmbolnăvim de] COVID-19?")
        assert out == [
            "Vara putem să facem COVID-19?",
            "Vara putem să ne îmbolnăvim de COVID-19?",
        ]

    def test_no_groups_is_identity(self):
        assert expand_template("plain question?") == ["plain question?"]

    def test_product_in_lexicographic_group_order(self):
        assert expand_template("a [x/y] b [1/2/3]") == [
            "a x b 1", "a x b 2", "a x b 3",
            "a y b 1", "a y b 2", "a y b 3",
        ]

    def test_alternatives_trimmed(self):
        assert expand_template("[ a / b ]") == ["a", "b"]

    def test_empty_alternative_rejected(self):
        with pytest.raises(BracketError):
            expand_template("[a/]")


class TestExpandEntry:
    def test_worked_example_per_template_sum(self):
        entry = parse_entries(WORKED_EXAMPLE)[0]
        pairs = expand_entry(entry)
        assert len(pairs) == 3 + 2 + 4  # sum of per-template products

    def test_single_plain_template(self):
        entry = DatasetEntry(
            label=Label.COVID_OTHERS,
            question_templates=("Ceva?",),
            answer_paragraph="Un [răspuns] scurt.",
        )
        assert len(expand_entry(entry)) == 1

    def test_offset_arithmetic(self):
        entry = DatasetEntry(
            label=Label.COVID_OTHERS,
            question_templates=("Q?",),
            answer_paragraph="X [Y] Z",
        )
        pair = expand_entry(entry)[0]
        assert pair.context == "X Y Z"
        assert pair.answer_text == "Y"
        assert pair.answer_start == 2

    def test_answer_anchors_in_context(self):
        for paragraph in ("X [Y] Z", "[Început] de frază.", "Final de [frază].",
                          "Spații [ în jur ] contează."):
            entry = DatasetEntry(
                label=Label.COVID_OTHERS,
                question_templates=("Q?",),
                answer_paragraph=paragraph,
            )
            pair = expand_entry(entry)[0]
            sliced = pair.context[pair.answer_start:pair.answer_start + len(pair.answer_text)]
            assert sliced == pair.answer_text


class TestSplit:
    @pytest.mark.parametrize("n,expected", [(1, 1), (5, 1), (10, 1), (24, 2), (100, 10)])
    def test_dev_count_rule(self, n, expected):
        assert dev_count(n) == expected

    def _entries(self):
        return parse_entries(
            WORKED_EXAMPLE
            + "\nL: covid-testing\nQ: Unde mă [testez/verific]?\nA: La [centrele de testare].\n"
        )

    def test_split_counts_and_validation(self, tmp_path):
        report = split_and_emit(
            self._entries(), seed=42,
            out_train=tmp_path / "train.json", out_dev=tmp_path / "dev.json",
        )
        assert report.total_pairs == 9 + 2
        assert report.dev_pairs == 1 + 1  # max(1, floor(n/10)) each
        assert report.train_pairs == report.total_pairs - report.dev_pairs
        assert report.expansion_rule == EXPANSION_RULE
        assert [e.formulations for e in report.per_entry] == [9, 2]
        assert [e.group_sizes for e in report.per_entry] == [[[3], [2], [4]], [[2]]]

        train = validate_squad_file(tmp_path / "train.json")
        dev = validate_squad_file(tmp_path / "dev.json")
        assert train.version == "v2.0" and dev.version == "v2.0"
        n_qas = sum(
            len(p.qas) for f in (train, dev) for a in f.data for p in a.paragraphs
        )
        assert n_qas == report.total_pairs

    def test_emitted_offsets_all_consistent(self, tmp_path):
        split_and_emit(self._entries(), 7, tmp_path / "t.json", tmp_path / "d.json")
        for name in ("t.json", "d.json"):
            data = json.loads((tmp_path / name).read_text(encoding="utf-8"))
            checked = 0
            for article in data["data"]:
                for paragraph in article["paragraphs"]:
                    for qa in paragraph["qas"]:
                        assert qa["is_impossible"] is False
                        for ans in qa["answers"]:
                            start = ans["answer_start"]
                            assert (
                                paragraph["context"][start:start + len(ans["text"])]
                                == ans["text"]
                            )
                            checked += 1
            assert checked > 0

    def test_same_seed_is_byte_identical(self, tmp_path):
        for run in ("a", "b"):
            split_and_emit(
                self._entries(), seed=99,
                out_train=tmp_path / f"train_{run}.json",
                out_dev=tmp_path / f"dev_{run}.json",
            )
        assert (tmp_path / "train_a.json").read_bytes() == (tmp_path / "train_b.json").read_bytes()
        assert (tmp_path / "dev_a.json").read_bytes() == (tmp_path / "dev_b.json").read_bytes()

    def test_different_seeds_same_counts(self, tmp_path):
        reports = [
            split_and_emit(self._entries(), seed, tmp_path / f"t{seed}.json",
                           tmp_path / f"d{seed}.json")
            for seed in (1, 2)
        ]
        assert [e.dev for e in reports[0].per_entry] == [e.dev for e in reports[1].per_entry]

    def test_dev_gets_at_least_one_per_entry(self, tmp_path):
        report = split_and_emit(self._entries(), 5, tmp_path / "t.json", tmp_path / "d.json")
        assert all(e.dev >= 1 for e in report.per_entry)
        assert report.dev_pairs >= report.entries
