"""Fallback tagging, the remote client, and the remote-then-fallback policy."""

import json
from pathlib import Path

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odqa.errors import NetworkError, ProtocolError
from odqa.models import Pos, Question, Source
from odqa.textproc import (
    QuestionProcessor,
    load_word_list,
    map_tag,
    process_fallback,
    process_remote,
)

TEPROLIN_FIXTURE = json.loads(
    (Path(__file__).parent / "data" / "teprolin_vremea.json").read_text(encoding="utf-8")
)


class TestFallback:
    def test_mall_example(self, function_words):
        """The flagship content/function split used by query generation."""
        q = Question(text="Am nevoie de certificatul verde pentru intrarea în mall?")
        pq = process_fallback(q, function_words)
        by_pos = {t.surface: t.pos for t in pq.tokens}
        assert {s for s, p in by_pos.items() if p is Pos.NOUN} == {
            "nevoie", "certificatul", "verde", "intrarea", "mall"
        }
        assert {s for s, p in by_pos.items() if p is Pos.FUNCTION} == {
            "Am", "de", "pentru", "în"
        }
        assert by_pos["?"] is Pos.PUNCT
        assert pq.source is Source.FALLBACK

    def test_numeral(self, function_words):
        pq = process_fallback(Question(text="2021"), function_words)
        assert [(t.surface, t.pos) for t in pq.tokens] == [("2021", Pos.NUM)]

    def test_punctuation_split(self, function_words):
        pq = process_fallback(Question(text="Covid?"), function_words)
        assert [(t.surface, t.pos) for t in pq.tokens] == [
            ("Covid", Pos.NOUN), ("?", Pos.PUNCT)
        ]

    def test_hyphenated_word_stays_one_token(self, function_words):
        pq = process_fallback(Question(text="Vara facem COVID-19?"), function_words)
        assert [t.surface for t in pq.tokens] == ["Vara", "facem", "COVID-19", "?"]
        assert pq.tokens[2].pos is Pos.NOUN  # digits inside a word are not a numeral

    def test_lemma_is_lowercased_surface(self, function_words):
        """The fallback does not really lemmatize, it only lowercases."""
        pq = process_fallback(Question(text="Vremea"), function_words)
        assert pq.tokens[0].lemma == "vremea"

    def test_lexicon_match_is_case_and_diacritic_insensitive(self):
        lexicon = load_word_list(["în"])
        for variant in ("în", "În", "in", "IN"):
            pq = process_fallback(Question(text=f"{variant} mall"), lexicon)
            assert pq.tokens[0].pos is Pos.FUNCTION, variant

    def test_determinism(self, function_words):
        q = Question(text="Câte doze de vaccin sunt necesare în 2021?")
        first = process_fallback(q, function_words)
        second = process_fallback(q, function_words)
        assert first.model_dump_json() == second.model_dump_json()

    @given(st.text(min_size=1, max_size=80))
    @settings(max_examples=200, deadline=None)
    def test_offsets_reconstruct_input(self, text):
        """Token spans always index back into the original question."""
        stripped = text.strip()
        if not stripped:
            return
        q = Question(text=text)
        pq = process_fallback(q, frozenset())
        for tok in pq.tokens:
            assert q.text[tok.start_char:tok.end_char] == tok.surface
        rebuilt = []
        prev = 0
        for tok in pq.tokens:
            rebuilt.append(q.text[prev:tok.start_char])
            rebuilt.append(tok.surface)
            prev = tok.end_char
        rebuilt.append(q.text[prev:])
        assert "".join(rebuilt) == q.text


class TestWordList:
    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("# comment\n\nîn  # inline\nde\n", encoding="utf-8")
        assert load_word_list(path) == {"in", "de"}

    def test_entries_are_folded(self):
        assert load_word_list(["Știință"]) == {"stiinta"}


class TestMapTag:
    @pytest.mark.parametrize("tag,expected", [
        ("Ncfsry", Pos.NOUN),
        ("Vmip3s", Pos.VERB),
        ("Afpfsrn", Pos.ADJ),
        ("Rgp", Pos.ADV),
        ("Mc", Pos.NUM),
        ("Spsa", Pos.FUNCTION),
        ("Z", Pos.PUNCT),
        ("NOUN", Pos.NOUN),
        ("AUX", Pos.VERB),
        ("DET", Pos.FUNCTION),
        ("PUNCT", Pos.PUNCT),
        ("", Pos.OTHER),
        ("??", Pos.OTHER),
    ])
    def test_mapping(self, tag, expected):
        assert map_tag(tag) is expected


def _transport(handler):
    return httpx.MockTransport(handler)


class TestRemote:
    def test_frozen_response_parses(self):
        """The recorded service response maps onto 5 annotated tokens."""
        def handler(request):
            assert request.method == "POST"
            assert b"text=" in request.read()
            return httpx.Response(200, json=TEPROLIN_FIXTURE)

        q = Question(text="Vremea caldă previne infectarea?")
        pq = process_remote(q, "http://tagger.local/process", transport=_transport(handler))
        assert pq.source is Source.REMOTE
        assert len(pq.tokens) == 5
        vremea = pq.tokens[0]
        assert (vremea.surface, vremea.lemma, vremea.pos) == ("Vremea", "vreme", Pos.NOUN)
        previne = pq.tokens[2]
        assert (previne.surface, previne.lemma, previne.pos) == ("previne", "preveni", Pos.VERB)
        assert pq.tokens[4].pos is Pos.PUNCT

    def test_network_error_on_connect_failure(self):
        def handler(request):
            raise httpx.ConnectError("refused")

        with pytest.raises(NetworkError):
            process_remote(
                Question(text="Covid?"), "http://down.local", transport=_transport(handler)
            )

    def test_protocol_error_on_garbage(self):
        def handler(request):
            return httpx.Response(200, text="not json")

        with pytest.raises(ProtocolError):
            process_remote(
                Question(text="Covid?"), "http://bad.local", transport=_transport(handler)
            )

    def test_protocol_error_on_unmappable_tokens(self):
        payload = {"teprolin-result": {"tokenized": [[
            {"_wordform": "absent", "_lemma": "absent", "_msd": "Afp"}
        ]]}}

        def handler(request):
            return httpx.Response(200, json=payload)

        with pytest.raises(ProtocolError):
            process_remote(
                Question(text="Covid?"), "http://odd.local", transport=_transport(handler)
            )

    def test_extra_fields_tolerated(self):
        payload = {"teprolin-result": {"tokenized": [[
            {"_wordform": "Covid", "_lemma": "covid", "_msd": "Np", "_extra": 1,
             "_dephead": 0, "_deprel": "root", "chunk": "Np#1"},
            {"_wordform": "?", "_lemma": "?", "_msd": "Z"},
        ]]}}

        def handler(request):
            return httpx.Response(200, json=payload)

        pq = process_remote(
            Question(text="Covid?"), "http://ok.local", transport=_transport(handler)
        )
        assert [t.pos for t in pq.tokens] == [Pos.NOUN, Pos.PUNCT]


class TestProcessorPolicy:
    def test_retries_once_then_falls_back(self, function_words):
        calls = []

        def handler(request):
            calls.append(1)
            raise httpx.ConnectTimeout("slow")

        processor = QuestionProcessor(
            lexicon=function_words,
            endpoint="http://down.local",
            transport=_transport(handler),
        )
        pq = processor.process(Question(text="Covid?"))
        assert pq.source is Source.FALLBACK
        assert len(calls) == 2  # initial attempt + one retry

    def test_no_retry_on_protocol_error(self, function_words):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(200, text="garbage")

        processor = QuestionProcessor(
            lexicon=function_words,
            endpoint="http://bad.local",
            transport=_transport(handler),
        )
        pq = processor.process(Question(text="Covid?"))
        assert pq.source is Source.FALLBACK
        assert len(calls) == 1

    def test_offline_processor_never_dials(self, function_words):
        processor = QuestionProcessor(lexicon=function_words, endpoint=None)
        pq = processor.process(Question(text="Covid?"))
        assert pq.source is Source.FALLBACK

    def test_remote_used_when_healthy(self, function_words):
        def handler(request):
            return httpx.Response(200, json=TEPROLIN_FIXTURE)

        processor = QuestionProcessor(
            lexicon=function_words,
            endpoint="http://tagger.local/process",
            transport=_transport(handler),
        )
        pq = processor.process(Question(text="Vremea caldă previne infectarea?"))
        assert pq.source is Source.REMOTE
