"""Wire Settings into a ready-to-use QAPipeline plus its metadata."""

from __future__ import annotations

from pathlib import Path

from .backends import RemoteInferenceBackend, StubInferenceBackend
from .config import Settings
from .errors import ConfigError
from .extractor import DecoderConfig, InferenceBackend
from .pipeline import PipelineConfig, QAPipeline
from .search import (
    FixtureSearchProvider,
    LiveSearchProvider,
    SearchProvider,
    SearchProviderConfig,
)
from .textproc import (
    QuestionProcessor,
    default_excluded_verbs,
    default_function_words,
    load_word_list,
)

STUB_PROGRAMS_FILE = "answers.json"
FIXTURE_SEARCH_DIR = "search"


class QAEngine:
    """A configured pipeline with the component handles the service needs."""

    def __init__(
        self,
        pipeline: QAPipeline,
        provider: SearchProvider,
        backend: InferenceBackend,
        models: list[str],
    ):
        self.pipeline = pipeline
        self.provider = provider
        self.backend = backend
        self.models = models

    def ready(self) -> bool:
        return self.provider.ready() and self.backend.ready()


def build_engine(settings: Settings) -> QAEngine:
    """Assemble the engine: offline (fixtures + stub) or live components."""
    function_words = (
        load_word_list(settings.function_words_file)
        if settings.function_words_file
        else default_function_words()
    )
    excluded_verbs = (
        load_word_list(settings.excluded_verbs_file)
        if settings.excluded_verbs_file
        else default_excluded_verbs()
    )
    provider: SearchProvider
    backend: InferenceBackend
    if settings.offline_dir:
        base = Path(settings.offline_dir)
        if not base.is_dir():
            raise ConfigError(f"offline directory not found: {base}")
        provider = FixtureSearchProvider(base / FIXTURE_SEARCH_DIR, count=settings.count)
        programs = base / STUB_PROGRAMS_FILE
        if programs.is_file():
            backend = StubInferenceBackend.from_file(
                programs, model_id=settings.models[0]
            )
        else:
            backend = StubInferenceBackend(model_id=settings.models[0])
        processor = QuestionProcessor(lexicon=function_words, endpoint=None)
    else:
        if not settings.infer_endpoint:
            raise ConfigError("infer_endpoint is required outside offline mode")
        provider = LiveSearchProvider(
            SearchProviderConfig(
                endpoint=settings.search_endpoint,
                api_key=settings.search_api_key,
                market=settings.market,
                count=settings.count,
                timeout_ms=settings.timeout_ms,
                max_in_flight=settings.max_in_flight_search,
            )
        )
        backend = RemoteInferenceBackend(
            settings.infer_endpoint,
            model_id=settings.models[0],
            timeout_ms=settings.timeout_ms,
        )
        processor = QuestionProcessor(
            lexicon=function_words,
            endpoint=settings.teprolin_endpoint,
        )
    pipeline = QAPipeline(
        processor=processor,
        provider=provider,
        backend=backend,
        excluded_verbs=excluded_verbs,
        cfg=PipelineConfig(
            decoder=DecoderConfig(
                max_span_tokens=settings.max_span_tokens,
                no_answer_threshold=settings.no_answer_threshold,
                max_context_chars=settings.max_context_chars,
            ),
            min_results=settings.min_results,
            max_parallel_extract=settings.max_parallel_extract,
        ),
    )
    return QAEngine(
        pipeline=pipeline,
        provider=provider,
        backend=backend,
        models=list(settings.models),
    )
