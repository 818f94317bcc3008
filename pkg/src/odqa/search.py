"""Search providers: a live web-search API client and a fixture player.

Both return at most ten hits ranked 0..n-1 in provider order. The
fixture provider replays recorded result files keyed by a normalized
query string, so offline runs are bit-for-bit reproducible; gold answer
offsets index into the recorded snippets, which therefore must be
preserved exactly.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from pathlib import Path
from typing import Protocol

import httpx
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import (
    AuthError,
    FixtureFormatError,
    NetworkError,
    ProtocolError,
    QuotaError,
)
from .models import MAX_HITS, SearchHit, validate_result_set
from .querygen import Query, fold_diacritics

log = logging.getLogger("odqa.search")

# Bold highlighting inserted by the search engine around matched terms:
# HTML tags or the private-use delimiter pair some APIs emit instead.
_MARKUP_RE = re.compile(r"</?(?:b|strong)>", re.IGNORECASE)
_DECORATION_CHARS = dict.fromkeys((0xE000, 0xE001))


class SearchProvider(Protocol):
    def search(self, query: Query) -> list[SearchHit]: ...

    def ready(self) -> bool: ...


class SearchProviderConfig(BaseModel):
    """Connection settings for the live web-search API."""

    model_config = ConfigDict(frozen=True)

    endpoint: str
    api_key: str = Field(repr=False, default="")
    market: str = "ro-RO"
    count: int = MAX_HITS
    timeout_ms: int = 5000
    max_in_flight: int = 2

    @field_validator("count")
    @classmethod
    def _count_range(cls, v: int) -> int:
        if not (1 <= v <= MAX_HITS):
            raise ValueError(f"count must be within [1, {MAX_HITS}], got {v}")
        return v


def strip_markup(snippet: str) -> str:
    """Remove provider bold-highlighting from a snippet."""
    return _MARKUP_RE.sub("", snippet).translate(_DECORATION_CHARS)


def normalize_query(text: str) -> str:
    """Fixture lookup key: diacritic-fold, lowercase, collapse whitespace.

    Stable across the diacritic-bearing and diacritic-free variants of
    the same content-word query.
    """
    return " ".join(fold_diacritics(text.casefold()).split())


class LiveSearchProvider:
    """Client for a web-search JSON API (Bing-compatible wire format).

    GET {endpoint}?q=...&mkt=...&count=... with the subscription key in
    the Ocp-Apim-Subscription-Key header; hits are read from
    webPages.value[*].{url,name,snippet}. Retries once on network
    failure, never on quota exhaustion. A semaphore caps in-flight
    requests to respect provider rate limits.
    """

    def __init__(
        self,
        cfg: SearchProviderConfig,
        transport: httpx.BaseTransport | None = None,
    ):
        self.cfg = cfg
        self.transport = transport
        self._gate = threading.BoundedSemaphore(cfg.max_in_flight)

    def ready(self) -> bool:
        return bool(self.cfg.api_key) and bool(self.cfg.endpoint)

    def search(self, query: Query) -> list[SearchHit]:
        if not self.cfg.api_key:
            raise AuthError("search API key is not configured")
        resp = self._request(query.text)
        if resp.status_code in (401, 403):
            raise AuthError(f"search API rejected credentials ({resp.status_code})")
        if resp.status_code == 429:
            raise QuotaError("search API quota exhausted (429)")
        if resp.status_code != 200:
            raise ProtocolError(f"search API returned {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ProtocolError(f"search response is not JSON: {exc}") from exc
        return self._parse_hits(payload)

    def _request(self, text: str) -> httpx.Response:
        params = {
            "q": text,
            "mkt": self.cfg.market,
            "count": str(self.cfg.count),
            "textDecorations": "false",
        }
        headers = {"Ocp-Apim-Subscription-Key": self.cfg.api_key}
        last_error: Exception | None = None
        for attempt in range(2):  # one retry, on network errors only
            try:
                with self._gate:
                    with httpx.Client(
                        timeout=self.cfg.timeout_ms / 1000,
                        transport=self.transport,
                    ) as client:
                        return client.get(
                            self.cfg.endpoint, params=params, headers=headers
                        )
            except httpx.HTTPError as exc:
                last_error = exc
                log.warning("search request attempt %d failed: %s", attempt + 1, exc)
        raise NetworkError(f"search API unreachable: {last_error}") from last_error

    def _parse_hits(self, payload: object) -> list[SearchHit]:
        if not isinstance(payload, dict):
            raise ProtocolError("search response is not a JSON object")
        values = payload.get("webPages", {}).get("value", [])
        if not isinstance(values, list):
            raise ProtocolError("webPages.value is not a list")
        hits = []
        for item in values:
            if not isinstance(item, dict) or "url" not in item:
                raise ProtocolError(f"malformed search result item: {item!r}")
            snippet = strip_markup(str(item.get("snippet", "")))
            if not snippet.strip():
                continue  # a hit with no snippet gives the extractor nothing
            hits.append(
                SearchHit(
                    rank=len(hits),
                    url=str(item["url"]),
                    title=strip_markup(str(item.get("name", ""))),
                    snippet=snippet,
                )
            )
            if len(hits) == self.cfg.count:
                break
        validate_result_set(hits)
        return hits


def search_live(
    query: Query,
    cfg: SearchProviderConfig,
    transport: httpx.BaseTransport | None = None,
) -> list[SearchHit]:
    """One-shot live search (see LiveSearchProvider)."""
    return LiveSearchProvider(cfg, transport=transport).search(query)


class FixtureSearchProvider:
    """Replays recorded search results from a fixture directory.

    Layout: `manifest.json` maps normalized query strings to result-file
    names (relative to the directory); each result file is a JSON list
    of {url, title, snippet}. Unknown queries return an empty list and
    log the miss so fixtures can be extended.
    """

    def __init__(self, fixture_dir: str | Path, count: int = MAX_HITS):
        self.fixture_dir = Path(fixture_dir)
        self.count = count
        self._manifest = self._load_manifest(self.fixture_dir / "manifest.json")

    @staticmethod
    def _load_manifest(path: Path) -> dict[str, str]:
        if not path.is_file():
            raise FixtureFormatError(f"missing fixture manifest: {path}")

        def reject_duplicates(pairs):
            out = {}
            for key, value in pairs:
                if key in out:
                    raise FixtureFormatError(f"duplicate manifest key: {key!r}")
                out[key] = value
            return out

        try:
            manifest = json.loads(
                path.read_text(encoding="utf-8"), object_pairs_hook=reject_duplicates
            )
        except ValueError as exc:  # FixtureFormatError from the hook passes through
            raise FixtureFormatError(f"manifest is not valid JSON: {exc}") from exc
        if not isinstance(manifest, dict) or not all(
            isinstance(v, str) for v in manifest.values()
        ):
            raise FixtureFormatError("manifest must map query strings to file names")
        return manifest

    def ready(self) -> bool:
        return self.fixture_dir.is_dir()

    def search(self, query: Query) -> list[SearchHit]:
        key = normalize_query(query.text)
        filename = self._manifest.get(key)
        if filename is None:
            log.info("fixture miss for query %r (key %r)", query.text, key)
            return []
        try:
            records = json.loads(
                (self.fixture_dir / filename).read_text(encoding="utf-8")
            )
        except OSError as exc:
            raise FixtureFormatError(f"cannot read result file {filename}: {exc}") from exc
        except ValueError as exc:
            raise FixtureFormatError(f"result file {filename} is not JSON: {exc}") from exc
        if not isinstance(records, list):
            raise FixtureFormatError(f"result file {filename} must hold a list")
        hits = []
        for record in records[: self.count]:
            try:
                hits.append(
                    SearchHit(
                        rank=len(hits),
                        url=record["url"],
                        title=record.get("title", ""),
                        snippet=record["snippet"],
                    )
                )
            except (TypeError, KeyError, ValueError) as exc:
                raise FixtureFormatError(
                    f"bad record in {filename}: {exc}"
                ) from exc
        validate_result_set(hits)
        return hits


def search_fixture(query: Query, fixture_dir: str | Path) -> list[SearchHit]:
    """One-shot fixture playback (see FixtureSearchProvider)."""
    return FixtureSearchProvider(fixture_dir).search(query)
