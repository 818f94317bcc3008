import socket
from pathlib import Path

import pytest

from odqa.config import Settings
from odqa.engine import QAEngine, build_engine
from odqa.textproc import default_excluded_verbs, default_function_words

DATA_DIR = Path(__file__).parent / "data"
BUNDLE_DIR = DATA_DIR / "offline_bundle"

#: the five recorded questions of the offline bundle
BUNDLE_QUESTIONS = [
    "Am nevoie de certificatul verde pentru intrarea în mall?",
    "Vremea caldă previne infectarea cu Coronavirus?",
    "Dispare covidul vara?",
    "Câte doze de vaccin sunt necesare?",
    "Este obligatorie masca în aer liber?",
]


@pytest.fixture(autouse=True)
def no_network(request, monkeypatch):
    """The suite must run without touching the network; fail loudly if
    anything tries to resolve a host. Live smoke tests opt out."""
    if request.node.get_closest_marker("live"):
        return

    def _blocked(*args, **kwargs):
        raise RuntimeError(f"network access attempted during tests: {args!r}")

    monkeypatch.setattr(socket, "getaddrinfo", _blocked)


@pytest.fixture(scope="session")
def function_words() -> frozenset[str]:
    return default_function_words()


@pytest.fixture(scope="session")
def excluded_verbs() -> frozenset[str]:
    return default_excluded_verbs()


@pytest.fixture()
def offline_settings() -> Settings:
    return Settings(offline_dir=str(BUNDLE_DIR))


@pytest.fixture()
def offline_engine(offline_settings) -> QAEngine:
    return build_engine(offline_settings)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "live: needs live endpoints and credentials; excluded from CI"
    )
