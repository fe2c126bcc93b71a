from __future__ import annotations

import pytest

from phianchor import FIXTURE_LEXICONS, FIXTURE_TTL, load_fixture, load_lexicons
from phianchor.graph import AnchorRegistry, LanguageNode, NodeKind
from phianchor.phi import PhiIndex

from strategies import PREFIXES

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def hand_built_fixture() -> AnchorRegistry:
    """The bundled reference registry entered through the API rather than parsed."""
    reg = AnchorRegistry.empty(PREFIXES)
    reg = reg.add_base(LanguageNode("ex:English", NodeKind.BASE, PhiIndex(1, 0), "eng"))
    reg = reg.add_drifted(LanguageNode("ex:NigerianPidgin", NodeKind.DRIFTED, PhiIndex(1, 7), "pcm"), "ex:English")
    reg = reg.add_drifted(
        LanguageNode("ex:NigerianPidgin_Colloquial", NodeKind.DRIFTED, PhiIndex(1, 8)), "ex:NigerianPidgin"
    )
    reg = reg.add_base(LanguageNode("ex:Mandarin", NodeKind.BASE, PhiIndex(8, 4), "cmn"))
    reg = reg.add_drifted(LanguageNode("ex:Mandarin_Colloquial", NodeKind.DRIFTED, PhiIndex(8, 7)), "ex:Mandarin")
    return reg


@pytest.fixture
def fixture_registry() -> AnchorRegistry:
    return load_fixture()


@pytest.fixture
def built_registry() -> AnchorRegistry:
    return hand_built_fixture()


@pytest.fixture
def fixture_ttl() -> str:
    return FIXTURE_TTL.read_text(encoding="utf-8")


@pytest.fixture
def lexicons(fixture_registry):
    return load_lexicons(FIXTURE_LEXICONS, fixture_registry)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
