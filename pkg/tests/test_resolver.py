import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phianchor import FIXTURE_LEXICONS
from phianchor.graph import UND_ID, AnchorRegistry, LanguageNode, NodeKind
from phianchor.phi import PhiIndex
from phianchor.rdf import parse_turtle, serialize_turtle
from phianchor.resolver import (
    EmptyRegistry,
    ResolverConfig,
    detect_initial,
    export_trace,
    load_lexicons,
    resolve_language,
    tokenize,
    wordlist_estimator,
)

from oracles import overlap
from strategies import PREFIXES, forests

NP = LanguageNode("ex:NigerianPidgin", NodeKind.DRIFTED, PhiIndex(1, 7), "pcm")
EN = LanguageNode("ex:English", NodeKind.BASE, PhiIndex(1, 0), "eng")


@pytest.fixture
def estimator(lexicons):
    return wordlist_estimator(lexicons)


# -- estimator -------------------------------------------------------------


@pytest.mark.parametrize(
    "text, node, lexicon, expected",
    [
        ("how bodi", NP, {"how", "bodi", "dey"}, 1.0),
        ("how bodi", EN, {"how", "are", "you"}, 0.5),
        ("", NP, {"how"}, 0.0),
        ("   ", NP, {"how"}, 0.0),
        ("How BODI?", NP, {"how", "bodi"}, 1.0),
        ("how how bodi", EN, {"how"}, 2 / 3),
    ],
)
def test_wordlist_examples(text, node, lexicon, expected):
    assert wordlist_estimator({node.id: lexicon})(text, node) == pytest.approx(expected, abs=1e-12)


def test_unlisted_nodes_score_zero():
    est = wordlist_estimator({EN.id: {"how"}})
    assert est("how", NP) == 0.0


def test_empty_lexicon_rejected():
    with pytest.raises(ValueError):
        wordlist_estimator({EN.id: set()})


def test_tokenize():
    assert tokenize("  Hello, World!  «ça va?» ... ") == ["hello", "world", "ça", "va"]
    assert tokenize("don't") == ["don't"]
    assert tokenize("") == []


@settings(max_examples=200)
@given(st.text(), st.frozensets(st.text(min_size=1, max_size=5), min_size=1, max_size=6))
def test_estimator_matches_oracle(text, words):
    words = {w.casefold() for w in words}
    est = wordlist_estimator({EN.id: words})
    score = est(text, EN)
    assert 0.0 <= score <= 1.0
    assert abs(score - overlap(tokenize(text), words)) <= 1e-12


# -- lexicon loading -------------------------------------------------------


def test_bundled_lexicons_map_to_fixture_ids(lexicons, fixture_registry):
    assert set(lexicons) == {n.id for n in fixture_registry if n.id != UND_ID}
    assert "bodi" in lexicons["ex:NigerianPidgin"]
    assert "bodi" not in lexicons["ex:English"]


def test_load_lexicons_comments_and_ids(tmp_path):
    (tmp_path / "ex:A.lex").write_text("# header\nFoo  # trailing\n\nbar\n", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")
    assert load_lexicons(tmp_path) == {"ex:A": frozenset({"foo", "bar"})}


def test_load_lexicons_skips_unknown_stems(tmp_path, fixture_registry):
    (tmp_path / "Klingon.lex").write_text("qapla\n", encoding="utf-8")
    (tmp_path / "English.lex").write_text("hello\n", encoding="utf-8")
    assert load_lexicons(tmp_path, fixture_registry) == {"ex:English": frozenset({"hello"})}


# -- detection -------------------------------------------------------------


def test_detect_examples(fixture_registry, estimator):
    assert detect_initial("the quick brown fox", fixture_registry, estimator).id == "ex:English"
    assert detect_initial("", fixture_registry, estimator).id == UND_ID
    assert detect_initial("zzz qqq", fixture_registry, estimator).id == UND_ID


def test_detect_only_considers_base_nodes(fixture_registry, estimator):
    # every token is Pidgin-only, yet detection may only land on a base node
    assert detect_initial("bodi", fixture_registry, estimator).id == UND_ID


def test_detect_ties_break_on_lowest_id():
    reg = AnchorRegistry.empty(PREFIXES)
    reg = reg.add_base(LanguageNode("ex:B", NodeKind.BASE, PhiIndex(2, 0), "bbb"))
    reg = reg.add_base(LanguageNode("ex:A", NodeKind.BASE, PhiIndex(3, 0), "aaa"))
    est = wordlist_estimator({"ex:A": {"x"}, "ex:B": {"x"}})
    assert detect_initial("x", reg, est).id == "ex:A"


def test_empty_registry_raises(estimator):
    with pytest.raises(EmptyRegistry):
        detect_initial("hi", AnchorRegistry.empty(), estimator)
    with pytest.raises(EmptyRegistry):
        resolve_language("hi", AnchorRegistry.empty(), estimator)


# -- resolution ------------------------------------------------------------


def test_how_bodi(fixture_registry, estimator, lexicons):
    out = resolve_language("How bodi", fixture_registry, estimator)
    assert out.node.id == "ex:NigerianPidgin"
    assert out.phi == PhiIndex(1, 7)
    tokens = tokenize("How bodi")
    assert [(s.node.id, s.accepted) for s in out.trace] == [("ex:English", True), ("ex:NigerianPidgin", True)]
    for step in out.trace:
        assert abs(step.confidence - overlap(tokens, lexicons[step.node.id])) <= 1e-9
    assert out.confidence == 1.0
    assert out.steps == 1
    assert out.trace_lines() == ["STEP 0 ex:English phi1.0 0.5", "STEP 1 ex:NigerianPidgin phi1.7 1.0"]


def test_empty_text_is_undetermined(fixture_registry, estimator):
    out = resolve_language("", fixture_registry, estimator)
    assert out.node.id == UND_ID
    assert out.phi == PhiIndex(99, 9)
    assert out.confidence == 0.0
    assert out.steps == 0


def test_zero_threshold_short_circuits(fixture_registry, estimator):
    for text in ["How bodi", "the quick brown fox", "wo men"]:
        out = resolve_language(text, fixture_registry, estimator, ResolverConfig(min_confidence=0.0))
        assert out.steps == 0
        assert out.node == detect_initial(text, fixture_registry, estimator)


def test_standard_english_needs_no_drift(fixture_registry, estimator):
    out = resolve_language("the quick brown fox", fixture_registry, estimator)
    assert (out.node.id, out.steps, out.confidence) == ("ex:English", 0, 1.0)


def test_exhausted_search_ends_in_und(fixture_registry, estimator):
    # "how" scores 1/3 for English, "bodi" lifts Pidgin to 2/3; with a 0.9 bar nothing is enough
    out = resolve_language("how bodi zzz", fixture_registry, estimator, ResolverConfig(min_confidence=0.9))
    assert out.node.id == UND_ID
    assert out.trace[-1].node.id == UND_ID and not out.trace[-1].accepted
    assert out.confidence == pytest.approx(2 / 3)
    assert out.trace[-1].confidence == out.confidence


def test_margin_blocks_small_gains():
    reg = AnchorRegistry.empty(PREFIXES).add_base(LanguageNode("ex:A", NodeKind.BASE, PhiIndex(4, 0), "aaa"))
    reg = reg.add_drifted(LanguageNode("ex:Ad", NodeKind.DRIFTED, PhiIndex(4, 1)), "ex:A")
    scores = {"ex:A": 0.5, "ex:Ad": 0.55, UND_ID: 0.0}
    est = lambda text, node: scores[node.id]  # noqa: E731
    out = resolve_language("x", reg, est, ResolverConfig(min_confidence=0.52, margin=0.1))
    assert out.node.id == UND_ID
    out = resolve_language("x", reg, est, ResolverConfig(min_confidence=0.52, margin=0.0))
    assert out.node.id == "ex:Ad"


def test_max_drift_bounds_hypotheses(fixture_registry, estimator):
    out = resolve_language("How bodi", fixture_registry, estimator, ResolverConfig(max_drift=0))
    assert out.node.id == UND_ID
    assert [s.node.id for s in out.trace] == ["ex:English", UND_ID]


def test_breadth_first_ascending_order():
    reg = AnchorRegistry.empty(PREFIXES).add_base(LanguageNode("ex:R", NodeKind.BASE, PhiIndex(5, 0), "rrr"))
    reg = reg.add_drifted(LanguageNode("ex:c", NodeKind.DRIFTED, PhiIndex(5, 3)), "ex:R")
    reg = reg.add_drifted(LanguageNode("ex:a", NodeKind.DRIFTED, PhiIndex(5, 1)), "ex:c")
    reg = reg.add_drifted(LanguageNode("ex:b", NodeKind.DRIFTED, PhiIndex(5, 2)), "ex:R")
    est = lambda text, node: 0.1 if node.id == "ex:R" else 0.0  # noqa: E731
    out = resolve_language("x", reg, est)
    assert [s.node.id for s in out.trace] == ["ex:R", "ex:b", "ex:c", "ex:a", UND_ID]


@pytest.mark.parametrize(
    "kwargs",
    [{"min_confidence": -0.1}, {"min_confidence": 1.01}, {"max_drift": 10}, {"max_drift": -1}, {"margin": 2.0}, {"max_drift": True}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ResolverConfig(**kwargs)


# -- properties over generated registries ----------------------------------


def _random_estimator(seed):
    def est(text, node):
        return random.Random(f"{seed}|{text}|{node.id}").choice([0.0, 0.1, 0.25, 0.4, 0.5, 0.7, 0.9, 1.0])

    return est


@settings(max_examples=300, deadline=None)
@given(
    forests(),
    st.integers(0, 10**6),
    st.sampled_from([0.0, 0.3, 0.6, 0.95, 1.0]),
    st.integers(0, 9),
    st.sampled_from([0.0, 0.05, 0.1, 0.5]),
)
def test_resolution_properties(reg, seed, min_conf, max_drift, margin):
    calls = []
    base_est = _random_estimator(seed)

    def est(text, node):
        calls.append(node.id)
        return base_est(text, node)

    cfg = ResolverConfig(min_confidence=min_conf, max_drift=max_drift, margin=margin)
    initial = detect_initial("t", reg, base_est)
    out = resolve_language("t", reg, est, cfg)

    # termination: one base sweep plus at most max_drift hypotheses
    n_bases = sum(1 for n in reg if n.is_base and not n.is_sentinel)
    assert len(calls) <= n_bases + max_drift
    assert len(out.trace) == out.steps + 1
    assert out.trace[-1].node == out.node
    assert out.trace[-1].confidence == out.confidence
    assert out.phi == out.node.phi
    # anchor soundness
    assert out.node.is_sentinel or reg.anchor_of(out.node.id) == reg.anchor_of(initial.id)
    # monotone acceptance
    accepted = [s.confidence for s in out.trace if s.accepted]
    assert all(b > a for a, b in zip(accepted, accepted[1:]))
    if not out.node.is_sentinel:
        assert out.confidence >= min_conf
    # determinism
    assert resolve_language("t", reg, base_est, cfg) == out


# -- trace export ----------------------------------------------------------


def test_export_how_bodi(fixture_registry, estimator):
    out = resolve_language("How bodi", fixture_registry, estimator)
    triples = export_trace(out, fixture_registry)
    got = {(t.predicate, str(t.object)) for t in triples}
    assert got == {
        ("a", "iso639:ResolvedAnchor"),
        ("iso639:resolvedTo", "ex:English"),
        ("iso639:phiIndex", '"phi1.7"'),
        ("iso639:confidence", '"1.0"'),
    }
    text = serialize_turtle(dict(fixture_registry.prefixes), triples)
    assert set(parse_turtle(text)[1]) == set(triples)


def test_export_und_and_base_hit(fixture_registry, estimator):
    und = resolve_language("", fixture_registry, estimator)
    assert export_trace(und, fixture_registry)[1].object == UND_ID
    hit = resolve_language("the quick brown fox", fixture_registry, estimator)
    assert export_trace(hit, fixture_registry)[1].object == hit.node.id


def test_load_bundled_directory_without_registry():
    assert "ex:English" not in load_lexicons(FIXTURE_LEXICONS)
    assert "English" in load_lexicons(FIXTURE_LEXICONS)
