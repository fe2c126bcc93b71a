"""Iterative drift resolution of raw text against a registry.

Start from the best-scoring base language; while confidence is short of the
threshold, walk that anchor's drift variants breadth-first (ascending index),
adopting a variant only when it beats the current confidence by a margin.
If the threshold is never met the result is the undetermined node.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, NamedTuple, Protocol

from .graph import AnchorRegistry, LanguageNode
from .phi import PhiIndex, format_phi
from .rdf import Literal, Triple


class EmptyRegistry(ValueError):
    """The registry holds no base language besides und."""


class ConfidenceEstimator(Protocol):
    def __call__(self, text: str, hypothesis: LanguageNode) -> float: ...


@dataclass(frozen=True)
class ResolverConfig:
    min_confidence: float = 0.6
    max_drift: int = 9
    # minimum gain for a drift hypothesis to replace the current one
    margin: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ValueError(f"min_confidence must lie in [0, 1], got {self.min_confidence}")
        if isinstance(self.max_drift, bool) or not 0 <= self.max_drift <= 9:
            raise ValueError(f"max_drift must lie in 0..9, got {self.max_drift}")
        if not 0.0 <= self.margin <= 1.0:
            raise ValueError(f"margin must lie in [0, 1], got {self.margin}")


class TraceStep(NamedTuple):
    node: LanguageNode
    confidence: float
    accepted: bool


@dataclass(frozen=True)
class ResolutionOutcome:
    node: LanguageNode
    confidence: float
    steps: int
    trace: tuple[TraceStep, ...] = field(default=())

    @property
    def phi(self) -> PhiIndex:
        return self.node.phi

    def trace_lines(self) -> list[str]:
        return [
            f"STEP {i} {s.node.id} {format_phi(s.node.phi)} {s.confidence!r}"
            for i, s in enumerate(self.trace)
        ]


def tokenize(text: str) -> list[str]:
    """Whitespace split, case-fold, strip punctuation from token edges."""
    out = []
    for raw in text.split():
        tok = raw.casefold()
        start, end = 0, len(tok)
        while start < end and unicodedata.category(tok[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(tok[end - 1]).startswith("P"):
            end -= 1
        if start < end:
            out.append(tok[start:end])
    return out


def wordlist_estimator(lexicons: Mapping[str, Iterable[str]]) -> Callable[[str, LanguageNode], float]:
    """Share of text tokens found in the hypothesis node's word list.

    Tokens are counted with multiplicity. Nodes without a word list score 0.
    """
    table = {nid: frozenset(t.casefold() for t in words) for nid, words in lexicons.items()}
    for nid, words in table.items():
        if not words:
            raise ValueError(f"empty lexicon for {nid}")

    def estimate(text: str, hypothesis: LanguageNode) -> float:
        tokens = tokenize(text)
        lexicon = table.get(hypothesis.id)
        if not tokens or lexicon is None:
            return 0.0
        return sum(tok in lexicon for tok in tokens) / len(tokens)

    estimate.lexicons = table  # type: ignore[attr-defined]
    return estimate


def load_lexicons(directory: str | Path, registry: AnchorRegistry | None = None) -> dict[str, frozenset[str]]:
    """Read ``<node-id>.lex`` files, one token per line; ``#`` starts a comment.

    With a registry, a file may also be named after the local part of a node
    id (``English.lex`` for ``ex:English``) so ids with a colon stay portable.
    """
    out: dict[str, frozenset[str]] = {}
    local: dict[str, list[str]] = {}
    if registry is not None:
        for nid in registry.nodes:
            local.setdefault(nid.rpartition(":")[2].strip("<>"), []).append(nid)
    for path in sorted(Path(directory).glob("*.lex")):
        stem = path.stem
        if registry is None or stem in registry:
            nid = stem
        elif len(local.get(stem, ())) == 1:
            nid = local[stem][0]
        else:
            continue
        words = []
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                words.append(line.casefold())
        if words:
            out[nid] = frozenset(words)
    return out


def _bases(registry: AnchorRegistry) -> list[LanguageNode]:
    bases = sorted((n for n in registry if n.is_base and not n.is_sentinel), key=lambda n: n.id)
    if not bases:
        raise EmptyRegistry("no base languages to resolve against")
    return bases


def _detect(text: str, registry: AnchorRegistry, estimator: ConfidenceEstimator) -> tuple[LanguageNode, float]:
    best, best_score = registry.und, 0.0
    for node in _bases(registry):
        score = estimator(text, node)
        if score > best_score:
            best, best_score = node, score
    return best, best_score


def detect_initial(text: str, registry: AnchorRegistry, estimator: ConfidenceEstimator) -> LanguageNode:
    """Highest-scoring base node; lowest id wins ties; und when nothing scores."""
    return _detect(text, registry, estimator)[0]


def resolve_language(
    text: str,
    registry: AnchorRegistry,
    estimator: ConfidenceEstimator,
    config: ResolverConfig = ResolverConfig(),
) -> ResolutionOutcome:
    """Resolve ``text`` to a registry node.

    The trace lists every hypothesis scored, in order, flagged when adopted;
    a final und entry is appended when the threshold is never met. The
    outcome is the last adopted hypothesis, or und.
    """
    current, confidence = _detect(text, registry, estimator)
    trace = [TraceStep(current, confidence, True)]
    if confidence >= config.min_confidence:
        return ResolutionOutcome(current, confidence, 0, tuple(trace))

    hypotheses = iter(registry.anchored_subtree(current.id)) if not current.is_sentinel else iter(())
    drift_steps = 0
    while confidence < config.min_confidence and drift_steps < config.max_drift:
        candidate = next(hypotheses, None)
        if candidate is None:
            break
        drift_steps += 1
        score = estimator(text, candidate)
        adopted = score > confidence and score >= confidence + config.margin
        trace.append(TraceStep(candidate, score, adopted))
        if adopted:
            current, confidence = candidate, score

    if confidence < config.min_confidence:
        und = registry.und
        if trace[-1].node != und:
            trace.append(TraceStep(und, confidence, False))
        return ResolutionOutcome(und, confidence, len(trace) - 1, tuple(trace))
    return ResolutionOutcome(current, confidence, len(trace) - 1, tuple(trace))


def export_trace(
    outcome: ResolutionOutcome,
    registry: AnchorRegistry,
    subject: str = "iso639:resolution",
    vocab: str = "iso639",
) -> list[Triple]:
    """``ResolvedAnchor`` triples for an outcome, ready for ``serialize_turtle``."""
    anchor = registry.anchor_of(outcome.node.id)
    return [
        Triple(subject, "a", f"{vocab}:ResolvedAnchor"),
        Triple(subject, f"{vocab}:resolvedTo", anchor.id),
        Triple(subject, f"{vocab}:phiIndex", Literal(format_phi(outcome.phi))),
        Triple(subject, f"{vocab}:confidence", Literal(repr(outcome.confidence))),
    ]
