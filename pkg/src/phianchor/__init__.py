"""Recursive semantic anchoring of language identities."""

from importlib import resources
from pathlib import Path

from .bcp47 import DecodedTag, decode_bcp47, encode_bcp47
from .graph import (
    UND,
    AnchorRegistry,
    DriftEdge,
    Finding,
    LanguageNode,
    NodeKind,
    ValidationReport,
)
from .phi import UNDETERMINED, DriftVector, PhiIndex, compose_drift, format_phi, is_undetermined, parse_phi
from .rdf import (
    PrefixMap,
    Triple,
    parse_turtle,
    read_registry,
    registry_from_triples,
    serialize_turtle,
    triples_from_registry,
    write_registry,
)
from .resolver import (
    ResolutionOutcome,
    ResolverConfig,
    detect_initial,
    export_trace,
    load_lexicons,
    resolve_language,
    wordlist_estimator,
)

DATA_DIR = Path(str(resources.files(__name__) / "data"))
FIXTURE_TTL = DATA_DIR / "reference.ttl"
FIXTURE_LEXICONS = DATA_DIR / "lexicons"


def load_fixture() -> AnchorRegistry:
    """The two-anchor reference registry (English and Mandarin families)."""
    return read_registry(FIXTURE_TTL.read_text(encoding="utf-8"))


__all__ = [
    "DATA_DIR", "FIXTURE_LEXICONS", "FIXTURE_TTL", "UND", "UNDETERMINED",
    "AnchorRegistry", "DecodedTag", "DriftEdge", "DriftVector", "Finding", "LanguageNode", "NodeKind",
    "PhiIndex", "PrefixMap", "ResolutionOutcome", "ResolverConfig", "Triple", "ValidationReport",
    "compose_drift", "decode_bcp47", "detect_initial", "encode_bcp47", "export_trace", "format_phi",
    "is_undetermined", "load_fixture", "load_lexicons", "parse_phi", "parse_turtle", "read_registry",
    "registry_from_triples", "resolve_language", "serialize_turtle", "triples_from_registry",
    "wordlist_estimator", "write_registry",
]
