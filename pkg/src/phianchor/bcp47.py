"""BCP 47 private-use encoding of drifted identities: ``cmn-x-phi8.7``."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .graph import AnchorRegistry, Finding, LanguageNode, Level
from .phi import format_phi, parse_phi

_TAG_RE = re.compile(r"([A-Za-z]{2,3})(?:-[xX]-([A-Za-z0-9.]{1,8}))?")


class NoIsoCode(ValueError):
    pass


class UnknownCode(LookupError):
    pass


class MalformedTag(ValueError):
    pass


@dataclass(frozen=True)
class DecodedTag:
    node: LanguageNode
    findings: tuple[Finding, ...] = ()


def encode_bcp47(node: LanguageNode | str, registry: AnchorRegistry) -> str:
    """Anchor code alone for base nodes, ``<code>-x-phiF.V`` for drifted ones."""
    if isinstance(node, str):
        node = registry.node(node)
    anchor = registry.anchor_of(node.id)
    if not anchor.iso_code:
        raise NoIsoCode(f"anchor {anchor.id} of {node.id} has no ISO code")
    if node.is_base:
        return anchor.iso_code
    return f"{anchor.iso_code}-x-{format_phi(node.phi)}"


def _base_for_code(code: str, registry: AnchorRegistry) -> LanguageNode:
    bases = sorted((n for n in registry if n.is_base and n.iso_code == code), key=lambda n: n.id)
    if bases:
        return bases[0]
    coded = sorted((n for n in registry if n.iso_code == code), key=lambda n: n.id)
    if coded:
        return coded[0]
    raise UnknownCode(code)


def decode_bcp47(tag: str, registry: AnchorRegistry) -> DecodedTag:
    """Resolve a tag to a registry node.

    A bare code gives the base node carrying it (or, failing that, the node
    carrying it). A ``-x-phi`` extension selects the drifted member of that
    anchor class with the same index; an index nobody carries falls back to
    the anchor with an ``UnknownVariant`` finding.
    """
    m = _TAG_RE.fullmatch(tag)
    if m is None:
        raise MalformedTag(tag)
    code, private = m.group(1).lower(), m.group(2)
    base = _base_for_code(code, registry)
    if private is None:
        return DecodedTag(base)
    try:
        phi = parse_phi(private.lower())
    except ValueError as exc:
        raise MalformedTag(f"{tag}: {exc}") from None
    anchor = registry.anchor_of(base.id)
    members = [n for n in registry if registry.anchor_index.get(n.id) == anchor.id and n.phi == phi]
    members.sort(key=lambda n: (n.is_base, n.id))
    if members:
        return DecodedTag(members[0])
    finding = Finding(Level.WARNING, "UnknownVariant", anchor.id, f"{format_phi(phi)} not registered under {code}")
    return DecodedTag(anchor, (finding,))

