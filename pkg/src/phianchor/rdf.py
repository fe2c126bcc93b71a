"""Turtle interchange for anchor registries.

Only the subset needed for the anchoring vocabulary is supported:
``@prefix`` directives, subject blocks of ``;``/``,``-separated
predicate-object pairs closed by ``.``, the keyword ``a``, prefixed names,
``<iri>`` references and single-line double-quoted literals. Blank nodes,
collections, long strings and typed/language-tagged literals are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from .graph import (
    SCHEMA_IRI,
    UND,
    AnchorRegistry,
    DriftEdge,
    LanguageNode,
    NodeKind,
)
from .phi import format_phi, parse_phi

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_IRI = "http://www.w3.org/2000/01/rdf-schema#"
RDFS_LABEL = RDFS_IRI + "label"


class TurtleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownPrefix(TurtleSyntaxError):
    pass


class ConversionError(ValueError):
    """Triples are well-formed Turtle but not a usable registry."""


class MissingPhiIndex(ConversionError):
    pass


class MissingType(ConversionError):
    pass


class InverseMismatch(ConversionError):
    pass


@dataclass(frozen=True)
class Literal:
    value: str

    def __str__(self) -> str:
        escaped = (
            self.value.replace("\\", "\\\\")
            .replace('"', '\\"')
            .replace("\n", "\\n")
            .replace("\r", "\\r")
            .replace("\t", "\\t")
        )
        return f'"{escaped}"'


Term = Union[str, Literal]


class Triple(NamedTuple):
    """Terms are kept as written: ``ex:Name``, ``<iri>``, ``a`` or a :class:`Literal`."""

    subject: str
    predicate: str
    object: Term


class PrefixMap(dict):
    """Prefix label (without colon) to namespace IRI."""

    def expand(self, term: str) -> str:
        if term == "a":
            return RDF_TYPE
        if term.startswith("<") and term.endswith(">"):
            return term[1:-1]
        label, sep, local = term.partition(":")
        if not sep or label not in self:
            raise KeyError(term)
        return self[label] + local

    def compact(self, iri: str) -> str:
        """Shortest prefixed form of ``iri``; ``<iri>`` when no prefix fits."""
        best = None
        for label in sorted(self):
            base = self[label]
            local = iri[len(base):]
            if iri.startswith(base) and _PN_LOCAL.fullmatch(local):
                if best is None or len(base) > len(self[best]):
                    best = label
        if best is None:
            return f"<{iri}>"
        return f"{best}:{iri[len(self[best]):]}"


# -- tokenizer ----------------------------------------------------------------

_PN_LOCAL = re.compile(r"(?:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<prefix_kw>@prefix\b)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<pname>(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?)
  | (?P<a>a(?=[\s<"]))
  | (?P<punct>[.;,])
    """,
    re.VERBOSE,
)

_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\", "'": "'", "b": "\b", "f": "\f"}


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> Iterator[_Token]:
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise TurtleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            yield _Token(kind, chunk, line, col)
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    yield _Token("eof", "", line, pos - line_start + 1)


def _unescape(body: str, tok: _Token) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt in "uU":
            width = 4 if nxt == "u" else 8
            digits = body[i + 2 : i + 2 + width]
            if len(digits) != width or not all(c in "0123456789abcdefABCDEF" for c in digits):
                raise TurtleSyntaxError("bad unicode escape", tok.line, tok.column + i + 1)
            out.append(chr(int(digits, 16)))
            i += 2 + width
        else:
            raise TurtleSyntaxError(f"unknown escape \\{nxt}", tok.line, tok.column + i + 1)
    return "".join(out)


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.tok = next(self.tokens)
        self.prefixes = PrefixMap()
        self.triples: list[Triple] = []

    def advance(self) -> _Token:
        tok = self.tok
        self.tok = next(self.tokens)
        return tok

    def fail(self, expected: str) -> TurtleSyntaxError:
        found = self.tok.text or "end of input"
        return TurtleSyntaxError(f"expected {expected}, found {found!r}", self.tok.line, self.tok.column)

    def expect_punct(self, ch: str) -> None:
        if self.tok.kind != "punct" or self.tok.text != ch:
            raise self.fail(repr(ch))
        self.advance()

    def name(self, what: str) -> str:
        tok = self.tok
        if tok.kind == "iri":
            self.advance()
            return tok.text
        if tok.kind == "pname":
            label = tok.text.partition(":")[0]
            if label not in self.prefixes:
                raise UnknownPrefix(f"undeclared prefix {label + ':'!r}", tok.line, tok.column)
            self.advance()
            return tok.text
        raise self.fail(what)

    def parse(self) -> tuple[PrefixMap, list[Triple]]:
        while self.tok.kind != "eof":
            if self.tok.kind == "prefix_kw":
                self.directive()
            else:
                self.statement()
        return self.prefixes, self.triples

    def directive(self) -> None:
        self.advance()
        tok = self.tok
        if tok.kind != "pname" or not tok.text.endswith(":"):
            raise self.fail("prefix label")
        self.advance()
        if self.tok.kind != "iri":
            raise self.fail("namespace IRI")
        self.prefixes[tok.text[:-1]] = self.advance().text[1:-1]
        self.expect_punct(".")

    def statement(self) -> None:
        subject = self.name("subject")
        while True:
            if self.tok.kind == "a":
                self.advance()
                predicate = "a"
            else:
                predicate = self.name("predicate")
            while True:
                self.triples.append(Triple(subject, predicate, self.object()))
                if self.tok.kind == "punct" and self.tok.text == ",":
                    self.advance()
                    continue
                break
            if self.tok.kind == "punct" and self.tok.text == ";":
                self.advance()
                # trailing ';' before '.' is legal Turtle
                if self.tok.kind == "punct" and self.tok.text == ".":
                    break
                continue
            break
        self.expect_punct(".")

    def object(self) -> Term:
        tok = self.tok
        if tok.kind == "string":
            self.advance()
            return Literal(_unescape(tok.text[1:-1], tok))
        return self.name("object")


def parse_turtle(text: str) -> tuple[PrefixMap, list[Triple]]:
    """Parse Turtle text into its prefix map and triples in document order."""
    return _Parser(text).parse()


def serialize_turtle(prefixes: Mapping[str, str], triples: Iterable[Triple]) -> str:
    """Deterministic Turtle: sorted prefixes, subjects in first-seen order."""
    lines = [f"@prefix {label}: <{prefixes[label]}> ." for label in sorted(prefixes)]
    blocks: dict[str, list[tuple[str, Term]]] = {}
    for t in triples:
        blocks.setdefault(t.subject, []).append((t.predicate, t.object))
    if lines and blocks:
        lines.append("")
    for subject, pairs in blocks.items():
        rendered = [f"{p} {o}" for p, o in pairs]
        lines.append(f"{subject} {rendered[0]}" + (" ;" if len(rendered) > 1 else " ."))
        for i, pair in enumerate(rendered[1:], start=2):
            lines.append(f"    {pair}" + (" ;" if i < len(rendered) else " ."))
    return "\n".join(lines) + "\n" if lines else ""


# -- registry conversion ------------------------------------------------------


@dataclass
class _Subject:
    types: list[str]
    iso_codes: list[str]
    phis: list[str]
    labels: list[str]
    equivalents: list[str]
    drifts: list[str]
    fallbacks: list[str]


def registry_from_triples(
    triples: Iterable[Triple],
    prefixes: Mapping[str, str] | None = None,
    schema: str = SCHEMA_IRI,
) -> AnchorRegistry:
    """Build a registry from triples in the anchoring vocabulary.

    Edges come from ``hasDrift``. ``isFallbackOf`` supplies the edge only for
    nodes with no incoming ``hasDrift``; otherwise it must name one of the
    node's ``hasDrift`` ancestors (its anchor, typically), or
    :class:`InverseMismatch` is raised. Structural problems such as cycles or
    unanchored nodes are left for :meth:`AnchorRegistry.validate`.
    """
    pm = PrefixMap(prefixes or {})
    if schema not in pm.values():
        label = "iso639" if "iso639" not in pm else "anchor"
        pm[label] = schema
    vocab = {local: schema + local for local in (
        "BaseLanguage", "DriftedLanguage", "ResolvedAnchor", "isoCode", "equivalentCode",
        "phiIndex", "hasDrift", "isFallbackOf", "equivalentTo",
    )}

    def expand(term: str) -> str:
        try:
            return pm.expand(term)
        except KeyError:
            raise ConversionError(f"cannot resolve name {term!r}") from None

    def canon(term: str) -> str:
        return pm.compact(expand(term))

    def literal(t: Triple) -> str:
        if not isinstance(t.object, Literal):
            raise ConversionError(f"{t.subject} {t.predicate}: expected a literal")
        return t.object.value

    def ref(t: Triple) -> str:
        if isinstance(t.object, Literal):
            raise ConversionError(f"{t.subject} {t.predicate}: expected a resource, got a literal")
        return canon(t.object)

    subjects: dict[str, _Subject] = {}
    for t in triples:
        s = canon(t.subject)
        rec = subjects.setdefault(s, _Subject([], [], [], [], [], [], []))
        p = expand(t.predicate)
        if p == RDF_TYPE:
            rec.types.append(expand(ref(t)))
        elif p in (vocab["isoCode"], vocab["equivalentCode"]):
            rec.iso_codes.append(literal(t))
        elif p == vocab["phiIndex"]:
            rec.phis.append(literal(t))
        elif p == RDFS_LABEL:
            rec.labels.append(literal(t))
        elif p == vocab["equivalentTo"]:
            rec.equivalents.append(ref(t))
        elif p == vocab["hasDrift"]:
            rec.drifts.append(ref(t))
        elif p == vocab["isFallbackOf"]:
            rec.fallbacks.append(ref(t))

    nodes: dict[str, LanguageNode] = {}
    for sid, rec in subjects.items():
        kinds = {t for t in rec.types if t in (vocab["BaseLanguage"], vocab["DriftedLanguage"])}
        if vocab["ResolvedAnchor"] in rec.types and not kinds:
            continue
        if not kinds:
            if rec.iso_codes or rec.phis or rec.drifts or rec.fallbacks:
                raise MissingType(f"{sid} has language properties but no BaseLanguage/DriftedLanguage type")
            continue
        if len(kinds) > 1:
            raise ConversionError(f"{sid} is typed both BaseLanguage and DriftedLanguage")
        if not rec.phis:
            raise MissingPhiIndex(sid)
        if len(set(rec.phis)) > 1 or len(set(rec.iso_codes)) > 1:
            raise ConversionError(f"{sid} has conflicting phiIndex or isoCode values")
        kind = NodeKind.BASE if vocab["BaseLanguage"] in kinds else NodeKind.DRIFTED
        nodes[sid] = LanguageNode(
            id=sid,
            kind=kind,
            phi=parse_phi(rec.phis[0]),
            iso_code=rec.iso_codes[0] if rec.iso_codes else None,
            display_name=rec.labels[0] if rec.labels else None,
            equivalent_to=tuple(dict.fromkeys(rec.equivalents)),
        )
        # The built-in sentinel is written without its label; restore it on read.
        unlabeled = replace(nodes[sid], display_name=UND.display_name)
        if not rec.labels and unlabeled == UND:
            nodes[sid] = UND

    for sid, rec in subjects.items():
        for target in (*rec.drifts, *rec.fallbacks):
            if target not in nodes:
                raise MissingType(f"{target} is referenced from {sid} but never typed")
        if sid not in nodes and (rec.drifts or rec.fallbacks):
            raise MissingType(sid)

    pairs: dict[tuple[str, str], None] = {}
    parents: dict[str, list[str]] = {}
    for sid, rec in subjects.items():
        for target in rec.drifts:
            if (sid, target) not in pairs:
                pairs[(sid, target)] = None
                parents.setdefault(target, []).append(sid)

    def drift_ancestors(nid: str) -> set[str]:
        seen: set[str] = set()
        stack = list(parents.get(nid, ()))
        while stack:
            cur = stack.pop()
            if cur not in seen:
                seen.add(cur)
                stack.extend(parents.get(cur, ()))
        return seen

    for sid, rec in subjects.items():
        if not rec.fallbacks:
            continue
        if sid in parents:
            ancestors = drift_ancestors(sid)
            for target in rec.fallbacks:
                if target not in ancestors:
                    raise InverseMismatch(
                        f"{sid} isFallbackOf {target}, but {target} is not among its hasDrift ancestors"
                    )
        else:
            for target in dict.fromkeys(rec.fallbacks):
                pairs[(target, sid)] = None

    edges = [DriftEdge(a, b) for a, b in pairs]
    return AnchorRegistry.from_parts(nodes.values(), edges, pm)


def triples_from_registry(
    registry: AnchorRegistry, schema: str = SCHEMA_IRI
) -> tuple[PrefixMap, list[Triple]]:
    """Emit every node with its type, code, index, drifts and fallback link.

    ``isFallbackOf`` points at the node's anchor, matching the bundled reference;
    nodes without a resolvable anchor point at their direct parents instead.
    """
    pm = PrefixMap(registry.prefixes)
    vocab_label = next((k for k in sorted(pm) if pm[k] == schema), None)
    if vocab_label is None:
        vocab_label = "iso639" if "iso639" not in pm else "anchor"
        pm[vocab_label] = schema
    if any(n.display_name and n != UND for n in registry) and RDFS_IRI not in pm.values():
        pm["rdfs"] = RDFS_IRI

    def v(local: str) -> str:
        return f"{vocab_label}:{local}"

    def name(node_id: str) -> str:
        if node_id.startswith("<") and node_id.endswith(">"):
            return node_id
        try:
            return pm.compact(pm.expand(node_id))
        except KeyError:
            raise ValueError(f"node id {node_id!r} is neither a prefixed name nor <iri>") from None

    label_pred = pm.compact(RDFS_LABEL)
    out: list[Triple] = []
    for node in registry:
        s = name(node.id)
        out.append(Triple(s, "a", v("BaseLanguage" if node.is_base else "DriftedLanguage")))
        if node.iso_code:
            out.append(Triple(s, v("isoCode"), Literal(node.iso_code)))
        out.append(Triple(s, v("phiIndex"), Literal(format_phi(node.phi))))
        if node.display_name and node != UND:
            out.append(Triple(s, label_pred, Literal(node.display_name)))
        for other in node.equivalent_to:
            out.append(Triple(s, v("equivalentTo"), name(other)))
        if not node.is_base:
            anchor = registry.anchor_index.get(node.id)
            targets = (anchor,) if anchor is not None else registry.parents(node.id)
            for target in targets:
                out.append(Triple(s, v("isFallbackOf"), name(target)))
        for child in registry.children(node.id):
            out.append(Triple(s, v("hasDrift"), name(child.id)))
    return pm, out


def read_registry(text: str, schema: str = SCHEMA_IRI) -> AnchorRegistry:
    prefixes, triples = parse_turtle(text)
    return registry_from_triples(triples, prefixes, schema)


def write_registry(registry: AnchorRegistry, schema: str = SCHEMA_IRI) -> str:
    return serialize_turtle(*triples_from_registry(registry, schema))
