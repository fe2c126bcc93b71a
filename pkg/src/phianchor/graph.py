"""Registry of language nodes linked by drift edges.

An :class:`AnchorRegistry` is an immutable snapshot. Every mutation returns a
new snapshot with its anchor and distance indices rebuilt, so lookups never
walk the graph at query time. Snapshots may hold structurally invalid graphs
(cycles, hybrids) when built with :meth:`AnchorRegistry.from_parts`; call
:meth:`AnchorRegistry.validate` to find out.
"""

from __future__ import annotations

import enum
import re
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .phi import UNDETERMINED, ZERO_DRIFT, DriftVector, PhiIndex, format_phi

SCHEMA_IRI = "http://purl.org/iso/639/2023/schema#"
UND_ID = "iso639:und"

_ISO_RE = re.compile(r"[a-z]{2,3}")


class RegistryError(Exception):
    pass


class DuplicateId(RegistryError):
    pass


class SentinelReserved(RegistryError):
    pass


class CycleDetected(RegistryError):
    pass


class UnknownNode(RegistryError, LookupError):
    pass


class UnknownTarget(UnknownNode):
    pass


class UnanchoredNode(RegistryError):
    """No base node is reachable; only possible for unvalidated registries."""


class NodeKind(enum.Enum):
    BASE = "base"
    DRIFTED = "drifted"


@dataclass(frozen=True)
class LanguageNode:
    id: str
    kind: NodeKind
    phi: PhiIndex
    iso_code: str | None = None
    display_name: str | None = None
    # Recorded from ``equivalentTo``; carries no resolution semantics.
    equivalent_to: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("node id must be non-empty")
        if self.iso_code is not None and not _ISO_RE.fullmatch(self.iso_code):
            raise ValueError(f"iso code must be 2-3 lowercase letters: {self.iso_code!r}")

    @property
    def is_base(self) -> bool:
        return self.kind is NodeKind.BASE

    @property
    def is_sentinel(self) -> bool:
        return self.is_base and self.phi == UNDETERMINED


UND = LanguageNode(UND_ID, NodeKind.BASE, UNDETERMINED, iso_code="und", display_name="Undetermined")


@dataclass(frozen=True)
class DriftEdge:
    """``source hasDrift target``; equivalently ``target isFallbackOf source``."""

    source: str
    target: str
    delta: DriftVector = ZERO_DRIFT


class Level(enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Finding:
    level: Level
    code: str
    node: str
    message: str

    def __str__(self) -> str:
        return f"{self.level.value} {self.code} {self.node} {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.level is Level.ERROR)

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.level is Level.WARNING)

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def lines(self) -> list[str]:
        return [str(f) for f in self.findings]

    def __iter__(self) -> Iterator[Finding]:
        return iter(self.findings)

    def __len__(self) -> int:
        return len(self.findings)


def _cyclic_nodes(ids: Sequence[str], children: Mapping[str, Sequence[str]]) -> list[str]:
    """Nodes lying on at least one directed cycle (iterative Tarjan)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[str] = []
    counter = 0
    for root in ids:
        if root in index:
            continue
        work = [(root, iter(children.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(children.get(w, ()))))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    component = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        component.append(w)
                        if w == v:
                            break
                    if len(component) > 1 or v in children.get(v, ()):
                        out.extend(component)
    return out


class AnchorRegistry:
    """Validated-on-demand graph of language nodes and drift edges."""

    def __init__(
        self,
        nodes: Iterable[LanguageNode] = (),
        edges: Iterable[DriftEdge] = (),
        prefixes: Mapping[str, str] | None = None,
    ) -> None:
        table: dict[str, LanguageNode] = {}
        for node in nodes:
            if node.id in table:
                raise DuplicateId(node.id)
            table[node.id] = node
        if not any(n.is_sentinel for n in table.values()):
            if UND_ID in table:
                raise DuplicateId(f"{UND_ID} is reserved for the undetermined node")
            table[UND_ID] = UND
        edge_list = tuple(edges)
        for e in edge_list:
            for end in (e.source, e.target):
                if end not in table:
                    raise UnknownTarget(end)
        self._nodes = MappingProxyType(table)
        self._edges = edge_list
        self._prefixes = MappingProxyType(dict(prefixes or {"iso639": SCHEMA_IRI}))
        self._build_indices()

    @classmethod
    def empty(cls, prefixes: Mapping[str, str] | None = None) -> AnchorRegistry:
        return cls(prefixes=prefixes)

    @classmethod
    def from_parts(
        cls,
        nodes: Iterable[LanguageNode],
        edges: Iterable[DriftEdge] = (),
        prefixes: Mapping[str, str] | None = None,
    ) -> AnchorRegistry:
        """Build a snapshot without structural checks beyond id uniqueness."""
        return cls(nodes, edges, prefixes)

    def _build_indices(self) -> None:
        parents: dict[str, list[str]] = defaultdict(list)
        children: dict[str, list[str]] = defaultdict(list)
        for e in self._edges:
            parents[e.target].append(e.source)
            children[e.source].append(e.target)
        self._parents = {k: tuple(v) for k, v in parents.items()}
        self._children = {k: tuple(v) for k, v in children.items()}

        anchor: dict[str, str | None] = {}
        distance: dict[str, int] = {}
        for start in self._nodes:
            path: list[str] = []
            seen: set[str] = set()
            cur: str | None = start
            result: str | None = None
            dist = 0
            while cur is not None:
                if cur in anchor:
                    result = anchor[cur]
                    dist = distance.get(cur, 0)
                    break
                node = self._nodes[cur]
                if node.is_base:
                    result, dist = cur, 0
                    anchor[cur], distance[cur] = cur, 0
                    break
                if cur in seen:
                    result = None
                    break
                seen.add(cur)
                path.append(cur)
                ps = self._parents.get(cur, ())
                cur = ps[0] if len(ps) == 1 else None
            # unwind: each node on the walk is one hop further than its parent
            for nid in reversed(path):
                if nid in anchor:
                    continue
                anchor[nid] = result
                if result is not None:
                    dist += 1
                    distance[nid] = dist
        self._anchor = anchor
        self._distance = distance
        self._und = next(n for n in self._nodes.values() if n.is_sentinel)

    # -- basic access ---------------------------------------------------

    @property
    def nodes(self) -> Mapping[str, LanguageNode]:
        return self._nodes

    @property
    def edges(self) -> tuple[DriftEdge, ...]:
        return self._edges

    @property
    def prefixes(self) -> Mapping[str, str]:
        return self._prefixes

    @property
    def anchor_index(self) -> Mapping[str, str | None]:
        return MappingProxyType(self._anchor)

    @property
    def und(self) -> LanguageNode:
        return self._und

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._nodes

    def __iter__(self) -> Iterator[LanguageNode]:
        return iter(self._nodes.values())

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"AnchorRegistry({len(self._nodes)} nodes, {len(self._edges)} edges)"

    def node(self, node_id: str) -> LanguageNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def parents(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._parents.get(node_id, ())

    def children(self, node_id: str) -> list[LanguageNode]:
        """Direct drift targets, ordered by phi then id."""
        self.node(node_id)
        kids = [self._nodes[c] for c in self._children.get(node_id, ())]
        return sorted(kids, key=lambda n: (n.phi, n.id))

    def edge(self, source: str, target: str) -> DriftEdge:
        for e in self._edges:
            if e.source == source and e.target == target:
                return e
        raise UnknownNode(f"{source} -> {target}")

    def with_prefixes(self, prefixes: Mapping[str, str]) -> AnchorRegistry:
        return AnchorRegistry(self._nodes.values(), self._edges, prefixes)

    # -- construction ---------------------------------------------------

    def add_base(self, node: LanguageNode) -> AnchorRegistry:
        if node.kind is not NodeKind.BASE:
            raise ValueError(f"{node.id} is not a base node")
        if node.phi == UNDETERMINED:
            raise SentinelReserved(f"{node.id}: {format_phi(UNDETERMINED)} is reserved for und")
        if node.id in self._nodes:
            raise DuplicateId(node.id)
        return AnchorRegistry([*self._nodes.values(), node], self._edges, self._prefixes)

    def add_drifted(
        self, node: LanguageNode, fallback_of: str, delta: DriftVector = ZERO_DRIFT
    ) -> AnchorRegistry:
        """Insert ``node`` as a drift of ``fallback_of``."""
        if node.id == fallback_of:
            raise CycleDetected(f"{node.id} cannot fall back to itself")
        if node.kind is not NodeKind.DRIFTED:
            raise ValueError(f"{node.id} is not a drifted node")
        if node.phi == UNDETERMINED:
            raise SentinelReserved(f"{node.id}: {format_phi(UNDETERMINED)} is reserved for und")
        if node.id in self._nodes:
            raise DuplicateId(node.id)
        if fallback_of not in self._nodes:
            raise UnknownTarget(fallback_of)
        if self._nodes[fallback_of].is_sentinel:
            raise SentinelReserved("und has no drift variants")
        return AnchorRegistry(
            [*self._nodes.values(), node],
            [*self._edges, DriftEdge(fallback_of, node.id, delta)],
            self._prefixes,
        )

    # -- queries --------------------------------------------------------

    def anchor_of(self, node_id: str) -> LanguageNode:
        self.node(node_id)
        anchor = self._anchor.get(node_id)
        if anchor is None:
            raise UnanchoredNode(node_id)
        return self._nodes[anchor]

    def drift_distance(self, node_id: str) -> int:
        self.anchor_of(node_id)
        return self._distance[node_id]

    def fallback_chain(self, node_id: str) -> list[LanguageNode]:
        """Node, each fallback parent up to the anchor, then und."""
        self.anchor_of(node_id)
        chain = [self._nodes[node_id]]
        while not chain[-1].is_base:
            chain.append(self._nodes[self._parents[chain[-1].id][0]])
        if not chain[-1].is_sentinel:
            chain.append(self.und)
        return chain

    def family_query(self, family: int) -> frozenset[LanguageNode]:
        return frozenset(n for n in self._nodes.values() if n.phi.family == family)

    def collapse_index(self, node_id: str, threshold: int) -> LanguageNode:
        """Treat nodes whose variant digit exceeds ``threshold`` as their anchor."""
        if not 0 <= threshold <= 9:
            raise ValueError(f"threshold must be within 0..9, got {threshold}")
        node = self.node(node_id)
        if node.is_base or node.phi.variant <= threshold:
            return node
        return self.anchor_of(node_id)

    def anchored_subtree(self, node_id: str) -> list[LanguageNode]:
        """Breadth-first drift descendants of ``node_id``, children in phi order."""
        out: list[LanguageNode] = []
        seen = {node_id}
        frontier = [node_id]
        while frontier:
            nxt = []
            for nid in frontier:
                for child in self.children(nid):
                    if child.id not in seen:
                        seen.add(child.id)
                        out.append(child)
                        nxt.append(child.id)
            frontier = nxt
        return out

    # -- validation -----------------------------------------------------

    def validate(self) -> ValidationReport:
        findings: list[Finding] = []

        def error(code: str, node: str, message: str) -> None:
            findings.append(Finding(Level.ERROR, code, node, message))

        ids = list(self._nodes)
        cyclic = set(_cyclic_nodes(ids, self._children))
        for nid in ids:
            if nid in cyclic:
                error("CycleDetected", nid, "node lies on a drift cycle")

        hybrid = set()
        for nid, node in self._nodes.items():
            ps = self._parents.get(nid, ())
            if not node.is_base and len(ps) > 1:
                hybrid.add(nid)
                error("MultipleAnchors", nid, f"hybrid drift from {', '.join(ps)}")
            if not node.is_base and not ps:
                error("UnanchoredNode", nid, "drifted node has no fallback parent")
            elif self._anchor.get(nid) is None and nid not in cyclic and nid not in hybrid:
                error("UnanchoredNode", nid, "no base node reachable")

        for e in self._edges:
            a, b = self._anchor.get(e.source), self._anchor.get(e.target)
            if a is not None and b is not None and a != b:
                error("CrossAnchorEdge", e.source, f"drift to {e.target} crosses anchors {a} and {b}")

        sentinels = [n for n in self._nodes.values() if n.phi == UNDETERMINED]
        if not sentinels:
            error("MissingSentinel", UND_ID, "no undetermined node")
        for extra in sentinels[1:]:
            error("SentinelReserved", extra.id, f"{format_phi(UNDETERMINED)} is already taken by {sentinels[0].id}")
        for s in sentinels[:1]:
            if not s.is_base or s.iso_code != "und":
                error("SentinelReserved", s.id, "undetermined node must be a base node with code und")
            if self._parents.get(s.id) or self._children.get(s.id):
                error("SentinelEdge", s.id, "undetermined node must not take part in drift")

        seen_base: dict[tuple[str | None, PhiIndex], str] = {}
        for node in self._nodes.values():
            if not node.is_base or node.is_sentinel:
                continue
            key = (node.iso_code, node.phi)
            if key in seen_base:
                error("DuplicateBase", node.id, f"same code and index as {seen_base[key]}")
            else:
                seen_base[key] = node.id

        by_phi: dict[PhiIndex, list[str]] = defaultdict(list)
        for node in self._nodes.values():
            by_phi[node.phi].append(node.id)
        for phi, holders in by_phi.items():
            for nid in holders[1:]:
                findings.append(
                    Finding(Level.WARNING, "DuplicatePhi", nid, f"{format_phi(phi)} also used by {holders[0]}")
                )
        return ValidationReport(tuple(findings))
