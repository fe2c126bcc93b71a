"""Registry generators: seeded ``random`` builders and hypothesis strategies."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from phianchor.graph import AnchorRegistry, DriftEdge, LanguageNode, NodeKind, SCHEMA_IRI
from phianchor.phi import PhiIndex

EX = "http://example.org/lang#"
PREFIXES = {"ex": EX, "iso639": SCHEMA_IRI}


def random_forest(
    rng: random.Random,
    n_families: int,
    max_per_family: int = 10,
    max_depth: int = 9,
) -> AnchorRegistry:
    """Valid registry: one drift tree per phi family, unique index per node."""
    families = rng.sample(range(0, 99), n_families)
    nodes: list[LanguageNode] = []
    edges: list[DriftEdge] = []
    for fam in families:
        variants = rng.sample(range(10), rng.randint(1, max_per_family))
        base_id = f"ex:f{fam}_v{variants[0]}"
        nodes.append(
            LanguageNode(base_id, NodeKind.BASE, PhiIndex(fam, variants[0]), iso_code=f"{_code(fam)}")
        )
        depth = {base_id: 0}
        for v in variants[1:]:
            parent = rng.choice([p for p, d in depth.items() if d < max_depth])
            nid = f"ex:f{fam}_v{v}"
            code = rng.choice([None, None, _code(fam + 100 + v)])
            nodes.append(LanguageNode(nid, NodeKind.DRIFTED, PhiIndex(fam, v), iso_code=code))
            edges.append(DriftEdge(parent, nid))
            depth[nid] = depth[parent] + 1
    return AnchorRegistry.from_parts(nodes, edges, PREFIXES)


def random_chain_forest(rng: random.Random, n_families: int, depth: int = 9) -> AnchorRegistry:
    """Forest whose trees are single chains of exactly ``depth`` drift steps."""
    nodes, edges = [], []
    for fam in rng.sample(range(0, 99), n_families):
        prev = f"ex:c{fam}_0"
        nodes.append(LanguageNode(prev, NodeKind.BASE, PhiIndex(fam, 0), iso_code=_code(fam)))
        for v in range(1, depth + 1):
            nid = f"ex:c{fam}_{v}"
            nodes.append(LanguageNode(nid, NodeKind.DRIFTED, PhiIndex(fam, v)))
            edges.append(DriftEdge(prev, nid))
            prev = nid
    return AnchorRegistry.from_parts(nodes, edges, PREFIXES)


def _code(n: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return letters[n // 26 % 26] + letters[n % 26] + "x"


def corrupt(rng: random.Random, registry: AnchorRegistry) -> AnchorRegistry:
    """Apply one random structural edit; the result may or may not be valid."""
    nodes = [n for n in registry if n.id != "iso639:und"]
    edges = list(registry.edges)
    ids = [n.id for n in nodes]
    choice = rng.randrange(7)
    if choice == 0 and ids:
        edges.append(DriftEdge(rng.choice(ids), rng.choice(ids)))
    elif choice == 1 and edges:
        edges.pop(rng.randrange(len(edges)))
    elif choice == 2 and nodes:
        i = rng.randrange(len(nodes))
        n = nodes[i]
        kind = NodeKind.DRIFTED if n.is_base else NodeKind.BASE
        nodes[i] = LanguageNode(n.id, kind, n.phi, n.iso_code)
    elif choice == 3 and edges:
        e = edges[rng.randrange(len(edges))]
        edges.append(DriftEdge(e.target, e.source))
    elif choice == 4 and len(nodes) >= 2:
        a, b = rng.sample(nodes, 2)
        if a.is_base and b.is_base:
            nodes[nodes.index(b)] = LanguageNode(b.id, b.kind, a.phi, a.iso_code)
    elif choice == 5 and ids:
        edges.append(DriftEdge(rng.choice(ids), "iso639:und"))
    elif choice == 6:
        nodes.append(LanguageNode("ex:extra", NodeKind.DRIFTED, PhiIndex(1, 1)))
        if ids and rng.random() < 0.5:
            edges.append(DriftEdge(rng.choice(ids), "ex:extra"))
    return AnchorRegistry.from_parts(nodes, edges, PREFIXES)


def random_graph(rng: random.Random, max_nodes: int = 12) -> AnchorRegistry:
    """Seeded counterpart of ``graphs``; nothing about the result is guaranteed valid."""
    n = rng.randint(1, max_nodes)
    phis = [PhiIndex(f, v) for f in range(4) for v in range(4)] + [PhiIndex(99, 9)]
    nodes = [
        LanguageNode(
            f"ex:n{i}",
            rng.choice([NodeKind.BASE, NodeKind.DRIFTED, NodeKind.DRIFTED]),
            rng.choice(phis),
            rng.choice([None, "aa", "bb", "und"]),
        )
        for i in range(n)
    ]
    ids = [node.id for node in nodes] + (["iso639:und"] if not any(x.is_sentinel for x in nodes) else [])
    edges = [DriftEdge(rng.choice(ids), rng.choice(ids)) for _ in range(rng.randint(0, 15))]
    return AnchorRegistry.from_parts(nodes, edges, PREFIXES)


# -- hypothesis ---------------------------------------------------------------


@st.composite
def forests(draw, max_families: int = 4) -> AnchorRegistry:
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_families))
    return random_forest(random.Random(seed), n)


@st.composite
def graphs(draw, max_nodes: int = 12, allow_duplicate_edges: bool = True) -> AnchorRegistry:
    """Arbitrary small registries: cycles, hybrids, orphans, duplicate indices."""
    n = draw(st.integers(1, max_nodes))
    phis = st.sampled_from([PhiIndex(f, v) for f in range(4) for v in range(4)] + [PhiIndex(99, 9)])
    nodes = []
    for i in range(n):
        kind = draw(st.sampled_from([NodeKind.BASE, NodeKind.DRIFTED, NodeKind.DRIFTED]))
        phi = draw(phis)
        code = draw(st.sampled_from([None, "aa", "bb", "und"]))
        nodes.append(LanguageNode(f"ex:n{i}", kind, phi, code))
    ids = [node.id for node in nodes] + (["iso639:und"] if not any(x.is_sentinel for x in nodes) else [])
    pairs = st.tuples(st.sampled_from(ids), st.sampled_from(ids))
    if allow_duplicate_edges:
        edge_pairs = draw(st.lists(pairs, max_size=15))
    else:
        edge_pairs = draw(st.lists(pairs, max_size=15, unique=True))
    edges = [DriftEdge(a, b) for a, b in edge_pairs]
    return AnchorRegistry.from_parts(nodes, edges, PREFIXES)
