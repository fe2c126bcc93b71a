"""Timing and coverage of anchor resolution on generated drift forests.

For each forest size, build a random registry (one drift tree per family,
depth at most 9), validate it, then resolve every node to its anchor and
walk its fallback chain. Prints one row per size.

    python3 scripts/resolution_sweep.py --sizes 100 500 1000 --seed 3
"""

from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass

from phianchor import AnchorRegistry, DriftEdge, LanguageNode, NodeKind, PhiIndex

PREFIXES = {"ex": "http://example.org/lang#"}


@dataclass(frozen=True)
class SweepConfig:
    sizes: tuple[int, ...] = (100, 250, 500, 1000)
    max_depth: int = 9
    seed: int = 0


def _code(n: int) -> str:
    return "abcdefghijklmnopqrstuvwxyz"[n // 26] + "abcdefghijklmnopqrstuvwxyz"[n % 26]


def build_forest(rng: random.Random, n_nodes: int, max_depth: int) -> AnchorRegistry:
    # 100 families x 10 variants caps a registry at 999 user nodes (phi99.9 is reserved)
    slots = [(f, v) for f in range(99) for v in range(10)]
    families: dict[int, list[int]] = {}
    for f, v in rng.sample(slots, min(n_nodes, len(slots))):
        families.setdefault(f, []).append(v)
    nodes, edges = [], []
    for fam, variants in families.items():
        variants.sort()
        root = f"ex:f{fam}_{variants[0]}"
        nodes.append(LanguageNode(root, NodeKind.BASE, PhiIndex(fam, variants[0]), _code(fam)))
        depth = {root: 0}
        for v in variants[1:]:
            parent = rng.choice([p for p, d in depth.items() if d < max_depth])
            nid = f"ex:f{fam}_{v}"
            nodes.append(LanguageNode(nid, NodeKind.DRIFTED, PhiIndex(fam, v)))
            edges.append(DriftEdge(parent, nid))
            depth[nid] = depth[parent] + 1
    return AnchorRegistry.from_parts(nodes, edges, PREFIXES)


def run(cfg: SweepConfig) -> list[dict[str, object]]:
    rng = random.Random(cfg.seed)
    rows = []
    for size in cfg.sizes:
        t0 = time.perf_counter()
        reg = build_forest(rng, size, cfg.max_depth)
        t1 = time.perf_counter()
        report = reg.validate()
        t2 = time.perf_counter()
        resolved = deepest = 0
        for node in reg:
            chain = reg.fallback_chain(node.id)
            if chain[-1].is_sentinel and (node.is_sentinel or chain[-2] == reg.anchor_of(node.id)):
                resolved += 1
            deepest = max(deepest, reg.drift_distance(node.id))
        t3 = time.perf_counter()
        rows.append({
            "nodes": len(reg),
            "valid": report.ok,
            "resolved": f"{resolved}/{len(reg)}",
            "max_depth": deepest,
            "build_ms": round((t1 - t0) * 1e3, 1),
            "validate_ms": round((t2 - t1) * 1e3, 1),
            "resolve_ms": round((t3 - t2) * 1e3, 1),
        })
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=list(SweepConfig.sizes))
    parser.add_argument("--max-depth", type=int, default=SweepConfig.max_depth)
    parser.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = parser.parse_args()
    rows = run(SweepConfig(tuple(args.sizes), args.max_depth, args.seed))
    header = list(rows[0])
    print("\t".join(header))
    for row in rows:
        print("\t".join(str(row[h]) for h in header))


if __name__ == "__main__":
    main()
