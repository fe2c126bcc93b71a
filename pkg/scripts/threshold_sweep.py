"""How the collapse threshold and resolver settings change outcomes on the bundled registry.

Part one: for every collapse threshold 0..9, how many registry nodes keep
their own identity. Part two: resolve a small set of sentences under a grid
of (min_confidence, margin) settings and print the resulting tag per cell.

    python3 scripts/threshold_sweep.py
    python3 scripts/threshold_sweep.py --registry my.ttl --lexicons lex/ --text "abeg make we go"
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from phianchor import (
    FIXTURE_LEXICONS,
    FIXTURE_TTL,
    ResolverConfig,
    encode_bcp47,
    load_lexicons,
    read_registry,
    resolve_language,
    wordlist_estimator,
)

SENTENCES = (
    "How bodi",
    "how are you today",
    "abeg wetin dey happen",
    "sup wetin dey happen o",
    "ni hao wo shi zhongguo",
    "咱 整 啥",
    "the wahala don too much",
)


@dataclass(frozen=True)
class GridConfig:
    registry: Path = FIXTURE_TTL
    lexicons: Path = FIXTURE_LEXICONS
    min_confidences: tuple[float, ...] = (0.4, 0.6, 0.8)
    margins: tuple[float, ...] = (0.0, 0.1, 0.3)
    sentences: tuple[str, ...] = field(default=SENTENCES)


def collapse_table(registry) -> list[tuple[int, int, list[str]]]:
    rows = []
    for t in range(10):
        merged = sorted(n.id for n in registry if registry.collapse_index(n.id, t) != n)
        rows.append((t, len(registry) - len(merged), merged))
    return rows


def resolution_grid(cfg: GridConfig, registry) -> list[list[str]]:
    estimator = wordlist_estimator(load_lexicons(cfg.lexicons, registry))
    table = []
    for text in cfg.sentences:
        row = [text]
        for mc in cfg.min_confidences:
            for margin in cfg.margins:
                out = resolve_language(text, registry, estimator, ResolverConfig(min_confidence=mc, margin=margin))
                row.append(f"{encode_bcp47(out.node, registry)}@{out.confidence:.2f}")
        table.append(row)
    return table


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--registry", type=Path, default=GridConfig.registry)
    parser.add_argument("--lexicons", type=Path, default=GridConfig.lexicons)
    parser.add_argument("--text", action="append", help="sentence to resolve (repeatable)")
    args = parser.parse_args()
    cfg = GridConfig(args.registry, args.lexicons, sentences=tuple(args.text) if args.text else SENTENCES)
    registry = read_registry(cfg.registry.read_text(encoding="utf-8"))

    print("threshold\tkept\tcollapsed")
    for t, kept, merged in collapse_table(registry):
        print(f"{t}\t{kept}/{len(registry)}\t{' '.join(merged) or '-'}")

    print()
    cols = [f"mc={mc} m={m}" for mc in cfg.min_confidences for m in cfg.margins]
    print("\t".join(["text", *cols]))
    for row in resolution_grid(cfg, registry):
        print("\t".join(row))


if __name__ == "__main__":
    main()
