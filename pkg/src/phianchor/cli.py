"""Command-line front end.

Exit status: 0 success, 1 domain finding (invalid registry, unknown node),
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .bcp47 import MalformedTag, NoIsoCode, UnknownCode, decode_bcp47, encode_bcp47
from .graph import AnchorRegistry, LanguageNode, RegistryError, UnanchoredNode, UnknownNode
from .phi import format_phi, parse_phi
from .rdf import ConversionError, TurtleSyntaxError, parse_turtle, read_registry, serialize_turtle, write_registry
from .resolver import EmptyRegistry, ResolverConfig, export_trace, load_lexicons, resolve_language, wordlist_estimator

EXIT_OK, EXIT_FINDING, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, status: int) -> None:
        super().__init__(message)
        self.status = status


def _family(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= 99:
        raise argparse.ArgumentTypeError(f"family must lie in 0..99, got {value}")
    return value


def _unit_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {value}")
    return value


def _digit(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= 9:
        raise argparse.ArgumentTypeError(f"must lie in 0..9, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    # Shared so global flags work before or after the subcommand.
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--registry", type=Path, help="Turtle registry file")
    common.add_argument("--lexicons", type=Path, help="directory of <node-id>.lex word lists")
    common.add_argument("--min-confidence", type=_unit_float, help="resolution threshold (default 0.6)")
    common.add_argument("--max-drift", type=_digit, help="drift hypotheses to try (default 9)")
    common.add_argument("--margin", type=_unit_float, help="required confidence gain (default 0.1)")
    common.add_argument("--threshold", type=_digit, help="collapse threshold (default 5)")

    parser = argparse.ArgumentParser(prog="phianchor", parents=[common], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check registry invariants")

    p = sub.add_parser("anchor", parents=[common], help="print the fallback chain of a node")
    p.add_argument("node", help="node id, ISO code, phi index or BCP 47 tag")

    p = sub.add_parser("resolve", parents=[common], help="resolve text to a language node")
    p.add_argument("text")
    p.add_argument("--export-rdf", action="store_true", help="also print ResolvedAnchor Turtle")

    p = sub.add_parser("family", parents=[common], help="list nodes in a phi family")
    p.add_argument("family", type=_family)

    p = sub.add_parser("convert", parents=[common], help="re-serialize or list tags")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--to-bcp47", action="store_true", help="print <id>\\t<tag> per node")
    mode.add_argument("--normalize", action="store_true", help="print canonical Turtle")
    mode.add_argument("--collapse", action="store_true", help="print <id>\\t<collapsed id> per node")

    p = sub.add_parser("parse", parents=[common], help="parse phi indices or Turtle files")
    p.add_argument("items", nargs="+")
    p.add_argument("--turtle", action="store_true", help="treat items as Turtle files")
    return parser


def _load(args: argparse.Namespace) -> AnchorRegistry:
    path = getattr(args, "registry", None)
    if path is None:
        raise CliError("--registry is required for this command", EXIT_USAGE)
    try:
        text = Path(path).read_text(encoding="utf-8")
        return read_registry(text)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_USAGE) from None
    except (TurtleSyntaxError, ConversionError, ValueError, RegistryError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_USAGE) from None


def _line(node: LanguageNode) -> str:
    parts = [format_phi(node.phi), node.id]
    if node.iso_code:
        parts.append(node.iso_code)
    return " ".join(parts)


def lookup(registry: AnchorRegistry, key: str) -> LanguageNode:
    """Find a node by id, then ISO code, then phi text, then BCP 47 tag."""
    if key in registry:
        return registry.node(key)
    coded = sorted((n for n in registry if n.iso_code == key.lower()), key=lambda n: (not n.is_base, n.id))
    if coded:
        return coded[0]
    try:
        phi = parse_phi(key)
    except ValueError:
        pass
    else:
        hits = sorted((n for n in registry if n.phi == phi), key=lambda n: n.id)
        if hits:
            return hits[0]
    if "-" in key:
        try:
            return decode_bcp47(key, registry).node
        except (MalformedTag, UnknownCode, ValueError, RegistryError):
            pass
    raise UnknownNode(key)


def cmd_validate(args: argparse.Namespace, out: TextIO) -> int:
    report = _load(args).validate()
    for line in report.lines():
        print(line, file=out)
    return EXIT_OK if report.ok else EXIT_FINDING


def cmd_anchor(args: argparse.Namespace, out: TextIO) -> int:
    registry = _load(args)
    node = lookup(registry, args.node)
    for member in registry.fallback_chain(node.id):
        print(_line(member), file=out)
    return EXIT_OK


def _config(args: argparse.Namespace) -> ResolverConfig:
    defaults = ResolverConfig()
    return ResolverConfig(
        min_confidence=getattr(args, "min_confidence", defaults.min_confidence),
        max_drift=getattr(args, "max_drift", defaults.max_drift),
        margin=getattr(args, "margin", defaults.margin),
    )


def cmd_resolve(args: argparse.Namespace, out: TextIO) -> int:
    registry = _load(args)
    lexdir = getattr(args, "lexicons", None)
    if lexdir is None or not Path(lexdir).is_dir():
        raise CliError("--lexicons must name a directory of .lex files", EXIT_USAGE)
    estimator = wordlist_estimator(load_lexicons(lexdir, registry))
    outcome = resolve_language(args.text, registry, estimator, _config(args))
    label = outcome.node.iso_code or outcome.node.id
    print(f"{label} {format_phi(outcome.phi)} {outcome.confidence!r}", file=out)
    for line in outcome.trace_lines():
        print(line, file=out)
    if args.export_rdf:
        prefixes = dict(registry.prefixes)
        print(file=out)
        print(serialize_turtle(prefixes, export_trace(outcome, registry)), end="", file=out)
    return EXIT_OK


def cmd_family(args: argparse.Namespace, out: TextIO) -> int:
    registry = _load(args)
    for node in sorted(registry.family_query(args.family), key=lambda n: (n.phi, n.id)):
        print(_line(node), file=out)
    return EXIT_OK


def cmd_convert(args: argparse.Namespace, out: TextIO) -> int:
    registry = _load(args)
    if args.normalize:
        print(write_registry(registry), end="", file=out)
        return EXIT_OK
    if args.collapse:
        threshold = getattr(args, "threshold", 5)
        for node in registry:
            try:
                target = registry.collapse_index(node.id, threshold).id
            except UnanchoredNode:
                target = "-"
            print(f"{node.id}\t{target}", file=out)
        return EXIT_OK
    for node in registry:
        try:
            tag = encode_bcp47(node, registry)
        except (NoIsoCode, UnanchoredNode):
            tag = "-"
        print(f"{node.id}\t{tag}", file=out)
    return EXIT_OK


def cmd_parse(args: argparse.Namespace, out: TextIO) -> int:
    if args.turtle:
        for item in args.items:
            try:
                prefixes, triples = parse_turtle(Path(item).read_text(encoding="utf-8"))
            except OSError as exc:
                raise CliError(f"cannot read {item}: {exc.strerror or exc}", EXIT_USAGE) from None
            except TurtleSyntaxError as exc:
                raise CliError(f"{item}:{exc}", EXIT_USAGE) from None
            for t in triples:
                print(f"{t.subject} {t.predicate} {t.object} .", file=out)
        return EXIT_OK
    for item in args.items:
        try:
            phi = parse_phi(item)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
        flag = " undetermined" if phi.undetermined else ""
        print(f"{format_phi(phi)} family={phi.family} variant={phi.variant}{flag}", file=out)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "anchor": cmd_anchor,
    "resolve": cmd_resolve,
    "family": cmd_family,
    "convert": cmd_convert,
    "parse": cmd_parse,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except CliError as exc:
        print(f"phianchor: {exc}", file=err)
        return exc.status
    except (UnknownNode, UnanchoredNode, EmptyRegistry) as exc:
        print(f"phianchor: {type(exc).__name__}: {exc}", file=err)
        return EXIT_FINDING


def main_entry() -> None:
    raise SystemExit(main())
