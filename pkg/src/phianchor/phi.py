"""Drift coordinates and the drift algebra.

A :class:`PhiIndex` is the two-part coordinate ``phi<family>.<variant>``;
a :class:`DriftVector` is an opaque, labeled drift that composes with ``+``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

__all__ = [
    "MalformedIndex",
    "OutOfRange",
    "PhiIndex",
    "UNDETERMINED",
    "parse_phi",
    "format_phi",
    "is_undetermined",
    "DriftVector",
    "ZERO_DRIFT",
    "compose_drift",
]

MAX_FAMILY = 99
MAX_VARIANT = 9

# "phi" or the Greek letter (both code points), then unpadded decimals.
_PHI_RE = re.compile(r"(?:phi|φ|ϕ)(0|[1-9][0-9]*)\.(0|[1-9][0-9]*)")


class MalformedIndex(ValueError):
    """Text does not have the shape ``phi<digits>.<digits>``."""


class OutOfRange(ValueError):
    """Family above 99 or variant above 9."""


@dataclass(frozen=True, order=True)
class PhiIndex:
    family: int
    variant: int

    def __post_init__(self) -> None:
        if isinstance(self.family, bool) or isinstance(self.variant, bool):
            raise TypeError("phi components must be integers")
        if not (0 <= self.family <= MAX_FAMILY):
            raise OutOfRange(f"family {self.family} outside 0..{MAX_FAMILY}")
        if not (0 <= self.variant <= MAX_VARIANT):
            raise OutOfRange(f"variant {self.variant} outside 0..{MAX_VARIANT}")

    def __str__(self) -> str:
        return format_phi(self)

    @property
    def undetermined(self) -> bool:
        return is_undetermined(self)


UNDETERMINED = PhiIndex(MAX_FAMILY, MAX_VARIANT)


def parse_phi(text: str) -> PhiIndex:
    """Parse ``phi8.7`` (or ``φ8.7``) into a :class:`PhiIndex`.

    Raises :class:`MalformedIndex` for anything that is not the exact grammar,
    including surrounding whitespace and zero padding, and :class:`OutOfRange`
    for well-shaped text whose numbers exceed the bounds.
    """
    if not isinstance(text, str):
        raise MalformedIndex(f"expected str, got {type(text).__name__}")
    m = _PHI_RE.fullmatch(text)
    if m is None:
        raise MalformedIndex(f"not a phi index: {text!r}")
    return PhiIndex(int(m.group(1)), int(m.group(2)))


def format_phi(p: PhiIndex) -> str:
    return f"phi{p.family}.{p.variant}"


def is_undetermined(p: PhiIndex) -> bool:
    return p == UNDETERMINED


@dataclass(frozen=True)
class DriftVector:
    """A named drift with free-form descriptors.

    ``invertible`` declares that an anchor-inverse exists, i.e. applying the
    drift and then undoing it lands back on the same anchor.
    """

    label: str = ""
    features: Mapping[str, str] = field(default_factory=dict)
    invertible: bool = True

    SEPARATOR = "+"

    def __add__(self, other: DriftVector) -> DriftVector:
        return compose_drift(self, other)

    @property
    def is_zero(self) -> bool:
        return not self.label and not self.features

    def __hash__(self) -> int:
        return hash((self.label, tuple(sorted(self.features.items())), self.invertible))


ZERO_DRIFT = DriftVector()


def compose_drift(d1: DriftVector, d2: DriftVector) -> DriftVector:
    """Combine two drifts, ``d1`` applied first.

    Labels concatenate with ``+``; features merge with later keys winning.
    Empty labels are skipped so the zero drift is a two-sided identity.
    """
    label = DriftVector.SEPARATOR.join(lab for lab in (d1.label, d2.label) if lab)
    return DriftVector(
        label=label,
        features={**d1.features, **d2.features},
        invertible=d1.invertible and d2.invertible,
    )
