"""The fixed 11-emotion vocabulary and compound-category naming.

Every other module speaks in terms of these categories; the names and
two-letter codes below appear verbatim in all file formats and reports.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .errors import CompoundSizeError, NeutralInCompoundError, UnknownEmotionError

MAX_COMPOUND_SIZE = 3


@enum.unique
class Emotion(enum.Enum):
    """One of the 11 emotion categories; values are the two-letter codes."""

    ANGER = "AN"
    DISGUST = "DI"
    FEAR = "FE"
    HAPPINESS = "HA"
    NEUTRAL = "NE"
    SADNESS = "SA"
    SURPRISE = "SU"
    CONTEMPT = "CO"
    ANXIETY = "AX"
    HELPLESSNESS = "HL"
    DISAPPOINTMENT = "DS"

    @property
    def code(self) -> str:
        return self.value

    @property
    def display_name(self) -> str:
        return self.name.capitalize()

    @property
    def ordinal(self) -> int:
        return _ORDINALS[self]

    def __repr__(self) -> str:  # keep reprs short in test output
        return f"Emotion.{self.name}"


_ORDINALS: dict[Emotion, int] = {e: i for i, e in enumerate(Emotion)}
_BY_TOKEN: dict[str, Emotion] = {}
for _e in Emotion:
    _BY_TOKEN[_e.display_name.lower()] = _e
    _BY_TOKEN[_e.code.lower()] = _e

ALL_EMOTIONS: tuple[Emotion, ...] = tuple(Emotion)
N_CATEGORIES = len(ALL_EMOTIONS)


def parse_emotion(text: str) -> Emotion:
    """Look up a category by full name or two-letter code, case-insensitively."""
    try:
        return _BY_TOKEN[text.strip().lower()]
    except KeyError:
        raise UnknownEmotionError(text) from None


@dataclass(frozen=True)
class CompoundEmotion:
    """Two or three distinct non-neutral emotions, kept in ordinal order.

    The canonical name joins member names with "," and is identical for any
    input ordering of the same member set.
    """

    members: tuple[Emotion, ...]

    def __post_init__(self):
        if not 2 <= len(set(self.members)) == len(self.members) <= MAX_COMPOUND_SIZE:
            raise CompoundSizeError(
                f"a compound needs 2..{MAX_COMPOUND_SIZE} distinct emotions, "
                f"got {[m.display_name for m in self.members]}"
            )
        if Emotion.NEUTRAL in self.members:
            raise NeutralInCompoundError("Neutral cannot appear in a compound label")
        ordered = tuple(sorted(self.members, key=lambda e: e.ordinal))
        object.__setattr__(self, "members", ordered)

    @property
    def canonical_name(self) -> str:
        return ",".join(m.display_name for m in self.members)

    def __str__(self) -> str:
        return self.canonical_name


def compound_from_members(members: Iterable[Emotion]) -> CompoundEmotion:
    """Build the canonical compound for a member set, in any input order."""
    return CompoundEmotion(tuple(members))


def parse_compound(text: str) -> CompoundEmotion:
    """Parse a comma-separated compound name such as "Anger,Disgust"."""
    return compound_from_members(parse_emotion(tok) for tok in text.split(","))
