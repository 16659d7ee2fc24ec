"""Exception and warning types shared across the package."""


class CrowdAffectError(Exception):
    """Base class for all crowdaffect errors."""


class UnknownEmotionError(CrowdAffectError):
    """A token does not name any of the 11 emotion categories."""

    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown emotion category: {token!r}")


class CompoundSizeError(CrowdAffectError):
    """A compound label must combine two or three distinct emotions."""


class NeutralInCompoundError(CrowdAffectError):
    """Neutral cannot be a member of a compound emotion label."""


class ValidationError(CrowdAffectError):
    """An annotation record or corpus violates a structural constraint."""


class InputDataError(CrowdAffectError):
    """An input file could not be parsed; message names the offending record."""


class EmptyCorpusError(CrowdAffectError):
    """The operation requires at least one clip/record."""


class NumericalFailureError(CrowdAffectError):
    """A non-finite value appeared inside the EM computation."""

    def __init__(self, message: str, clip_index: int | None = None):
        self.clip_index = clip_index
        super().__init__(message)


class PolicyInfeasibleError(CrowdAffectError):
    """The retention policy cannot be satisfied by the corpus."""


class NoValidLabelError(CrowdAffectError):
    """A clip has no valid label to select a predominant emotion from."""


class UndefinedAlphaError(CrowdAffectError):
    """Cronbach's alpha is undefined for the given score matrix."""


class MissingDurationError(CrowdAffectError):
    """Clips lack duration metadata required for distribution statistics."""

    def __init__(self, video_ids: list[str]):
        self.video_ids = list(video_ids)
        shown = ", ".join(self.video_ids[:10])
        more = "" if len(self.video_ids) <= 10 else f" (+{len(self.video_ids) - 10} more)"
        super().__init__(f"missing duration for video_ids: {shown}{more}")


class DegenerateDataWarning(UserWarning):
    """Emitted when a degenerate input forces a fallback rule (not an error)."""
