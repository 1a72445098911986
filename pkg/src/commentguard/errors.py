"""Exception types shared across the commentguard package."""

from __future__ import annotations


class CommentGuardError(Exception):
    """Base class for all commentguard errors."""


# --- corpus / datasets ------------------------------------------------------

class EmptyInputError(CommentGuardError):
    """An operation received an empty collection where items are required."""


class DegenerateSplitError(CommentGuardError):
    """A dataset split would leave a part empty despite a positive fraction."""


# --- text processing --------------------------------------------------------

class EmptyCorpusError(CommentGuardError):
    """Vocabulary or idf fitting was attempted on an empty document set."""


# --- classifiers ------------------------------------------------------------

class SingleClassInputError(CommentGuardError):
    """Training or scoring data contains only one of the two classes."""


class NonFiniteLossError(CommentGuardError):
    """Gradient-descent training diverged (non-finite or increasing loss)."""


class UnsupportedVersionError(CommentGuardError):
    """A model file declares a format version this build cannot read."""


class CorruptModelError(CommentGuardError):
    """A model file is truncated, unparseable, or structurally invalid."""


class KindMismatchError(CommentGuardError):
    """A model file's kind is unknown or differs from the expected kind."""


# --- remote backends --------------------------------------------------------

class EmptyCommentError(CommentGuardError):
    """A remote classification was requested for an empty comment."""


class UnmappableReplyError(CommentGuardError):
    """A remote model's reply does not normalize to a known label."""


class RemoteUnavailableError(CommentGuardError):
    """A remote backend could not be reached after the configured retries."""


class RateLimitedError(CommentGuardError):
    """A remote backend kept rejecting requests for rate reasons."""


class MalformedResponseError(CommentGuardError):
    """A remote inference endpoint returned a response outside the contract."""


# --- metrics ----------------------------------------------------------------

class LengthMismatchError(CommentGuardError):
    """Paired label/score sequences have different lengths."""


class EmptyMatrixError(CommentGuardError):
    """Metric derivation was attempted on an all-zero confusion matrix."""


class InvalidMatrixError(CommentGuardError):
    """A rating matrix violates the constant-raters-per-item requirement."""


class TooFewRatersError(CommentGuardError):
    """Agreement statistics need at least two raters."""


# --- annotation sessions ----------------------------------------------------

class UnknownRaterError(CommentGuardError):
    """A rating referenced a rater that is not registered in the session."""


class UnknownItemError(CommentGuardError):
    """A rating referenced an item that is not part of the session."""


class DuplicateRatingError(CommentGuardError):
    """A (rater, item) pair already has a rating and overwrite was not set."""


class NoFullyRatedItemsError(CommentGuardError):
    """No item has been rated by every rater in the requested set."""
