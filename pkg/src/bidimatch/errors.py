"""Exception hierarchy shared across the package.

Every operational failure raises a subclass of :class:`BidimatchError` so
callers (CLI, HTTP layer) can map errors to exit codes / status codes in one
place.
"""

from __future__ import annotations


class BidimatchError(Exception):
    """Base class for all package errors."""


# -- configuration ----------------------------------------------------------


class MissingFile(BidimatchError):
    """A required file path does not exist."""


class InvalidValue(BidimatchError):
    """A supplied value violates an invariant; message names the key."""

    def __init__(self, key: str, detail: str = ""):
        self.key = key
        super().__init__(f"invalid value for {key!r}" + (f": {detail}" if detail else ""))


# -- smart match ------------------------------------------------------------


class EmptyBreakdown(BidimatchError):
    """A match breakdown without any component scores cannot be totalled."""


class UnknownKind(BidimatchError):
    """Unrecognized component or entity kind."""


# -- sentiment --------------------------------------------------------------


class EmptyText(BidimatchError):
    """Sentiment analysis requires non-empty input text."""


# -- bandit -----------------------------------------------------------------


class TooManyActions(BidimatchError):
    """Rank request exceeds the per-call action limit."""


class EmptyActions(BidimatchError):
    """Rank request carries no actions."""


class DuplicateActionIds(BidimatchError):
    """Rank request action ids are not unique."""


class UnknownEvent(BidimatchError):
    """Reward referenced an event id that was never ranked."""


class OutOfRange(BidimatchError):
    """A reward or label value lies outside [0, 1]."""


class WindowExpired(BidimatchError):
    """Reward arrived after the configured wait window."""


class LabelOutOfRange(BidimatchError):
    """A supervision label lies outside [0, 1]."""


class CorruptSnapshot(BidimatchError):
    """Model snapshot failed its integrity check."""


# -- offline evaluation -----------------------------------------------------


class InsufficientEvents(BidimatchError):
    """Log is smaller than the configured evaluation floor."""


class MissingPropensity(BidimatchError):
    """A logged event lacks a usable propensity."""


class EmptyLog(BidimatchError):
    """An operation over logged events received none."""


# -- baselines --------------------------------------------------------------


class EmptyCorpus(BidimatchError):
    """TF-IDF fitting requires at least one document."""


class UnfittedModel(BidimatchError):
    """Query issued against a model with no fitted documents."""


class NoNeighbors(BidimatchError):
    """No similar rater has rated the requested facility."""


class UnknownTraveler(BidimatchError):
    """Traveler id missing from the ratings matrix or store."""


# -- feed pipeline ----------------------------------------------------------


class SourceUnavailable(BidimatchError):
    """Raw feed source unreachable after retries."""


class StoreUnavailable(BidimatchError):
    """A file-backed store could not be opened."""


# -- service ----------------------------------------------------------------


class EmptyStore(BidimatchError):
    """An operation requires a populated entity store."""


class UnknownJob(BidimatchError):
    """Job id missing from the job store."""


class UnknownModel(BidimatchError):
    """Model name is neither the traveler model nor the job model."""


class NoEligibleActions(BidimatchError):
    """No eligible candidates survive filtering for a recommendation."""
