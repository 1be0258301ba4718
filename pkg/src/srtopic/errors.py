"""Exception hierarchy shared by all pipeline stages.

Three broad families map onto CLI exit codes: configuration problems
(exit 2), malformed or insufficient input data (exit 3), and model
failures at fit time (exit 4).
"""


class SrtopicError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(SrtopicError):
    """Invalid or inconsistent configuration."""

    exit_code = 2


class MissingTable(ConfigError):
    """Full preprocessing requested without a lemma table."""


class DataError(SrtopicError):
    """Input data is malformed or insufficient for the operation."""

    exit_code = 3


class BadMagic(DataError):
    """Embedding file does not start with the expected magic bytes."""


class TruncatedFile(DataError):
    """Embedding file ended before the declared payload was complete."""


class NonFiniteValue(DataError):
    """Embedding file contains a NaN or infinite value."""


class ZeroRow(DataError):
    """A vector with zero norm cannot be normalized."""


class TooFewPoints(DataError):
    """Fewer points than the neighborhood size requires."""


class EmptyCorpus(DataError):
    """No documents (or no tokens) to fit on."""


class EmptyVocabulary(DataError):
    """No term survived the vocabulary filters."""


class MismatchedIds(DataError):
    """Corpus and embedding document ids do not line up."""


class ModelError(SrtopicError):
    """A model stage failed on otherwise well-formed input."""

    exit_code = 4


class DegenerateInput(ModelError):
    """A class with zero total term count cannot be weighted."""


class NegativeInput(ModelError):
    """Factorization input must be non-negative."""


class NoTopics(ModelError):
    """Operation requires at least one topic."""
