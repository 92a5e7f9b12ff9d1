"""Exception types shared across the library.

Everything raised on purpose derives from :class:`NucleusSearchError`, so
callers can catch one base class at an API boundary and still tell the
failure modes apart by subclass.
"""


class NucleusSearchError(Exception):
    """Base class for all errors raised by this library."""


class InvalidDistribution(NucleusSearchError):
    """A probability vector has negative entries or does not sum to one."""


class InvalidTokenId(NucleusSearchError):
    """A token id is out of vocabulary range or is EOS where EOS is illegal."""


class MisplacedEos(NucleusSearchError):
    """A scored sequence is empty, lacks EOS, or has EOS before the end."""


class UnknownContext(NucleusSearchError):
    """A table model has no entry for a (context, prefix) pair and no fallback."""


class EmptyCorpus(NucleusSearchError):
    """An n-gram training corpus contains no usable lines."""


class ModelFormatError(NucleusSearchError):
    """A model file (or in-memory model description) is malformed."""


class InvalidThreshold(NucleusSearchError):
    """A nucleus threshold p lies outside (0, 1]."""


class InvalidConfig(NucleusSearchError):
    """A search configuration mixes or misses algorithm parameters."""


class NoFinishedHypothesis(NucleusSearchError):
    """Search exhausted its budget without producing any EOS-terminated output."""


class SpaceTooLarge(NucleusSearchError):
    """Brute-force enumeration would exceed the sequence-count guard."""


class MissingTrace(NucleusSearchError):
    """Rank analysis was asked to process a result without rank information."""


class UnfinishedHypothesis(NucleusSearchError):
    """Length normalization was applied to a hypothesis that never emitted EOS."""


class EmptyResult(NucleusSearchError):
    """An operation that needs at least one finished hypothesis received none."""
