"""Exception taxonomy shared across the package.

Two broad families matter to callers: ``UsageError`` for bad arguments or
configuration (CLI exit code 1) and ``DataError`` for malformed or
inconsistent inputs (CLI exit code 2). Anything else escaping to the CLI is
an internal error (exit code 3).
"""

from __future__ import annotations


class TermexError(Exception):
    """Base class for all package-specific errors."""


class UsageError(TermexError):
    """Invalid arguments, flags, or configuration values."""


class DataError(TermexError):
    """Malformed, inconsistent, or unusable input data."""


# --- embedding / terminology parsing ---------------------------------------

class HeaderMalformedError(DataError):
    """Embedding file header is not '<count> <dim>'."""


class DimensionMismatchError(DataError):
    """A vector line has the wrong number of components."""


class DuplicateTokenError(DataError):
    """The same token appears twice in one embedding file."""


class NonFiniteValueError(DataError):
    """A vector component is NaN or infinite."""


class ZeroVectorError(DataError):
    """An all-zero vector was supplied where cosine similarity is needed."""


class CountMismatchError(DataError):
    """Number of vector lines disagrees with the header count."""


class TooFewReplicatesError(DataError):
    """A replicate set needs at least two replicates."""


class DimMismatchAcrossReplicatesError(DataError):
    """Replicates of one corpus disagree on vector dimensionality."""


class EmptySharedVocabularyError(DataError):
    """No token is present in every replicate of a corpus."""


class MalformedTerminologyError(DataError):
    """More than half of the terminology rows were unparseable."""


# --- analysis ---------------------------------------------------------------

class ConceptAbsentError(DataError):
    """A requested concept is missing from the relevant vocabulary."""


class NotSelectableError(DataError):
    """Concept is not high-confidence in any corpus."""


class TooManyComparisonsError(UsageError):
    """More comparison concepts requested than the per-request cap."""


class TooFewPointsError(DataError):
    """A projection needs at least four input points."""


# --- snapshot persistence ---------------------------------------------------

class SnapshotError(DataError):
    """Base class for snapshot read/write failures."""


class SnapshotIoError(SnapshotError):
    """Filesystem failure while writing or reading a snapshot."""


class ConsistencyViolationError(SnapshotError):
    """Snapshot invariants do not hold; nothing was written."""


class UnsupportedVersionError(SnapshotError):
    """Snapshot format_version is not supported by this build."""


class DigestMismatchError(SnapshotError):
    """A payload file does not match its manifest digest."""


class MissingFileError(SnapshotError):
    """A file named in the manifest is absent."""
