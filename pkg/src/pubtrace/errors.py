"""Exception types shared across the package.

Two broad families matter to callers: :class:`ValidationError` (bad input
data, CLI exit code 2) and :class:`BackendError` (a remote or fixture
backend failed, CLI exit code 3).
"""

from __future__ import annotations


class PubtraceError(Exception):
    """Base class for every error raised deliberately by this package."""


class ValidationError(PubtraceError):
    """Input data violated a documented schema or invariant."""


class MalformedRecord(ValidationError):
    """A single input record could not be parsed or failed validation."""

    def __init__(self, line_no: int | None, reason: str):
        self.line_no = line_no
        self.reason = reason
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{reason}")


class DuplicateArxivId(ValidationError):
    """The same arXiv id appeared twice within one corpus."""

    def __init__(self, arxiv_id: str, line_no: int | None = None):
        self.arxiv_id = arxiv_id
        self.line_no = line_no
        super().__init__(f"duplicate arxiv_id {arxiv_id!r}")


class XmlSyntax(ValidationError):
    """The XML stream is not well formed; parsing cannot continue."""

    def __init__(self, position: tuple[int, int], message: str = ""):
        self.position = position
        super().__init__(f"XML syntax error at line {position[0]}, column {position[1]}: {message}")


class BackendError(PubtraceError):
    """A candidate-retrieval or scoring backend failed."""


class BackendUnavailable(BackendError):
    """The live backend could not be reached within the retry budget."""


class FixtureMiss(BackendError):
    """Fixture mode has no stored response for this query."""

    def __init__(self, query: str):
        self.query = query
        super().__init__(f"no fixture for query {query!r}")


class ScorerUnavailable(BackendError):
    """The remote scorer is unreachable or returned a malformed response."""


class InsufficientSamples(PubtraceError):
    """A dataset partition cannot reach its configured target size."""

    def __init__(self, partition: str, have: int, want: int):
        self.partition = partition
        self.have = have
        self.want = want
        super().__init__(f"partition {partition!r}: have {have} samples, want {want}")


class EmptyInput(ValidationError):
    """An operation that requires data received none."""


class TooFewSamples(ValidationError):
    """Sample too small for the requested statistical transform."""

    def __init__(self, n: int, floor: int):
        self.n = n
        self.floor = floor
        super().__init__(f"need at least {floor} observations, got {n}")


class DegenerateSample(ValidationError):
    """Sample has zero variance; the statistic is undefined."""
