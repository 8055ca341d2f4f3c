"""Exception hierarchy shared by all pipeline stages."""


class PhantomError(Exception):
    """Base class; CLI maps these to exit code 1 with a JSON line on stderr."""


class Unavailable(PhantomError):
    """Repository could not be cloned (deleted, private, unreachable)."""


class Timeout(PhantomError):
    """Clone exceeded its time budget."""


class ToolMissing(PhantomError):
    """The git executable was not found on PATH."""


class NotARepository(PhantomError):
    """The given path is not a usable git repository."""


class TooFewRows(PhantomError):
    """Correlation needs at least two observations."""


class AllFeaturesDropped(PhantomError):
    """Feature selection removed every column; threshold unusable for this data."""


class ConstantColumn(PhantomError):
    """Standardization hit a zero-variance column."""


class TooFewPoints(PhantomError):
    """Clustering needs at least k points."""


class MissingLabels(PhantomError):
    """Operation requires ground-truth labels that were not provided."""


class EmptyEvaluation(PhantomError):
    """Metrics requested over zero evaluated rows."""


class NoSuccessfulCell(PhantomError):
    """Every sweep cell failed; no best model exists."""


class SchemaMismatch(PhantomError):
    """File header does not match the expected schema."""


class ParseError(PhantomError):
    """File content is malformed beyond recovery."""


class VersionMismatch(PhantomError):
    """Artifact was written with an unknown or incompatible format tag."""
