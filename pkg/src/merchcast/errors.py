"""Exception hierarchy shared across the package.

Every error raised on a contract violation derives from MerchcastError so
callers (and the CLI driver) can catch one base class and map it to a
diagnostic with the owning module's name.
"""


class MerchcastError(Exception):
    """Base class for all package errors."""

    module = "merchcast"


# --- dataset ---------------------------------------------------------------

class DatasetError(MerchcastError):
    module = "dataset"


class UnknownColumnError(DatasetError):
    """Header row does not match the expected movie schema."""


class FieldTypeError(DatasetError):
    """A cell could not be coerced to the field's declared type."""


class DuplicateIdError(DatasetError):
    """Two rows carry the same record id."""


class EmptyDatasetError(DatasetError):
    """An operation requiring at least one record received none."""


class MissingDataRejectedError(DatasetError):
    """Reject imputation policy met a record with a gap."""


class AllMissingColumnError(DatasetError):
    """A column has gaps but no present values to impute from."""


class UnfittedEncoderError(DatasetError):
    """encode() called with an encoder whose vocabularies were never fitted."""


class UnknownCategoryError(DatasetError):
    """Strict encoding met a category absent from the fitted vocabulary."""


class UnlabeledRecordError(DatasetError):
    """An operation requiring labels met an unlabeled record."""


# --- delphi ----------------------------------------------------------------

class DelphiError(MerchcastError):
    module = "delphi"


class TooFewExpertsError(DelphiError):
    """A session needs at least two experts for score dispersion to exist."""


class EmptySampleSetError(DelphiError):
    pass


class RoundClosedError(DelphiError):
    """Submission targeted a round that is not the currently open one."""


class RoundAlreadyClosedError(DelphiError):
    pass


class RoundNotClosedError(DelphiError):
    pass


class UnknownExpertError(DelphiError):
    pass


class UnknownSampleError(DelphiError):
    pass


class IncompleteSheetError(DelphiError):
    """A submission does not cover every open sample."""


class ScoreOutOfRangeError(DelphiError):
    pass


class MissingSubmissionsError(DelphiError):
    """Round close attempted while experts still owe score sheets."""

    def __init__(self, missing_experts):
        self.missing_experts = tuple(missing_experts)
        super().__init__(
            "round cannot close, missing submissions from: "
            + ", ".join(str(e) for e in self.missing_experts)
        )


class SessionIncompleteError(DelphiError):
    pass


# --- learners ---------------------------------------------------------------

class LearnerError(MerchcastError):
    module = "learners"


class InvalidParamsError(LearnerError):
    pass


class SchemaMismatchError(LearnerError):
    """Prediction input does not match the column layout the model saw at fit time."""


class SingularDesignWarning(UserWarning):
    """Normal equations were not positive definite; a tiny ridge was added."""


class NonConvergenceWarning(UserWarning):
    """Coordinate descent hit the sweep cap before the tolerance."""


# --- evaluation --------------------------------------------------------------

class EvaluationError(MerchcastError):
    module = "evaluation"


class LengthMismatchError(EvaluationError):
    pass


class TooFewRecordsError(EvaluationError):
    pass


# --- ensemble ----------------------------------------------------------------

class EnsembleError(MerchcastError):
    module = "ensemble"


class InvalidWeightsError(EnsembleError):
    pass


class InvalidStepError(EnsembleError):
    pass


# --- cli / config ------------------------------------------------------------

class CliError(MerchcastError):
    module = "cli"


class ConfigError(CliError):
    pass
