"""Movie merchandising value prediction.

Pipeline stages: ingest or synthesize movie records, label them through
iterated anonymous expert scoring, encode features, train four regression
learners, and blend the three strongest into a weighted ensemble. The
`merchcast` CLI drives every stage; the delphi HTTP service hosts live expert
scoring sessions.
"""

from . import delphi, encoding, ensemble, evaluation, learners, records, synthetic

__version__ = "0.1.0"

__all__ = [
    "delphi",
    "encoding",
    "ensemble",
    "evaluation",
    "learners",
    "records",
    "synthetic",
    "__version__",
]
