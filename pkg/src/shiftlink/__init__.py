"""Record linking for process-industry shift books.

Pairwise scoring of log records with a trained feedforward model over
jointly-encoded text and machinery-code similarity, time-dependent clustering
into chains, and coreference-style evaluation.
"""

__version__ = "0.1.0"

from .corpus import Chain, Corpus, Record, load_corpus, save_corpus  # noqa: F401
from .errors import (  # noqa: F401
    ConfigError,
    DivergenceError,
    RemoteEncoderError,
    ShiftlinkError,
    ValidationError,
)
