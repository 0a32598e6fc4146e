"""Recurrence quantification analysis of text.

Text is coded as a categorical time series of word ids; recurrence plots
and their measures (RR, DET, ENT, MAXLINE, MEANLINE, TREND) are computed
from sparse point sets, and the same RR/DET/ENT can be re-derived from
n-gram counts.
"""

from .corpus import TokenSequence, load_manifest, slice_words, tokenize
from .errors import (
    InsufficientDataError,
    OutOfVocabularyError,
    ParseError,
    RangeError,
    RecurNLPError,
    ShapeError,
    UndefinedInputError,
)
from .recurrence import (
    LineDistribution,
    RecurrencePlot,
    RqaMeasures,
    WindowSpec,
    build_rp,
    extract_lines,
    recurrence_rate,
    rqa_measures,
    trend,
    windowed_rqa,
)

__version__ = "0.1.0"

__all__ = [
    "TokenSequence",
    "tokenize",
    "slice_words",
    "load_manifest",
    "RecurrencePlot",
    "LineDistribution",
    "RqaMeasures",
    "WindowSpec",
    "build_rp",
    "recurrence_rate",
    "extract_lines",
    "rqa_measures",
    "trend",
    "windowed_rqa",
    "RecurNLPError",
    "ParseError",
    "UndefinedInputError",
    "InsufficientDataError",
    "ShapeError",
    "RangeError",
    "OutOfVocabularyError",
]
