from .factors import FactorIndex, SpecialFactorStats, factor_count, special_factor_stats, window_ids
from .profile import (
    EXACT,
    LOWER,
    ComplexityProfile,
    EnvelopeReport,
    envelope_checks,
    profile,
    profile_from_counts,
)
from .stream import (
    DIGITS,
    BudgetExceeded,
    WordStream,
    as_word,
    check_alphabet,
    format_word,
    periodic_stream,
    stream_access,
)

__all__ = [
    "BudgetExceeded",
    "ComplexityProfile",
    "DIGITS",
    "EXACT",
    "EnvelopeReport",
    "FactorIndex",
    "LOWER",
    "SpecialFactorStats",
    "WordStream",
    "as_word",
    "check_alphabet",
    "envelope_checks",
    "factor_count",
    "format_word",
    "periodic_stream",
    "profile",
    "profile_from_counts",
    "special_factor_stats",
    "stream_access",
    "window_ids",
]
