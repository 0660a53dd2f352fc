from .beta import BetaShift, beta_factors, exp_order_word, growth_constant, pad_map
from .champernowne import champernowne, champernowne_saturation
from .morphic import Morphism, apply_morphism, prop6_K, prop6_word
from .sft import (
    EmptyLanguage,
    SftSystem,
    full_shift,
    language_words,
    sft_complexity,
    sft_entropy,
    sft_from_forbidden,
    transitive_word,
)
