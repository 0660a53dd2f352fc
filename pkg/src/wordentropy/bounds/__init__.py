from .expr import BoundSyntaxError, UnknownIdentifier, evaluate, parse_expr, to_text
from .presets import PRESETS, eval_bound, parse_bound, preset
from .reals import Enclosure, UndecidableError
from .roots import NoSignChange, RootEnclosure, dominant_root, real_root
from .spec import (
    AnalyticE0,
    BoundSpec,
    Envelope,
    ExprBound,
    MinBound,
    RecurrenceBound,
    TableBound,
    min_bound,
)
