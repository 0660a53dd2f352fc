"""Word entropy of complexity bounds: generators, profiles, certified brackets."""

__version__ = "0.1.0"

from . import bounds, engine, fractal, generators, words  # noqa: E402,F401
