"""Runtime-analysis laboratory for evolutionary and memetic search on Hurdle."""

__version__ = "0.1.0"
