"""Image differential invariants: exact symbolic engine plus numeric features."""

__version__ = "0.1.0"
