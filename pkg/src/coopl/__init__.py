"""coopl: PAC learning and probably-stable payoffs for cooperative games."""

__version__ = "0.1.0"
