"""veertrack: maximal splitting sequences of measured train tracks and the
layered taut veering triangulations of punctured pseudo-Anosov mapping tori,
with exact algebraic-number arithmetic throughout."""

__version__ = "0.1.0"
