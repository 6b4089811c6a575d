"""Exact-arithmetic workbench for local Hecke algebras over finite chain rings."""

from .ringcore import (
    ChainRing,
    EQUAL_CHAR,
    MIXED_CHAR,
    LaurentMatrix,
    LaurentSeries,
    Rational,
    RingElem,
    make_ring,
    parse_ring_spec,
)

__all__ = [
    "ChainRing",
    "EQUAL_CHAR",
    "MIXED_CHAR",
    "LaurentMatrix",
    "LaurentSeries",
    "Rational",
    "RingElem",
    "make_ring",
    "parse_ring_spec",
]

__version__ = "0.1.0"
