"""Finite Cayley-graph balls and exact desk-scale checks of virtual freeness."""

from .cayley import CayleyBall, build_ball
from .groups import GeneratorSymbol, make_oracle, parse_spec, parse_word

__version__ = "0.1.0"
__all__ = ["CayleyBall", "GeneratorSymbol", "build_ball", "make_oracle", "parse_spec", "parse_word"]
