"""Word-by-word incremental parsing for applicative categorial grammar."""

from .category import Category, flatten, parse_category, parse_slash, render_category, to_curried
from .engine import ParseOptions, ParseResult, initial_state, parse
from .lexicon import Lexicon, load_lexicon, toy_lexicon
from .terms import alpha_eq, beta_normalize, parse_term, render_term
from .transitions import LexEntry, ParserState, state_apply, state_predict, successors

__all__ = [
    "Category",
    "flatten",
    "parse_category",
    "parse_slash",
    "render_category",
    "to_curried",
    "ParseOptions",
    "ParseResult",
    "initial_state",
    "parse",
    "Lexicon",
    "load_lexicon",
    "toy_lexicon",
    "alpha_eq",
    "beta_normalize",
    "parse_term",
    "render_term",
    "LexEntry",
    "ParserState",
    "state_apply",
    "state_predict",
    "successors",
]

__version__ = "0.1.0"
