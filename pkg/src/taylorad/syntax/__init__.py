"""Abstract syntax, surface grammar and binding operations of the object language."""

from .ast import (
    REAL,
    UNIT,
    App,
    Case,
    Cons,
    Const,
    Fold,
    Fun,
    Inj,
    Lam,
    ListT,
    Nil,
    Op,
    Prod,
    Real,
    Term,
    Tuple,
    TupleMatch,
    Type,
    Var,
    Variant,
    add,
    all_names,
    alpha_eq,
    free_vars,
    fresh,
    let,
    mul,
    real_power,
    substitute,
    substitute_many,
    term_size,
    term_depth,
)
from .parser import ParseError, parse, parse_type
from .printer import pretty, pretty_type

__all__ = [
    "REAL", "UNIT", "App", "Case", "Cons", "Const", "Fold", "Fun", "Inj", "Lam", "ListT",
    "Nil", "Op", "Prod", "Real", "Term", "Tuple", "TupleMatch", "Type", "Var", "Variant",
    "add", "all_names", "alpha_eq", "free_vars", "fresh", "let", "mul", "real_power",
    "substitute", "substitute_many", "term_size", "term_depth", "ParseError", "parse", "parse_type",
    "pretty", "pretty_type",
]
