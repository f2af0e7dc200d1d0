"""Entire symbols: parsing, evaluation, Taylor coefficients and derivatives."""

from .expr import BinOp, Call, Neg, Num, Pow, Var, differentiate, parse_symbol, unparse
from .symbol import (
    CombinedSymbol,
    ExprSymbol,
    FunctionSymbol,
    PolySymbol,
    Symbol,
    cauchy_derivative,
    cauchy_taylor,
    eval_symbol,
    make_symbol,
    symbol_derivative,
    taylor_coeffs,
)

__all__ = [
    "BinOp", "Call", "Neg", "Num", "Pow", "Var",
    "differentiate", "parse_symbol", "unparse",
    "Symbol", "ExprSymbol", "PolySymbol", "FunctionSymbol", "CombinedSymbol",
    "cauchy_derivative", "cauchy_taylor", "eval_symbol", "make_symbol",
    "symbol_derivative", "taylor_coeffs",
]
