"""Exact arithmetic towers used throughout the toolkit."""
from .cyclo import CycloNum, cyclotomic_poly, divide_by_lambda_power, lambda_valuation
from .fp import FpPoly, PrimeFieldElem
from .padic import PiAdicMat, padic_valuation
from .poly import Poly, QPoly, exact_div, poly_gcd, poly_xgcd
from .primes import is_prime, primes_upto, require_prime
from .flintpoly import HAVE_FLINT, FlintQPoly
from .ratfun import RatFun, q_variable, qpoly_class, ratfun_q

__all__ = [
    "CycloNum",
    "FlintQPoly",
    "HAVE_FLINT",
    "FpPoly",
    "PiAdicMat",
    "Poly",
    "PrimeFieldElem",
    "QPoly",
    "RatFun",
    "cyclotomic_poly",
    "divide_by_lambda_power",
    "exact_div",
    "is_prime",
    "lambda_valuation",
    "padic_valuation",
    "poly_gcd",
    "poly_xgcd",
    "primes_upto",
    "q_variable",
    "qpoly_class",
    "ratfun_q",
    "require_prime",
]
