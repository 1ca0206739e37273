"""Converters, adders and a delay model for the RNS moduli set
{2^(2q+1), 2^q+2^(q-1)-1, 2^q+2^(q-1)+1}."""

from .moduli import TauPlusSet, TauSet, dynamic_range, make_tau_plus, make_tau
from .adder import ResidueVector, mod_add, mod_multi_add, rns_add
from .forward import forward
from .reverse import reverse_functional, x_prime, x_prime_eq9, build_bit_matrix, eval_bit_matrix

__all__ = [
    "TauPlusSet",
    "TauSet",
    "ResidueVector",
    "make_tau_plus",
    "make_tau",
    "dynamic_range",
    "mod_add",
    "mod_multi_add",
    "rns_add",
    "forward",
    "reverse_functional",
    "x_prime",
    "x_prime_eq9",
    "build_bit_matrix",
    "eval_bit_matrix",
]
