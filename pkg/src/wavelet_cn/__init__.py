"""Wavelet expansions of C^n functions R -> K on local fields.

Exact finite-precision arithmetic over Z_p and F_p[[t]], the level-n wavelet
basis, coefficient extraction, antiderivation, the two C^n norms, Lipschitz
constants and the classifiers for monotone, pseudocontracting and isometric
maps.
"""

from .errors import (BudgetExceeded, CharacteristicViolation, FieldMismatch, NoConvergence, ParseError,
                     PrecisionExhausted, UnsupportedDegree, WaveletError)
from .field import Backend, FieldParams, RingElem, Scalar, format_scalar, parse_scalar
from .reps import Rep, chain, common_prefix, enumerate_reps, format_rep, parse_rep
from .funcspace import CnCombo, CoeffStream, Evaluator, LeafPoly, chi_eval, parse_function, serialize_function
from .calculus import (CoeffTable, antiderive, antiderive_digit_sum, derivative_D, estimate_Dj, expand_c0,
                       extract_bnj, lipschitz_constant, lower_basis, norm_n, parse_table, phi, psi, psi_nj,
                       raise_basis, serialize_table, sup_norm, t_n)
from .bruteforce import lipschitz_bruteforce, norm_cn_bruteforce, phi_sup
from . import kernels

__version__ = "0.1.0"
