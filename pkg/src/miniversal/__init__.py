"""Miniversal deformations of complex matrices under congruence."""

from .canonical import (CanonicalBlock, CanonicalStructure, SymSkewPair, assemble,
                        canonicalize, gamma_block, h_block, jordan_block, split_sym_skew)
from .errors import (Inconsistent, InvalidLambda, InvalidStructure, MaxIterExceeded,
                     MiniversalError, NotSpanning, NotTransversal)
from .matcore import frobenius_norm, masked_norm, rank_of, solve_least_norm
from .patterns import StarPattern, codimension, full_pattern
from .reducer import bound_sequence, prepare, reduce
from .tangent import (Verdict, check_pair_transversality, check_transversality,
                      greedy_miniversal, project_onto_pattern, tangent_operator)

__all__ = [
    'CanonicalBlock', 'CanonicalStructure', 'SymSkewPair', 'assemble', 'canonicalize',
    'gamma_block', 'h_block', 'jordan_block', 'split_sym_skew',
    'Inconsistent', 'InvalidLambda', 'InvalidStructure', 'MaxIterExceeded',
    'MiniversalError', 'NotSpanning', 'NotTransversal',
    'frobenius_norm', 'masked_norm', 'rank_of', 'solve_least_norm',
    'StarPattern', 'codimension', 'full_pattern',
    'bound_sequence', 'prepare', 'reduce',
    'Verdict', 'check_pair_transversality', 'check_transversality',
    'greedy_miniversal', 'project_onto_pattern', 'tangent_operator',
]

__version__ = '0.1.0'
