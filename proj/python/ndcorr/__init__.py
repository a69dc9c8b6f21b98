"""Exact spacing statistics of n^d*theta mod 1 and chain-curve point counts.

Fractions cross the boundary as :class:`fractions.Fraction`, big integers as
python ints, regions as the same ``"lo,hi[;lo,hi]"`` strings the CLI takes.
"""

from ._ndcorr import (
    Ladder,
    __version__,
    consecutive_gaps,
    correlation,
    correlation_sandwich,
    divergence_lower_bound,
    fourier_identity_check,
    groebner_selfcheck,
    nu,
    nu_brute,
    schedule_Nj,
    star_sum_identity,
    t2_experiment,
    weil_defect,
    zero_sum_check,
)

__all__ = [
    "Ladder",
    "__version__",
    "consecutive_gaps",
    "correlation",
    "correlation_sandwich",
    "divergence_lower_bound",
    "fourier_identity_check",
    "groebner_selfcheck",
    "nu",
    "nu_brute",
    "schedule_Nj",
    "star_sum_identity",
    "t2_experiment",
    "weil_defect",
    "zero_sum_check",
]
