"""Legendre periods, nilpotent orbits, limit parabolics and Siegel-set containment."""

from .containment import siegel_containment_check
from .decay import schmid_decay_check, validity_threshold
from .families import get_family
from .hodgelocus import hodge_locus_demo, is_flagged
from .legendre import hypergeometric_period, legendre_tau, lift_tau
from .orbit import NilpotentOrbitData, invariant_distance, nilpotent_orbit_eval, sector_decompose
from .parabolic import build_limit_parabolic, horospherical_factorization_track, nj_in_nilradical_check

__all__ = [
    "NilpotentOrbitData",
    "build_limit_parabolic",
    "get_family",
    "hodge_locus_demo",
    "horospherical_factorization_track",
    "hypergeometric_period",
    "invariant_distance",
    "is_flagged",
    "legendre_tau",
    "lift_tau",
    "nilpotent_orbit_eval",
    "nj_in_nilradical_check",
    "schmid_decay_check",
    "sector_decompose",
    "siegel_containment_check",
    "validity_threshold",
]
