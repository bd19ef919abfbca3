"""Iwasawa coordinates, Siegel sets, SL(2, Z) reduction, Hecke cosets and Orr coverings."""

from .hecke import hecke_correspondence
from .iwasawa import GroupElement, HorosphericalCoords, iwasawa, iwasawa_blocks, simple_roots
from .orr import orr_cover_check
from .siegel import SiegelSet, UpperHalfPoint, siegel_membership
from .sl2z import reduce_sl2z, siegel_intersection_enumerate

__all__ = [
    "GroupElement",
    "HorosphericalCoords",
    "SiegelSet",
    "UpperHalfPoint",
    "hecke_correspondence",
    "iwasawa",
    "iwasawa_blocks",
    "orr_cover_check",
    "reduce_sl2z",
    "siegel_intersection_enumerate",
    "siegel_membership",
    "simple_roots",
]
