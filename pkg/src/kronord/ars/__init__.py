"""Almost split sequences: endomorphisms, radicals, pullbacks, splitting, isomorphism."""

from .endo import EndAlgebra, LocalCertificate, end_algebra, radical_endos, radical_lattice
from .iso import Inconclusive, IsoResult, invariants, iso_test
from .sequence import (
    AlmostSplitSeq,
    NoPhiFound,
    NotAlmostSplit,
    almost_split,
    factor_through_cover,
    find_phi,
    phi_conditions,
    search_phi,
)
from .split import SplitCertificate, SplitFailed, split_lattice

__all__ = [
    "AlmostSplitSeq",
    "EndAlgebra",
    "Inconclusive",
    "IsoResult",
    "LocalCertificate",
    "NoPhiFound",
    "NotAlmostSplit",
    "SplitCertificate",
    "SplitFailed",
    "almost_split",
    "end_algebra",
    "factor_through_cover",
    "find_phi",
    "invariants",
    "iso_test",
    "phi_conditions",
    "radical_endos",
    "radical_lattice",
    "search_phi",
    "split_lattice",
]
