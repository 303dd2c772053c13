"""Exact root multiplicities, characters and quiver/flag counts for Borcherds-Bozec algebras."""

from .bbzmult import (
    MultiplicityEngine,
    bbz_character,
    multiplicity_table,
    root_multiplicity,
    verify_denominator,
    virtual_module,
    witt,
)
from .cartan import BorcherdsCartanDatum, RootVec, Vec, Weight, cartan_datum, expand_charge
from .kmweights import KMSlice, freudenthal_dim, peterson_mult
from .monster import j_coefficients, monster_bozec_mult, monster_bozec_root_mult, monster_lie_mult
from .quiver import FqRep, Quiver, check_root_correspondence, kac_polynomial_1nil
from .schofield import chi, count_flags, pairing
from .series import DegreeBox, FormalSeries
from .weyl import WeylElement, enumerate_W, enumerate_WJ

__version__ = "0.1.0"

__all__ = [
    "BorcherdsCartanDatum",
    "DegreeBox",
    "FormalSeries",
    "FqRep",
    "KMSlice",
    "MultiplicityEngine",
    "Quiver",
    "RootVec",
    "Vec",
    "Weight",
    "WeylElement",
    "bbz_character",
    "cartan_datum",
    "check_root_correspondence",
    "chi",
    "count_flags",
    "enumerate_W",
    "enumerate_WJ",
    "expand_charge",
    "freudenthal_dim",
    "j_coefficients",
    "kac_polynomial_1nil",
    "monster_bozec_mult",
    "monster_bozec_root_mult",
    "monster_lie_mult",
    "multiplicity_table",
    "pairing",
    "peterson_mult",
    "root_multiplicity",
    "verify_denominator",
    "virtual_module",
    "witt",
]
