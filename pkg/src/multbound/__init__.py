"""Certified lower bounds for local multiplicities of polynomial ideals."""

__version__ = "0.1.0"

from .derbound import (
    BoundCertificate,
    PrimeProfile,
    check_hypothesis_mod_prime,
    derivative_vanishes,
    grouped_simplex_bound,
    lemma_chain_witness,
    simplex_bound,
    upsilon_set,
    vanishing_staircase,
    verify_bound_at_point,
)
from .groebner import (
    GroebnerBasis,
    IdealPresentation,
    LengthReport,
    MonomialOrder,
    buchberger,
    colength,
    elimination_ideal,
    krull_dimension,
    local_length_at_point,
    normal_form,
)
from .polynomial import Polynomial, parse_polynomial
from .staircase import (
    AxisSubset,
    StaircaseSet,
    delta_contains,
    delta_prime_contains,
    downward_closure,
    restrict,
    simplex_staircase,
    volume_delta,
    volume_delta_prime,
)
from .volgrid import GridEstimate, GridSpec, RegionPredicate, estimate_volume, refine_to_tolerance

__all__ = [
    "AxisSubset",
    "BoundCertificate",
    "GridEstimate",
    "GridSpec",
    "GroebnerBasis",
    "IdealPresentation",
    "LengthReport",
    "MonomialOrder",
    "Polynomial",
    "PrimeProfile",
    "RegionPredicate",
    "StaircaseSet",
    "buchberger",
    "check_hypothesis_mod_prime",
    "colength",
    "delta_contains",
    "delta_prime_contains",
    "derivative_vanishes",
    "downward_closure",
    "elimination_ideal",
    "estimate_volume",
    "grouped_simplex_bound",
    "krull_dimension",
    "lemma_chain_witness",
    "local_length_at_point",
    "normal_form",
    "parse_polynomial",
    "refine_to_tolerance",
    "restrict",
    "simplex_bound",
    "simplex_staircase",
    "upsilon_set",
    "vanishing_staircase",
    "verify_bound_at_point",
    "volume_delta",
    "volume_delta_prime",
]
