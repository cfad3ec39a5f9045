"""Product-one sequences over small finite groups."""

from .arithmetic import (
    LengthSet,
    RhoLambdaReport,
    lambda_,
    length_set,
    pair_search,
    rho,
    unions_bounded,
    witness_pair,
)
from .atoms import (
    CensusResult,
    atom_census,
    canonicalize,
    is_atom,
    large_davenport,
    max_atom_census,
    small_davenport,
)
from .errors import CapacityError, DomainError, ValidationError, ZsfError
from .group import ElementSet, FiniteGroup, abelian, build_group, cyclic, dicyclic, dihedral
from .sequence import ProductTable, Sequence, classify, product_set, smoothness, subsequence_products
from .verify import (
    FamilySpec,
    check_dgm_bound,
    egz_constant,
    generate_family,
    verify_characterization,
    verify_smooth_structure,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CensusResult",
    "DomainError",
    "ElementSet",
    "FamilySpec",
    "FiniteGroup",
    "LengthSet",
    "ProductTable",
    "RhoLambdaReport",
    "Sequence",
    "ValidationError",
    "ZsfError",
    "abelian",
    "atom_census",
    "build_group",
    "canonicalize",
    "check_dgm_bound",
    "classify",
    "cyclic",
    "dicyclic",
    "dihedral",
    "egz_constant",
    "generate_family",
    "is_atom",
    "lambda_",
    "large_davenport",
    "length_set",
    "max_atom_census",
    "pair_search",
    "product_set",
    "rho",
    "small_davenport",
    "smoothness",
    "subsequence_products",
    "unions_bounded",
    "verify_characterization",
    "verify_smooth_structure",
    "witness_pair",
]
