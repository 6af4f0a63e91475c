"""Poisson bivectors, Poisson groupoids and double groupoids on coordinate models."""

from .bivectors import (  # noqa: F401
    PoissonError, PolyBivector, algebroid_from_linear_poisson, cotangent_algebroid,
    is_linear_poisson, koszul_bracket, lie_derivative_form, lie_poisson_from_algebroid,
    require_poisson, schouten_jacobi, standard_bivector, tangent_lift,
)
from .groupoids import (  # noqa: F401
    MultiplicativeReport, PoissonCoordDouble, PoissonCoordGroupoid, base_sharp,
    check_multiplicative, dual_algebroid, sharp_to_bivector, symplectic_double_m4,
    symplectic_pair_groupoid, zero_double_m4,
)
from .duality import (  # noqa: F401
    DMaps, LieBialgebroidModel, PairsReport, SideDualityReport, compute_DMaps, core_bivector,
    induced_structures, verify_side_duality, verify_thm_pairs,
)
from .pvb import (  # noqa: F401
    LAReport, MorphicReport, NeededReport, ell, morphic_section_checks, multiplicative_form,
    section_families, verify_lapvb, verify_needed,
)
