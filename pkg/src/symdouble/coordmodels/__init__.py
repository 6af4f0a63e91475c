"""Coordinate groupoids, double groupoids and their prolongations."""

from .groupoids import (  # noqa: F401
    REGISTERED, CoordGroupoid, ModelError, as_finvb, check_groupoid_morphism, check_identity,
    core_basis_of, groupoid_from_fibre, pair_groupoid, product_groupoid, tangent_fibre,
    tangent_groupoid, unit_splitting, validate_groupoid, vector_space_groupoid,
)
from .algebroids import (  # noqa: F401
    LieAlgebroidModel, check_algebroid, check_algebroid_morphism, lie_algebra_model,
    lie_algebroid, product_algebroid, related_sections, restrict_algebroid, section_family,
)
from .cotangent import (  # noqa: F401
    core_covector, cotangent_blocks, cotangent_core_report, cotangent_groupoid,
    decomposition_values, pradines_crosscheck, unit_covector,
)
from .doubles import (  # noqa: F401
    CoordDoubleGroupoid, core_algebroid_basis, core_of_double, double_source_section,
    infer_base_morphism, m4_double_groupoid, validate_double,
)
from .cotdouble import (  # noqa: F401
    core_embedding, core_embedding_report, cotangent_double, dual_side, e_map, prolonged_fibre,
)
from .prolong import (  # noqa: F401
    ProductVBModel, canonical_j, dagger_pairing, dri_compositions, jprime_maps, product_model,
    prolonged_duality, prolonged_duality_maps, side_models, tangent_model_of, tulczyjew_check,
    tulczyjew_map,
)
