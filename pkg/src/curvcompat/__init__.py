"""Generalized curvature tensors, compatible symmetric tensors, and
jet-based verification of curvature identities on a catalog of metrics."""

from .tensors import (
    GCT,
    Metric,
    RandomSpec,
    Tolerance,
    cyclic3,
    fro,
    gct_project,
    gct_residuals,
    kulkarni_nomizu,
    lower_index,
    mixed,
    raise_index,
    random_gct,
    random_metric,
    random_sym2,
    rel_residual,
)
from .compat import (
    CompatDefect,
    EigenSystem,
    compat_defect,
    const_curv_decompose,
    constant_curvature_gct,
    constant_curvature_pair,
    derdzinski_shen_check,
    eigen_mixed,
    hat_commutator,
    inverse_compat_defect,
    is_compatible,
    jordan_product,
    kn_pair,
    kprime_gct,
    rank_one_ricci_check,
    ricci_commutator,
    ricci_of,
    ring_gct,
    universal_compat_test,
    veblen_defect,
)
from .charts import (
    MetricChart,
    ScalarField,
    Sym2Field,
    VectorField,
    polynomial_sym2_field,
)
from .geometry import (
    ChartFrame,
    CurvaturePack,
    christoffel,
    classify_vector_field,
    codazzi_deviation,
    conformal_transform,
    cov_deriv_oneform,
    cov_deriv_sym2,
    curvature_pack,
    electric_weyl,
    frame,
    geodesic_transform,
    identity_defect,
    mixed_compat_sum,
    projective,
    ricci_scalar,
    riemann,
    schouten,
    second_cov_deriv_sym2,
    weyl,
    weyl_divergence_defect,
    weyl_from_electric,
)
from .catalog import Fixture, get_fixture, list_fixtures

__version__ = "0.1.0"
