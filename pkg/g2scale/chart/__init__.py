from .distribution import (
    canonical_splitting, classify_point, distribution_checks, growth_vector, lie_bracket,
    normal_killing_form_from_span, span_isotropy, wedge_margin,
)
from .expr import ChartFile, load_chart, loads
from .geometry import (
    Chart, CurvatureAtPoint, PointGeometry, curvature_at, einstein_constant_formula, einstein_residual,
    theta0_residual, theta0_standard,
)
from .killing import (
    KillingData, compositions, conformal_killing_residual, contact_form_value, family_2form,
    family_parameters, hypersurface_residuals, ijk_agreement, ijk_forms, killing_data, lie_derivative,
    lie_derivative_weighted, lie_relations, open_orbit_residuals, pi7, sasaki_residuals, xi_iota7,
)
from .tractor import (
    L0_3form, L0_standard, ThreeFormSplit, TractorSplit, component_identities, einstein_constant,
    fiber_structure, normality_residual, tractor_connection, tractor_metric, tractor_three_form,
)
