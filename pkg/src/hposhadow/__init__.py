"""Shadowing homotopy pseudo-orbits of expanding and hyperbolic multivalued systems."""

from .associated import (
    AssociatedSystem,
    associated_expanding,
    associated_to_henon,
    change_height,
    classify_henon,
    coding_hsc,
    henon_to_associated,
    inverse_limit_conjugacy,
    itinerary_orbit_associated,
    y0_independence,
)
from .errors import (
    BudgetError,
    CertificateError,
    ConvergenceError,
    DomainError,
    InputError,
    OrbitDefectError,
    ShadowError,
    UnsupportedError,
)
from .expanding import (
    ExpansionCertificate,
    half_rotation_hsc,
    induced_map_expanding,
    lift_path,
    make_circle_system,
    make_polynomial_system,
    rotation_hsc,
    shadow_expanding,
    straight_line_hsc,
    uniqueness_radius,
)
from .hyperbolic import (
    CrossedSystem,
    HenonParams,
    HorizontalDisk,
    VerticalDisk,
    all_intersections,
    check_bcc,
    check_occ,
    crossed_degree,
    estimate_lambda,
    henon_orbit,
    induced_map_hyperbolic,
    make_crossed_system,
    make_henon_system,
    required_window,
    shadow_hyperbolic,
    unique_intersection,
    verify_orbit_uniqueness,
)
from .mds import (
    HomotopyPseudoOrbit,
    HomotopySemiConjugacy,
    MultivaluedSystem,
    Orbit,
    ShadowTrace,
    apply_hsc,
    compose_hsc,
    conjugacy_residuals,
    higher_block,
    hpo_from_orbit,
    hpo_homotopy_check,
    identity_hsc,
    make_hpo,
    shift_orbit,
    validate_orbit,
)
from .paths import PolyPath
from .spaces import Circle, Discrete, Planar, Product, Subset
from .symbolic import (
    MarkovPartition,
    code_orbit,
    decode_symbols,
    enumerate_periodic,
    full_shift,
    graph_from_adjacency,
    graph_system,
    parse_itinerary,
)

__version__ = "0.1.0"
