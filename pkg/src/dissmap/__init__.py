"""Dissipative mappings and distances to instability for DH systems."""

from .errors import (
    DissmapError,
    ShapeError,
    StructureError,
    DefinitenessError,
    FeasibilityError,
    ParameterError,
    FrequencyError,
    NumericError,
    NotApplicableError,
    NoCandidateError,
)
from .numkit import TolerancePolicy, DEFAULT_TOL
from .mappings import (
    MappingProblem,
    MappingSolution,
    FamilyParams,
    SecondCharBase,
    mapping_problem,
    dissipative_exists,
    min_norm_dissipative,
    min_norm_dissipative_vector,
    min_norm_sq_closed_form,
    validate_first_params,
    minimal_first_params,
    family_member_first,
    sample_first_member,
    skew_family_member,
    skew_min_map,
    real_min_norm_dissipative,
    second_char_base,
    second_char_member,
)
from .dhsys import (
    DHSystem,
    Restriction,
    OmegaBasis,
    validate_dh,
    stability_class,
    transfer_G,
    omega_basis,
    random_dh,
)
from .radii import (
    SweepConfig,
    EtaResult,
    RadiusReport,
    MuEval,
    frequency_minimize,
    unstructured_radius_complex,
    structured_radius_complex,
    distance_to_singularity,
    mu_real_2,
    mu_real_F_bounds,
    unstructured_radius_real,
    eta_complex,
    eta_real,
    structured_radius_real,
)

__version__ = "1.0.0"
