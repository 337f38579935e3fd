"""Moving-mesh finite elements for 1D moving boundary problems."""

from ._mmfem import (
    ConfigError,
    InvalidArgument,
    IoError,
    NumericalError,
    StefanParameters,
    StudyConfig,
    cg_exact,
    config_keys,
    dof_points,
    load_config,
    output_stem,
    parse_config,
    pme_similarity,
    run_convergence_study,
    run_simulation,
    stefan_bisection_mesh,
    stefan_geometric_mesh,
    stefan_interface,
    stefan_phi_root,
    uniform_mesh,
)

__all__ = [
    "ConfigError",
    "InvalidArgument",
    "IoError",
    "NumericalError",
    "StefanParameters",
    "StudyConfig",
    "cg_exact",
    "config_keys",
    "dof_points",
    "load_config",
    "output_stem",
    "parse_config",
    "pme_similarity",
    "run_convergence_study",
    "run_simulation",
    "stefan_bisection_mesh",
    "stefan_geometric_mesh",
    "stefan_interface",
    "stefan_phi_root",
    "uniform_mesh",
]
