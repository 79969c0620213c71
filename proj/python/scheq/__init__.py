"""Python access to the scheq C++ library."""

from ._core import (
    F_reg_anti,
    J_r_n_scan,
    NonlinKind,
    NonlinSpec,
    contact_bound,
    eigenvalue,
    estimate_Z,
    f_reg,
    generator_apply,
    ibp_defect,
    lipschitz,
    norm_gamma,
    sample_meander,
    sample_mu_c,
    simulate,
    to_grid,
    to_spectral,
)

__all__ = [
    "F_reg_anti",
    "J_r_n_scan",
    "NonlinKind",
    "NonlinSpec",
    "contact_bound",
    "eigenvalue",
    "estimate_Z",
    "f_reg",
    "generator_apply",
    "ibp_defect",
    "lipschitz",
    "norm_gamma",
    "sample_meander",
    "sample_mu_c",
    "simulate",
    "to_grid",
    "to_spectral",
]
