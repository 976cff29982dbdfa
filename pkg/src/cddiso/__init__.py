"""Sharp isoperimetric lower bounds under curvature-dimension-diameter conditions."""
from .cdd_bound import (BoundResult, CaseId, CDDParams, InvalidParameterError, NumericalFailure,
                        bonnet_myers_diameter, bound_at, bound_oracle_grid, case3_closed_form,
                        case7_closed_form, case_dispatch, case_family_bound, solve_balance)
from .model_density import (DegenerateRegimeError, ModelParams, SupportInterval,
                            check_ode_residual, eval_j, support_j)
from .profile1d import (Density1D, check_cdd_1d, domination_check, gaussian_profile,
                        profile_bruteforce, profile_flat, sphere_profile)
from .quadrature import IntegrationError, MassResult, cdf, cdf_inverse, integrate
from .sharpness import WarpedProduct, check_cdd, ricci_radial, ricci_spherical, slab_profile

__all__ = [
    "BoundResult", "CaseId", "CDDParams", "InvalidParameterError", "NumericalFailure",
    "bonnet_myers_diameter", "bound_at", "bound_oracle_grid", "case3_closed_form",
    "case7_closed_form", "case_dispatch", "case_family_bound", "solve_balance",
    "DegenerateRegimeError", "ModelParams", "SupportInterval", "check_ode_residual", "eval_j",
    "support_j", "Density1D", "check_cdd_1d", "domination_check", "gaussian_profile",
    "profile_bruteforce", "profile_flat", "sphere_profile", "IntegrationError", "MassResult",
    "cdf", "cdf_inverse", "integrate", "WarpedProduct", "check_cdd", "ricci_radial",
    "ricci_spherical", "slab_profile",
]
