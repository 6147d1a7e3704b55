"""Stability analysis of rectilinear shock waves in 2D compressible elastodynamics."""
from .energy import (
    energy_verdict,
    lienard_chipart,
    quartic_root_oracle,
    stretching_condition,
    uniform_stability_margin,
)
from .errors import ElastoShockError, InvalidInput, NumericalFailure
from .lopatinski import (
    GridConfig,
    SpectralClass,
    classify_spectral,
    classify_stretching,
    dispersion_roots,
    lambda_plus,
    lopatinski_det,
)
from .states import (
    PolytropicEOS,
    ShockParameters,
    SideState,
    TabulatedEOS,
    check_lax,
    derived_scales,
    solve_rankine_hugoniot,
)
from .symmetrizer import build_symmetrizer, dissipativity_probe, solve_lyapunov
from .verdict import classify_point

__version__ = "0.1.0"
