"""Numerical laboratory for a degenerate nonlocal parabolic equation.

The model couples fractional p-Laplacian diffusion with a power-law
reaction under a zero condition on the whole exterior of a box.  The
package provides the discrete operator and its energy functionals,
resolvent-based regularization tools, an adaptive explicit integrator with
blow-up detection, and a command line front end.
"""

from .convex import (
    ProxSpec,
    StroockReport,
    check_energy_comparison,
    check_stroock_varopoulos,
    field_resolvent,
    g_scalar,
    moreau_yosida_value,
    project_lr_ball,
    resolvent_seminorm_decrease,
    scalar_resolvent,
    stroock_varopoulos_constant,
    yosida_apply,
)
from .core import (
    AdmissibilityReport,
    CallableForcing,
    ConstantForcing,
    Field,
    Forcing,
    GridSpec,
    ModelParams,
    ParameterError,
    TableForcing,
    ZeroForcing,
    lp_norm,
    make_initial_data,
    validate_params,
)
from .functionals import (
    BlowupCertificate,
    EnergyRecord,
    EstimatorOptions,
    HolderBranchError,
    HypothesisViolation,
    SobolevEstimate,
    Thresholds,
    blowup_thresholds,
    blowup_time_bound,
    check_gn_inequality,
    estimate_sobolev_constant,
    gn_exponent,
    interpolation_margin,
    make_energy_record,
    phi_cap,
    phi_r,
    potential_well,
    psi_q,
    solve_beta,
    total_energy,
)
from .integrator import (
    BlowupPolicy,
    DissipationReport,
    RunProblem,
    SimOutcome,
    SimState,
    StepControls,
    StepFailure,
    StepUnderflow,
    adapt_dt,
    check_dissipation,
    detect_blowup,
    rhs,
    run,
    step_heun,
    strong_form_residual,
)
from .operator import (
    OperatorContext,
    apply_flap,
    dirichlet_form,
    duality_identity_gap,
    exterior_tail_weights,
    make_context,
    normalization_constant,
    seminorm_p,
)

__version__ = "0.1.0"
