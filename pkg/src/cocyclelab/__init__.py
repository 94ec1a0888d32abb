"""Numerical laboratory for random products of 2x2 complex matrices."""

from .cocycle import (
    FiniteCocycle,
    PathSample,
    WindowCocycle,
    cocycle_distance,
    cocycle_from_dict,
    cocycle_to_dict,
    sample_path,
    scalar_split,
    weight_distance,
    window_distance,
    window_eval,
    word_product,
)
from .errors import CocycleLabError
from .experiments import (
    SweepResult,
    perturb_matrices,
    perturb_weights,
    run_continuity_sweep,
    run_support_jitter,
)
from .exponents import (
    ExponentEstimate,
    enumeration_upper_bound,
    estimate_extremal_mc,
    exact_diagonal,
    furstenberg_integral,
)
from .holder import (
    HolderConstruction,
    ShiftMetricParams,
    build_construction,
    holder_bound,
    holder_seminorm,
    induced_return_experiment,
    kifer_family,
    perturbation_difference,
    vanishing_exponent_check,
    verify_subspace_swap,
)
from .oseledets import (
    AngleConvergenceResult,
    OseledetsFrame,
    angle_convergence_experiment,
    estimate_frame,
    estimate_stable,
    estimate_unstable,
)
from .projective import (
    HORIZONTAL,
    INF,
    VERTICAL,
    ProjPoint,
    angle_between,
    mat2,
    mobius_apply,
    operator_norm,
    proj_apply,
    singular_values,
    smallest_singular,
)
from .report import ReportTable, emit_report
from .stationary import (
    ParticleMeasure,
    UStateSample,
    angular_dispersion,
    directional_mass,
    residual,
    save_measure,
    load_measure,
    solve_stationary,
    transfer_step,
    ustate_backward_sample,
)

__version__ = "0.1.0"
