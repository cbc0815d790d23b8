//! Numerical checks of the heuristics behind the construction.

mod degrees;
mod forms;
mod singular;
mod smooth;
mod survival;

pub use degrees::{degree_regime, degree_stats, quantiles, DegreeQuery, DegreeStats, Quantiles, Side};
pub(crate) use forms::factorial;
pub use forms::{
    closed_form_beta, local_factor, local_factor_product, local_von_mangoldt, make_form_system,
    progression_local_density, psi_norm, AffineForm, AffineLinearSystem, SystemKind, MAX_ENUMERATION,
};
pub use singular::{convergence_check, singular_series, Convergence, SingularSeriesApprox};
pub use smooth::{smooth_count, SmoothCount};
pub use survival::{
    draw_stage2, exhaustive_survival, gamma_factors, montecarlo_stage2, rational_to_f64, survival_probability,
    GammaFactors, McResult, McTarget, MAX_EXHAUSTIVE,
};
