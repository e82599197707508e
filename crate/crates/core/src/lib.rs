//! Curvature flow of planar triods: three embedded curves meeting a triple
//! junction at 120 degrees, with the far endpoints pinned.
//!
//! The crate evolves a triod (or a single open curve) by the parametrized
//! curvature flow `gamma_t = gamma_xx / |gamma_x|^2` and computes the
//! diagnostic apparatus around it: junction identities, length dissipation,
//! Brakke residuals, the embeddedness ratio, Gaussian densities and the
//! monotonicity residual, blow-up rate fits, parabolic rescalings, and
//! residuals against the self-similar solutions (shrinkers, translators,
//! the grim reaper) plus the Steiner-tree limit.
//!
//! Modules follow the pipeline: [`geometry`] (single-curve stencils),
//! [`junction`] (triod assembly and 120-degree algebra), [`flow`] (time
//! stepping), [`functionals`] (monitored quantities), [`analysis`]
//! (singularity and self-similarity tools), [`scenario`] (configuration,
//! persistence, and run orchestration for the CLI).

pub mod analysis;
pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod junction;
pub mod scenario;

pub use analysis::{
    classify_density, estimate_blowup, grim_reaper, hamilton_rescale, rescale_huisken,
    shrinker_residual, steiner_distance, steiner_point, translator_residual, BlowupClass,
    BlowupFit, DensityClass,
};
pub use flow::{
    adaptive_dt, evolve, step, CurveFlowState, EndpointMotion, FlowConfig, FlowError, FlowState,
    StopReason, Trajectory,
};
pub use functionals::{
    brakke_residual, curvature_l2, embeddedness_ratio, gaussian_density,
    length_dissipation_residual, monitor, monotonicity_residual, DensityProbe, MonitorRecord,
    NetworkState, EMBEDDEDNESS_CAP,
};
pub use geometry::{CurveFields, DiscreteCurve, GeometryError, Vec2};
pub use junction::{
    compatibility_report, endpoint_conditions, enforce_junction, junction_curvatures,
    junction_identities, lambda_from_k, CompatibilityReport, JunctionReport, Triod, TriodError,
};
pub use scenario::{build_scenario, run_scenario, ScenarioConfig, ScenarioError};
