//! Explicit time integration of the curvature flow
//! `gamma_t = gamma_xx / |gamma_x|^2` on a triod (or a single pinned curve).
//!
//! One step is a Heun (RK2) update of the interior nodes; the junction node
//! moves with the arithmetic mean of the three per-curve velocities
//! `k_i nu_i + lambda_i tau_i` (with `Lambda` from the curvature relation)
//! and the 120-degree condition is re-imposed afterwards by the junction
//! relaxation. Endpoint nodes are never written, so they stay bit-identical
//! across a whole run. The step size comes from the parabolic stability
//! bound `dt = cfl * min_j |gamma_x|^2 dx^2`.

use crate::functionals::{monitor, DensityProbe, FunctionalError, MonitorRecord, NetworkState};
use crate::geometry::{DiscreteCurve, GeometryError, Vec2, DEGENERACY_RELATIVE_THRESHOLD};
use crate::junction::{enforce_junction, junction_velocities, Triod, TriodError};
use thiserror::Error;

/// Fraction of the entry curve length under which a chord counts as a node
/// collision (pinch-off), as opposed to roundoff.
const PINCH_OFF_FRACTION: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Triod(#[from] TriodError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error("cfl must lie in (0, 1], got {0}")]
    InvalidCfl(f64),
    #[error("dt {dt} exceeds the stability bound {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("pinch-off on curve {curve} at t = {t}")]
    PinchOff { curve: usize, t: f64 },
    #[error("flow config invalid: {0}")]
    BadConfig(String),
}

/// A triod in mid-flow.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub triod: Triod,
    pub t: f64,
    pub step_count: u64,
}

impl FlowState {
    pub fn new(triod: Triod) -> Self {
        FlowState {
            triod,
            t: 0.0,
            step_count: 0,
        }
    }
}

impl NetworkState for FlowState {
    fn time(&self) -> f64 {
        self.t
    }
    fn curves(&self) -> &[DiscreteCurve] {
        self.triod.curves()
    }
    fn as_triod(&self) -> Option<&Triod> {
        Some(&self.triod)
    }
}

/// A single pinned curve in mid-flow.
#[derive(Debug, Clone)]
pub struct CurveFlowState {
    pub curve: DiscreteCurve,
    pub t: f64,
    pub step_count: u64,
}

impl CurveFlowState {
    pub fn new(curve: DiscreteCurve) -> Self {
        CurveFlowState {
            curve,
            t: 0.0,
            step_count: 0,
        }
    }
}

impl NetworkState for CurveFlowState {
    fn time(&self) -> f64 {
        self.t
    }
    fn curves(&self) -> &[DiscreteCurve] {
        std::slice::from_ref(&self.curve)
    }
}

/// Endpoint behaviour for single-curve runs.
pub enum EndpointMotion<'a> {
    /// Both endpoints pinned.
    Fixed,
    /// Endpoints follow a user-supplied exact path `t -> (start, end)`.
    Prescribed(&'a dyn Fn(f64) -> (Vec2, Vec2)),
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    /// Stability safety factor in `(0, 1]`.
    pub cfl: f64,
    pub t_end: f64,
    /// Resample to uniform arclength every this many steps; 0 disables.
    pub resample_every: usize,
    /// Node count per curve used when resampling.
    pub points_per_curve: usize,
    /// Tolerance for the junction angle relaxation.
    pub angle_tol: f64,
    /// Stop once `max |k|` exceeds this (curvature blow-up diagnostic).
    pub max_abs_curvature: f64,
    /// Stop once any curve is shorter than this.
    pub min_curve_length: f64,
    /// Monitor sampling cadence in steps.
    pub monitor_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            cfl: 0.25,
            t_end: 1.0,
            resample_every: 50,
            points_per_curve: 64,
            angle_tol: 1e-8,
            max_abs_curvature: 1e4,
            min_curve_length: 1e-6,
            monitor_every: 50,
        }
    }
}

impl FlowConfig {
    fn validate(&self) -> Result<(), FlowError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(FlowError::InvalidCfl(self.cfl));
        }
        if self.points_per_curve < 3 {
            return Err(FlowError::BadConfig(format!(
                "points_per_curve must be at least 3, got {}",
                self.points_per_curve
            )));
        }
        if self.monitor_every == 0 {
            return Err(FlowError::BadConfig(
                "monitor_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `t_end` reached.
    TimeLimit,
    /// `max |k|` exceeded the configured cap.
    CurvatureBlowup,
    /// Some curve length fell under the configured minimum.
    CurveVanishing,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StopReason::TimeLimit => write!(f, "time limit reached"),
            StopReason::CurvatureBlowup => write!(f, "curvature blow-up"),
            StopReason::CurveVanishing => write!(f, "curve length under threshold"),
        }
    }
}

/// Stability step bound `min_j |gamma_x(j)|^2 dx^2` over interior nodes.
fn stability_limit(curves: &[DiscreteCurve]) -> Result<f64, FlowError> {
    let mut limit = f64::INFINITY;
    for (ci, c) in curves.iter().enumerate() {
        let dx = c.dx();
        let length = c.arclength();
        for j in 1..c.node_count() - 1 {
            let sp = c.param_first_derivative(j).norm();
            if sp * dx < DEGENERACY_RELATIVE_THRESHOLD * length {
                return Err(FlowError::PinchOff { curve: ci, t: 0.0 });
            }
            limit = limit.min(sp * sp * dx * dx);
        }
    }
    Ok(limit)
}

/// Largest stable time step scaled by `cfl`.
pub fn adaptive_dt(state: &FlowState, cfl: f64) -> Result<f64, FlowError> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(FlowError::InvalidCfl(cfl));
    }
    Ok(cfl * stability_limit(state.triod.curves())?)
}

pub fn curve_adaptive_dt(state: &CurveFlowState, cfl: f64) -> Result<f64, FlowError> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(FlowError::InvalidCfl(cfl));
    }
    Ok(cfl * stability_limit(std::slice::from_ref(&state.curve))?)
}

/// Interior-node velocities `gamma_xx / |gamma_x|^2`; end slots left zero.
fn interior_velocities(curve: &DiscreteCurve) -> Vec<Vec2> {
    let n = curve.node_count();
    let mut v = vec![Vec2::ZERO; n];
    for (j, vj) in v.iter_mut().enumerate().take(n - 1).skip(1) {
        let gx = curve.param_first_derivative(j);
        *vj = curve.param_second_derivative(j) / gx.norm_sq();
    }
    v
}

fn displaced(curve: &DiscreteCurve, a: &[Vec2], fa: f64) -> Result<DiscreteCurve, GeometryError> {
    let mut pts = curve.points().to_vec();
    for j in 1..pts.len() - 1 {
        pts[j] += a[j] * fa;
    }
    DiscreteCurve::new(pts)
}

fn displaced2(
    curve: &DiscreteCurve,
    a: &[Vec2],
    b: &[Vec2],
    f: f64,
) -> Result<DiscreteCurve, GeometryError> {
    let mut pts = curve.points().to_vec();
    for j in 1..pts.len() - 1 {
        pts[j] += (a[j] + b[j]) * f;
    }
    DiscreteCurve::new(pts)
}

fn check_pinch_off(curves: &[DiscreteCurve], entry_lengths: &[f64], t: f64) -> Result<(), FlowError> {
    for (i, c) in curves.iter().enumerate() {
        if c.min_segment_length() < PINCH_OFF_FRACTION * entry_lengths[i] {
            return Err(FlowError::PinchOff { curve: i, t });
        }
    }
    Ok(())
}

/// One Heun step of the triod flow. Interior nodes and the junction advance;
/// endpoints stay bit-identical; the angle condition is re-imposed at the end.
pub fn step(state: &FlowState, dt: f64, angle_tol: f64) -> Result<FlowState, FlowError> {
    let limit = stability_limit(state.triod.curves())?;
    if dt > limit * (1.0 + 1e-12) {
        return Err(FlowError::StepTooLarge { dt, limit });
    }
    let triod = &state.triod;
    let entry_lengths: Vec<f64> = triod.curves().iter().map(|c| c.arclength()).collect();

    let v1: Vec<Vec<Vec2>> = triod.curves().iter().map(interior_velocities).collect();
    let jv1 = junction_velocities(triod)?;
    let junction_v1 = (jv1[0] + jv1[1] + jv1[2]) / 3.0;

    // predictor
    let predicted_junction = triod.junction() + junction_v1 * dt;
    let mut pred_curves = Vec::with_capacity(3);
    for (i, c) in triod.curves().iter().enumerate() {
        let mut moved = displaced(c, &v1[i], dt)?;
        moved.set_point(0, predicted_junction);
        pred_curves.push(moved);
    }
    let predictor = Triod::new([
        pred_curves[0].clone(),
        pred_curves[1].clone(),
        pred_curves[2].clone(),
    ])?;

    // corrector
    let v2: Vec<Vec<Vec2>> = predictor.curves().iter().map(interior_velocities).collect();
    let jv2 = junction_velocities(&predictor)?;
    let junction_v2 = (jv2[0] + jv2[1] + jv2[2]) / 3.0;
    let new_junction = triod.junction() + (junction_v1 + junction_v2) * (0.5 * dt);
    let mut new_curves = Vec::with_capacity(3);
    for (i, c) in triod.curves().iter().enumerate() {
        let mut moved = displaced2(c, &v1[i], &v2[i], 0.5 * dt)?;
        moved.set_point(0, new_junction);
        new_curves.push(moved);
    }
    let corrected = Triod::new([
        new_curves[0].clone(),
        new_curves[1].clone(),
        new_curves[2].clone(),
    ])?;
    let (relaxed, _outcome) = enforce_junction(&corrected, new_junction, angle_tol)?;
    let t = state.t + dt;
    check_pinch_off(relaxed.curves(), &entry_lengths, t)?;
    Ok(FlowState {
        triod: relaxed,
        t,
        step_count: state.step_count + 1,
    })
}

/// One Heun step of the single-curve flow with the given endpoint motion.
pub fn curve_step(
    state: &CurveFlowState,
    dt: f64,
    motion: &EndpointMotion<'_>,
) -> Result<CurveFlowState, FlowError> {
    let limit = stability_limit(std::slice::from_ref(&state.curve))?;
    if dt > limit * (1.0 + 1e-12) {
        return Err(FlowError::StepTooLarge { dt, limit });
    }
    let entry_length = state.curve.arclength();
    let t_next = state.t + dt;
    let set_ends = |c: &mut DiscreteCurve| {
        if let EndpointMotion::Prescribed(path) = motion {
            let (start, end) = path(t_next);
            c.set_point(0, start);
            let last = c.node_count() - 1;
            c.set_point(last, end);
        }
    };
    let v1 = interior_velocities(&state.curve);
    let mut predictor = displaced(&state.curve, &v1, dt)?;
    set_ends(&mut predictor);
    let v2 = interior_velocities(&predictor);
    let mut new_curve = displaced2(&state.curve, &v1, &v2, 0.5 * dt)?;
    set_ends(&mut new_curve);
    if new_curve.min_segment_length() < PINCH_OFF_FRACTION * entry_length {
        return Err(FlowError::PinchOff { curve: 0, t: t_next });
    }
    Ok(CurveFlowState {
        curve: new_curve,
        t: t_next,
        step_count: state.step_count + 1,
    })
}

/// One monitored sample of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectorySample<S> {
    pub state: S,
    pub record: MonitorRecord,
}

/// A recorded run: monitor samples, the final state, and why it stopped.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub samples: Vec<TrajectorySample<S>>,
    pub final_state: S,
    pub stop: StopReason,
}

impl<S> Trajectory<S> {
    pub fn records(&self) -> Vec<MonitorRecord> {
        self.samples.iter().map(|s| s.record.clone()).collect()
    }
}

fn stop_reason(
    curves: &[DiscreteCurve],
    t: f64,
    config: &FlowConfig,
) -> Result<Option<StopReason>, FlowError> {
    if t >= config.t_end {
        return Ok(Some(StopReason::TimeLimit));
    }
    for c in curves {
        if c.arclength() < config.min_curve_length {
            return Ok(Some(StopReason::CurveVanishing));
        }
    }
    let mut max_k = 0.0f64;
    for c in curves {
        for j in 0..c.node_count() {
            let gx = c.param_first_derivative(j);
            let k = c.param_second_derivative(j).dot(gx.normalized().perp()) / gx.norm_sq();
            max_k = max_k.max(k.abs());
        }
    }
    if max_k > config.max_abs_curvature {
        return Ok(Some(StopReason::CurvatureBlowup));
    }
    Ok(None)
}

/// Runs the triod flow until a stop condition fires, resampling and
/// sampling monitors on their configured cadences.
pub fn evolve(
    initial: FlowState,
    config: &FlowConfig,
    probes: &[DensityProbe],
) -> Result<Trajectory<FlowState>, FlowError> {
    config.validate()?;
    let mut state = initial;
    let mut samples = vec![TrajectorySample {
        record: monitor(&state, probes)?,
        state: state.clone(),
    }];
    let stop;
    loop {
        if let Some(reason) = stop_reason(state.triod.curves(), state.t, config)? {
            stop = reason;
            break;
        }
        let dt = adaptive_dt(&state, config.cfl)?.min(config.t_end - state.t);
        state = step(&state, dt, config.angle_tol)?;
        if config.resample_every > 0 && state.step_count % config.resample_every as u64 == 0 {
            let mut curves = state.triod.curves().clone();
            for c in curves.iter_mut() {
                *c = c.resample_uniform(config.points_per_curve)?;
            }
            state.triod = Triod::new(curves)?;
        }
        if state.step_count % config.monitor_every as u64 == 0 {
            samples.push(TrajectorySample {
                record: monitor(&state, probes)?,
                state: state.clone(),
            });
        }
    }
    if samples
        .last()
        .map(|s| s.state.step_count != state.step_count)
        .unwrap_or(true)
    {
        samples.push(TrajectorySample {
            record: monitor(&state, probes)?,
            state: state.clone(),
        });
    }
    Ok(Trajectory {
        samples,
        final_state: state,
        stop,
    })
}

/// Single-curve analogue of [`evolve`] (no junction logic).
pub fn curve_evolve(
    initial: CurveFlowState,
    config: &FlowConfig,
    motion: &EndpointMotion<'_>,
    probes: &[DensityProbe],
) -> Result<Trajectory<CurveFlowState>, FlowError> {
    config.validate()?;
    let mut state = initial;
    let mut samples = vec![TrajectorySample {
        record: monitor(&state, probes)?,
        state: state.clone(),
    }];
    let stop;
    loop {
        if let Some(reason) = stop_reason(std::slice::from_ref(&state.curve), state.t, config)? {
            stop = reason;
            break;
        }
        let dt = curve_adaptive_dt(&state, config.cfl)?.min(config.t_end - state.t);
        state = curve_step(&state, dt, motion)?;
        if config.resample_every > 0 && state.step_count % config.resample_every as u64 == 0 {
            state.curve = state.curve.resample_uniform(config.points_per_curve)?;
        }
        if state.step_count % config.monitor_every as u64 == 0 {
            samples.push(TrajectorySample {
                record: monitor(&state, probes)?,
                state: state.clone(),
            });
        }
    }
    if samples
        .last()
        .map(|s| s.state.step_count != state.step_count)
        .unwrap_or(true)
    {
        samples.push(TrajectorySample {
            record: monitor(&state, probes)?,
            state: state.clone(),
        });
    }
    Ok(Trajectory {
        samples,
        final_state: state,
        stop,
    })
}
