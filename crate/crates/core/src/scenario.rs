//! Scenario configuration, analytic initial data, trajectory persistence.
//!
//! A scenario is one JSON document naming an initial-geometry family with
//! its parameters, the flow settings, density probes and a seed. Outputs are
//! a CSV time series of the monitored functionals and JSON snapshots of the
//! geometry; both are byte-deterministic for a fixed config and seed
//! (floats are serialized as shortest round-trip decimals).

use crate::analysis::{steiner_point, AnalysisError};
use crate::flow::{
    curve_evolve, evolve, CurveFlowState, EndpointMotion, FlowConfig, FlowError, FlowState,
    StopReason, Trajectory,
};
use crate::functionals::{DensityProbe, FunctionalError, MonitorRecord, NetworkState};
use crate::geometry::{DiscreteCurve, GeometryError, Vec2};
use crate::junction::{Triod, TriodError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario family '{0}'")]
    UnknownFamily(String),
    #[error("invalid scenario parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Triod(#[from] TriodError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

fn io_err(path: &Path, source: std::io::Error) -> ScenarioError {
    ScenarioError::Io {
        path: path.display().to_string(),
        source,
    }
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

/// Mirror of [`FlowConfig`] with serde defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSettings {
    pub cfl: f64,
    pub t_end: f64,
    pub resample_every: usize,
    pub angle_tol: f64,
    pub max_abs_curvature: f64,
    pub min_curve_length: f64,
    pub monitor_every: usize,
}

impl Default for FlowSettings {
    fn default() -> Self {
        let d = FlowConfig::default();
        FlowSettings {
            cfl: d.cfl,
            t_end: d.t_end,
            resample_every: d.resample_every,
            angle_tol: d.angle_tol,
            max_abs_curvature: d.max_abs_curvature,
            min_curve_length: d.min_curve_length,
            monitor_every: d.monitor_every,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyParams {
    /// Fixed endpoints for the triod families.
    pub endpoints: Option<[[f64; 2]; 3]>,
    /// Normal perturbation amplitude (perturbed_steiner).
    pub amplitude: Option<f64>,
    /// Translation vector of the grim reaper.
    pub w: Option<[f64; 2]>,
    /// Half-width in y of the truncated grim reaper.
    pub y_max: Option<f64>,
    /// Chord endpoints of the bowed curve.
    pub span: Option<[[f64; 2]; 2]>,
    /// Bow amplitude.
    pub bow: Option<f64>,
    /// Base point of the synthetic density configurations.
    pub x0: Option<[f64; 2]>,
    /// Kernel time parameter `T - t` of the synthetic configurations.
    pub time_to_singularity: Option<f64>,
    /// Extent of synthetic rays in units of `sqrt(2 (T - t))`.
    pub extent_sigmas: Option<f64>,
    /// Snapshot file for the `from_snapshot` family.
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub x0: [f64; 2],
    pub t_singular: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub family: String,
    #[serde(default)]
    pub params: FamilyParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_points_per_curve")]
    pub points_per_curve: usize,
    #[serde(default)]
    pub flow: FlowSettings,
    #[serde(default)]
    pub probes: Vec<ProbeConfig>,
}

fn default_points_per_curve() -> usize {
    64
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| ScenarioError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            cfl: self.flow.cfl,
            t_end: self.flow.t_end,
            resample_every: self.flow.resample_every,
            points_per_curve: self.points_per_curve,
            angle_tol: self.flow.angle_tol,
            max_abs_curvature: self.flow.max_abs_curvature,
            min_curve_length: self.flow.min_curve_length,
            monitor_every: self.flow.monitor_every,
        }
    }

    pub fn density_probes(&self) -> Vec<DensityProbe> {
        self.probes
            .iter()
            .map(|p| DensityProbe {
                x0: Vec2::from(p.x0),
                t_singular: p.t_singular,
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// scenario construction
// ---------------------------------------------------------------------------

/// Endpoint behaviour of a single-curve scenario, in a serializable form.
#[derive(Debug, Clone, Copy)]
pub enum MotionSpec {
    Fixed,
    /// Endpoints follow the exact translator path `p + w t`.
    Translating(Vec2),
}

/// A constructed initial state.
#[derive(Debug, Clone)]
pub enum Scenario {
    Triod(FlowState),
    Curve(CurveFlowState, MotionSpec),
}

fn standard_endpoints() -> [Vec2; 3] {
    let up = Vec2::new(0.0, 1.0);
    [
        up,
        up.rotated(2.0 * std::f64::consts::PI / 3.0),
        up.rotated(4.0 * std::f64::consts::PI / 3.0),
    ]
}

fn config_endpoints(params: &FamilyParams) -> [Vec2; 3] {
    match params.endpoints {
        Some(e) => [Vec2::from(e[0]), Vec2::from(e[1]), Vec2::from(e[2])],
        None => standard_endpoints(),
    }
}

fn steiner_rays(endpoints: [Vec2; 3], n: usize) -> Result<[DiscreteCurve; 3], ScenarioError> {
    let junction = steiner_point(endpoints)?.ok_or_else(|| {
        ScenarioError::BadParams(
            "endpoint triangle has an angle of 120 degrees or more; no Steiner triod exists"
                .into(),
        )
    })?;
    Ok([
        DiscreteCurve::from_fn(n, |x| junction.lerp(endpoints[0], x))?,
        DiscreteCurve::from_fn(n, |x| junction.lerp(endpoints[1], x))?,
        DiscreteCurve::from_fn(n, |x| junction.lerp(endpoints[2], x))?,
    ])
}

/// Builds the initial state of the named family. Triod families satisfy the
/// order-0 and order-1 compatibility conditions by construction; order 2 is
/// a property of the data that `validate` reports.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    let n = config.points_per_curve;
    let p = &config.params;
    match config.family.as_str() {
        "steiner" => {
            let curves = steiner_rays(config_endpoints(p), n)?;
            Ok(Scenario::Triod(FlowState::new(Triod::new(curves)?)))
        }
        "perturbed_steiner" => {
            let endpoints = config_endpoints(p);
            let amplitude = p.amplitude.unwrap_or(0.05);
            let junction = steiner_point(endpoints)?.ok_or_else(|| {
                ScenarioError::BadParams("no Steiner point for the given endpoints".into())
            })?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut curves = Vec::with_capacity(3);
            for endpoint in endpoints {
                let c1: f64 = rng.gen_range(-1.0..1.0);
                let c2: f64 = rng.gen_range(-1.0..1.0);
                let dir = (endpoint - junction).normalized();
                let nh = dir.perp();
                curves.push(DiscreteCurve::from_fn(n, |x| {
                    // sin^2 modes have zero slope at both ends: the 120-degree
                    // tangents and the endpoint positions stay exact
                    let s1 = (std::f64::consts::PI * x).sin();
                    let s2 = (2.0 * std::f64::consts::PI * x).sin();
                    let bump = amplitude * (c1 * s1 * s1 + c2 * s2 * s2);
                    junction.lerp(endpoint, x) + nh * bump
                })?);
            }
            let triod = Triod::new([
                curves[0].clone(),
                curves[1].clone(),
                curves[2].clone(),
            ])?;
            Ok(Scenario::Triod(FlowState::new(triod)))
        }
        "grim_reaper" => {
            let w = Vec2::from(p.w.unwrap_or([1.0, 0.0]));
            let y_max = p.y_max.unwrap_or(1.3);
            let curve = crate::analysis::grim_reaper(w, n, y_max)?;
            Ok(Scenario::Curve(
                CurveFlowState::new(curve),
                MotionSpec::Translating(w),
            ))
        }
        "bowed" => {
            let span = p
                .span
                .map(|s| [Vec2::from(s[0]), Vec2::from(s[1])])
                .unwrap_or([Vec2::ZERO, Vec2::new(1.0, 0.0)]);
            let bow = p.bow.unwrap_or(0.25);
            let dir = span[1] - span[0];
            let nh = dir.normalized().perp();
            let curve = DiscreteCurve::from_fn(n, |x| {
                span[0] + dir * x + nh * (bow * (std::f64::consts::PI * x).sin())
            })?
            .resample_uniform(n)?;
            Ok(Scenario::Curve(CurveFlowState::new(curve), MotionSpec::Fixed))
        }
        "line" | "halfline" | "halfline_star" => {
            let x0 = Vec2::from(p.x0.unwrap_or([0.0, 0.0]));
            let tau = p.time_to_singularity.unwrap_or(1.0);
            if tau <= 0.0 {
                return Err(ScenarioError::BadParams(
                    "time_to_singularity must be positive".into(),
                ));
            }
            let extent = p.extent_sigmas.unwrap_or(10.0) * (2.0 * tau).sqrt();
            match config.family.as_str() {
                "line" => {
                    let curve = DiscreteCurve::from_fn(n, |x| {
                        x0 + Vec2::new(extent * (2.0 * x - 1.0), 0.0)
                    })?;
                    Ok(Scenario::Curve(CurveFlowState::new(curve), MotionSpec::Fixed))
                }
                "halfline" => {
                    let curve =
                        DiscreteCurve::from_fn(n, |x| x0 + Vec2::new(extent * x, 0.0))?;
                    Ok(Scenario::Curve(CurveFlowState::new(curve), MotionSpec::Fixed))
                }
                _ => {
                    let dirs = standard_endpoints();
                    let curves = dirs.map(|d| {
                        DiscreteCurve::from_fn(n, |x| x0 + d * (extent * x)).unwrap()
                    });
                    Ok(Scenario::Triod(FlowState::new(Triod::new(curves)?)))
                }
            }
        }
        "from_snapshot" => {
            let path = p.path.as_ref().ok_or_else(|| {
                ScenarioError::BadParams("from_snapshot requires params.path".into())
            })?;
            let doc = read_snapshot(Path::new(path))?;
            scenario_from_snapshot(&doc)
        }
        other => Err(ScenarioError::UnknownFamily(other.to_string())),
    }
}

fn scenario_from_snapshot(doc: &SnapshotDoc) -> Result<Scenario, ScenarioError> {
    let curves: Vec<DiscreteCurve> = doc
        .curves
        .iter()
        .map(|pts| DiscreteCurve::new(pts.iter().map(|p| Vec2::from(*p)).collect()))
        .collect::<Result<_, _>>()?;
    match curves.len() {
        3 => {
            let triod = Triod::new([curves[0].clone(), curves[1].clone(), curves[2].clone()])?;
            let mut state = FlowState::new(triod);
            state.t = doc.t;
            Ok(Scenario::Triod(state))
        }
        1 => {
            let mut state = CurveFlowState::new(curves[0].clone());
            state.t = doc.t;
            Ok(Scenario::Curve(state, MotionSpec::Fixed))
        }
        k => Err(ScenarioError::BadParams(format!(
            "snapshot holds {k} curves; expected 1 or 3"
        ))),
    }
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

/// Geometry snapshot document (the JSON schema of snapshot files).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDoc {
    pub t: f64,
    pub curves: Vec<Vec<[f64; 2]>>,
    pub meta: SnapshotMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub family: String,
    pub seed: u64,
}

impl SnapshotDoc {
    pub fn from_curves(t: f64, curves: &[DiscreteCurve], meta: SnapshotMeta) -> Self {
        SnapshotDoc {
            t,
            curves: curves
                .iter()
                .map(|c| c.points().iter().map(|p| [p.x, p.y]).collect())
                .collect(),
            meta,
        }
    }

    pub fn timed_curves(&self) -> Result<crate::functionals::TimedCurves, ScenarioError> {
        let curves = self
            .curves
            .iter()
            .map(|pts| DiscreteCurve::new(pts.iter().map(|p| Vec2::from(*p)).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(crate::functionals::TimedCurves { t: self.t, curves })
    }
}

pub fn write_snapshot(doc: &SnapshotDoc, path: &Path) -> Result<(), ScenarioError> {
    let mut text = serde_json::to_string(doc).expect("snapshot serialization cannot fail");
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotDoc, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| ScenarioError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes one snapshot document per line.
pub fn write_snapshot_series(docs: &[SnapshotDoc], path: &Path) -> Result<(), ScenarioError> {
    let mut out = String::new();
    for doc in docs {
        out.push_str(&serde_json::to_string(doc).expect("snapshot serialization cannot fail"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_snapshot_series(path: &Path) -> Result<Vec<SnapshotDoc>, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            serde_json::from_str(line).map_err(|e| ScenarioError::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        })
        .collect()
}

const SERIES_COLUMNS: [&str; 12] = [
    "t",
    "L1",
    "L2",
    "L3",
    "L_total",
    "k_l2_sq",
    "k_max_abs",
    "E",
    "sum_k",
    "sum_lambda",
    "angle_defect",
    "junction_vel_spread",
];

/// Writes the monitor series as CSV with the fixed column schema
/// (plus one `theta_<i>` column per probe).
pub fn write_series(records: &[MonitorRecord], path: &Path) -> Result<(), ScenarioError> {
    let probes = records.first().map(|r| r.theta.len()).unwrap_or(0);
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        write!(w, "{}", SERIES_COLUMNS.join(","))?;
        for i in 0..probes {
            write!(w, ",theta_{i}")?;
        }
        writeln!(w)?;
        for r in records {
            write!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.lengths[0],
                r.lengths[1],
                r.lengths[2],
                r.total_length,
                r.curvature_l2_sq,
                r.max_abs_curvature,
                r.embeddedness,
                r.sum_curvature,
                r.sum_tangential,
                r.angle_defect,
                r.junction_velocity_spread
            )?;
            for v in &r.theta {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write().map_err(|e| io_err(path, e))
}

/// Reads a monitor series back from CSV.
pub fn read_series(path: &Path) -> Result<Vec<MonitorRecord>, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let parse_err = |message: String| ScenarioError::Parse {
        path: path.display().to_string(),
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < SERIES_COLUMNS.len()
        || columns[..SERIES_COLUMNS.len()] != SERIES_COLUMNS[..]
    {
        return Err(parse_err(format!("unexpected header '{header}'")));
    }
    let probes = columns.len() - SERIES_COLUMNS.len();
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(parse_err(format!(
                "row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                columns.len()
            )));
        }
        let num = |i: usize| -> Result<f64, ScenarioError> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| parse_err(format!("row {}: {e}", lineno + 2)))
        };
        records.push(MonitorRecord {
            t: num(0)?,
            lengths: [num(1)?, num(2)?, num(3)?],
            total_length: num(4)?,
            curvature_l2_sq: num(5)?,
            max_abs_curvature: num(6)?,
            embeddedness: num(7)?,
            sum_curvature: num(8)?,
            sum_tangential: num(9)?,
            angle_defect: num(10)?,
            junction_velocity_spread: num(11)?,
            theta: (0..probes)
                .map(|i| num(SERIES_COLUMNS.len() + i))
                .collect::<Result<_, _>>()?,
        });
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// run orchestration
// ---------------------------------------------------------------------------

/// A completed scenario run: monitor records, geometry snapshots at the
/// monitor cadence, and the stop reason.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub family: String,
    pub seed: u64,
    pub records: Vec<MonitorRecord>,
    pub snapshots: Vec<SnapshotDoc>,
    pub stop: StopReason,
}

impl ScenarioRun {
    pub fn initial_snapshot(&self) -> &SnapshotDoc {
        self.snapshots.first().expect("run has at least one sample")
    }

    pub fn final_snapshot(&self) -> &SnapshotDoc {
        self.snapshots.last().expect("run has at least one sample")
    }
}

fn collect_run<S: NetworkState + Clone>(
    trajectory: &Trajectory<S>,
    family: &str,
    seed: u64,
) -> ScenarioRun {
    let meta = SnapshotMeta {
        family: family.to_string(),
        seed,
    };
    ScenarioRun {
        family: family.to_string(),
        seed,
        records: trajectory.records(),
        snapshots: trajectory
            .samples
            .iter()
            .map(|s| SnapshotDoc::from_curves(s.state.time(), s.state.curves(), meta.clone()))
            .collect(),
        stop: trajectory.stop,
    }
}

/// Builds and evolves the configured scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun, ScenarioError> {
    let flow_config = config.flow_config();
    let probes = config.density_probes();
    match build_scenario(config)? {
        Scenario::Triod(state) => {
            let trajectory = evolve(state, &flow_config, &probes)?;
            Ok(collect_run(&trajectory, &config.family, config.seed))
        }
        Scenario::Curve(state, motion) => {
            let trajectory = match motion {
                MotionSpec::Fixed => {
                    curve_evolve(state, &flow_config, &EndpointMotion::Fixed, &probes)?
                }
                MotionSpec::Translating(w) => {
                    let start = state.curve.first();
                    let end = state.curve.last();
                    let t0 = state.t;
                    let path = move |t: f64| (start + w * (t - t0), end + w * (t - t0));
                    curve_evolve(state, &flow_config, &EndpointMotion::Prescribed(&path), &probes)?
                }
            };
            Ok(collect_run(&trajectory, &config.family, config.seed))
        }
    }
}

/// Writes the standard output files of a run into `out_dir`:
/// `series.csv`, `snapshot_initial.json`, `snapshot_final.json`,
/// `snapshots.jsonl`.
pub fn write_run(run: &ScenarioRun, out_dir: &Path) -> Result<(), ScenarioError> {
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    write_series(&run.records, &out_dir.join("series.csv"))?;
    write_snapshot(run.initial_snapshot(), &out_dir.join("snapshot_initial.json"))?;
    write_snapshot(run.final_snapshot(), &out_dir.join("snapshot_final.json"))?;
    write_snapshot_series(&run.snapshots, &out_dir.join("snapshots.jsonl"))?;
    Ok(())
}
