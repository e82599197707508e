//! Singularity and self-similarity analysis: blow-up-rate fits and Type I/II
//! classification, parabolic rescalings, residuals against the self-similar
//! solutions, Gaussian-density classification, and the Steiner-tree limit.

use crate::functionals::NetworkState;
use crate::geometry::{DiscreteCurve, GeometryError, Vec2};
use crate::junction::{Triod, TriodError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Triod(#[from] TriodError),
    #[error("series has {got} samples, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("series contains a non-finite or non-positive value")]
    BadSeries,
    #[error("trajectory shows no curvature growth")]
    NoGrowth,
    #[error("singular time {t_singular} is not after state time {t}")]
    BadSingularTime { t_singular: f64, t: f64 },
    #[error("grim reaper half-width must lie in (0, pi/2), got {0}")]
    InvalidHalfWidth(f64),
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("points are collinear")]
    CollinearPoints,
    #[error("points are not pairwise distinct")]
    CoincidentPoints,
    #[error("no Steiner point: some triangle angle reaches 120 degrees")]
    SteinerPointAbsent,
    #[error("rescaling ladder selects no samples")]
    EmptyLadder,
}

// ---------------------------------------------------------------------------
// blow-up rate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupClass {
    TypeI,
    TypeII,
    NoBlowup,
}

/// Result of fitting `max k^2 = C / (T - t)` to a recorded series.
#[derive(Debug, Clone)]
pub struct BlowupFit {
    /// Root of the linear fit of `1/max k^2` against `t`; `None` without blow-up.
    pub t_singular: Option<f64>,
    /// `C` of the Type I law; `None` without blow-up.
    pub rate_constant: Option<f64>,
    /// Relative RMS residual of the linear fit.
    pub fit_residual: f64,
    /// Ratio of `max k^2 (T_est - t)` between the last and first samples.
    pub trend_ratio: f64,
    pub classification: BlowupClass,
}

/// Declared classification thresholds; the dichotomy is asymptotic, so any
/// finite-data verdict depends on these.
#[derive(Debug, Clone, Copy)]
pub struct BlowupThresholds {
    /// Largest relative fit residual still accepted as Type I.
    pub fit_residual_max: f64,
    /// Trend growth of `k^2 (T_est - t)` beyond which the rate is super-Type-I.
    pub trend_factor: f64,
    /// Minimum overall growth of `max k^2` to count as blowing up at all.
    pub growth_min: f64,
}

impl Default for BlowupThresholds {
    fn default() -> Self {
        BlowupThresholds {
            fit_residual_max: 0.05,
            trend_factor: 2.0,
            growth_min: 2.0,
        }
    }
}

/// Least-squares fit of `1/max k^2` against `t` with Type I / Type II /
/// no-blow-up classification. `series` holds `(t, max k^2)` samples in
/// increasing time order.
pub fn estimate_blowup(
    series: &[(f64, f64)],
    thresholds: &BlowupThresholds,
) -> Result<BlowupFit, AnalysisError> {
    if series.len() < 8 {
        return Err(AnalysisError::TooFewSamples {
            got: series.len(),
            need: 8,
        });
    }
    if series
        .iter()
        .any(|(t, k2)| !t.is_finite() || !k2.is_finite() || *k2 <= 0.0)
    {
        return Err(AnalysisError::BadSeries);
    }
    let n = series.len() as f64;
    let ys: Vec<f64> = series.iter().map(|(_, k2)| 1.0 / k2).collect();
    let tm = series.iter().map(|(t, _)| t).sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((t, _), y) in series.iter().zip(&ys) {
        num += (t - tm) * (y - ym);
        den += (t - tm) * (t - tm);
    }
    let slope = num / den;
    let intercept = ym - slope * tm;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for ((t, _), y) in series.iter().zip(&ys) {
        let fit = intercept + slope * t;
        ss_res += (y - fit) * (y - fit);
        ss_tot += y * y;
    }
    let fit_residual = (ss_res / ss_tot).sqrt();

    let growth = series.last().unwrap().1 / series.first().unwrap().1;
    if growth < thresholds.growth_min || slope >= 0.0 {
        return Ok(BlowupFit {
            t_singular: None,
            rate_constant: None,
            fit_residual,
            trend_ratio: 1.0,
            classification: BlowupClass::NoBlowup,
        });
    }
    let t_est = -intercept / slope;
    let c_est = -1.0 / slope;
    let t_last = series.last().unwrap().0;
    let trend_ratio = if t_est > t_last {
        let g_first = series.first().unwrap().1 * (t_est - series.first().unwrap().0);
        let g_last = series.last().unwrap().1 * (t_est - t_last);
        g_last / g_first
    } else {
        f64::INFINITY
    };
    let classification = if t_est <= t_last || trend_ratio > thresholds.trend_factor {
        BlowupClass::TypeII
    } else if fit_residual < thresholds.fit_residual_max && c_est > 0.0 {
        BlowupClass::TypeI
    } else {
        BlowupClass::TypeII
    };
    Ok(BlowupFit {
        t_singular: Some(t_est),
        rate_constant: Some(c_est),
        fit_residual,
        trend_ratio,
        classification,
    })
}

// ---------------------------------------------------------------------------
// rescalings
// ---------------------------------------------------------------------------

/// Geometry after the parabolic zoom `(F - x0) / sqrt(2(T - t))`.
#[derive(Debug, Clone)]
pub struct RescaledState {
    pub curves: Vec<DiscreteCurve>,
    /// Rescaled time `-log(T - t) / 2`.
    pub rescaled_time: f64,
    pub origin: Vec2,
    /// Dilation factor `1 / sqrt(2(T - t))` that was applied.
    pub scale: f64,
}

/// Huisken rescaling of one network sample about `(x0, T)`.
pub fn rescale_huisken<S: NetworkState>(
    state: &S,
    x0: Vec2,
    t_singular: f64,
) -> Result<RescaledState, AnalysisError> {
    let t = state.time();
    if t_singular <= t {
        return Err(AnalysisError::BadSingularTime { t_singular, t });
    }
    let scale = 1.0 / (2.0 * (t_singular - t)).sqrt();
    let curves = state
        .curves()
        .iter()
        .map(|c| {
            DiscreteCurve::new(c.points().iter().map(|p| (*p - x0) * scale).collect())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RescaledState {
        curves,
        rescaled_time: -0.5 * (t_singular - t).ln(),
        origin: x0,
        scale,
    })
}

/// One rung of the Hamilton rescaling ladder.
#[derive(Debug, Clone)]
pub struct HamiltonSnapshot {
    /// Ladder parameter `n` (rung uses the window `t <= T - 1/n`).
    pub ladder_n: u32,
    /// Rescaled geometry `k_sel (F - F(p_sel))`.
    pub curves: Vec<DiscreteCurve>,
    /// Selected sample index in the input trajectory.
    pub sample_index: usize,
    /// Selected (curve, node).
    pub marked: (usize, usize),
    /// Curvature at the selected space-time point (the rescaling factor).
    pub scale: f64,
    pub source_time: f64,
    /// Curvature recomputed at the marked node of the rescaled geometry
    /// (`+-1` up to discretization).
    pub marked_curvature: f64,
}

/// Ladder `n = 4, 8, 16, ...` for which the window `[first sample, T - 1/n]`
/// contains data.
pub fn default_ladder<S: NetworkState>(trajectory: &[S], t_singular: f64) -> Vec<u32> {
    let mut ladder = Vec::new();
    if trajectory.is_empty() {
        return ladder;
    }
    let t_first = trajectory.first().unwrap().time();
    let t_last = trajectory.last().unwrap().time();
    let mut n = 4u32;
    while (n as f64) < 2.0 / f64::EPSILON {
        let cutoff = t_singular - 1.0 / n as f64;
        if cutoff > t_last {
            break;
        }
        if cutoff >= t_first {
            ladder.push(n);
        }
        n = n.saturating_mul(2);
    }
    ladder
}

/// Hamilton rescaling of a recorded trajectory: for each ladder rung selects
/// the space-time point maximizing `k^2 (T - 1/n - t)` over the stored
/// samples and emits the zoomed snapshot with unit marked curvature.
pub fn hamilton_rescale<S: NetworkState>(
    trajectory: &[S],
    t_singular: f64,
    ladder: &[u32],
) -> Result<Vec<HamiltonSnapshot>, AnalysisError> {
    if trajectory.len() < 2 {
        return Err(AnalysisError::TooFewSamples {
            got: trajectory.len(),
            need: 2,
        });
    }
    let max_k2 = |s: &S| -> Result<f64, AnalysisError> {
        let mut m = 0.0f64;
        for c in s.curves() {
            for j in 0..c.node_count() {
                let k = c.curvature(j)?;
                m = m.max(k * k);
            }
        }
        Ok(m)
    };
    let first = max_k2(&trajectory[0])?;
    let last = max_k2(trajectory.last().unwrap())?;
    if !(last > 1.5 * first) {
        return Err(AnalysisError::NoGrowth);
    }
    let mut snapshots = Vec::new();
    for &n in ladder {
        let cutoff = t_singular - 1.0 / n as f64;
        let mut best: Option<(f64, usize, usize, usize, f64)> = None;
        for (si, sample) in trajectory.iter().enumerate() {
            let t = sample.time();
            if t > cutoff {
                continue;
            }
            for (ci, c) in sample.curves().iter().enumerate() {
                for j in 0..c.node_count() {
                    let k = c.curvature(j)?;
                    let weight = k * k * (cutoff - t);
                    let better = match &best {
                        None => true,
                        Some((w, ..)) => weight > *w,
                    };
                    if better {
                        best = Some((weight, si, ci, j, k));
                    }
                }
            }
        }
        let Some((_, si, ci, node, k_sel)) = best else {
            continue;
        };
        if k_sel == 0.0 {
            continue;
        }
        let sample = &trajectory[si];
        let base = sample.curves()[ci].point(node);
        let curves = sample
            .curves()
            .iter()
            .map(|c| {
                DiscreteCurve::new(c.points().iter().map(|p| (*p - base) * k_sel).collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let marked_curvature = curves[ci].curvature(node)?;
        snapshots.push(HamiltonSnapshot {
            ladder_n: n,
            curves,
            sample_index: si,
            marked: (ci, node),
            scale: k_sel,
            source_time: sample.time(),
            marked_curvature,
        });
    }
    if snapshots.is_empty() {
        return Err(AnalysisError::EmptyLadder);
    }
    Ok(snapshots)
}

// ---------------------------------------------------------------------------
// self-similar solutions
// ---------------------------------------------------------------------------

/// Largest deviation from the shrinker equation `k = -<x | nu>` over all nodes.
pub fn shrinker_residual(curves: &[DiscreteCurve]) -> Result<f64, AnalysisError> {
    let mut worst = 0.0f64;
    for c in curves {
        for j in 0..c.node_count() {
            let k = c.curvature(j)?;
            let nu = c.normal(j)?;
            worst = worst.max((k + c.point(j).dot(nu)).abs());
        }
    }
    Ok(worst)
}

/// Largest deviation from the translator equation `k = <w | nu>`.
pub fn translator_residual(curves: &[DiscreteCurve], w: Vec2) -> Result<f64, AnalysisError> {
    let mut worst = 0.0f64;
    for c in curves {
        for j in 0..c.node_count() {
            let k = c.curvature(j)?;
            let nu = c.normal(j)?;
            worst = worst.max((k - w.dot(nu)).abs());
        }
    }
    Ok(worst)
}

/// Gudermannian function `gd(s) = 2 atan(tanh(s/2))`.
fn gudermannian(s: f64) -> f64 {
    2.0 * (0.5 * s).tanh().atan()
}

/// Truncated grim reaper relative to `w`: the graph `x = -log(cos y)` over
/// `y in [-y_max, y_max]`, rotated to align `e1` with `w` and dilated by
/// `1/|w|`, sampled uniformly in arclength (via the exact parametrization
/// `s -> (log cosh s, gd(s))`). Nodes run from `+y_max` down to `-y_max`,
/// which orients the curvature as `k = |w| cos y > 0`.
pub fn grim_reaper(w: Vec2, n: usize, y_max: f64) -> Result<DiscreteCurve, AnalysisError> {
    if !(y_max > 0.0 && y_max < std::f64::consts::FRAC_PI_2) {
        return Err(AnalysisError::InvalidHalfWidth(y_max));
    }
    let speed = w.norm();
    if speed == 0.0 || !w.is_finite() {
        return Err(AnalysisError::ZeroDirection);
    }
    if n < 3 {
        return Err(GeometryError::TooFewPoints { min: 3, got: n }.into());
    }
    let s_max = y_max.sin().atanh();
    let x_end = -(y_max.cos().ln());
    let angle = w.y.atan2(w.x);
    let place = |p: Vec2| p.rotated(angle) / speed;
    let mut pts = Vec::with_capacity(n);
    pts.push(place(Vec2::new(x_end, y_max)));
    for j in 1..n - 1 {
        let s = s_max * (1.0 - 2.0 * j as f64 / (n - 1) as f64);
        pts.push(place(Vec2::new(s.cosh().ln(), gudermannian(s))));
    }
    pts.push(place(Vec2::new(x_end, -y_max)));
    Ok(DiscreteCurve::new(pts)?)
}

// ---------------------------------------------------------------------------
// Gaussian density classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityClass {
    /// Density 1/2: an endpoint.
    Half,
    /// Density 1: a regular curve point.
    One,
    /// Density 3/2: the triple junction.
    ThreeHalves,
    Unclassified,
}

/// Maps a Gaussian density to the nearest of its admissible limit values
/// 1/2, 1, 3/2 when within `tol`.
pub fn classify_density(theta: f64, tol: f64) -> DensityClass {
    let candidates = [
        (0.5, DensityClass::Half),
        (1.0, DensityClass::One),
        (1.5, DensityClass::ThreeHalves),
    ];
    let mut best = DensityClass::Unclassified;
    let mut best_gap = f64::INFINITY;
    for (value, class) in candidates {
        let gap = (theta - value).abs();
        if gap < best_gap {
            best_gap = gap;
            best = class;
        }
    }
    if best_gap <= tol {
        best
    } else {
        DensityClass::Unclassified
    }
}

// ---------------------------------------------------------------------------
// Steiner configuration
// ---------------------------------------------------------------------------

const WEISZFELD_TOL: f64 = 1e-12;
const WEISZFELD_MAX_ITER: usize = 10_000;

/// Fermat point of a triangle by Weiszfeld iteration, or `None` when some
/// angle reaches 120 degrees (the minimal connection then degenerates to two
/// sides). Collinear or coincident input is an error.
pub fn steiner_point(points: [Vec2; 3]) -> Result<Option<Vec2>, AnalysisError> {
    for i in 0..3 {
        for j in i + 1..3 {
            if points[i] == points[j] {
                return Err(AnalysisError::CoincidentPoints);
            }
        }
    }
    let scale = points[0]
        .dist(points[1])
        .max(points[1].dist(points[2]))
        .max(points[2].dist(points[0]));
    let area2 = (points[1] - points[0]).cross(points[2] - points[0]);
    if area2.abs() <= 1e-12 * scale * scale {
        return Err(AnalysisError::CollinearPoints);
    }
    for i in 0..3 {
        let u = (points[(i + 1) % 3] - points[i]).normalized();
        let v = (points[(i + 2) % 3] - points[i]).normalized();
        if u.dot(v) <= -0.5 {
            return Ok(None);
        }
    }
    let centroid = (points[0] + points[1] + points[2]) / 3.0;
    let mut x = centroid;
    for _ in 0..WEISZFELD_MAX_ITER {
        let mut weight_sum = 0.0;
        let mut weighted = Vec2::ZERO;
        let mut degenerate = false;
        for p in points {
            let d = x.dist(p);
            if d < 1e-12 * scale {
                degenerate = true;
                break;
            }
            weight_sum += 1.0 / d;
            weighted += p / d;
        }
        if degenerate {
            // nudge an iterate sitting on a vertex toward the centroid
            x += (centroid - x).normalized() * (1e-9 * scale);
            continue;
        }
        let next = weighted / weight_sum;
        let moved = next.dist(x);
        x = next;
        if moved <= WEISZFELD_TOL * scale {
            break;
        }
    }
    Ok(Some(x))
}

/// Hausdorff distance and length gap between a triod and the exact Steiner
/// tree over the given endpoints.
#[derive(Debug, Clone, Copy)]
pub struct SteinerDistance {
    pub hausdorff: f64,
    pub length_gap: f64,
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn directed_hausdorff(from: &[(Vec2, Vec2)], to: &[(Vec2, Vec2)], spacing: f64) -> f64 {
    let mut worst = 0.0f64;
    for &(a, b) in from {
        let len = a.dist(b);
        let pieces = (len / spacing).ceil().max(1.0) as usize;
        for i in 0..=pieces {
            let p = a.lerp(b, i as f64 / pieces as f64);
            let d = to
                .iter()
                .map(|&(c, d)| point_segment_distance(p, c, d))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}

/// Compares a triod to the Steiner configuration over `endpoints`. Errors if
/// the Steiner point is absent.
pub fn steiner_distance(
    triod: &Triod,
    endpoints: [Vec2; 3],
) -> Result<SteinerDistance, AnalysisError> {
    let steiner = steiner_point(endpoints)?.ok_or(AnalysisError::SteinerPointAbsent)?;
    let tree: Vec<(Vec2, Vec2)> = endpoints.iter().map(|p| (steiner, *p)).collect();
    let mut network = Vec::new();
    for c in triod.curves() {
        for j in 0..c.node_count() - 1 {
            network.push((c.point(j), c.point(j + 1)));
        }
    }
    let diameter = endpoints
        .iter()
        .flat_map(|a| endpoints.iter().map(move |b| a.dist(*b)))
        .fold(0.0f64, f64::max);
    let spacing = 1e-4 * diameter;
    let hausdorff = directed_hausdorff(&network, &tree, spacing)
        .max(directed_hausdorff(&tree, &network, spacing));
    let steiner_length = endpoints.iter().map(|p| p.dist(steiner)).sum::<f64>();
    Ok(SteinerDistance {
        hausdorff,
        length_gap: triod.total_length() - steiner_length,
    })
}
