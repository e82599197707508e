//! Triod assembly and the 120-degree junction algebra.
//!
//! A [`Triod`] is three curves whose parameter-0 nodes coincide at the
//! junction `O`, with the parameter-1 endpoints pinned at three distinct
//! points. At the junction the one-sided curvatures `K = (k1, k2, k3)`
//! determine the tangential speeds through the cyclic relation
//!
//! ```text
//! lambda_i = (k_{i-1} - k_{i+1}) / sqrt(3)
//! ```
//!
//! which is the rotation `Lambda = -S K` of R^3 by pi/2 about (1,1,1).
//! On the plane orthogonal to (1,1,1) this forces the sum identities
//! `sum k = sum lambda = 0`, `sum k^2 = sum lambda^2`, `sum k lambda = 0`
//! that [`junction_identities`] reports, together with the angle defect
//! `|tau1(0) + tau2(0) + tau3(0)|` of the 120-degree condition.

use crate::geometry::{DiscreteCurve, GeometryError, Vec2};
use thiserror::Error;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Maximum Gauss-Seidel sweeps when re-imposing the angle condition.
const MAX_RELAXATION_SWEEPS: usize = 8;

#[derive(Debug, Error)]
pub enum TriodError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("curves {0} and {1} do not share the junction node")]
    NotConcurrent(usize, usize),
    #[error("endpoints {0} and {1} coincide")]
    EndpointsCoincide(usize, usize),
}

/// Three curves meeting at a common junction node, endpoints pinned.
///
/// Convention: node 0 of every curve is the junction (bit-exact concurrency),
/// node `n-1` is the fixed endpoint `P_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triod {
    curves: [DiscreteCurve; 3],
}

impl Triod {
    pub fn new(curves: [DiscreteCurve; 3]) -> Result<Self, TriodError> {
        for i in 1..3 {
            if curves[i].first() != curves[0].first() {
                return Err(TriodError::NotConcurrent(0, i));
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if curves[i].last() == curves[j].last() {
                    return Err(TriodError::EndpointsCoincide(i, j));
                }
            }
        }
        Ok(Triod { curves })
    }

    pub fn curves(&self) -> &[DiscreteCurve; 3] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> &DiscreteCurve {
        &self.curves[i]
    }

    /// The common 3-point `O`.
    pub fn junction(&self) -> Vec2 {
        self.curves[0].first()
    }

    pub fn endpoints(&self) -> [Vec2; 3] {
        [
            self.curves[0].last(),
            self.curves[1].last(),
            self.curves[2].last(),
        ]
    }

    pub fn lengths(&self) -> [f64; 3] {
        [
            self.curves[0].arclength(),
            self.curves[1].arclength(),
            self.curves[2].arclength(),
        ]
    }

    pub fn total_length(&self) -> f64 {
        let [a, b, c] = self.lengths();
        (a + b) + c
    }

}

/// One-sided junction data of the three curves at the 3-point.
#[derive(Debug, Clone, Copy)]
pub struct JunctionReport {
    /// One-sided curvatures `K = (k1, k2, k3)` at the junction.
    pub curvatures: [f64; 3],
    /// Tangential speeds `Lambda` derived from `K` by the cyclic relation.
    pub tangential_speeds: [f64; 3],
    pub sum_curvature: f64,
    pub sum_tangential: f64,
    /// `sum k^2 - sum lambda^2` (zero at an exact junction).
    pub square_sum_gap: f64,
    /// `sum k*lambda` (zero at an exact junction).
    pub cross_sum: f64,
    /// `|tau1(0) + tau2(0) + tau3(0)|`, the 120-degree defect.
    pub angle_defect: f64,
}

/// One-sided curvatures of the three curves at the junction node.
pub fn junction_curvatures(triod: &Triod) -> Result<[f64; 3], TriodError> {
    Ok([
        triod.curve(0).curvature(0)?,
        triod.curve(1).curvature(0)?,
        triod.curve(2).curvature(0)?,
    ])
}

/// Tangential speeds at the junction from the curvatures:
/// `lambda_i = (k_{i-1} - k_{i+1}) / sqrt(3)` with 1-based cyclic indices.
pub fn lambda_from_k(k: [f64; 3]) -> [f64; 3] {
    [
        (k[2] - k[1]) / SQRT3,
        (k[0] - k[2]) / SQRT3,
        (k[1] - k[0]) / SQRT3,
    ]
}

/// Sum of the three junction tangents (zero iff the angles are 120 degrees).
pub fn angle_defect_vector(triod: &Triod) -> Result<Vec2, TriodError> {
    let mut sum = Vec2::ZERO;
    for c in triod.curves() {
        sum += c.tangent(0)?;
    }
    Ok(sum)
}

/// Evaluates `K`, `Lambda` and all junction sum identities.
pub fn junction_identities(triod: &Triod) -> Result<JunctionReport, TriodError> {
    let k = junction_curvatures(triod)?;
    let lam = lambda_from_k(k);
    let sum_k = k[0] + k[1] + k[2];
    let sum_l = lam[0] + lam[1] + lam[2];
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let l2 = lam[0] * lam[0] + lam[1] * lam[1] + lam[2] * lam[2];
    let cross = k[0] * lam[0] + k[1] * lam[1] + k[2] * lam[2];
    Ok(JunctionReport {
        curvatures: k,
        tangential_speeds: lam,
        sum_curvature: sum_k,
        sum_tangential: sum_l,
        square_sum_gap: k2 - l2,
        cross_sum: cross,
        angle_defect: angle_defect_vector(triod)?.norm(),
    })
}

/// Per-curve junction velocities `k_i nu_i + lambda_i tau_i`, with `Lambda`
/// taken from the curvature relation rather than one-sided stencils.
pub fn junction_velocities(triod: &Triod) -> Result<[Vec2; 3], TriodError> {
    let k = junction_curvatures(triod)?;
    let lam = lambda_from_k(k);
    let mut out = [Vec2::ZERO; 3];
    for i in 0..3 {
        let tau = triod.curve(i).tangent(0)?;
        out[i] = tau.perp() * k[i] + tau * lam[i];
    }
    Ok(out)
}

/// Compatibility of the initial data with a smooth flow, orders 0 through 2.
#[derive(Debug, Clone, Copy)]
pub struct CompatibilityReport {
    pub tolerance: f64,
    /// Structural order 0: concurrency plus distinct endpoints.
    pub order0: bool,
    pub angle_defect: f64,
    /// Order 1: angle defect within tolerance.
    pub order1: bool,
    /// `|v|` at each fixed endpoint.
    pub endpoint_speeds: [f64; 3],
    /// Order 2(a): zero velocity at the fixed endpoints.
    pub order2_endpoints: bool,
    /// Largest pairwise gap between the raw junction velocities.
    pub junction_velocity_gap: f64,
    /// Order 2(b): matching velocities across the junction.
    pub order2_junction: bool,
}

impl CompatibilityReport {
    pub fn order2(&self) -> bool {
        self.order2_endpoints && self.order2_junction
    }

    pub fn all(&self) -> bool {
        self.order0 && self.order1 && self.order2()
    }
}

/// Checks the compatibility conditions of orders 0, 1 and 2 at tolerance
/// `tol`. Failures are reported, not raised.
pub fn compatibility_report(triod: &Triod, tol: f64) -> Result<CompatibilityReport, TriodError> {
    let defect = angle_defect_vector(triod)?.norm();
    let mut endpoint_speeds = [0.0; 3];
    for i in 0..3 {
        let c = triod.curve(i);
        endpoint_speeds[i] = c.velocity(c.node_count() - 1)?.norm();
    }
    let v = [
        triod.curve(0).velocity(0)?,
        triod.curve(1).velocity(0)?,
        triod.curve(2).velocity(0)?,
    ];
    let mut gap = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            gap = gap.max((v[i] - v[j]).norm());
        }
    }
    Ok(CompatibilityReport {
        tolerance: tol,
        order0: true, // enforced by Triod construction
        angle_defect: defect,
        order1: defect <= tol,
        endpoint_speeds,
        order2_endpoints: endpoint_speeds.iter().all(|s| *s <= tol),
        junction_velocity_gap: gap,
        order2_junction: gap <= tol,
    })
}

/// Residual `max(|k|, |lambda|)` at each fixed endpoint. Zero for data
/// compatible with the flow (even arclength derivatives vanish there).
pub fn endpoint_conditions(triod: &Triod) -> Result<[f64; 3], TriodError> {
    let mut out = [0.0; 3];
    for i in 0..3 {
        let c = triod.curve(i);
        let j = c.node_count() - 1;
        out[i] = c.curvature(j)?.abs().max(c.tangential_speed(j)?.abs());
    }
    Ok(out)
}

/// Outcome of the angle relaxation inside [`enforce_junction`].
#[derive(Debug, Clone, Copy)]
pub struct RelaxationOutcome {
    pub initial_defect: f64,
    pub final_defect: f64,
    pub sweeps: usize,
    /// False when the defect stayed above ten times the tolerance: a
    /// convergence warning, not a failure.
    pub converged: bool,
}

fn junction_tangent(curve: &DiscreteCurve) -> Vec2 {
    curve.param_first_derivative(0).normalized()
}

/// Moves the junction node of all three curves to `new_junction` and
/// re-imposes the 120-degree condition by rotating the first interior node
/// of each curve about the junction (Gauss-Seidel sweeps of damped
/// Gauss-Newton steps on the 2-d defect). Endpoints are never touched; each
/// accepted step strictly decreases the defect.
pub fn enforce_junction(
    triod: &Triod,
    new_junction: Vec2,
    angle_tol: f64,
) -> Result<(Triod, RelaxationOutcome), TriodError> {
    let mut curves = triod.curves().clone();
    for c in curves.iter_mut() {
        c.set_point(0, new_junction);
    }
    let defect_of = |cs: &[DiscreteCurve; 3]| -> Vec2 {
        let mut d = Vec2::ZERO;
        for c in cs {
            d += junction_tangent(c);
        }
        d
    };
    let initial_defect = defect_of(&curves).norm();
    let mut sweeps = 0;
    for _ in 0..MAX_RELAXATION_SWEEPS {
        if defect_of(&curves).norm() <= angle_tol {
            break;
        }
        sweeps += 1;
        for i in 0..3 {
            let defect = defect_of(&curves);
            let norm = defect.norm();
            if norm <= angle_tol {
                break;
            }
            let radial = curves[i].point(1) - new_junction;
            // tau0 = u/|u| with u = (-3 g0 + 4 g1 - g2)/(2 dx); rotating node 1
            // by phi moves u along 4/(2 dx) * perp(radial)
            let dx = curves[i].dx();
            let u = curves[i].param_first_derivative(0);
            let du = radial.perp() * (4.0 / (2.0 * dx));
            let speed = u.norm();
            let tau = u / speed;
            let jac = (du - tau * tau.dot(du)) / speed;
            let denom = jac.norm_sq();
            if denom < 1e-30 {
                continue;
            }
            let mut phi = -defect.dot(jac) / denom;
            for _ in 0..6 {
                if phi == 0.0 {
                    break;
                }
                let candidate = new_junction + radial.rotated(phi);
                let old = curves[i].point(1);
                curves[i].set_point(1, candidate);
                if defect_of(&curves).norm() < norm {
                    break;
                }
                curves[i].set_point(1, old);
                phi *= 0.5;
            }
        }
    }
    let final_defect = defect_of(&curves).norm();
    let outcome = RelaxationOutcome {
        initial_defect,
        final_defect,
        sweeps,
        converged: final_defect <= 10.0 * angle_tol || final_defect < initial_defect * 1e-3,
    };
    Ok((Triod::new(curves)?, outcome))
}
