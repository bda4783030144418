//! Geodesic second-variation and potential-growth checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::eval_jet;
use crate::identities::registry::Verdict;
use crate::sasaki::SolitonCandidate;
use crate::tensor::{distance_estimate, GeodesicPath, ShootingOptions};

/// Second-variation bound along a unit-speed geodesic:
/// int phi^2 Ric(gamma', gamma') <= 2n int (phi')^2 = 4n, with the
/// trapezoid test function phi (= t, then 1, then s0 - t).
#[derive(Debug, Clone, Serialize)]
pub struct SecondVariationReport {
    pub s0: f64,
    /// Quadrature value of int phi^2 Ric(gamma', gamma').
    pub lhs: f64,
    /// The bound 4n.
    pub rhs: f64,
    pub pass: bool,
    pub max_speed_drift: f64,
}

fn trapezoid_phi(t: f64, s0: f64) -> f64 {
    if t <= 1.0 {
        t
    } else if t <= s0 - 1.0 {
        1.0
    } else {
        (s0 - t).max(0.0)
    }
}

pub fn second_variation_check(
    candidate: &SolitonCandidate,
    path: &GeodesicPath,
) -> Result<SecondVariationReport> {
    let s = &candidate.structure;
    let s0 = *path.params.last().ok_or(Error::EmptySample)?;
    if s0 <= 2.0 {
        return Err(Error::Precondition(format!(
            "geodesic length must exceed 2, got {s0}"
        )));
    }
    if let Some(bound) = s.minimality_bound() {
        if s0 > bound {
            return Err(Error::Precondition(format!(
                "geodesic length {s0} exceeds the documented minimality bound {bound}"
            )));
        }
    }
    let n = s.n() as f64;
    // integrand at grid nodes: phi(t)^2 Ric(gamma', gamma')
    let mut integrand = Vec::with_capacity(path.params.len());
    for (t, (x, v)) in path.params.iter().zip(&path.states) {
        let ric = crate::tensor::ricci(s.metric(), x)?;
        let dim = s.dim();
        let mut rvv = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                rvv += ric.get(&[i, j]) * v[i] * v[j];
            }
        }
        let phi = trapezoid_phi(*t, s0);
        integrand.push(phi * phi * rvv);
    }
    let mut lhs = 0.0;
    for w in 0..path.params.len() - 1 {
        let dt = path.params[w + 1] - path.params[w];
        lhs += 0.5 * (integrand[w] + integrand[w + 1]) * dt;
    }
    let rhs = 4.0 * n;
    Ok(SecondVariationReport {
        s0,
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-9,
        max_speed_drift: path.max_speed_drift,
    })
}

/// Growth bounds for the potential against distances to its sampled
/// minimizer: n (d-7)_+^2 <= psi + C2 <= n (d + sqrt 3)^2, plus the
/// sqrt(n - 1/2)-Lipschitz bound on sqrt(psi + C2).
#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub verdict: Verdict,
    /// Point pairs actually checked (distance estimates that converged).
    pub pairs: usize,
    /// Worst violation of the conservative upper bound.
    pub upper_violation: f64,
    /// Worst violation of the advisory lower bound.
    pub lower_violation: f64,
    /// Worst violation of the Lipschitz bound.
    pub lipschitz_violation: f64,
    pub c1: f64,
    pub c2: f64,
    pub notes: Vec<String>,
}

/// Check the growth bounds. The distance estimate is an upper bound, which
/// keeps the upper potential bound and the Lipschitz check conservative;
/// the lower bound is advisory and flagged as such in the notes.
pub fn potential_growth_check(
    candidate: &SolitonCandidate,
    points: &[Vec<f64>],
    seed: u64,
    tol: f64,
    max_pairs: usize,
) -> Result<GrowthReport> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let s = &candidate.structure;
    let n = s.n() as f64;
    let Some(psi) = &candidate.psi else {
        return Ok(GrowthReport {
            verdict: Verdict::PreconditionUnmet,
            pairs: 0,
            upper_violation: 0.0,
            lower_violation: 0.0,
            lipschitz_violation: 0.0,
            c1: f64::NAN,
            c2: f64::NAN,
            notes: vec!["candidate has no potential".into()],
        });
    };

    // positivity precondition
    let mut psi_vals = Vec::with_capacity(points.len());
    let mut min_scal = f64::INFINITY;
    for p in points {
        min_scal = min_scal.min(crate::tensor::scalar(s.metric(), p)?);
        psi_vals.push(eval_jet(psi, p, 0)?.value());
    }
    // normalization constant
    let (c1, c2) = match candidate.c1 {
        Some(c1) => (c1, c1 / (4.0 * n - 2.0)),
        None => {
            let mut acc = 0.0;
            for (p, psi_v) in points.iter().zip(&psi_vals) {
                let r = crate::tensor::scalar(s.metric(), p)?;
                let pj = eval_jet(psi, p, 1)?;
                let g = s.metric().eval_matrix(p)?;
                let ginv = g.try_inverse().ok_or(Error::SingularMetric)?;
                let dim = s.dim();
                let mut gn = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        gn += ginv[(i, j)] * pj.partial_vars(&[i]) * pj.partial_vars(&[j]);
                    }
                }
                acc += r + gn - (4.0 * n - 2.0) * psi_v;
            }
            let c1 = acc / points.len() as f64;
            (c1, c1 / (4.0 * n - 2.0))
        }
    };
    if min_scal < -tol {
        return Ok(GrowthReport {
            verdict: Verdict::PreconditionUnmet,
            pairs: 0,
            upper_violation: 0.0,
            lower_violation: 0.0,
            lipschitz_violation: 0.0,
            c1,
            c2,
            notes: vec![format!(
                "positivity precondition failed: min R = {min_scal:.6} < 0"
            )],
        });
    }
    if psi_vals.iter().any(|&v| v + c2 < -tol) {
        return Ok(GrowthReport {
            verdict: Verdict::PreconditionUnmet,
            pairs: 0,
            upper_violation: 0.0,
            lower_violation: 0.0,
            lipschitz_violation: 0.0,
            c1,
            c2,
            notes: vec!["psi + C2 is negative somewhere on the sample".into()],
        });
    }

    // sampled minimizer of psi
    let (y_idx, _) = psi_vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let y = &points[y_idx];
    let psi_y = psi_vals[y_idx];

    let opts = ShootingOptions {
        seed,
        ..ShootingOptions::default()
    };
    let mut notes = vec![
        "distance estimates are upper bounds: the upper potential bound and the \
         Lipschitz check are conservative-valid, the lower bound is advisory"
            .to_string(),
    ];
    let mut pairs = 0usize;
    let mut upper_violation = 0.0f64;
    let mut lower_violation = 0.0f64;
    let mut lipschitz_violation = 0.0f64;
    let lip = (n - 0.5).sqrt();
    for (i, x) in points.iter().enumerate().take(max_pairs) {
        if i == y_idx {
            continue;
        }
        let d = match distance_estimate(s.metric(), x, y, &opts) {
            Ok(d) => d,
            Err(e) => {
                notes.push(format!("distance estimate skipped for point {i}: {e}"));
                continue;
            }
        };
        pairs += 1;
        let shifted = (psi_vals[i] + c2).max(0.0);
        // upper: psi + C2 <= n (d + sqrt3)^2
        upper_violation =
            upper_violation.max(shifted - n * (d + 3.0f64.sqrt()).powi(2));
        // lower (advisory): n (d-7)_+^2 <= psi + C2
        lower_violation = lower_violation.max(n * ((d - 7.0).max(0.0)).powi(2) - shifted);
        // Lipschitz: |sqrt(psi+C2)(x) - sqrt(psi+C2)(y)| <= sqrt(n-1/2) d
        let ls = (shifted.sqrt() - (psi_y + c2).max(0.0).sqrt()).abs();
        lipschitz_violation = lipschitz_violation.max(ls - lip * d);
    }
    // The check at the minimizer itself: d = 0
    let shifted_y = (psi_y + c2).max(0.0);
    upper_violation = upper_violation.max(shifted_y - n * 3.0);
    let verdict = if upper_violation < tol && lipschitz_violation < tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    if lower_violation >= tol {
        notes.push(format!(
            "advisory lower bound violated by {lower_violation:.3e} (upper-bound \
             distance estimates can overstate (d-7)_+^2)"
        ));
    }
    Ok(GrowthReport {
        verdict,
        pairs,
        upper_violation,
        lower_violation,
        lipschitz_violation,
        c1,
        c2,
        notes,
    })
}
