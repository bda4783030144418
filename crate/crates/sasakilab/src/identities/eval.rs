//! Per-point tensor assembly for identity evaluation.
//!
//! Everything an identity can ask for is computed once per (candidate,
//! point) in the components of a J-adapted orthonormal frame
//! `e_1..e_2n, xi` (Reeb last, the "0 index" of the adapted-frame
//! formulas). All derivative entries are covariant-derivative components
//! with the derivative index appended last, comma-style.

use crate::error::Result;
use crate::expr::{eval_jet, Jet};
use crate::sasaki::frame::horizontal_frame_from_jets;
use crate::sasaki::SolitonCandidate;
use crate::tensor::{cov_deriv_jets, hessian_jets, JetTensor, TensorValue};

/// Sign of the drift term in the weighted Laplacian:
/// Delta_{B,psi} = Delta_B + WEIGHTED_DRIFT_SIGN * g(grad ., grad psi).
/// A single constant so the convention can be flipped in one place.
pub const WEIGHTED_DRIFT_SIGN: f64 = -1.0;

/// Potential data at one point, frame components.
#[derive(Debug, Clone)]
pub struct PsiPointEval {
    pub val: f64,
    /// psi_{,A} over the full frame (last entry is xi psi, ~0 for basic psi).
    pub d1: Vec<f64>,
    /// Hessian psi_{,AB}.
    pub hess: Vec<f64>,
    /// |grad psi|^2.
    pub grad_norm2: f64,
    /// Basic Laplacian (horizontal Hessian trace).
    pub lap_b: f64,
    /// Reeb derivative xi(psi) (basicness residual).
    pub xi_psi: f64,
}

/// All frame tensors an identity can reference at one point.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub n: usize,
    /// 2n (horizontal frame size).
    pub hdim: usize,
    /// 2n+1 (full frame size).
    pub fdim: usize,
    pub g_order: usize,
    /// Ric_{AB}.
    pub ric: Vec<f64>,
    /// Scalar curvature.
    pub scal: f64,
    /// R_{ABCD}.
    pub riem: Vec<f64>,
    /// Ric_{AB,C} (needs g_order >= 3).
    pub ric_d1: Option<Vec<f64>>,
    /// R_{,A} (needs g_order >= 3).
    pub scal_d1: Option<Vec<f64>>,
    /// R_{ABCD,E} (needs g_order >= 3).
    pub riem_d1: Option<Vec<f64>>,
    /// R_{,AB} (needs g_order >= 4).
    pub scal_d2: Option<Vec<f64>>,
    /// Delta_B Ric (horizontal trace of the second covariant derivative).
    pub ric_lap_b: Option<Vec<f64>>,
    /// Delta_B R.
    pub scal_lap_b: Option<f64>,
    /// Delta_B Riem.
    pub riem_lap_b: Option<Vec<f64>>,
    pub psi: Option<PsiPointEval>,
}

/// Contract every index of a fully covariant tensor with frame rows.
fn frame_convert(t: &TensorValue, rows: &[&[f64]]) -> Vec<f64> {
    let dim = t.dim();
    let m = rows.len();
    let rank = t.rank();
    let mut cur: Vec<f64> = t.components().to_vec();
    let mut cur_lead = 1usize; // product of already-converted index ranges (m each)
    for pass in 0..rank {
        // cur layout: [converted (m^pass)] x [dim (this index)] x [dim^(rank-pass-1)]
        let tail = dim.pow((rank - pass - 1) as u32);
        let mut next = vec![0.0; cur_lead * m * tail];
        for lead in 0..cur_lead {
            for (a, row) in rows.iter().enumerate() {
                for t_idx in 0..tail {
                    let mut acc = 0.0;
                    for i in 0..dim {
                        acc += row[i] * cur[(lead * dim + i) * tail + t_idx];
                    }
                    next[(lead * m + a) * tail + t_idx] = acc;
                }
            }
        }
        cur = next;
        cur_lead *= m;
    }
    cur
}

/// Horizontal trace over the last two (frame) indices.
fn horizontal_trace_last_two(t: &[f64], fdim: usize, hdim: usize, lead_rank: usize) -> Vec<f64> {
    let lead = fdim.pow(lead_rank as u32);
    let mut out = vec![0.0; lead];
    for (l, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for a in 0..hdim {
            acc += t[(l * fdim + a) * fdim + a];
        }
        *slot = acc;
    }
    out
}

/// Assemble the evaluation data at one point. `g_order` in 2..=4 controls
/// which derivative levels are available.
pub fn point_eval(
    candidate: &SolitonCandidate,
    point: &[f64],
    seed: u64,
    g_order: usize,
) -> Result<PointEval> {
    let s = &candidate.structure;
    let n = s.n();
    let hdim = 2 * n;
    let fdim = hdim + 1;
    let sj = s.jets_at(point, g_order)?;
    let frame = horizontal_frame_from_jets(s, &sj, point, seed)?;
    let rows = frame.full_rows();
    let bundle = &sj.bundle;
    let gamma = bundle.christoffel_jets();

    let ric_jets = bundle.ricci_jets()?.clone();
    let riem_jets = bundle.riemann_jets()?.clone();
    let scal_jet = bundle.scalar_jet()?.clone();

    let ric = frame_convert(&ric_jets.values(), &rows);
    let riem = frame_convert(&riem_jets.values(), &rows);
    let scal = scal_jet.value();

    let mut ric_d1 = None;
    let mut scal_d1 = None;
    let mut riem_d1 = None;
    let mut scal_d2 = None;
    let mut ric_lap_b = None;
    let mut scal_lap_b = None;
    let mut riem_lap_b = None;

    let mut ric_d1_jets: Option<JetTensor> = None;
    let mut riem_d1_jets: Option<JetTensor> = None;
    let mut scal_d1_jets: Option<JetTensor> = None;

    if g_order >= 3 {
        let rd1 = cov_deriv_jets(&ric_jets, gamma)?;
        let sd1 = cov_deriv_jets(&JetTensor::from_scalar(scal_jet.clone()), gamma)?;
        let md1 = cov_deriv_jets(&riem_jets, gamma)?;
        ric_d1 = Some(frame_convert(&rd1.values(), &rows));
        scal_d1 = Some(frame_convert(&sd1.values(), &rows));
        riem_d1 = Some(frame_convert(&md1.values(), &rows));
        ric_d1_jets = Some(rd1);
        riem_d1_jets = Some(md1);
        scal_d1_jets = Some(sd1);
    }
    if g_order >= 4 {
        let rd2 = cov_deriv_jets(ric_d1_jets.as_ref().expect("set above"), gamma)?;
        let sd2 = cov_deriv_jets(scal_d1_jets.as_ref().expect("set above"), gamma)?;
        let md2 = cov_deriv_jets(riem_d1_jets.as_ref().expect("set above"), gamma)?;
        let rd2f = frame_convert(&rd2.values(), &rows);
        let sd2f = frame_convert(&sd2.values(), &rows);
        let md2f = frame_convert(&md2.values(), &rows);
        ric_lap_b = Some(horizontal_trace_last_two(&rd2f, fdim, hdim, 2));
        scal_lap_b = Some(horizontal_trace_last_two(&sd2f, fdim, hdim, 0)[0]);
        riem_lap_b = Some(horizontal_trace_last_two(&md2f, fdim, hdim, 4));
        scal_d2 = Some(sd2f);
    }

    let psi = match &candidate.psi {
        None => None,
        Some(psi_expr) => {
            let pj: Jet = eval_jet(psi_expr, point, 2)?;
            let hess_j = hessian_jets(&pj, bundle)?;
            let d1_coord: Vec<f64> = (0..s.dim()).map(|i| pj.partial_vars(&[i])).collect();
            let d1: Vec<f64> = rows
                .iter()
                .map(|row| row.iter().zip(&d1_coord).map(|(r, d)| r * d).sum())
                .collect();
            let hess = frame_convert(&hess_j.values(), &rows);
            // |grad psi|^2 = sum of squared frame derivatives (orthonormal)
            let grad_norm2: f64 = d1.iter().map(|v| v * v).sum();
            let lap_b: f64 = (0..hdim).map(|a| hess[a * fdim + a]).sum();
            let xi_psi = d1[fdim - 1];
            Some(PsiPointEval {
                val: pj.value(),
                d1,
                hess,
                grad_norm2,
                lap_b,
                xi_psi,
            })
        }
    };

    Ok(PointEval {
        n,
        hdim,
        fdim,
        g_order,
        ric,
        scal,
        riem,
        ric_d1,
        scal_d1,
        riem_d1,
        scal_d2,
        ric_lap_b,
        scal_lap_b,
        riem_lap_b,
        psi,
    })
}

impl PointEval {
    pub fn ric_at(&self, a: usize, b: usize) -> f64 {
        self.ric[a * self.fdim + b]
    }

    pub fn riem_at(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riem[((a * self.fdim + b) * self.fdim + c) * self.fdim + d]
    }

    pub fn ric_d1_at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.ric_d1.as_ref().expect("g_order >= 3")[(a * self.fdim + b) * self.fdim + c]
    }

    pub fn riem_d1_at(&self, a: usize, b: usize, c: usize, d: usize, e: usize) -> f64 {
        self.riem_d1.as_ref().expect("g_order >= 3")
            [(((a * self.fdim + b) * self.fdim + c) * self.fdim + d) * self.fdim + e]
    }

    /// |Ric_D|^2: squared norm of Ricci restricted to the contact bundle.
    pub fn ric_d_norm2(&self) -> f64 {
        let mut acc = 0.0;
        for a in 0..self.hdim {
            for b in 0..self.hdim {
                acc += self.ric_at(a, b) * self.ric_at(a, b);
            }
        }
        acc
    }

    /// |Ric^T|^2 with Ric^T = Ric + 2g on the contact bundle.
    pub fn ric_t_norm2(&self) -> f64 {
        let mut acc = 0.0;
        for a in 0..self.hdim {
            for b in 0..self.hdim {
                let v = self.ric_at(a, b) + if a == b { 2.0 } else { 0.0 };
                acc += v * v;
            }
        }
        acc
    }

    /// Transverse scalar curvature R^T = R + 2n.
    pub fn scal_t(&self) -> f64 {
        self.scal + 2.0 * self.n as f64
    }

    /// Weighted basic Laplacian of the scalar curvature.
    pub fn scal_lap_b_weighted(&self) -> Option<f64> {
        let lap = self.scal_lap_b?;
        let psi = self.psi.as_ref()?;
        let d1 = self.scal_d1.as_ref()?;
        let drift: f64 = (0..self.hdim).map(|a| d1[a] * psi.d1[a]).sum();
        Some(lap + WEIGHTED_DRIFT_SIGN * drift)
    }
}
