//! Transverse (foliated) quantities: Ric^T, R^T, basic and weighted basic
//! Laplacians, transverse Hessians.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, CoordExpr};
use crate::sasaki::frame::HorizontalFrame;
use crate::sasaki::structure::SasakianStructure;
use crate::tensor::{hessian_jets, CurvatureJets, TensorValue};

/// Convert a coordinate (0,2)-tensor to frame components over `rows`.
fn frame_bilinear(t: &TensorValue, rows: &[&[f64]]) -> Vec<f64> {
    let dim = t.dim();
    let m = rows.len();
    let mut out = vec![0.0; m * m];
    for (a, ra) in rows.iter().enumerate() {
        for (b, rb) in rows.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    acc += t.get(&[i, j]) * ra[i] * rb[j];
                }
            }
            out[a * m + b] = acc;
        }
    }
    out
}

/// Transverse Ricci on the contact distribution in the frame of `frame`:
/// Ric^T(e_a, e_b) = Ric(e_a, e_b) + 2 g(e_a, e_b) = Ric(e_a, e_b) + 2 d_ab.
pub fn transverse_ricci(
    s: &SasakianStructure,
    point: &[f64],
    frame: &HorizontalFrame,
) -> Result<TensorValue> {
    let bundle = CurvatureJets::new(s.metric(), point, 2)?;
    let ric = bundle.ricci_jets()?.values();
    let hrows: Vec<&[f64]> = frame.vectors.iter().map(|v| v.as_slice()).collect();
    let hdim = hrows.len();
    let mut comps = frame_bilinear(&ric, &hrows);
    for a in 0..hdim {
        comps[a * hdim + a] += 2.0;
    }
    Ok(TensorValue::new(hdim, 0, 2, comps))
}

/// Transverse scalar curvature: horizontal-frame trace of Ric^T.
pub fn transverse_scalar(
    s: &SasakianStructure,
    point: &[f64],
    frame: &HorizontalFrame,
) -> Result<f64> {
    let rt = transverse_ricci(s, point, frame)?;
    let hdim = frame.vectors.len();
    Ok((0..hdim).map(|a| rt.get(&[a, a])).sum())
}

fn check_basic(
    s: &SasakianStructure,
    f: &CoordExpr,
    point: &[f64],
    tol: f64,
) -> Result<()> {
    let fj = eval_jet(f, point, 1)?;
    let xi: Vec<f64> = s
        .xi()
        .iter()
        .map(|e| crate::expr::eval(e, point))
        .collect::<Result<_>>()?;
    let xf: f64 = (0..s.dim()).map(|i| xi[i] * fj.partial_vars(&[i])).sum();
    if xf.abs() > tol {
        return Err(Error::NonBasicPotential {
            residual: xf.abs(),
            tol,
        });
    }
    Ok(())
}

/// Hessian of `f` in the full frame (2n+1 rows, Reeb last).
fn hessian_frame(
    s: &SasakianStructure,
    f: &CoordExpr,
    point: &[f64],
    frame: &HorizontalFrame,
) -> Result<Vec<f64>> {
    let bundle = CurvatureJets::new(s.metric(), point, 2)?;
    let fj = eval_jet(f, point, 2)?;
    let hess = hessian_jets(&fj, &bundle)?.values();
    Ok(frame_bilinear(&hess, &frame.full_rows()))
}

/// Basic Laplacian: horizontal trace of the Hessian. For basic `f` this
/// equals the full Laplace-Beltrami operator (the (xi,xi) Hessian entry
/// vanishes because xi f = 0 and the Reeb orbits are geodesic).
///
/// Errors when `f` is not basic at the point (tolerance `basic_tol`).
pub fn basic_laplacian(
    f: &CoordExpr,
    s: &SasakianStructure,
    point: &[f64],
    frame: &HorizontalFrame,
    basic_tol: f64,
) -> Result<f64> {
    check_basic(s, f, point, basic_tol)?;
    let h = hessian_frame(s, f, point, frame)?;
    let m = frame.vectors.len() + 1;
    Ok((0..frame.vectors.len()).map(|a| h[a * m + a]).sum())
}

/// Weighted basic Laplacian: Delta_B f - g(grad f, grad psi).
pub fn weighted_basic_laplacian(
    f: &CoordExpr,
    s: &SasakianStructure,
    psi: &CoordExpr,
    point: &[f64],
    frame: &HorizontalFrame,
    basic_tol: f64,
) -> Result<f64> {
    let lap = basic_laplacian(f, s, point, frame, basic_tol)?;
    // g(grad f, grad psi) = g^{ij} f_i psi_j
    let bundle = CurvatureJets::new(s.metric(), point, 1)?;
    let ginv = bundle.metric_inv_jets().values();
    let fj = eval_jet(f, point, 1)?;
    let pj = eval_jet(psi, point, 1)?;
    let dim = s.dim();
    let mut drift = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            drift += ginv.get(&[i, j]) * fj.partial_vars(&[i]) * pj.partial_vars(&[j]);
        }
    }
    Ok(lap - drift)
}

/// Hessian of `f` restricted to the contact distribution (2n x 2n frame
/// components).
pub fn transverse_hessian(
    f: &CoordExpr,
    s: &SasakianStructure,
    point: &[f64],
    frame: &HorizontalFrame,
    basic_tol: f64,
) -> Result<TensorValue> {
    check_basic(s, f, point, basic_tol)?;
    let h = hessian_frame(s, f, point, frame)?;
    let hdim = frame.vectors.len();
    let m = hdim + 1;
    let mut comps = vec![0.0; hdim * hdim];
    for a in 0..hdim {
        for b in 0..hdim {
            comps[a * hdim + b] = h[a * m + b];
        }
    }
    Ok(TensorValue::new(hdim, 0, 2, comps))
}
