//! Covariant derivatives, Hessians, Laplacians and Lie derivatives.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, CoordExpr, Jet};
use crate::tensor::curvature::CurvatureJets;
use crate::tensor::metric::MetricSpec;
use crate::tensor::value::{index_iter, JetTensor, TensorValue};

/// Covariant derivative of a jet tensor; the new covariant index is
/// appended last, matching the comma convention `T_{ij,k}`.
///
/// Component order drops by one: `T` must carry jets of order >= 1.
pub fn cov_deriv_jets(t: &JetTensor, gamma: &JetTensor) -> Result<JetTensor> {
    if t.order() < 1 {
        return Err(Error::InsufficientJetOrder {
            needed: 1,
            have: 0,
        });
    }
    let dim = t.dim();
    let order = t.order() - 1;
    let con = t.con();
    let cov = t.cov();
    let rank = con + cov;
    let mut comps = Vec::with_capacity(dim.pow((rank + 1) as u32));
    let mut scratch = vec![0usize; rank];
    for idx in index_iter(dim, rank) {
        for m in 0..dim {
            let mut acc = t.get(&idx).derivative(m);
            // upper-index corrections: + Gamma^{a_s}_{m p} T^{..p..}
            for s in 0..con {
                scratch.copy_from_slice(&idx);
                for p in 0..dim {
                    scratch[s] = p;
                    let gam = gamma.get(&[idx[s], m, p]).truncated(order);
                    acc = acc.add(&gam.mul(&t.get(&scratch).truncated(order)));
                }
            }
            // lower-index corrections: - Gamma^{p}_{m b_s} T_{..p..}
            for s in con..rank {
                scratch.copy_from_slice(&idx);
                for p in 0..dim {
                    scratch[s] = p;
                    let gam = gamma.get(&[p, m, idx[s]]).truncated(order);
                    acc = acc.sub(&gam.mul(&t.get(&scratch).truncated(order)));
                }
            }
            comps.push(acc);
        }
    }
    Ok(JetTensor::new(dim, con, cov + 1, comps))
}

/// A tensor field that can produce its components as jets at a point.
/// Implementations exist for the metric, curvature tensors and scalar
/// expressions; `cov_deriv` differentiates any of them.
pub trait TensorField {
    /// (contravariant, covariant) rank.
    fn valence(&self) -> (usize, usize);
    /// Component jets of the requested order at `point`.
    fn eval_jets(&self, metric: &MetricSpec, point: &[f64], order: usize) -> Result<JetTensor>;
}

/// The metric itself as a field.
pub struct MetricField;

impl TensorField for MetricField {
    fn valence(&self) -> (usize, usize) {
        (0, 2)
    }

    fn eval_jets(&self, metric: &MetricSpec, point: &[f64], order: usize) -> Result<JetTensor> {
        Ok(JetTensor::new(
            metric.dim(),
            0,
            2,
            metric.eval_jets(point, order)?,
        ))
    }
}

/// Lowered Riemann tensor as a field.
pub struct RiemannField;

impl TensorField for RiemannField {
    fn valence(&self) -> (usize, usize) {
        (0, 4)
    }

    fn eval_jets(&self, metric: &MetricSpec, point: &[f64], order: usize) -> Result<JetTensor> {
        let bundle = CurvatureJets::new(metric, point, order + 2)?;
        Ok(bundle.riemann_jets()?.clone())
    }
}

/// Ricci tensor as a field.
pub struct RicciField;

impl TensorField for RicciField {
    fn valence(&self) -> (usize, usize) {
        (0, 2)
    }

    fn eval_jets(&self, metric: &MetricSpec, point: &[f64], order: usize) -> Result<JetTensor> {
        let bundle = CurvatureJets::new(metric, point, order + 2)?;
        Ok(bundle.ricci_jets()?.clone())
    }
}

/// Scalar curvature as a rank-0 field.
pub struct ScalarCurvatureField;

impl TensorField for ScalarCurvatureField {
    fn valence(&self) -> (usize, usize) {
        (0, 0)
    }

    fn eval_jets(&self, metric: &MetricSpec, point: &[f64], order: usize) -> Result<JetTensor> {
        let bundle = CurvatureJets::new(metric, point, order + 2)?;
        Ok(JetTensor::from_scalar(bundle.scalar_jet()?.clone()))
    }
}

/// A scalar coordinate expression as a rank-0 field.
pub struct ScalarExprField<'a>(pub &'a CoordExpr);

impl TensorField for ScalarExprField<'_> {
    fn valence(&self) -> (usize, usize) {
        (0, 0)
    }

    fn eval_jets(&self, metric: &MetricSpec, point: &[f64], order: usize) -> Result<JetTensor> {
        metric.chart().check_contains(point)?;
        Ok(JetTensor::from_scalar(eval_jet(self.0, point, order)?))
    }
}

/// First or second covariant derivative of a field at a point.
///
/// For `order == 2` the two derivative indices are the last two, inner
/// derivative first: `T_{..,i,j} = nabla_j nabla_i T_{..}`.
pub fn cov_deriv(
    field: &dyn TensorField,
    metric: &MetricSpec,
    point: &[f64],
    order: usize,
) -> Result<TensorValue> {
    if order == 0 || order > 2 {
        return Err(Error::InvalidConfig(format!(
            "cov_deriv order must be 1 or 2, got {order}"
        )));
    }
    let bundle = CurvatureJets::new(metric, point, order + 1)?;
    let jets = field.eval_jets(metric, point, order)?;
    let first = cov_deriv_jets(&jets, bundle.christoffel_jets())?;
    if order == 1 {
        return Ok(first.values());
    }
    Ok(cov_deriv_jets(&first, bundle.christoffel_jets())?.values())
}

/// Riemannian Hessian of a scalar expression: Hess f = nabla df.
pub fn hessian(f: &CoordExpr, metric: &MetricSpec, point: &[f64]) -> Result<TensorValue> {
    let bundle = CurvatureJets::new(metric, point, 2)?;
    let fj = eval_jet(f, point, 2)?;
    hessian_jets(&fj, &bundle).map(|t| t.values())
}

/// Hessian with jet components (order `f.order() - 2`).
pub fn hessian_jets(f: &Jet, bundle: &CurvatureJets) -> Result<JetTensor> {
    let df = cov_deriv_jets(&JetTensor::from_scalar(f.clone()), bundle.christoffel_jets())?;
    cov_deriv_jets(&df, bundle.christoffel_jets())
}

/// Laplace-Beltrami of a scalar expression: trace_g Hess f.
pub fn laplacian(f: &CoordExpr, metric: &MetricSpec, point: &[f64]) -> Result<f64> {
    let bundle = CurvatureJets::new(metric, point, 2)?;
    let fj = eval_jet(f, point, 2)?;
    let hess = hessian_jets(&fj, &bundle)?.values();
    let ginv = bundle.metric_inv_jets().values();
    let dim = metric.dim();
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            acc += ginv.get(&[i, j]) * hess.get(&[i, j]);
        }
    }
    Ok(acc)
}

/// Lie derivative of the metric along a vector field of expressions:
/// (L_X g)_{ij} = X^k d_k g_{ij} + g_{kj} d_i X^k + g_{ik} d_j X^k.
pub fn lie_derivative(
    metric: &MetricSpec,
    x_field: &[CoordExpr],
    point: &[f64],
) -> Result<TensorValue> {
    let dim = metric.dim();
    if x_field.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "vector field has {} components in dimension {dim}",
            x_field.len()
        )));
    }
    let g = metric.eval_jets(point, 1)?;
    let x: Vec<Jet> = x_field
        .iter()
        .map(|e| eval_jet(e, point, 1))
        .collect::<Result<_>>()?;
    let mut out = TensorValue::zeros(dim, 0, 2);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0;
            for k in 0..dim {
                acc += x[k].value() * g[i * dim + j].partial_vars(&[k]);
                acc += g[k * dim + j].value() * x[k].partial_vars(&[i]);
                acc += g[i * dim + k].value() * x[k].partial_vars(&[j]);
            }
            out.set(&[i, j], acc);
        }
    }
    Ok(out)
}
