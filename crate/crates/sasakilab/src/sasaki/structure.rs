//! Sasakian structures and their axiom checks.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, CoordExpr, Jet};
use crate::tensor::{CurvatureJets, MetricSpec};

/// A Sasakian structure authored as (g, eta, xi) over a chart of dimension
/// 2n+1. The endomorphism phi is always derived pointwise from the Reeb
/// field, `phi X = -nabla_X xi`; `phi_sign` only flips the complex
/// orientation used for J-adapted frames and the Hamiltonian field, for
/// structures authored in the opposite convention.
#[derive(Debug, Clone)]
pub struct SasakianStructure {
    name: String,
    n: usize,
    metric: MetricSpec,
    eta: Vec<CoordExpr>,
    xi: Vec<CoordExpr>,
    phi_sign: f64,
    sample_box: Vec<(f64, f64)>,
    /// Documented single-chart minimality bound for geodesic checks.
    minimality_bound: Option<f64>,
}

impl SasakianStructure {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        metric: MetricSpec,
        eta: Vec<CoordExpr>,
        xi: Vec<CoordExpr>,
        phi_sign: f64,
    ) -> Result<SasakianStructure> {
        let dim = 2 * n + 1;
        if metric.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "metric dimension {} but n = {n} needs {dim}",
                metric.dim()
            )));
        }
        if eta.len() != dim || xi.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "eta has {} and xi has {} components, expected {dim}",
                eta.len(),
                xi.len()
            )));
        }
        if phi_sign != 1.0 && phi_sign != -1.0 {
            return Err(Error::InvalidConfig(format!(
                "phi_sign must be +1 or -1, got {phi_sign}"
            )));
        }
        let sample_box = metric.chart().domain().to_vec();
        Ok(SasakianStructure {
            name: name.into(),
            n,
            metric,
            eta,
            xi,
            phi_sign,
            sample_box,
            minimality_bound: None,
        })
    }

    pub fn with_sample_box(mut self, sample_box: Vec<(f64, f64)>) -> Self {
        self.sample_box = sample_box;
        self
    }

    pub fn with_minimality_bound(mut self, bound: f64) -> Self {
        self.minimality_bound = Some(bound);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn eta(&self) -> &[CoordExpr] {
        &self.eta
    }

    pub fn xi(&self) -> &[CoordExpr] {
        &self.xi
    }

    pub fn phi_sign(&self) -> f64 {
        self.phi_sign
    }

    /// Box to draw verification samples from (subset of the chart domain).
    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn minimality_bound(&self) -> Option<f64> {
        self.minimality_bound
    }

    /// Evaluate all structure jets at a point.
    pub fn jets_at(&self, point: &[f64], g_order: usize) -> Result<StructureJets> {
        StructureJets::new(self, point, g_order)
    }
}

/// Pointwise jets of the structure tensors: metric bundle, eta, xi and the
/// derived phi.
pub struct StructureJets {
    pub bundle: CurvatureJets,
    /// eta_i jets, order `g_order`.
    pub eta: Vec<Jet>,
    /// xi^i jets, order `g_order`.
    pub xi: Vec<Jet>,
    /// phi^k_j = -(d_j xi^k + Gamma^k_{jm} xi^m), order `g_order - 1`.
    /// This is the convention-pinned endomorphism (no phi_sign applied).
    pub phi: Vec<Jet>,
    dim: usize,
}

impl StructureJets {
    fn new(s: &SasakianStructure, point: &[f64], g_order: usize) -> Result<StructureJets> {
        let dim = s.dim();
        let bundle = CurvatureJets::new(s.metric(), point, g_order)?;
        let eta: Vec<Jet> = s
            .eta
            .iter()
            .map(|e| eval_jet(e, point, g_order))
            .collect::<Result<_>>()?;
        let xi: Vec<Jet> = s
            .xi
            .iter()
            .map(|e| eval_jet(e, point, g_order))
            .collect::<Result<_>>()?;
        let ord = g_order - 1;
        let gamma = bundle.christoffel_jets();
        let mut phi = Vec::with_capacity(dim * dim);
        for k in 0..dim {
            for j in 0..dim {
                let mut acc = xi[k].derivative(j);
                for m in 0..dim {
                    acc = acc.add(&gamma.get(&[k, j, m]).truncated(ord).mul(&xi[m].truncated(ord)));
                }
                phi.push(acc.neg());
            }
        }
        Ok(StructureJets {
            bundle,
            eta,
            xi,
            phi,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// phi^k_j values as a row-major matrix.
    pub fn phi_values(&self) -> Vec<f64> {
        self.phi.iter().map(|j| j.value()).collect()
    }

    pub fn eta_values(&self) -> Vec<f64> {
        self.eta.iter().map(|j| j.value()).collect()
    }

    pub fn xi_values(&self) -> Vec<f64> {
        self.xi.iter().map(|j| j.value()).collect()
    }
}

/// Names of the Sasakian axioms, in report order.
pub const AXIOM_NAMES: [&str; 9] = [
    "eta_xi_one",
    "phi_xi_zero",
    "eta_phi_zero",
    "phi_squared",
    "phi_metric_compatible",
    "d_eta_metric",
    "xi_killing",
    "ricci_xi",
    "riemann_xi",
];

/// Residuals of every axiom at one point, in [`AXIOM_NAMES`] order.
/// All residuals are coordinate-invariant tensor norms.
pub fn axiom_residuals_at(s: &SasakianStructure, point: &[f64]) -> Result<[f64; 9]> {
    let dim = s.dim();
    let n = s.n();
    let sj = s.jets_at(point, 3)?;
    let g = sj.bundle.metric_jets().values();
    let ginv = sj.bundle.metric_inv_jets().values();
    let eta = sj.eta_values();
    let xi = sj.xi_values();
    let phi = sj.phi_values();
    let gv = |i: usize, j: usize| g.get(&[i, j]);
    let gi = |i: usize, j: usize| ginv.get(&[i, j]);
    let ph = |k: usize, j: usize| phi[k * dim + j];

    // 1. eta(xi) = 1
    let r_eta_xi = ((0..dim).map(|i| eta[i] * xi[i]).sum::<f64>() - 1.0).abs();

    // 2. phi xi = 0 (vector g-norm)
    let mut v = vec![0.0; dim];
    for (k, slot) in v.iter_mut().enumerate() {
        *slot = (0..dim).map(|j| ph(k, j) * xi[j]).sum();
    }
    let r_phi_xi = norm_vec(&v, &gv, dim);

    // 3. eta o phi = 0 (one-form norm via g^{-1})
    let mut w = vec![0.0; dim];
    for (j, slot) in w.iter_mut().enumerate() {
        *slot = (0..dim).map(|k| eta[k] * ph(k, j)).sum();
    }
    let r_eta_phi = norm_form(&w, &gi, dim);

    // 4. phi^2 + Id - xi (x) eta = 0, lowered to (0,2)
    let mut a = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut p2 = 0.0;
            for k in 0..dim {
                p2 += ph(i, k) * ph(k, j);
            }
            let up = p2 + if i == j { 1.0 } else { 0.0 } - xi[i] * eta[j];
            a[i * dim + j] = up;
        }
    }
    // lower first index: A_{ij} = g_{ik} A^k_j
    let mut a_low = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            a_low[i * dim + j] = (0..dim).map(|k| gv(i, k) * a[k * dim + j]).sum();
        }
    }
    let r_phi_sq = norm_bilinear(&a_low, &gi, dim);

    // 5. g(phi X, phi Y) - g(X,Y) + eta(X)eta(Y) = 0
    let mut b = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = -gv(i, j) + eta[i] * eta[j];
            for k in 0..dim {
                for l in 0..dim {
                    acc += ph(k, i) * ph(l, j) * gv(k, l);
                }
            }
            b[i * dim + j] = acc;
        }
    }
    let r_phi_metric = norm_bilinear(&b, &gi, dim);

    // 6. d eta (X,Y) = 2 g(X, phi Y); (d eta)_{ij} = d_i eta_j - d_j eta_i
    let mut c = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let de = sj.eta[j].partial_vars(&[i]) - sj.eta[i].partial_vars(&[j]);
            let rhs = 2.0 * (0..dim).map(|k| gv(i, k) * ph(k, j)).sum::<f64>();
            c[i * dim + j] = de - rhs;
        }
    }
    let r_d_eta = norm_bilinear(&c, &gi, dim);

    // 7. L_xi g = 0
    let lie = crate::tensor::lie_derivative(s.metric(), s.xi(), point)?;
    let r_killing = norm_bilinear(lie.components(), &gi, dim);

    // 8. Ric(., xi) = 2n eta
    let ric = sj.bundle.ricci_jets()?.values();
    let mut d = vec![0.0; dim];
    for (i, slot) in d.iter_mut().enumerate() {
        *slot = (0..dim).map(|j| ric.get(&[i, j]) * xi[j]).sum::<f64>()
            - 2.0 * n as f64 * eta[i];
    }
    let r_ricci_xi = norm_form(&d, &gi, dim);

    // 9. R(X,Y)xi = eta(Y)X - eta(X)Y, lowered:
    //    T_{ijl} = R_{ijkl} xi^k - (eta_j g_{il} - eta_i g_{jl}) = 0
    let riem = sj.bundle.riemann_jets()?.values();
    let mut t = vec![0.0; dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            for l in 0..dim {
                let mut acc = -(eta[j] * gv(i, l) - eta[i] * gv(j, l));
                for k in 0..dim {
                    acc += riem.get(&[i, j, k, l]) * xi[k];
                }
                t[(i * dim + j) * dim + l] = acc;
            }
        }
    }
    let mut inv_sq = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            for l in 0..dim {
                for i2 in 0..dim {
                    for j2 in 0..dim {
                        for l2 in 0..dim {
                            inv_sq += gi(i, i2)
                                * gi(j, j2)
                                * gi(l, l2)
                                * t[(i * dim + j) * dim + l]
                                * t[(i2 * dim + j2) * dim + l2];
                        }
                    }
                }
            }
        }
    }
    let r_riemann_xi = inv_sq.abs().sqrt();

    Ok([
        r_eta_xi,
        r_phi_xi,
        r_eta_phi,
        r_phi_sq,
        r_phi_metric,
        r_d_eta,
        r_killing,
        r_ricci_xi,
        r_riemann_xi,
    ])
}

fn norm_vec(v: &[f64], g: &dyn Fn(usize, usize) -> f64, dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            s += g(i, j) * v[i] * v[j];
        }
    }
    s.abs().sqrt()
}

fn norm_form(w: &[f64], ginv: &dyn Fn(usize, usize) -> f64, dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            s += ginv(i, j) * w[i] * w[j];
        }
    }
    s.abs().sqrt()
}

fn norm_bilinear(t: &[f64], ginv: &dyn Fn(usize, usize) -> f64, dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    s += ginv(i, a) * ginv(j, b) * t[i * dim + j] * t[a * dim + b];
                }
            }
        }
    }
    s.abs().sqrt()
}

/// Per-axiom max residuals over a point sample.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub names: Vec<String>,
    pub max_residuals: Vec<f64>,
    pub tolerance: f64,
    pub points: usize,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.max_residuals.iter().all(|&r| r < self.tolerance)
    }

    pub fn worst(&self) -> f64 {
        self.max_residuals.iter().fold(0.0f64, |m, &r| m.max(r))
    }
}

/// Evaluate every axiom at every point; returns per-axiom max residuals.
pub fn check_sasakian_axioms(
    s: &SasakianStructure,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<AxiomReport> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let per_point: Vec<[f64; 9]> = crate::par::try_map_points(points, |_, p| {
        axiom_residuals_at(s, p)
    })?;
    let mut max = [0.0f64; 9];
    for r in &per_point {
        for (m, v) in max.iter_mut().zip(r) {
            *m = m.max(*v);
        }
    }
    Ok(AxiomReport {
        names: AXIOM_NAMES.iter().map(|s| s.to_string()).collect(),
        max_residuals: max.to_vec(),
        tolerance: tol,
        points: points.len(),
    })
}
