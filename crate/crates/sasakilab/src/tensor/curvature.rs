//! Curvature of a metric at a point, computed on jets.
//!
//! Sign conventions, fixed once for the whole workbench:
//!   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//!   R^l_{ijk}: R(e_i,e_j)e_k = R^l_{ijk} e_l
//!   R_{ijkl} = g(R(e_i,e_j)e_k, e_l)
//!   Ric(Y,Z) = sum_i g(R(e_i,Y)Z, e_i),  i.e. Ric_{jk} = R^i_{ijk}
//!
//! With this choice the Sasakian identities R(X,Y)xi = eta(Y)X - eta(X)Y
//! and Ric(.,xi) = 2n eta hold with their stated signs, and the unit round
//! sphere has sectional curvature +1 (R_{ijji} = +1 on orthonormal pairs).

use std::cell::OnceCell;

use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::tensor::metric::MetricSpec;
use crate::tensor::value::{JetTensor, TensorValue};

/// Metric, inverse, Christoffel and curvature jets at a single point.
///
/// `g_order` is the derivative order carried by the metric jets; Christoffel
/// symbols then carry `g_order - 1`, curvature `g_order - 2`.
pub struct CurvatureJets {
    dim: usize,
    point: Vec<f64>,
    g_order: usize,
    g: JetTensor,
    g_inv: JetTensor,
    gamma: JetTensor,
    riemann_low: OnceCell<JetTensor>,
    ricci: OnceCell<JetTensor>,
    scalar: OnceCell<Jet>,
}

/// Invert a matrix of jets by Gauss-Jordan elimination with value pivoting.
fn invert_jet_matrix(dim: usize, m: &[Jet]) -> Result<Vec<Jet>> {
    let order = m[0].order();
    let mut a: Vec<Jet> = m.to_vec();
    let mut inv: Vec<Jet> = (0..dim * dim)
        .map(|k| Jet::constant(m[0].dim(), order, if k % (dim + 1) == 0 { 1.0 } else { 0.0 }))
        .collect();
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r, &s| {
                a[r * dim + col]
                    .value()
                    .abs()
                    .total_cmp(&a[s * dim + col].value().abs())
            })
            .expect("non-empty range");
        if a[pivot_row * dim + col].value().abs() < 1e-300 {
            return Err(Error::SingularMetric);
        }
        if pivot_row != col {
            for k in 0..dim {
                a.swap(col * dim + k, pivot_row * dim + k);
                inv.swap(col * dim + k, pivot_row * dim + k);
            }
        }
        let pivot = a[col * dim + col].clone();
        let pivot_inv = pivot.recip().map_err(|_| Error::SingularMetric)?;
        for k in 0..dim {
            a[col * dim + k] = a[col * dim + k].mul(&pivot_inv);
            inv[col * dim + k] = inv[col * dim + k].mul(&pivot_inv);
        }
        for r in 0..dim {
            if r == col {
                continue;
            }
            let factor = a[r * dim + col].clone();
            if factor.value() == 0.0 && factor.is_constant() {
                continue;
            }
            for k in 0..dim {
                let t = factor.mul(&a[col * dim + k]);
                a[r * dim + k] = a[r * dim + k].sub(&t);
                let t = factor.mul(&inv[col * dim + k]);
                inv[r * dim + k] = inv[r * dim + k].sub(&t);
            }
        }
    }
    Ok(inv)
}

impl CurvatureJets {
    /// Evaluate metric jets at `point` and assemble Christoffel symbols.
    /// Requires `g_order >= 1`; curvature needs `g_order >= 2`.
    pub fn new(metric: &MetricSpec, point: &[f64], g_order: usize) -> Result<CurvatureJets> {
        if g_order < 1 {
            return Err(Error::InsufficientJetOrder {
                needed: 1,
                have: g_order,
            });
        }
        let dim = metric.dim();
        // SPD check (also covers the domain box).
        metric.eval_matrix(point)?;
        let g_comps = metric.eval_jets(point, g_order)?;
        let g_inv_comps = invert_jet_matrix(dim, &g_comps)?;

        let gam_order = g_order - 1;
        // dg[i][j][k] = d_k g_{ij}, order gam_order
        let mut dg: Vec<Option<Jet>> = vec![None; dim * dim * dim];
        for i in 0..dim {
            for j in i..dim {
                for k in 0..dim {
                    let d = g_comps[i * dim + j].derivative(k);
                    dg[(i * dim + j) * dim + k] = Some(d.clone());
                    dg[(j * dim + i) * dim + k] = Some(d);
                }
            }
        }
        let dg_at = |i: usize, j: usize, k: usize| -> &Jet {
            dg[(i * dim + j) * dim + k].as_ref().expect("filled above")
        };

        // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
        let mut gamma: Vec<Jet> = Vec::with_capacity(dim * dim * dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    if i > j {
                        // symmetric in (i, j); copy the (j, i) entry
                        let prev = gamma[(k * dim + j) * dim + i].clone();
                        gamma.push(prev);
                        continue;
                    }
                    let mut acc = Jet::constant(dim, gam_order, 0.0);
                    for l in 0..dim {
                        let sum = dg_at(j, l, i).add(dg_at(i, l, j)).sub(dg_at(i, j, l));
                        acc = acc.add(&g_inv_comps[k * dim + l].truncated(gam_order).mul(&sum));
                    }
                    gamma.push(acc.scale(0.5));
                }
            }
        }

        Ok(CurvatureJets {
            dim,
            point: point.to_vec(),
            g_order,
            g: JetTensor::new(dim, 0, 2, g_comps),
            g_inv: JetTensor::new(dim, 2, 0, g_inv_comps),
            gamma: JetTensor::new(dim, 1, 2, gamma),
            riemann_low: OnceCell::new(),
            ricci: OnceCell::new(),
            scalar: OnceCell::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn g_order(&self) -> usize {
        self.g_order
    }

    pub fn metric_jets(&self) -> &JetTensor {
        &self.g
    }

    pub fn metric_inv_jets(&self) -> &JetTensor {
        &self.g_inv
    }

    pub fn christoffel_jets(&self) -> &JetTensor {
        &self.gamma
    }

    fn require_order(&self, needed_g_order: usize) -> Result<()> {
        if self.g_order < needed_g_order {
            return Err(Error::InsufficientJetOrder {
                needed: needed_g_order,
                have: self.g_order,
            });
        }
        Ok(())
    }

    /// R_{ijkl}, all indices down, order `g_order - 2`.
    pub fn riemann_jets(&self) -> Result<&JetTensor> {
        self.require_order(2)?;
        Ok(self.riemann_low.get_or_init(|| {
            let dim = self.dim;
            let order = self.g_order - 2;
            let gam = &self.gamma;
            // R^l_{ijk} = d_i Gam^l_{jk} - d_j Gam^l_{ik}
            //             + Gam^l_{im} Gam^m_{jk} - Gam^l_{jm} Gam^m_{ik}
            let mut up = vec![Jet::constant(dim, order, 0.0); dim.pow(4)];
            for l in 0..dim {
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        for k in 0..dim {
                            let mut acc = gam
                                .get(&[l, j, k])
                                .derivative(i)
                                .sub(&gam.get(&[l, i, k]).derivative(j));
                            for m in 0..dim {
                                let t1 = gam
                                    .get(&[l, i, m])
                                    .truncated(order)
                                    .mul(&gam.get(&[m, j, k]).truncated(order));
                                let t2 = gam
                                    .get(&[l, j, m])
                                    .truncated(order)
                                    .mul(&gam.get(&[m, i, k]).truncated(order));
                                acc = acc.add(&t1.sub(&t2));
                            }
                            up[((l * dim + i) * dim + j) * dim + k] = acc.clone();
                            up[((l * dim + j) * dim + i) * dim + k] = acc.neg();
                        }
                    }
                }
            }
            // lower: R_{ijkl} = g_{lm} R^m_{ijk}
            let mut low = vec![Jet::constant(dim, order, 0.0); dim.pow(4)];
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        for l in 0..dim {
                            let mut acc = Jet::constant(dim, order, 0.0);
                            for m in 0..dim {
                                acc = acc.add(
                                    &self
                                        .g
                                        .get(&[l, m])
                                        .truncated(order)
                                        .mul(&up[((m * dim + i) * dim + j) * dim + k]),
                                );
                            }
                            low[((i * dim + j) * dim + k) * dim + l] = acc;
                        }
                    }
                }
            }
            JetTensor::new(dim, 0, 4, low)
        }))
    }

    /// Ric_{jk} = g^{il} R_{ijkl}, order `g_order - 2`.
    pub fn ricci_jets(&self) -> Result<&JetTensor> {
        let riem = self.riemann_jets()?;
        Ok(self.ricci.get_or_init(|| {
            let dim = self.dim;
            let order = self.g_order - 2;
            let mut out = vec![Jet::constant(dim, order, 0.0); dim * dim];
            for j in 0..dim {
                for k in 0..dim {
                    let mut acc = Jet::constant(dim, order, 0.0);
                    for i in 0..dim {
                        for l in 0..dim {
                            acc = acc.add(
                                &self
                                    .g_inv
                                    .get(&[i, l])
                                    .truncated(order)
                                    .mul(riem.get(&[i, j, k, l])),
                            );
                        }
                    }
                    out[j * dim + k] = acc;
                }
            }
            JetTensor::new(dim, 0, 2, out)
        }))
    }

    /// Scalar curvature jet, order `g_order - 2`.
    pub fn scalar_jet(&self) -> Result<&Jet> {
        let ric = self.ricci_jets()?;
        Ok(self.scalar.get_or_init(|| {
            let dim = self.dim;
            let order = self.g_order - 2;
            let mut acc = Jet::constant(dim, order, 0.0);
            for j in 0..dim {
                for k in 0..dim {
                    acc = acc.add(&self.g_inv.get(&[j, k]).truncated(order).mul(ric.get(&[j, k])));
                }
            }
            acc
        }))
    }

    /// Gradient of a scalar jet: (grad f)^i = g^{ij} d_j f, order reduced by 1.
    pub fn gradient_jets(&self, f: &Jet) -> JetTensor {
        let dim = self.dim;
        let order = f.order() - 1;
        let mut out = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut acc = Jet::constant(dim, order, 0.0);
            for j in 0..dim {
                acc = acc.add(&self.g_inv.get(&[i, j]).truncated(order).mul(&f.derivative(j)));
            }
            out.push(acc);
        }
        JetTensor::new(dim, 1, 0, out)
    }
}

/// Christoffel symbols Gamma^k_{ij} at a point (valence (1,2)).
pub fn christoffel(metric: &MetricSpec, point: &[f64]) -> Result<TensorValue> {
    Ok(CurvatureJets::new(metric, point, 1)?
        .christoffel_jets()
        .values())
}

/// Riemann tensor R_{ijkl}, all indices down.
pub fn riemann(metric: &MetricSpec, point: &[f64]) -> Result<TensorValue> {
    Ok(CurvatureJets::new(metric, point, 2)?
        .riemann_jets()?
        .values())
}

/// Ricci tensor Ric_{jk}.
pub fn ricci(metric: &MetricSpec, point: &[f64]) -> Result<TensorValue> {
    Ok(CurvatureJets::new(metric, point, 2)?.ricci_jets()?.values())
}

/// Scalar curvature.
pub fn scalar(metric: &MetricSpec, point: &[f64]) -> Result<f64> {
    Ok(CurvatureJets::new(metric, point, 2)?.scalar_jet()?.value())
}

/// Independent finite-difference oracle: Riemann from central differences
/// of Christoffel symbols. Intended only for cross-checks of the jet path.
pub fn fd_oracle_riemann(metric: &MetricSpec, point: &[f64], h: f64) -> Result<TensorValue> {
    if h <= 0.0 {
        return Err(Error::Precondition(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    if !metric.chart().contains_with_margin(point, 2.0 * h) {
        return Err(Error::Precondition(
            "point closer than 2h to the domain boundary".into(),
        ));
    }
    let dim = metric.dim();
    let gamma_at = |p: &[f64]| -> Result<TensorValue> { christoffel(metric, p) };
    let gamma0 = gamma_at(point)?;
    // dGam[m] = d_m Gamma (central difference)
    let mut dgam: Vec<TensorValue> = Vec::with_capacity(dim);
    for m in 0..dim {
        let mut pp = point.to_vec();
        let mut pm = point.to_vec();
        pp[m] += h;
        pm[m] -= h;
        let gp = gamma_at(&pp)?;
        let gm = gamma_at(&pm)?;
        let comps: Vec<f64> = gp
            .components()
            .iter()
            .zip(gm.components())
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        dgam.push(TensorValue::new(dim, 1, 2, comps));
    }
    let g0 = metric.eval_matrix(point)?;
    let mut low = TensorValue::zeros(dim, 0, 4);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                // R^l_{ijk}
                let mut up = vec![0.0; dim];
                for (l, slot) in up.iter_mut().enumerate() {
                    let mut acc =
                        dgam[i].get(&[l, j, k]) - dgam[j].get(&[l, i, k]);
                    for m in 0..dim {
                        acc += gamma0.get(&[l, i, m]) * gamma0.get(&[m, j, k])
                            - gamma0.get(&[l, j, m]) * gamma0.get(&[m, i, k]);
                    }
                    *slot = acc;
                }
                for l in 0..dim {
                    let mut acc = 0.0;
                    for m in 0..dim {
                        acc += g0[(l, m)] * up[m];
                    }
                    low.set(&[i, j, k, l], acc);
                }
            }
        }
    }
    Ok(low)
}
