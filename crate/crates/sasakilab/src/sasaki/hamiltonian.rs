//! The Hamiltonian vector field of a basic potential and its transverse
//! holomorphicity residual.
//!
//! For a basic potential psi the field X = X_D + eta(X) xi is determined by
//! eta(X) = -i psi and the contraction equation on the contact bundle,
//! iota_{X_D} omega^T = i dbar_B psi, with omega^T(U, V) = g(phi U, V) and
//! J = phi restricted to the contact distribution. In a J-adapted unitary
//! frame Z_a = (u_a - i phi u_a)/sqrt(2) the solution is
//! X_D = sum_a (Zbar_a psi) Z_a, the (1,0)-gradient of psi.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{eval_jet, CoordExpr, Jet};
use crate::sasaki::frame::{horizontal_frame_from_jets, seed_vectors};
use crate::sasaki::structure::SasakianStructure;

/// Pointwise Hamiltonian field data in chart components.
#[derive(Debug, Clone)]
pub struct HamiltonianField {
    /// Horizontal part, chart components.
    pub x_d: Vec<Complex64>,
    /// eta(X) = -i psi.
    pub eta_x: Complex64,
    /// Full field X = X_D + eta(X) xi.
    pub x_full: Vec<Complex64>,
}

/// Solve (pr1) for the Hamiltonian field of `psi` at `point`.
pub fn hamiltonian_field_from_potential(
    s: &SasakianStructure,
    psi: &CoordExpr,
    point: &[f64],
    seed: u64,
) -> Result<HamiltonianField> {
    let dim = s.dim();
    let sj = s.jets_at(point, 1)?;
    let frame = horizontal_frame_from_jets(s, &sj, point, seed)?;
    let psi_j = eval_jet(psi, point, 1)?;
    let dpsi: Vec<f64> = (0..dim).map(|i| psi_j.partial_vars(&[i])).collect();
    let sqrt2 = std::f64::consts::SQRT_2;

    let mut x_d = vec![Complex64::new(0.0, 0.0); dim];
    for a in 0..frame.pairs() {
        let (u, pu) = frame.pair(a);
        let du: f64 = (0..dim).map(|i| u[i] * dpsi[i]).sum();
        let dpu: f64 = (0..dim).map(|i| pu[i] * dpsi[i]).sum();
        // Zbar_a psi = (u psi + i (phi u) psi)/sqrt(2)
        let zbar_psi = Complex64::new(du, dpu) / sqrt2;
        for i in 0..dim {
            // Z_a = (u - i phi u)/sqrt(2)
            let z_i = Complex64::new(u[i], -pu[i]) / sqrt2;
            x_d[i] += zbar_psi * z_i;
        }
    }
    let eta_x = Complex64::new(0.0, -psi_j.value());
    let xi = sj.xi_values();
    let x_full: Vec<Complex64> = (0..dim).map(|i| x_d[i] + eta_x * xi[i]).collect();
    Ok(HamiltonianField { x_d, eta_x, x_full })
}

/// Complex vector of jets, split into real and imaginary parts.
struct ComplexJetVec {
    re: Vec<Jet>,
    im: Vec<Jet>,
}

/// Max norm over `points` of the antiholomorphic covariant derivative of
/// X_D in a J-adapted frame: sqrt(sum_ab |g(nabla_{Zbar_b} X_D, Zbar_a)|^2).
///
/// The whole construction (frame included) is carried on jets, so the
/// derivative of the field is exact, not finite-differenced.
pub fn holomorphicity_residual(
    s: &SasakianStructure,
    psi: &CoordExpr,
    points: &[Vec<f64>],
    seed: u64,
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let per_point = crate::par::try_map_points(points, |_, p| {
        holomorphicity_residual_at(s, psi, p, seed)
    })?;
    Ok(per_point.into_iter().fold(0.0f64, f64::max))
}

fn holomorphicity_residual_at(
    s: &SasakianStructure,
    psi: &CoordExpr,
    point: &[f64],
    seed: u64,
) -> Result<f64> {
    let dim = s.dim();
    let n = s.n();
    let sj = s.jets_at(point, 2)?;
    let g = sj.bundle.metric_jets();
    let gamma = sj.bundle.christoffel_jets();
    let psi_j = eval_jet(psi, point, 2)?;

    // jet inner product of jet vectors
    let ip = |u: &[Jet], v: &[Jet]| -> Jet {
        let mut acc = Jet::constant(dim, u[0].order().min(v[0].order()), 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc = acc.add(&g.get(&[i, j]).truncated(1).mul(&u[i].mul(&v[j])));
            }
        }
        acc
    };
    let apply_phi = |u: &[Jet]| -> Vec<Jet> {
        (0..dim)
            .map(|k| {
                let mut acc = Jet::constant(dim, 1, 0.0);
                for j in 0..dim {
                    acc = acc.add(&sj.phi[k * dim + j].mul(&u[j].truncated(1)));
                }
                if s.phi_sign() < 0.0 {
                    acc = acc.neg();
                }
                acc
            })
            .collect()
    };

    // Gram-Schmidt on jets, decisions taken on values so the frame matches
    // the f64 construction at the same point and seed.
    let candidates = seed_vectors(dim, seed);
    let mut vectors: Vec<Vec<Jet>> = Vec::with_capacity(2 * n);
    let mut cand_iter = candidates.into_iter();
    while vectors.len() < 2 * n {
        let Some(w) = cand_iter.next() else {
            return Err(Error::Degenerate(
                "horizontal projection exhausted all seed candidates".into(),
            ));
        };
        let wj: Vec<Jet> = (0..dim).map(|i| Jet::constant(dim, 1, w[i])).collect();
        let mut ew = Jet::constant(dim, 1, 0.0);
        for i in 0..dim {
            ew = ew.add(&sj.eta[i].truncated(1).mul(&wj[i]));
        }
        let mut u: Vec<Jet> = (0..dim)
            .map(|i| wj[i].sub(&ew.mul(&sj.xi[i].truncated(1))))
            .collect();
        for b in &vectors {
            let c = ip(&u, b);
            for i in 0..dim {
                u[i] = u[i].sub(&c.mul(&b[i]));
            }
        }
        let norm2 = ip(&u, &u);
        if norm2.value().sqrt() < 1e-8 {
            continue;
        }
        let inv_norm = norm2.sqrt()?.recip()?;
        for c in u.iter_mut() {
            *c = c.mul(&inv_norm);
        }
        let pu = apply_phi(&u);
        let pnorm2 = ip(&pu, &pu);
        if (pnorm2.value().sqrt() - 1.0).abs() > 1e-6 {
            vectors.push(u);
            continue;
        }
        let inv_pnorm = pnorm2.sqrt()?.recip()?;
        let pu: Vec<Jet> = pu.iter().map(|c| c.mul(&inv_pnorm)).collect();
        vectors.push(u);
        vectors.push(pu);
    }
    vectors.truncate(2 * n);

    // X_D as a complex jet vector
    
    let dpsi: Vec<Jet> = (0..dim).map(|i| psi_j.derivative(i)).collect();
    let mut x = ComplexJetVec {
        re: (0..dim).map(|_| Jet::constant(dim, 1, 0.0)).collect(),
        im: (0..dim).map(|_| Jet::constant(dim, 1, 0.0)).collect(),
    };
    for a in 0..n {
        let u = &vectors[2 * a];
        let pu = &vectors[2 * a + 1];
        let mut du = Jet::constant(dim, 1, 0.0);
        let mut dpu = Jet::constant(dim, 1, 0.0);
        for i in 0..dim {
            du = du.add(&u[i].mul(&dpsi[i]));
            dpu = dpu.add(&pu[i].mul(&dpsi[i]));
        }
        // Zbar psi = (du + i dpu)/sqrt2 ; Z^i = (u^i - i pu^i)/sqrt2
        // contribution: (du + i dpu)(u^i - i pu^i)/2
        for i in 0..dim {
            let re = du.mul(&u[i]).add(&dpu.mul(&pu[i])).scale(0.5);
            let im = dpu.mul(&u[i]).sub(&du.mul(&pu[i])).scale(0.5);
            x.re[i] = x.re[i].add(&re);
            x.im[i] = x.im[i].add(&im);
        }
    }

    // nabla_j X^k = d_j X^k + Gamma^k_{jm} X^m (values)
    let nabla = |part: &[Jet]| -> Vec<f64> {
        let mut out = vec![0.0; dim * dim]; // [k][j]
        for k in 0..dim {
            for j in 0..dim {
                let mut acc = part[k].partial_vars(&[j]);
                for m in 0..dim {
                    acc += gamma.get(&[k, j, m]).value() * part[m].value();
                }
                out[k * dim + j] = acc;
            }
        }
        out
    };
    let dre = nabla(&x.re);
    let dim_ = nabla(&x.im);

    let gv = sj.bundle.metric_jets().values();
    let uval = |v: &[Jet]| -> Vec<f64> { v.iter().map(|j| j.value()).collect() };
    let mut sum_sq = 0.0;
    for b in 0..n {
        let ub = uval(&vectors[2 * b]);
        let pb = uval(&vectors[2 * b + 1]);
        for a in 0..n {
            let ua = uval(&vectors[2 * a]);
            let pa = uval(&vectors[2 * a + 1]);
            // W = nabla_{Zbar_b} X_D with Zbar_b = (ub + i pb)/sqrt2
            let mut w_re = vec![0.0; dim];
            let mut w_im = vec![0.0; dim];
            for k in 0..dim {
                for j in 0..dim {
                    let zb_re = ub[j];
                    let zb_im = pb[j];
                    w_re[k] += zb_re * dre[k * dim + j] - zb_im * dim_[k * dim + j];
                    w_im[k] += zb_re * dim_[k * dim + j] + zb_im * dre[k * dim + j];
                }
            }
            // H_ab = g(W, Zbar_a)/2  with Zbar_a = (ua + i pa)/sqrt2 and the
            // sqrt2 from Zbar_b folded in here as the global 1/2
            let mut h_re = 0.0;
            let mut h_im = 0.0;
            for k in 0..dim {
                for l in 0..dim {
                    let gkl = gv.get(&[k, l]);
                    let za_re = ua[l];
                    let za_im = pa[l];
                    h_re += gkl * (w_re[k] * za_re - w_im[k] * za_im);
                    h_im += gkl * (w_re[k] * za_im + w_im[k] * za_re);
                }
            }
            sum_sq += (h_re * h_re + h_im * h_im) / 4.0;
        }
    }
    Ok(sum_sq.sqrt())
}
