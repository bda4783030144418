//! Geodesic integration and single-chart distance estimation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensor::curvature::CurvatureJets;
use crate::tensor::metric::MetricSpec;

/// A unit-speed geodesic sampled on a uniform arclength grid.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    /// Arclength values, including both endpoints.
    pub params: Vec<f64>,
    /// (position, velocity) at each grid node.
    pub states: Vec<(Vec<f64>, Vec<f64>)>,
    /// Max deviation of |velocity|_g from 1 over the grid.
    pub max_speed_drift: f64,
}

fn metric_at(metric: &MetricSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    metric.eval_matrix(x)
}

fn g_norm(metric: &MetricSpec, x: &[f64], v: &[f64]) -> Result<f64> {
    let g = metric_at(metric, x)?;
    let v = DVector::from_column_slice(v);
    Ok((v.transpose() * g * &v)[(0, 0)].sqrt())
}

/// Acceleration of the geodesic equation: a^k = -Gamma^k_{ij} v^i v^j.
fn acceleration(metric: &MetricSpec, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let bundle = CurvatureJets::new(metric, x, 1)?;
    let gamma = bundle.christoffel_jets().values();
    let dim = metric.dim();
    let mut a = vec![0.0; dim];
    for (k, slot) in a.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                acc -= gamma.get(&[k, i, j]) * v[i] * v[j];
            }
        }
        *slot = acc;
    }
    Ok(a)
}

/// Integrate the geodesic ODE with the classical fixed-step fourth-order
/// one-step method. `v0` must be a unit vector for `metric` at `x0`.
pub fn geodesic_integrate(
    metric: &MetricSpec,
    x0: &[f64],
    v0: &[f64],
    length: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    if steps == 0 || length <= 0.0 {
        return Err(Error::InvalidConfig(
            "geodesic length and step count must be positive".into(),
        ));
    }
    let speed0 = g_norm(metric, x0, v0)?;
    if (speed0 - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!(
            "initial velocity is not unit: |v0|_g = {speed0}"
        )));
    }
    let dim = metric.dim();
    let h = length / steps as f64;
    let mut x = x0.to_vec();
    let mut v = v0.to_vec();
    let mut params = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    params.push(0.0);
    states.push((x.clone(), v.clone()));
    let mut max_drift: f64 = 0.0;
    for step in 0..steps {
        let rk = |x: &[f64], v: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
            if !metric.chart().contains(x) {
                return Err(Error::PathLeftDomain);
            }
            Ok((v.to_vec(), acceleration(metric, x, v)?))
        };
        let (k1x, k1v) = rk(&x, &v)?;
        let ax = |x: &[f64], d: &[f64], s: f64| -> Vec<f64> {
            x.iter().zip(d).map(|(a, b)| a + s * b).collect()
        };
        let (k2x, k2v) = rk(&ax(&x, &k1x, h / 2.0), &ax(&v, &k1v, h / 2.0))?;
        let (k3x, k3v) = rk(&ax(&x, &k2x, h / 2.0), &ax(&v, &k2v, h / 2.0))?;
        let (k4x, k4v) = rk(&ax(&x, &k3x, h), &ax(&v, &k3v, h))?;
        for i in 0..dim {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        if !metric.chart().contains(&x) {
            return Err(Error::PathLeftDomain);
        }
        max_drift = max_drift.max((g_norm(metric, &x, &v)? - 1.0).abs());
        params.push(h * (step + 1) as f64);
        states.push((x.clone(), v.clone()));
    }
    Ok(GeodesicPath {
        params,
        states,
        max_speed_drift: max_drift,
    })
}

/// Options for the shooting search behind [`distance_estimate`].
#[derive(Debug, Clone)]
pub struct ShootingOptions {
    /// Target integrator step size.
    pub step_size: f64,
    /// Gauss-Newton iterations per start.
    pub max_iterations: usize,
    /// Extra randomized starts after the straight-line initial guess.
    pub restarts: usize,
    /// Seed for the randomized restarts.
    pub seed: u64,
    /// Chart-coordinate convergence threshold on the endpoint residual.
    pub tolerance: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            step_size: 5e-3,
            max_iterations: 40,
            restarts: 6,
            seed: 0x5a5a_5a5a,
            tolerance: 1e-9,
        }
    }
}

fn shoot(metric: &MetricSpec, x: &[f64], z: &[f64], step_size: f64) -> Result<Vec<f64>> {
    let s = g_norm(metric, x, z)?;
    if s < 1e-14 {
        return Ok(x.to_vec());
    }
    let v0: Vec<f64> = z.iter().map(|c| c / s).collect();
    let steps = ((s / step_size).ceil() as usize).max(8);
    let path = geodesic_integrate(metric, x, &v0, s, steps)?;
    Ok(path.states.last().expect("non-empty path").0.clone())
}

/// Upper-bound estimate of the geodesic distance within a single chart,
/// by a multi-start shooting search on the exponential map. The returned
/// value is the g-length of the best connecting geodesic found.
pub fn distance_estimate(
    metric: &MetricSpec,
    x: &[f64],
    y: &[f64],
    opts: &ShootingOptions,
) -> Result<f64> {
    metric.chart().check_contains(x)?;
    metric.chart().check_contains(y)?;
    let dim = metric.dim();
    let delta: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    if delta.iter().all(|d| d.abs() < 1e-15) {
        return Ok(0.0);
    }
    let scale = delta.iter().map(|d| d * d).sum::<f64>().sqrt();

    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<f64> = None;

    for start in 0..=opts.restarts {
        let mut z = delta.clone();
        if start > 0 {
            for c in z.iter_mut() {
                *c += 0.3 * scale * rng.gen_range(-1.0..1.0);
            }
        }
        let mut converged = false;
        for _ in 0..opts.max_iterations {
            let end = match shoot(metric, x, &z, opts.step_size) {
                Ok(e) => e,
                Err(_) => break,
            };
            let r: Vec<f64> = end.iter().zip(y).map(|(a, b)| a - b).collect();
            let rnorm = r.iter().map(|c| c * c).sum::<f64>().sqrt();
            if rnorm < opts.tolerance * (1.0 + scale) {
                converged = true;
                break;
            }
            // finite-difference Jacobian of the shooting map
            let fd = 1e-6 * (1.0 + scale);
            let mut jac = DMatrix::zeros(dim, dim);
            let mut ok = true;
            for c in 0..dim {
                let mut zp = z.clone();
                zp[c] += fd;
                match shoot(metric, x, &zp, opts.step_size) {
                    Ok(ep) => {
                        for rr in 0..dim {
                            jac[(rr, c)] = (ep[rr] - end[rr]) / fd;
                        }
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            let rhs = DVector::from_column_slice(&r);
            let Some(step) = jac.lu().solve(&rhs) else {
                break;
            };
            // damped update
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..12 {
                let zt: Vec<f64> = z
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c - lambda * step[i])
                    .collect();
                if let Ok(et) = shoot(metric, x, &zt, opts.step_size) {
                    let rt: f64 = et
                        .iter()
                        .zip(y)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if rt < rnorm {
                        z = zt;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if converged {
            let s = g_norm(metric, x, &z)?;
            best = Some(best.map_or(s, |b: f64| b.min(s)));
        }
    }
    best.ok_or_else(|| Error::ShootingFailed(format!("no start converged from {x:?} to {y:?}")))
}
