//! Seeded orthonormal horizontal frames.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sasaki::structure::{SasakianStructure, StructureJets};

/// A g-orthonormal basis of the contact distribution at a point, built in
/// J-adapted pairs `(u_a, phi u_a)`, with the Reeb vector appended as the
/// final (index 2n) direction of the full frame.
#[derive(Debug, Clone)]
pub struct HorizontalFrame {
    pub point: Vec<f64>,
    /// 2n horizontal vectors in chart components, ordered
    /// `u_1, phi u_1, u_2, phi u_2, ...`.
    pub vectors: Vec<Vec<f64>>,
    /// Reeb vector at the point.
    pub xi: Vec<f64>,
    pub seed: u64,
}

impl HorizontalFrame {
    /// Full frame rows `e_1..e_2n, xi` as chart components.
    pub fn full_rows(&self) -> Vec<&[f64]> {
        let mut rows: Vec<&[f64]> = self.vectors.iter().map(|v| v.as_slice()).collect();
        rows.push(&self.xi);
        rows
    }

    /// Number of J-adapted pairs (= n).
    pub fn pairs(&self) -> usize {
        self.vectors.len() / 2
    }

    /// The a-th pair (u_a, phi u_a), 0-based.
    pub fn pair(&self, a: usize) -> (&[f64], &[f64]) {
        (&self.vectors[2 * a], &self.vectors[2 * a + 1])
    }
}

/// Candidate seed vectors for the Gram-Schmidt sweep. Drawing them once per
/// (seed) and reusing across points keeps the frame field continuous in the
/// point wherever the projections stay nondegenerate.
pub fn seed_vectors(dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..4 * dim + 8)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// Deterministic J-adapted horizontal frame at `point`.
pub fn horizontal_frame(
    s: &SasakianStructure,
    point: &[f64],
    seed: u64,
) -> Result<HorizontalFrame> {
    let sj = s.jets_at(point, 1)?;
    horizontal_frame_from_jets(s, &sj, point, seed)
}

pub(crate) fn horizontal_frame_from_jets(
    s: &SasakianStructure,
    sj: &StructureJets,
    point: &[f64],
    seed: u64,
) -> Result<HorizontalFrame> {
    let dim = s.dim();
    let n = s.n();
    let g = sj.bundle.metric_jets().values();
    let eta = sj.eta_values();
    let xi = sj.xi_values();
    let mut phi = sj.phi_values();
    if s.phi_sign() < 0.0 {
        for v in phi.iter_mut() {
            *v = -*v;
        }
    }

    let ip = |u: &[f64], v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                acc += g.get(&[i, j]) * u[i] * v[j];
            }
        }
        acc
    };
    let apply_phi = |u: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|k| (0..dim).map(|j| phi[k * dim + j] * u[j]).sum())
            .collect()
    };

    let candidates = seed_vectors(dim, seed);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    let mut cand_iter = candidates.into_iter();
    while vectors.len() < 2 * n {
        let Some(w) = cand_iter.next() else {
            return Err(Error::Degenerate(
                "horizontal projection exhausted all seed candidates".into(),
            ));
        };
        // project out the Reeb direction, then previous frame vectors
        let ew: f64 = (0..dim).map(|i| eta[i] * w[i]).sum();
        let mut u: Vec<f64> = (0..dim).map(|i| w[i] - ew * xi[i]).collect();
        for b in &vectors {
            let c = ip(&u, b);
            for i in 0..dim {
                u[i] -= c * b[i];
            }
        }
        let norm = ip(&u, &u).max(0.0).sqrt();
        if norm < 1e-8 {
            continue;
        }
        for c in u.iter_mut() {
            *c /= norm;
        }
        let mut pu = apply_phi(&u);
        let pnorm = ip(&pu, &pu).max(0.0).sqrt();
        if (pnorm - 1.0).abs() > 1e-6 {
            // phi should be isometric on the contact distribution; a bad
            // norm here means the structure is far from Sasakian, so fall
            // back to plain Gram-Schmidt with this vector alone.
            vectors.push(u);
            continue;
        }
        for c in pu.iter_mut() {
            *c /= pnorm;
        }
        vectors.push(u);
        vectors.push(pu);
    }
    vectors.truncate(2 * n);
    Ok(HorizontalFrame {
        point: point.to_vec(),
        vectors,
        xi,
        seed,
    })
}

#[cfg(test)]
mod tests {
    // exercised end-to-end through the fixture tests; unit coverage for the
    // degenerate path lives in sasaki::tests
}
