//! Ricci-operator eigenstructure and the rigidity classification machinery:
//! quantization of constant scalar curvature, rank criterion, certificate
//! values, eigenvalue systems, verdicts.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sasaki::frame::horizontal_frame_from_jets;
use crate::sasaki::SolitonCandidate;

/// Eigenstructure of the Ricci operator at one point, in a g-orthonormal
/// frame with the Reeb vector last.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub point: Vec<f64>,
    /// Eigenvalues sorted ascending (2n+1 of them).
    pub eigenvalues: Vec<f64>,
    /// (value, multiplicity) clusters under the clustering tolerance.
    pub clusters: Vec<(f64, usize)>,
    /// Rank of Ric - g: eigenvalues with |lambda - 1| above the threshold.
    pub rank_ric_minus_g: usize,
    /// Whether every eigenvalue lies in [1, 2n] (within tolerance).
    pub in_range_1_2n: bool,
    /// |projection| of the eigenvector closest to eigenvalue 2n onto xi.
    pub xi_alignment: f64,
    /// Scalar curvature (eigenvalue sum).
    pub scalar: f64,
}

/// Eigen-decomposition of the Ricci operator at `point`.
pub fn ricci_spectrum(
    candidate: &SolitonCandidate,
    point: &[f64],
    seed: u64,
    cluster_tol: f64,
) -> Result<SpectrumReport> {
    let s = &candidate.structure;
    let n = s.n();
    let fdim = 2 * n + 1;
    let sj = s.jets_at(point, 2)?;
    let frame = horizontal_frame_from_jets(s, &sj, point, seed)?;
    let rows = frame.full_rows();
    let ric = sj.bundle.ricci_jets()?.values();
    let dim = s.dim();
    let mut m = DMatrix::zeros(fdim, fdim);
    for (a, ra) in rows.iter().enumerate() {
        for (b, rb) in rows.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    acc += ric.get(&[i, j]) * ra[i] * rb[j];
                }
            }
            m[(a, b)] = acc;
        }
    }
    // symmetric eigenproblem in the orthonormal frame
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..fdim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let scalar: f64 = eigenvalues.iter().sum();

    // clusters under cluster_tol
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for &v in &eigenvalues {
        match clusters.last_mut() {
            Some((c, mult)) if (v - *c).abs() <= cluster_tol * (1.0 + c.abs()) => {
                // running mean keeps the cluster center stable
                *c = (*c * *mult as f64 + v) / (*mult as f64 + 1.0);
                *mult += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }

    let rank_threshold = cluster_tol
        * (1.0
            + eigenvalues
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs())));
    let rank_ric_minus_g = eigenvalues
        .iter()
        .filter(|&&v| (v - 1.0).abs() > rank_threshold)
        .count();
    let in_range_1_2n = eigenvalues
        .iter()
        .all(|&v| v >= 1.0 - rank_threshold && v <= 2.0 * n as f64 + rank_threshold);

    // alignment of xi with the eigenspace nearest the eigenvalue 2n: the
    // norm of the projection of the frame vector e_xi (last basis vector)
    // onto the span of all eigenvectors whose eigenvalue clusters with the
    // one closest to 2n. Projection onto the whole near-eigenspace keeps the
    // measure meaningful when the eigenvalue is degenerate (Einstein case).
    let target = 2.0 * n as f64;
    let best = order
        .iter()
        .min_by(|&&a, &&b| {
            (eig.eigenvalues[a] - target)
                .abs()
                .total_cmp(&(eig.eigenvalues[b] - target).abs())
        })
        .copied()
        .expect("non-empty spectrum");
    let best_val = eig.eigenvalues[best];
    let mut proj_sq = 0.0;
    for i in 0..fdim {
        if (eig.eigenvalues[i] - best_val).abs() <= cluster_tol * (1.0 + best_val.abs()) {
            let c = eig.eigenvectors.column(i)[fdim - 1];
            proj_sq += c * c;
        }
    }
    let xi_alignment = proj_sq.sqrt();

    Ok(SpectrumReport {
        point: point.to_vec(),
        eigenvalues,
        clusters,
        rank_ric_minus_g,
        in_range_1_2n,
        xi_alignment,
        scalar,
    })
}

/// The quantized admissible scalar curvature for multiplicity k.
pub fn quantized_scalar(n: usize, k: usize) -> f64 {
    (2 * n - 1) as f64 * k as f64 + (2 * n + 1) as f64
}

/// The unique k in 1..=2n+1 with |R - ((2n-1)k + (2n+1))| < tol, if any.
pub fn quantize_scalar(r_value: f64, n: usize, tol: f64) -> Option<usize> {
    (1..=2 * n + 1).find(|&k| (r_value - quantized_scalar(n, k)).abs() < tol)
}

/// Closed-form certificate: the value of sum_{j=1..k} (R_j - 2n)^2 implied
/// by the trace identities for a rank-k spectrum with scalar curvature R:
/// (2n-1) [(2n-1)k + (2n+1) - R]. Zero iff R is the k-th quantized value;
/// negative output signals an inconsistent (R, k) pair.
pub fn rigidity_certificate(r_value: f64, n: usize, k: usize) -> f64 {
    (2 * n - 1) as f64 * (quantized_scalar(n, k) - r_value)
}

/// Solve the two power-sum equations of the four-eigenvalue reduction:
/// k1 R1 + k2 R2 = R - 2n - 1 and k1 R1^2 + k2 R2^2 = (2n+1)R - 8n^2 - 2n - 1,
/// for eigenvalues (R1, R2) with multiplicities (k1, k2). One seat each is
/// reserved for the eigenvalues 2n (Reeb) and 1, so k1 + k2 + 2 <= 2n + 1.
///
/// Returns every real solution pair, annotated with whether both values lie
/// in [1, 2n]. Zero, one or two pairs.
pub fn eigenvalue_system_solve(
    r_value: f64,
    n: usize,
    k1: usize,
    k2: usize,
) -> Result<Vec<((f64, f64), bool)>> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::Precondition(
            "multiplicities k1, k2 must be at least 1".into(),
        ));
    }
    if k1 + k2 + 2 > 2 * n + 1 {
        return Err(Error::Precondition(format!(
            "k1 + k2 + 2 = {} exceeds 2n+1 = {}",
            k1 + k2 + 2,
            2 * n + 1
        )));
    }
    let s1 = r_value - (2 * n + 1) as f64;
    let s2 = (2 * n + 1) as f64 * r_value - (8 * n * n + 2 * n + 1) as f64;
    let (k1f, k2f) = (k1 as f64, k2 as f64);
    // substitute R1 = (s1 - k2 R2)/k1 into the second equation:
    // k2 (k1 + k2) R2^2 - 2 s1 k2 R2 + (s1^2 - k1 s2) = 0
    let a = k2f * (k1f + k2f);
    let b = -2.0 * s1 * k2f;
    let c = s1 * s1 - k1f * s2;
    let disc = b * b - 4.0 * a * c;
    let mut out = Vec::new();
    if disc < 0.0 {
        return Ok(out);
    }
    let sq = disc.sqrt();
    let mut roots = vec![(-b + sq) / (2.0 * a)];
    if disc > 0.0 {
        roots.push((-b - sq) / (2.0 * a));
    }
    for r2 in roots {
        let r1 = (s1 - k2f * r2) / k1f;
        let in_range = |v: f64| v >= 1.0 - 1e-9 && v <= 2.0 * n as f64 + 1e-9;
        out.push(((r1, r2), in_range(r1) && in_range(r2)));
    }
    Ok(out)
}

/// Classification verdicts; stable public strings in the report schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassificationVerdict {
    /// Confirmed Sasaki-Einstein via a rigidity criterion.
    SasakiEinstein,
    /// Reserved: criterion (iii) alone confirmed (eigenvalue range).
    RigidByCriterion1,
    /// Reserved: rank criterion alone confirmed.
    RigidByCriterion2,
    /// Constant scalar curvature equal to 4n: the theory excludes any
    /// complete soliton.
    NonexistentByTheory,
    /// Negative scalar curvature on the sample.
    ViolatesPositivity,
    Indeterminate,
}

/// Classification tolerances.
#[derive(Debug, Clone)]
pub struct ClassifyTolerances {
    /// stddev/mean threshold for "constant scalar curvature".
    pub constancy: f64,
    /// Eigenvalue clustering / rank-gap tolerance.
    pub cluster: f64,
    /// General residual tolerance (positivity scan, quantization).
    pub identity: f64,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        ClassifyTolerances {
            constancy: 1e-6,
            cluster: 1e-5,
            identity: 1e-6,
        }
    }
}

/// Soliton-hood evidence fed into the classification: the rigidity criteria
/// apply to verified solitons, not to bare Sasakian structures.
#[derive(Debug, Clone, Copy)]
pub struct SolitonEvidence {
    pub has_potential: bool,
    /// Max residual over the first-order soliton identities (n1)(i)-(iv),
    /// when evaluated.
    pub n1_max_residual: Option<f64>,
}

/// Classification result with its supporting evidence lines.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub verdict: ClassificationVerdict,
    pub evidence: Vec<String>,
    /// Mean scalar curvature over the sample.
    pub scalar_mean: f64,
    /// stddev/|mean| of the scalar curvature.
    pub scalar_relative_stddev: f64,
    /// Quantization slot for the mean scalar curvature, when it exists.
    pub quantized_k: Option<usize>,
}

/// Decide a verdict from per-point spectra. Pure function, usable with
/// synthetic spectrum streams.
pub fn classify_spectra(
    spectra: &[SpectrumReport],
    evidence_in: SolitonEvidence,
    n: usize,
    tols: &ClassifyTolerances,
) -> Result<Classification> {
    if spectra.is_empty() {
        return Err(Error::EmptySample);
    }
    let nf = n as f64;
    let scalars: Vec<f64> = spectra.iter().map(|s| s.scalar).collect();
    let mean = scalars.iter().sum::<f64>() / scalars.len() as f64;
    let var = scalars
        .iter()
        .map(|s| (s - mean) * (s - mean))
        .sum::<f64>()
        / scalars.len() as f64;
    let rel_stddev = var.sqrt() / mean.abs().max(1e-300);
    let constant = rel_stddev < tols.constancy;
    let min_scalar = scalars.iter().fold(f64::INFINITY, |m, &s| m.min(s));

    let mut evidence = Vec::new();
    evidence.push(format!(
        "scalar curvature mean {mean:.9}, relative stddev {rel_stddev:.3e} ({})",
        if constant { "constant" } else { "not constant" }
    ));

    // positivity scan first: every theorem in the classification assumes a
    // complete soliton, and those have positive scalar curvature
    if min_scalar < -tols.identity {
        evidence.push(format!("min scalar curvature {min_scalar:.9} < 0"));
        return Ok(Classification {
            verdict: ClassificationVerdict::ViolatesPositivity,
            evidence,
            scalar_mean: mean,
            scalar_relative_stddev: rel_stddev,
            quantized_k: None,
        });
    }

    if !constant {
        evidence.push("scalar curvature is not constant over the sample".into());
        return Ok(Classification {
            verdict: ClassificationVerdict::Indeterminate,
            evidence,
            scalar_mean: mean,
            scalar_relative_stddev: rel_stddev,
            quantized_k: None,
        });
    }

    let quantized_k = quantize_scalar(mean, n, tols.identity * (1.0 + mean.abs()));
    if let Some(k) = quantized_k {
        evidence.push(format!(
            "scalar curvature matches the quantized value for k = {k}"
        ));
    }

    // R = 4n (k = 1): no complete soliton exists with this constant value
    if (mean - 4.0 * nf).abs() < tols.identity * (1.0 + mean.abs()) {
        evidence.push(format!(
            "R = 4n = {:.6}: excluded by the constant-curvature classification (k = 1)",
            4.0 * nf
        ));
        return Ok(Classification {
            verdict: ClassificationVerdict::NonexistentByTheory,
            evidence,
            scalar_mean: mean,
            scalar_relative_stddev: rel_stddev,
            quantized_k,
        });
    }

    // the rigidity criteria need a verified soliton
    let soliton_ok = evidence_in.has_potential
        && evidence_in
            .n1_max_residual
            .is_some_and(|r| r < tols.identity.max(1e-6));
    if !soliton_ok {
        match evidence_in.n1_max_residual {
            Some(r) if evidence_in.has_potential => evidence.push(format!(
                "soliton identities not satisfied (max first-order residual {r:.3e}); \
                 rigidity criteria do not apply"
            )),
            _ => evidence.push(
                "no verified potential: rigidity criteria do not apply".to_string(),
            ),
        }
        return Ok(Classification {
            verdict: ClassificationVerdict::Indeterminate,
            evidence,
            scalar_mean: mean,
            scalar_relative_stddev: rel_stddev,
            quantized_k,
        });
    }

    // criterion 2: rank of Ric - g constant across the sample
    let rank0 = spectra[0].rank_ric_minus_g;
    let rank_constant = spectra.iter().all(|s| s.rank_ric_minus_g == rank0);
    if rank_constant {
        evidence.push(format!(
            "rank(Ric - g) = {rank0} constant across the sample (criterion: constant rank)"
        ));
        return Ok(Classification {
            verdict: ClassificationVerdict::SasakiEinstein,
            evidence,
            scalar_mean: mean,
            scalar_relative_stddev: rel_stddev,
            quantized_k,
        });
    }

    // criterion (iii): all eigenvalues within [1, 2n]
    if spectra.iter().all(|s| s.in_range_1_2n) {
        evidence.push("eigenvalues within [1, 2n] at every sampled point (criterion iii)".into());
        return Ok(Classification {
            verdict: ClassificationVerdict::SasakiEinstein,
            evidence,
            scalar_mean: mean,
            scalar_relative_stddev: rel_stddev,
            quantized_k,
        });
    }

    Ok(Classification {
        verdict: ClassificationVerdict::Indeterminate,
        evidence,
        scalar_mean: mean,
        scalar_relative_stddev: rel_stddev,
        quantized_k,
    })
}

/// Detect an eta-Einstein structure: Ric = lambda g + nu eta (x) eta with
/// constant lambda over the sample. Returns (lambda, nu) when it holds.
pub fn eta_einstein_constants(
    candidate: &SolitonCandidate,
    points: &[Vec<f64>],
    seed: u64,
    tol: f64,
) -> Result<Option<(f64, f64)>> {
    let s = &candidate.structure;
    let n = s.n();
    let fdim = 2 * n + 1;
    let per_point = crate::par::try_map_points(points, |_, p| {
        let sj = s.jets_at(p, 2)?;
        let frame = horizontal_frame_from_jets(s, &sj, p, seed)?;
        let rows = frame.full_rows();
        let ric = sj.bundle.ricci_jets()?.values();
        let dim = s.dim();
        let mut m = vec![0.0; fdim * fdim];
        for (a, ra) in rows.iter().enumerate() {
            for (b, rb) in rows.iter().enumerate() {
                let mut acc = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        acc += ric.get(&[i, j]) * ra[i] * rb[j];
                    }
                }
                m[a * fdim + b] = acc;
            }
        }
        Ok(m)
    })?;
    let mut lambda0: Option<f64> = None;
    for m in &per_point {
        let lambda = m[0];
        let nu = m[(fdim - 1) * fdim + (fdim - 1)] - lambda;
        // residual of Ric - lambda g - nu eta(x)eta in the frame
        let mut res = 0.0f64;
        for a in 0..fdim {
            for b in 0..fdim {
                let delta = if a == b { 1.0 } else { 0.0 };
                let ee = if a == fdim - 1 && b == fdim - 1 { 1.0 } else { 0.0 };
                res = res.max((m[a * fdim + b] - lambda * delta - nu * ee).abs());
            }
        }
        if res > tol {
            return Ok(None);
        }
        match lambda0 {
            None => lambda0 = Some(lambda),
            Some(l0) if (l0 - lambda).abs() > tol * (1.0 + l0.abs()) => return Ok(None),
            _ => {}
        }
    }
    let lambda = lambda0.expect("non-empty sample");
    Ok(Some((lambda, 2.0 * n as f64 - lambda)))
}

/// Structured note about the extremal quantized scalar values.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalValueNote {
    pub r_value: f64,
    pub n: usize,
    pub classification: String,
    pub expectation: String,
}

/// Reports the consequence of an extremal constant scalar value:
/// R = 4n^2+2n or 4n^2+1 force Sasaki-Einstein; R = 4n is excluded and
/// would force Ric^T = 3 g^T.
pub fn extremal_value_report(r_value: f64, n: usize) -> ExtremalValueNote {
    let nf = n as f64;
    let tol = 1e-9 * (1.0 + r_value.abs());
    if (r_value - (4.0 * nf * nf + 2.0 * nf)).abs() < tol {
        ExtremalValueNote {
            r_value,
            n,
            classification: "Sasaki-Einstein (k = 2n+1 extremal)".into(),
            expectation: "Ric^T = (2n+2) g^T expected".into(),
        }
    } else if (r_value - (4.0 * nf * nf + 1.0)).abs() < tol {
        ExtremalValueNote {
            r_value,
            n,
            classification: "Sasaki-Einstein (k = 2n extremal)".into(),
            expectation: "sum of squared deviations (R_j - 2n)^2 vanishes".into(),
        }
    } else if (r_value - 4.0 * nf).abs() < tol {
        ExtremalValueNote {
            r_value,
            n,
            classification: "nonexistent (k = 1)".into(),
            expectation: "would force Ric^T = 3 g^T".into(),
        }
    } else {
        ExtremalValueNote {
            r_value,
            n,
            classification: "non-extremal".into(),
            expectation: "no extremal consequence".into(),
        }
    }
}

/// Classify a candidate from sampled spectra plus quick first-order soliton
/// evidence.
pub fn classify(
    candidate: &SolitonCandidate,
    points: &[Vec<f64>],
    seed: u64,
    tols: &ClassifyTolerances,
) -> Result<(Classification, Vec<SpectrumReport>)> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let spectra: Vec<SpectrumReport> = crate::par::try_map_points(points, |_, p| {
        ricci_spectrum(candidate, p, seed, tols.cluster)
    })?;
    // first-order soliton evidence: residuals of (n1)(i)-(iv)
    let n1_max_residual = if candidate.psi.is_some() {
        let opts = crate::identities::RegistryOptions {
            tol: tols.identity,
            ..Default::default()
        };
        let ids = ["soliton.n1.i", "soliton.n1.ii", "soliton.n1.iii", "soliton.n1.iv"];
        let reports =
            crate::identities::run_selected(&ids, candidate, points, seed, &opts)?;
        Some(
            reports
                .iter()
                .filter_map(|r| r.max_residual)
                .fold(0.0f64, f64::max),
        )
    } else {
        None
    };
    let evidence = SolitonEvidence {
        has_potential: candidate.psi.is_some(),
        n1_max_residual,
    };
    let mut classification =
        classify_spectra(&spectra, evidence, candidate.structure.n(), tols)?;
    // eta-Einstein side note for the indeterminate (or any) verdict
    if let Some((lambda, nu)) =
        eta_einstein_constants(candidate, points, seed, 1e-6)?
    {
        classification.evidence.push(format!(
            "eta-Einstein detected: Ric = {lambda:.6} g + {nu:.6} eta(x)eta, constant over the sample"
        ));
    }
    Ok((classification, spectra))
}
