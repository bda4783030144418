//! The identity registry: every numbered soliton identity, inequality and
//! constancy check, evaluated as point-sampled residuals.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::CoordExpr;
use crate::identities::eval::{point_eval, PointEval, WEIGHTED_DRIFT_SIGN};
use crate::sasaki::SolitonCandidate;

/// What an identity asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityKind {
    TensorEquality,
    ScalarEquality,
    Inequality,
    Constancy,
}

/// Registry metadata for one identity.
#[derive(Debug, Clone)]
pub struct IdentitySpec {
    /// Stable public id, e.g. `soliton.n1.i`.
    pub id: &'static str,
    pub kind: IdentityKind,
    /// Equation tag within the identity families (n1), (s1), (a..).
    pub tag: &'static str,
    pub description: &'static str,
    /// Metric jet order needed (2..=4).
    pub required_g_order: usize,
    /// Whether the identity needs a potential.
    pub needs_psi: bool,
}

/// The registry, in declared (report) order.
pub fn registry() -> &'static [IdentitySpec] {
    const R: &[IdentitySpec] = &[
        IdentitySpec {
            id: "soliton.n1.i",
            kind: IdentityKind::TensorEquality,
            tag: "(n1)(i)",
            description: "R_jk - 2n g_jk + psi_jk on the contact bundle",
            required_g_order: 2,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.n1.ii",
            kind: IdentityKind::ScalarEquality,
            tag: "(n1)(ii)",
            description: "R + Delta_B psi - (4n^2 + 2n)",
            required_g_order: 2,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.n1.iii",
            kind: IdentityKind::TensorEquality,
            tag: "(n1)(iii)",
            description: "R_,i - 2 R_ij psi_j + 2 psi_i",
            required_g_order: 3,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.n1.iv",
            kind: IdentityKind::Constancy,
            tag: "(n1)(iv)",
            description: "constancy of R + |grad psi|^2 - (4n-2) psi; fits C1 when not supplied",
            required_g_order: 2,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.n1.v",
            kind: IdentityKind::ScalarEquality,
            tag: "(n1)(v)",
            description: "Delta_B R^T + 2|Ric_D|^2 - 2(2n+1)R + 4n(4n+1) - g(grad R^T, grad psi)",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.n1.v.weighted",
            kind: IdentityKind::ScalarEquality,
            tag: "(n1)(v) weighted",
            description: "Delta_{B,psi} R^T + 2|Ric^T|^2 - 2(2n+5)R^T + 24n(n+1)",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "norm.ricD",
            kind: IdentityKind::ScalarEquality,
            tag: "|Ric_D|^2 expansion",
            description: "|Ric_D|^2 - (|Ric^T|^2 + 8n - 4R^T)",
            required_g_order: 2,
            needs_psi: false,
        },
        IdentitySpec {
            id: "soliton.s1.i",
            kind: IdentityKind::TensorEquality,
            tag: "(s1)(i)",
            description: "R_ijkl,i = R_ijkl psi_i and R_ijkl,i = R_jk,l - R_jl,k (both)",
            required_g_order: 3,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.s1.ii",
            kind: IdentityKind::TensorEquality,
            tag: "(s1)(ii)",
            description: "R_ijkl psi_j psi_k + R_,il/2 + psi_il - R_il,p psi_p - 2n R_il + R_ip R_pl",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.s1.iii",
            kind: IdentityKind::TensorEquality,
            tag: "(s1)(iii)",
            description: "Delta_{B,psi} R_ijkl - (4n-2) R_ijkl - 2(R_ipkq R_jplq - R_iplq R_jpkq) - R_pqij R_pqkl",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.s1.iv",
            kind: IdentityKind::TensorEquality,
            tag: "(s1)(iv)",
            description: "Delta_{B,psi} R_il - 4n(R_il - g_il) - 2 R_pq R_iplq",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "soliton.s1.v",
            kind: IdentityKind::Inequality,
            tag: "(s1)(v)",
            description: "min over points of R psi under the C1 = 0 normalization; candidate C3 > 0",
            required_g_order: 2,
            needs_psi: true,
        },
        IdentitySpec {
            id: "rigid.a3",
            kind: IdentityKind::ScalarEquality,
            tag: "(a3)",
            description: "Delta_{B,psi} R / 2 - tr((Ric_D - g^T)(2n g^T - Ric_D))",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "rigid.a4",
            kind: IdentityKind::TensorEquality,
            tag: "(a4)",
            description: "R(e_k, grad^T psi, grad^T psi, e_i) - [-R_,ik/2 + (R_ij - g_ij)(2n g_jk - R_jk) + R_ik,j psi_j]",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "rigid.radialflat",
            kind: IdentityKind::TensorEquality,
            tag: "criterion (ii)",
            description: "norm of R(., grad^T psi, grad^T psi, .) on the contact bundle",
            required_g_order: 2,
            needs_psi: true,
        },
        IdentitySpec {
            id: "rigid.a8",
            kind: IdentityKind::ScalarEquality,
            tag: "(a8)",
            description: "Delta_{B,psi} R / 2 + |Ric_D - (R_D/2n) g^T|^2 - (R-4n)(2n(2n+1)-R)/(2n)",
            required_g_order: 4,
            needs_psi: true,
        },
        IdentitySpec {
            id: "lemma1",
            kind: IdentityKind::TensorEquality,
            tag: "transverse-to-full soliton lemma",
            description: "Ric + (lambda+2) g - (lambda+2n+2) eta(x)eta + L_V g^T / 2 (default V = 0, lambda = -(2n+2))",
            required_g_order: 2,
            needs_psi: false,
        },
        IdentitySpec {
            id: "ineq.cauchyschwarz",
            kind: IdentityKind::Inequality,
            tag: "R^2 bound",
            description: "R^2 <= 2n |Ric_D|^2 + 4nR + 12n^2",
            required_g_order: 2,
            needs_psi: false,
        },
        IdentitySpec {
            id: "ineq.positivity",
            kind: IdentityKind::Inequality,
            tag: "scalar positivity scan",
            description: "min of R over the sample (positivity conclusion scan)",
            required_g_order: 2,
            needs_psi: false,
        },
        IdentitySpec {
            id: "ineq.gradpsi",
            kind: IdentityKind::Inequality,
            tag: "gradient bound",
            description: "|grad psi| <= sqrt(4n-2) sqrt(psi + C2), needs psi + C2 >= 0",
            required_g_order: 2,
            needs_psi: true,
        },
        IdentitySpec {
            id: "ineq.basepoint",
            kind: IdentityKind::Inequality,
            tag: "(p1)",
            description: "0 <= (4n-2) psi(y) + C1 <= 4n^2 + 2n at the sampled minimizer y",
            required_g_order: 2,
            needs_psi: true,
        },
    ];
    R
}

pub fn find_spec(id: &str) -> Result<&'static IdentitySpec> {
    registry()
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Outcome of one identity over a point sample.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityResidualReport {
    pub id: String,
    pub points: usize,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    /// Auxiliary named values (fitted constants, margins, minima).
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionUnmet,
}

/// Options for registry runs.
#[derive(Debug, Clone)]
pub struct RegistryOptions {
    /// Residual tolerance for pass/fail.
    pub tol: f64,
    /// Basicness tolerance for the potential.
    pub basic_tol: f64,
    /// lambda for `lemma1` (default -(2n+2), the Sasaki-Ricci normalization).
    pub lemma1_lambda: Option<f64>,
    /// Optional vector field V for `lemma1` (default zero field).
    pub lemma1_v: Option<Vec<CoordExpr>>,
}

impl Default for RegistryOptions {
    fn default() -> Self {
        RegistryOptions {
            tol: 1e-6,
            basic_tol: 1e-8,
            lemma1_lambda: None,
            lemma1_v: None,
        }
    }
}

/// Shared cross-point context: the normalization constants.
pub struct RunContext {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c1_fitted: bool,
}

/// Compute C1 (and C2 = C1/(4n-2)) from the candidate: use the supplied
/// value when present, otherwise the least-squares fit of the constant in
/// R + |grad psi|^2 - (4n-2) psi over the sample (its mean).
pub fn normalization_constants(
    candidate: &SolitonCandidate,
    evals: &[PointEval],
) -> RunContext {
    let n = candidate.structure.n() as f64;
    match (&candidate.psi, candidate.c1) {
        (_, Some(c1)) => RunContext {
            c1: Some(c1),
            c2: Some(c1 / (4.0 * n - 2.0)),
            c1_fitted: false,
        },
        (Some(_), None) => {
            let vals: Vec<f64> = evals
                .iter()
                .filter_map(|e| {
                    e.psi
                        .as_ref()
                        .map(|p| e.scal + p.grad_norm2 - (4.0 * n - 2.0) * p.val)
                })
                .collect();
            if vals.is_empty() {
                return RunContext {
                    c1: None,
                    c2: None,
                    c1_fitted: false,
                };
            }
            let c1 = vals.iter().sum::<f64>() / vals.len() as f64;
            RunContext {
                c1: Some(c1),
                c2: Some(c1 / (4.0 * n - 2.0)),
                c1_fitted: true,
            }
        }
        (None, None) => RunContext {
            c1: None,
            c2: None,
            c1_fitted: false,
        },
    }
}

fn frobenius(comps: &[f64]) -> f64 {
    comps.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Per-point residual of one identity; `None` when the identity is a
/// whole-sample check handled in `finalize`.
fn point_residual(
    spec: &IdentitySpec,
    e: &PointEval,
    ctx: &RunContext,
    opts: &RegistryOptions,
    lie_v: Option<&[f64]>,
) -> Option<f64> {
    let n = e.n as f64;
    let h = e.hdim;
    let f = e.fdim;
    match spec.id {
        "soliton.n1.i" => {
            let p = e.psi.as_ref()?;
            let mut comps = Vec::with_capacity(h * h);
            for a in 0..h {
                for b in 0..h {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    comps.push(e.ric_at(a, b) - 2.0 * n * delta + p.hess[a * f + b]);
                }
            }
            Some(frobenius(&comps))
        }
        "soliton.n1.ii" => {
            let p = e.psi.as_ref()?;
            Some((e.scal + p.lap_b - (4.0 * n * n + 2.0 * n)).abs())
        }
        "soliton.n1.iii" => {
            let p = e.psi.as_ref()?;
            let d1 = e.scal_d1.as_ref()?;
            let mut comps = Vec::with_capacity(h);
            for a in 0..h {
                let mut ric_psi = 0.0;
                for b in 0..h {
                    ric_psi += e.ric_at(a, b) * p.d1[b];
                }
                comps.push(d1[a] - 2.0 * ric_psi + 2.0 * p.d1[a]);
            }
            Some(frobenius(&comps))
        }
        "soliton.n1.iv" => {
            let p = e.psi.as_ref()?;
            let c1 = ctx.c1?;
            Some((e.scal + p.grad_norm2 - (4.0 * n - 2.0) * p.val - c1).abs())
        }
        "soliton.n1.v" => {
            let p = e.psi.as_ref()?;
            let lap = e.scal_lap_b?;
            let d1 = e.scal_d1.as_ref()?;
            let drift: f64 = (0..h).map(|a| d1[a] * p.d1[a]).sum();
            Some(
                (lap + 2.0 * e.ric_d_norm2() - 2.0 * (2.0 * n + 1.0) * e.scal
                    + 4.0 * n * (4.0 * n + 1.0)
                    - drift)
                    .abs(),
            )
        }
        "soliton.n1.v.weighted" => {
            let w = e.scal_lap_b_weighted()?;
            let rt = e.scal_t();
            Some(
                (w + 2.0 * e.ric_t_norm2() - 2.0 * (2.0 * n + 5.0) * rt
                    + 24.0 * n * (n + 1.0))
                    .abs(),
            )
        }
        "norm.ricD" => Some(
            (e.ric_d_norm2() - (e.ric_t_norm2() + 8.0 * n - 4.0 * e.scal_t())).abs(),
        ),
        "soliton.s1.i" => {
            let p = e.psi.as_ref()?;
            e.riem_d1.as_ref()?;
            e.ric_d1.as_ref()?;
            let mut t1 = Vec::with_capacity(h * h * h);
            let mut t2 = Vec::with_capacity(h * h * h);
            for j in 0..h {
                for k in 0..h {
                    for l in 0..h {
                        let mut div = 0.0;
                        let mut rpsi = 0.0;
                        for i in 0..h {
                            div += e.riem_d1_at(i, j, k, l, i);
                            rpsi += e.riem_at(i, j, k, l) * p.d1[i];
                        }
                        t1.push(div - rpsi);
                        t2.push(div - (e.ric_d1_at(j, k, l) - e.ric_d1_at(j, l, k)));
                    }
                }
            }
            Some(frobenius(&t1).max(frobenius(&t2)))
        }
        "soliton.s1.ii" => {
            let p = e.psi.as_ref()?;
            let d2 = e.scal_d2.as_ref()?;
            e.ric_d1.as_ref()?;
            let mut comps = Vec::with_capacity(h * h);
            for i in 0..h {
                for l in 0..h {
                    let mut rpp = 0.0;
                    for j in 0..h {
                        for k in 0..h {
                            rpp += e.riem_at(i, j, k, l) * p.d1[j] * p.d1[k];
                        }
                    }
                    let mut ric_d_psi = 0.0;
                    let mut ric_sq = 0.0;
                    for q in 0..h {
                        ric_d_psi += e.ric_d1_at(i, l, q) * p.d1[q];
                        ric_sq += e.ric_at(i, q) * e.ric_at(q, l);
                    }
                    comps.push(
                        rpp + 0.5 * d2[i * f + l] + p.hess[i * f + l]
                            - ric_d_psi
                            - 2.0 * n * e.ric_at(i, l)
                            + ric_sq,
                    );
                }
            }
            Some(frobenius(&comps))
        }
        "soliton.s1.iii" => {
            let p = e.psi.as_ref()?;
            let lap = e.riem_lap_b.as_ref()?;
            e.riem_d1.as_ref()?;
            let mut comps = Vec::with_capacity(h * h * h * h);
            for i in 0..h {
                for j in 0..h {
                    for k in 0..h {
                        for l in 0..h {
                            let mut drift = 0.0;
                            for a in 0..h {
                                drift += e.riem_d1_at(i, j, k, l, a) * p.d1[a];
                            }
                            let weighted = lap
                                [((i * f + j) * f + k) * f + l]
                                + WEIGHTED_DRIFT_SIGN * drift;
                            let mut quad = 0.0;
                            let mut pair = 0.0;
                            for pp in 0..h {
                                for q in 0..h {
                                    quad += e.riem_at(i, pp, k, q) * e.riem_at(j, pp, l, q)
                                        - e.riem_at(i, pp, l, q) * e.riem_at(j, pp, k, q);
                                    pair += e.riem_at(pp, q, i, j) * e.riem_at(pp, q, k, l);
                                }
                            }
                            comps.push(
                                weighted - (4.0 * n - 2.0) * e.riem_at(i, j, k, l)
                                    - 2.0 * quad
                                    - pair,
                            );
                        }
                    }
                }
            }
            Some(frobenius(&comps))
        }
        "soliton.s1.iv" => {
            let p = e.psi.as_ref()?;
            let lap = e.ric_lap_b.as_ref()?;
            e.ric_d1.as_ref()?;
            let mut comps = Vec::with_capacity(h * h);
            for i in 0..h {
                for l in 0..h {
                    let mut drift = 0.0;
                    for a in 0..h {
                        drift += e.ric_d1_at(i, l, a) * p.d1[a];
                    }
                    let weighted = lap[i * f + l] + WEIGHTED_DRIFT_SIGN * drift;
                    let delta = if i == l { 1.0 } else { 0.0 };
                    let mut quad = 0.0;
                    for pp in 0..h {
                        for q in 0..h {
                            quad += e.ric_at(pp, q) * e.riem_at(i, pp, l, q);
                        }
                    }
                    comps.push(weighted - 4.0 * n * (e.ric_at(i, l) - delta) - 2.0 * quad);
                }
            }
            Some(frobenius(&comps))
        }
        "soliton.s1.v" => {
            let p = e.psi.as_ref()?;
            let c2 = ctx.c2?;
            let shifted = p.val - c2;
            let w = e.scal * shifted;
            Some((-w).max(0.0))
        }
        "rigid.a3" => {
            let w = e.scal_lap_b_weighted()?;
            let mut tr = 0.0;
            for a in 0..h {
                for b in 0..h {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    tr += (e.ric_at(a, b) - delta) * (2.0 * n * delta - e.ric_at(a, b));
                }
            }
            Some((0.5 * w - tr).abs())
        }
        "rigid.a4" => {
            let p = e.psi.as_ref()?;
            let d2 = e.scal_d2.as_ref()?;
            e.ric_d1.as_ref()?;
            let mut comps = Vec::with_capacity(h * h);
            for k in 0..h {
                for i in 0..h {
                    let mut lhs = 0.0;
                    for b in 0..h {
                        for c in 0..h {
                            lhs += e.riem_at(k, b, c, i) * p.d1[b] * p.d1[c];
                        }
                    }
                    let mut prod = 0.0;
                    let mut ric_d_psi = 0.0;
                    for j in 0..h {
                        let dij = if i == j { 1.0 } else { 0.0 };
                        let djk = if j == k { 1.0 } else { 0.0 };
                        prod += (e.ric_at(i, j) - dij) * (2.0 * n * djk - e.ric_at(j, k));
                        ric_d_psi += e.ric_d1_at(i, k, j) * p.d1[j];
                    }
                    let rhs = -0.5 * d2[i * f + k] + prod + ric_d_psi;
                    comps.push(lhs - rhs);
                }
            }
            Some(frobenius(&comps))
        }
        "rigid.radialflat" => {
            let p = e.psi.as_ref()?;
            let mut comps = Vec::with_capacity(h * h);
            for k in 0..h {
                for i in 0..h {
                    let mut v = 0.0;
                    for b in 0..h {
                        for c in 0..h {
                            v += e.riem_at(k, b, c, i) * p.d1[b] * p.d1[c];
                        }
                    }
                    comps.push(v);
                }
            }
            Some(frobenius(&comps))
        }
        "rigid.a8" => {
            let w = e.scal_lap_b_weighted()?;
            let r_d = e.scal - 2.0 * n;
            let mut devi = 0.0;
            for a in 0..h {
                for b in 0..h {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    let v = e.ric_at(a, b) - r_d / (2.0 * n) * delta;
                    devi += v * v;
                }
            }
            let last = (e.scal - 4.0 * n) * (2.0 * n * (2.0 * n + 1.0) - e.scal) / (2.0 * n);
            Some((0.5 * w + devi - last).abs())
        }
        "lemma1" => {
            let lambda = opts.lemma1_lambda.unwrap_or(-(2.0 * n + 2.0));
            let mut comps = Vec::with_capacity(f * f);
            for a in 0..f {
                for b in 0..f {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    let eta_a = if a == f - 1 { 1.0 } else { 0.0 };
                    let eta_b = if b == f - 1 { 1.0 } else { 0.0 };
                    let mut v = e.ric_at(a, b) + (lambda + 2.0) * delta
                        - (lambda + 2.0 * n + 2.0) * eta_a * eta_b;
                    if let Some(lie) = lie_v {
                        // transverse Lie term restricted to the contact bundle
                        if a < h && b < h {
                            v += 0.5 * lie[a * f + b];
                        }
                    }
                    comps.push(v);
                }
            }
            Some(frobenius(&comps))
        }
        "ineq.cauchyschwarz" => {
            let lhs = e.scal * e.scal;
            let rhs = 2.0 * n * e.ric_d_norm2() + 4.0 * n * e.scal + 12.0 * n * n;
            Some((lhs - rhs).max(0.0))
        }
        "ineq.positivity" => Some((-e.scal).max(0.0)),
        "ineq.gradpsi" => {
            let p = e.psi.as_ref()?;
            let c2 = ctx.c2?;
            let shifted = p.val + c2;
            if shifted < 0.0 {
                // handled as precondition in finalize; report its magnitude
                return Some(f64::NAN);
            }
            Some((p.grad_norm2.sqrt() - (4.0 * n - 2.0).sqrt() * shifted.sqrt()).max(0.0))
        }
        "ineq.basepoint" => None, // whole-sample check in finalize
        other => unreachable!("unknown identity {other}"),
    }
}

/// Run a set of identities over a pre-evaluated sample.
#[allow(clippy::too_many_arguments)]
fn run_over_evals(
    specs: &[&'static IdentitySpec],
    candidate: &SolitonCandidate,
    evals: &[PointEval],
    ctx: &RunContext,
    opts: &RegistryOptions,
    points: &[Vec<f64>],
) -> Result<Vec<IdentityResidualReport>> {
    let n = candidate.structure.n() as f64;
    let has_psi = candidate.psi.is_some();
    let mut reports = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut notes = Vec::new();
        let mut values = BTreeMap::new();
        if spec.needs_psi && !has_psi {
            reports.push(IdentityResidualReport {
                id: spec.id.to_string(),
                points: evals.len(),
                max_residual: None,
                mean_residual: None,
                tolerance: opts.tol,
                verdict: Verdict::PreconditionUnmet,
                notes: vec!["candidate has no potential".into()],
                values,
            });
            continue;
        }
        if (spec.id == "soliton.s1.v"
            || spec.id == "ineq.gradpsi"
            || spec.id == "ineq.basepoint"
            || spec.id == "soliton.n1.iv")
            && ctx.c1.is_none()
        {
            reports.push(IdentityResidualReport {
                id: spec.id.to_string(),
                points: evals.len(),
                max_residual: None,
                mean_residual: None,
                tolerance: opts.tol,
                verdict: Verdict::PreconditionUnmet,
                notes: vec!["no normalization constant C1 available".into()],
                values,
            });
            continue;
        }

        // lemma1 Lie term, evaluated per point when V is supplied
        let lie_frames: Option<Vec<Vec<f64>>> = match (&opts.lemma1_v, spec.id) {
            (Some(v), "lemma1") => {
                let mut all = Vec::with_capacity(points.len());
                for p in points {
                    let lie =
                        crate::tensor::lie_derivative(candidate.structure.metric(), v, p)?;
                    // convert to frame components
                    let sjets = candidate.structure.jets_at(p, 1)?;
                    let frame = crate::sasaki::frame::horizontal_frame_from_jets(
                        &candidate.structure,
                        &sjets,
                        p,
                        0xF3A7,
                    )?;
                    let rows = frame.full_rows();
                    let fdim = rows.len();
                    let mut out = vec![0.0; fdim * fdim];
                    for (a, ra) in rows.iter().enumerate() {
                        for (b, rb) in rows.iter().enumerate() {
                            let mut acc = 0.0;
                            for i in 0..candidate.structure.dim() {
                                for j in 0..candidate.structure.dim() {
                                    acc += lie.get(&[i, j]) * ra[i] * rb[j];
                                }
                            }
                            out[a * fdim + b] = acc;
                        }
                    }
                    all.push(out);
                }
                Some(all)
            }
            _ => None,
        };

        match spec.id {
            "ineq.basepoint" => {
                let c1 = ctx.c1.expect("checked above");
                let (y_idx, psi_min) = evals
                    .iter()
                    .enumerate()
                    .filter_map(|(i, e)| e.psi.as_ref().map(|p| (i, p.val)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty sample with psi");
                let b = (4.0 * n - 2.0) * psi_min + c1;
                let upper = 4.0 * n * n + 2.0 * n;
                let violation = (-b).max(b - upper).max(0.0);
                values.insert("basepoint_value".into(), b);
                values.insert("psi_min".into(), psi_min);
                values.insert("upper_bound".into(), upper);
                values.insert("minimizer_index".into(), y_idx as f64);
                let verdict = if violation < opts.tol {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                reports.push(IdentityResidualReport {
                    id: spec.id.to_string(),
                    points: evals.len(),
                    max_residual: Some(violation),
                    mean_residual: Some(violation),
                    tolerance: opts.tol,
                    verdict,
                    notes,
                    values,
                });
                continue;
            }
            "soliton.n1.iv" => {
                let c1 = ctx.c1.expect("checked above");
                values.insert("c1".into(), c1);
                values.insert("c2".into(), ctx.c2.expect("set with c1"));
                notes.push(if ctx.c1_fitted {
                    "C1 fitted by least squares over the sample".into()
                } else {
                    "C1 supplied by the candidate".into()
                });
            }
            "soliton.s1.v" => {
                values.insert("c2_shift".into(), ctx.c2.expect("checked above"));
            }
            _ => {}
        }

        // gradpsi precondition: psi + C2 >= 0 everywhere
        if spec.id == "ineq.gradpsi" {
            let c2 = ctx.c2.expect("checked above");
            let bad = evals
                .iter()
                .filter_map(|e| e.psi.as_ref())
                .any(|p| p.val + c2 < -opts.tol);
            if bad {
                reports.push(IdentityResidualReport {
                    id: spec.id.to_string(),
                    points: evals.len(),
                    max_residual: None,
                    mean_residual: None,
                    tolerance: opts.tol,
                    verdict: Verdict::PreconditionUnmet,
                    notes: vec!["psi + C2 is negative somewhere on the sample".into()],
                    values,
                });
                continue;
            }
        }

        let mut residuals = Vec::with_capacity(evals.len());
        for (i, e) in evals.iter().enumerate() {
            let r = point_residual(
                spec,
                e,
                ctx,
                opts,
                lie_frames.as_ref().map(|l| l[i].as_slice()),
            );
            match r {
                Some(v) if v.is_nan() => {
                    residuals.clear();
                    break;
                }
                Some(v) => residuals.push(v),
                None => {}
            }
        }
        if residuals.is_empty() {
            reports.push(IdentityResidualReport {
                id: spec.id.to_string(),
                points: evals.len(),
                max_residual: None,
                mean_residual: None,
                tolerance: opts.tol,
                verdict: Verdict::PreconditionUnmet,
                notes: vec!["per-point evaluation unavailable".into()],
                values,
            });
            continue;
        }
        let max = residuals.iter().fold(0.0f64, |m, &r| m.max(r));
        let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;

        // identity-specific extra values and notes
        match spec.id {
            "ineq.positivity" => {
                let min_scal = evals
                    .iter()
                    .map(|e| e.scal)
                    .fold(f64::INFINITY, f64::min);
                values.insert("min_scalar".into(), min_scal);
                if min_scal < -opts.tol {
                    notes.push(
                        "negative scalar curvature conflicts with the positivity theorem \
                         for complete Sasaki-Ricci solitons; the candidate cannot be one"
                            .into(),
                    );
                }
            }
            "ineq.cauchyschwarz" => {
                let min_margin = evals
                    .iter()
                    .map(|e| {
                        let n = e.n as f64;
                        2.0 * n * e.ric_d_norm2() + 4.0 * n * e.scal + 12.0 * n * n
                            - e.scal * e.scal
                    })
                    .fold(f64::INFINITY, f64::min);
                values.insert("min_margin".into(), min_margin);
            }
            "soliton.s1.v" => {
                let c2 = ctx.c2.expect("checked above");
                let min_w = evals
                    .iter()
                    .filter_map(|e| e.psi.as_ref().map(|p| e.scal * (p.val - c2)))
                    .fold(f64::INFINITY, f64::min);
                values.insert("c3_candidate".into(), min_w);
            }
            "ineq.gradpsi" => {
                let c2 = ctx.c2.expect("checked above");
                let n = candidate.structure.n() as f64;
                let min_margin = evals
                    .iter()
                    .filter_map(|e| {
                        e.psi.as_ref().map(|p| {
                            (4.0 * n - 2.0).sqrt() * (p.val + c2).max(0.0).sqrt()
                                - p.grad_norm2.sqrt()
                        })
                    })
                    .fold(f64::INFINITY, f64::min);
                values.insert("min_margin".into(), min_margin);
            }
            _ => {}
        }

        let verdict = if max < opts.tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        reports.push(IdentityResidualReport {
            id: spec.id.to_string(),
            points: evals.len(),
            max_residual: Some(max),
            mean_residual: Some(mean),
            tolerance: opts.tol,
            verdict,
            notes,
            values,
        });
    }
    Ok(reports)
}

/// Run a selected list of identity ids (registry order preserved).
pub fn run_selected(
    ids: &[&str],
    candidate: &SolitonCandidate,
    points: &[Vec<f64>],
    seed: u64,
    opts: &RegistryOptions,
) -> Result<Vec<IdentityResidualReport>> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut specs: Vec<&'static IdentitySpec> = Vec::with_capacity(ids.len());
    for id in ids {
        specs.push(find_spec(id)?);
    }
    candidate.require_basic(points, opts.basic_tol)?;
    let has_psi = candidate.psi.is_some();
    let g_order = specs
        .iter()
        .filter(|s| has_psi || !s.needs_psi)
        .map(|s| s.required_g_order)
        .max()
        .unwrap_or(2);
    let evals: Vec<PointEval> = crate::par::try_map_points(points, |_, p| {
        point_eval(candidate, p, seed, g_order)
    })?;
    let ctx = normalization_constants(candidate, &evals);
    run_over_evals(&specs, candidate, &evals, &ctx, opts, points)
}

/// Run one identity.
pub fn run_identity(
    id: &str,
    candidate: &SolitonCandidate,
    points: &[Vec<f64>],
    seed: u64,
    opts: &RegistryOptions,
) -> Result<IdentityResidualReport> {
    let mut reports = run_selected(&[id], candidate, points, seed, opts)?;
    Ok(reports.remove(0))
}

/// Run the full registry in declared order.
pub fn run_all(
    candidate: &SolitonCandidate,
    points: &[Vec<f64>],
    seed: u64,
    opts: &RegistryOptions,
) -> Result<Vec<IdentityResidualReport>> {
    let ids: Vec<&str> = registry().iter().map(|s| s.id).collect();
    run_selected(&ids, candidate, points, seed, opts)
}
