//! Shipped closed-form Sasakian fixtures and the manifold file loader.

pub mod manifest;

pub use manifest::{load_manifold, load_manifold_str, LoadedManifold};

use crate::error::{Error, Result};
use crate::expr::{BinOp, CoordExpr};
use crate::sasaki::{horizontal_frame, SasakianStructure, SolitonCandidate};
use crate::tensor::{CurvatureJets, MetricSpec};

const SPHERE3: &str = include_str!("manifests/sphere3.manifold");
const SPHERE5: &str = include_str!("manifests/sphere5.manifold");
const HEISENBERG3: &str = include_str!("manifests/heisenberg3.manifold");
const HEISENBERG5: &str = include_str!("manifests/heisenberg5.manifold");

/// A shipped fixture: candidate (structure + optional potential) plus notes
/// recorded at construction time.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub candidate: SolitonCandidate,
    pub notes: Vec<String>,
}

impl Fixture {
    pub fn structure(&self) -> &SasakianStructure {
        &self.candidate.structure
    }
}

/// Catalog of shipped fixture names with one-line descriptions.
pub fn fixture_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "sphere3",
            "round unit S^3, stereographic chart; trivial soliton psi = 3",
        ),
        (
            "sphere5",
            "round unit S^5, stereographic chart; trivial soliton psi = 10/3",
        ),
        (
            "sphere3.dhom(a)",
            "D-homothetic deformation of sphere3: g_a = a g + (a^2-a) eta(x)eta; eta-Einstein, non-Einstein for a != 1",
        ),
        (
            "heisenberg3",
            "Heisenberg R^3, transversely flat diagnostic with solved Gaussian potential; scalar curvature -2",
        ),
        (
            "heisenberg5",
            "Heisenberg R^5, transversely flat diagnostic with solved Gaussian potential; scalar curvature -4",
        ),
    ]
}

/// Raw manifold text for the named fixture (the D-homothetic family is
/// generated programmatically and has no static manifest).
pub fn fixture_manifest_text(name: &str) -> Option<&'static str> {
    match name {
        "sphere3" => Some(SPHERE3),
        "sphere5" => Some(SPHERE5),
        "heisenberg3" => Some(HEISENBERG3),
        "heisenberg5" => Some(HEISENBERG5),
        _ => None,
    }
}

/// Build a fixture by name. Accepts `sphere3`, `sphere5`, `heisenberg3`,
/// `heisenberg5` and the family `sphere3.dhom(a)` with `a > 0`.
pub fn fixture(name: &str) -> Result<Fixture> {
    if let Some(arg) = name
        .strip_prefix("sphere3.dhom(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let a: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::UnknownFixture(name.to_string()))?;
        return dhom_fixture(a);
    }
    match name {
        "sphere3" => sphere_fixture(SPHERE3, 1.2, Some(std::f64::consts::PI)),
        "sphere5" => sphere_fixture(SPHERE5, 0.9, Some(std::f64::consts::PI)),
        "heisenberg3" | "heisenberg5" => heisenberg_fixture(name),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn sphere_fixture(text: &str, sample_half_width: f64, bound: Option<f64>) -> Result<Fixture> {
    let loaded = load_manifold_str(text)?;
    let dim = loaded.structure.dim();
    let mut structure = loaded
        .structure
        .with_sample_box(vec![(-sample_half_width, sample_half_width); dim]);
    if let Some(b) = bound {
        structure = structure.with_minimality_bound(b);
    }
    let psi = loaded.psi.expect("sphere manifests carry a potential");
    Ok(Fixture {
        name: structure.name().to_string(),
        candidate: SolitonCandidate::with_potential(structure, psi, None),
        notes: loaded.warnings,
    })
}

fn heisenberg_fixture(name: &str) -> Result<Fixture> {
    let text = fixture_manifest_text(name).expect("known heisenberg name");
    let loaded = load_manifold_str(text)?;
    let dim = loaded.structure.dim();
    let n = loaded.structure.n();
    let structure = loaded
        .structure
        .with_sample_box(vec![(-1.0, 1.0); dim])
        .with_minimality_bound(3.2);

    // base potential sum_i (x_i^2 + y_i^2): all coordinates except the last
    let names = structure.metric().chart().names().to_vec();
    let mut base: Option<CoordExpr> = None;
    for i in 0..dim - 1 {
        let sq = CoordExpr::bin(BinOp::Pow, CoordExpr::coord(i), CoordExpr::num(2.0));
        base = Some(match base {
            None => sq,
            Some(b) => CoordExpr::bin(BinOp::Add, b, sq),
        });
    }
    let base = base.expect("dim >= 3");
    let coeff = solve_gaussian_coefficient(&structure, &base)?;
    let psi = CoordExpr::bin(BinOp::Mul, CoordExpr::num(coeff), base);

    // basepoint normalization at the potential minimizer (the origin):
    // C1 = R + |grad psi|^2 - (4n-2) psi evaluated there = R(0)
    let origin = vec![0.0; dim];
    let r_origin = crate::tensor::scalar(structure.metric(), &origin)?;
    let notes = vec![
        format!("gaussian coefficient solved from the Ricci-potential residual: c = {coeff:.12}"),
        format!("scalar curvature at the origin: {r_origin:.12}"),
        format!(
            "basepoint normalization C1 = R(origin) = {r_origin:.12} (potential minimized at the origin)"
        ),
        format!("expected horizontal Ricci eigenvalue -2, Reeb eigenvalue {}", 2 * n),
    ];
    let _ = names;
    Ok(Fixture {
        name: structure.name().to_string(),
        candidate: SolitonCandidate::with_potential(structure, psi, Some(r_origin)),
        notes,
    })
}

/// Least-squares coefficient c making Ric_ab - 2n g_ab + c Hess(base)_ab
/// vanish on horizontal frames (the residual is linear in c, so one solve
/// is exact).
fn solve_gaussian_coefficient(s: &SasakianStructure, base: &CoordExpr) -> Result<f64> {
    let points = crate::sampling::sample_box_points(s.sample_box(), 12, 0xC0FFEE);
    let n = s.n();
    let hdim = 2 * n;
    let mut dot_ab = 0.0;
    let mut dot_bb = 0.0;
    for p in &points {
        let frame = horizontal_frame(s, p, 0xC0FFEE)?;
        let bundle = CurvatureJets::new(s.metric(), p, 2)?;
        let ric = bundle.ricci_jets()?.values();
        let fj = crate::expr::eval_jet(base, p, 2)?;
        let hess = crate::tensor::hessian_jets(&fj, &bundle)?.values();
        let dim = s.dim();
        for a in 0..hdim {
            for b in 0..hdim {
                let ea = &frame.vectors[a];
                let eb = &frame.vectors[b];
                let mut ric_ab = 0.0;
                let mut hess_ab = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        ric_ab += ric.get(&[i, j]) * ea[i] * eb[j];
                        hess_ab += hess.get(&[i, j]) * ea[i] * eb[j];
                    }
                }
                let resid0 = ric_ab - 2.0 * n as f64 * if a == b { 1.0 } else { 0.0 };
                dot_ab += resid0 * hess_ab;
                dot_bb += hess_ab * hess_ab;
            }
        }
    }
    if dot_bb < 1e-300 {
        return Err(Error::Degenerate(
            "potential Hessian vanished on the sample".into(),
        ));
    }
    Ok(-dot_ab / dot_bb)
}

fn dhom_fixture(a: f64) -> Result<Fixture> {
    if !(a > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "D-homothetic parameter must be positive, got {a}"
        )));
    }
    let loaded = load_manifold_str(SPHERE3)?;
    let base = loaded.structure;
    let dim = base.dim();
    let chart = base.metric().chart().clone();
    let coeff = a * a - a;

    // g_a = a g + (a^2 - a) eta (x) eta
    let mut entries = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            let g_ij = base.metric().component(i, j).clone();
            let scaled = CoordExpr::bin(BinOp::Mul, CoordExpr::num(a), g_ij);
            let eta_term = CoordExpr::bin(
                BinOp::Mul,
                CoordExpr::num(coeff),
                CoordExpr::bin(BinOp::Mul, base.eta()[i].clone(), base.eta()[j].clone()),
            );
            entries.push((i, j, CoordExpr::bin(BinOp::Add, scaled, eta_term)));
        }
    }
    let metric = MetricSpec::new(chart, entries)?;
    let eta_a: Vec<CoordExpr> = base
        .eta()
        .iter()
        .map(|e| CoordExpr::bin(BinOp::Mul, CoordExpr::num(a), e.clone()))
        .collect();
    let xi_a: Vec<CoordExpr> = base
        .xi()
        .iter()
        .map(|e| CoordExpr::bin(BinOp::Mul, CoordExpr::num(1.0 / a), e.clone()))
        .collect();
    let structure = SasakianStructure::new(
        format!("sphere3.dhom({a})"),
        base.n(),
        metric,
        eta_a,
        xi_a,
        base.phi_sign(),
    )?
    .with_sample_box(vec![(-1.2, 1.2); dim]);
    Ok(Fixture {
        name: structure.name().to_string(),
        candidate: SolitonCandidate::without_potential(structure),
        notes: vec![format!(
            "D-homothetic deformation of sphere3 with a = {a}; eta-Einstein, non-Einstein for a != 1"
        )],
    })
}
