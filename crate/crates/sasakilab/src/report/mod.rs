//! Run configuration, report assembly and rendering.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::{fixture, load_manifold};
use crate::identities::{
    registry, run_selected, IdentityResidualReport, RegistryOptions, Verdict,
};
use crate::sasaki::{check_sasakian_axioms, SolitonCandidate};
use crate::spectral::{
    classify_spectra, eta_einstein_constants, ricci_spectrum, Classification,
    ClassifyTolerances, SolitonEvidence, SpectrumReport,
};

/// The JSON schema the reports validate against; shipped at
/// `crates/sasakilab/schema/report.schema.json`.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Where the structure comes from.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Fixture { name: String },
    Manifold { path: String },
}

/// Output rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Md,
}

/// Full configuration of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub source: InputSource,
    pub samples: usize,
    pub seed: u64,
    pub tol_axiom: f64,
    pub tol_identity: f64,
    pub cluster_tol: f64,
    pub constancy_tol: f64,
    pub fd_step: f64,
    /// Identity-id filter; `None` runs the whole registry.
    pub identities: Option<Vec<String>>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn fixture(name: &str) -> RunConfig {
        RunConfig {
            source: InputSource::Fixture {
                name: name.to_string(),
            },
            samples: 200,
            seed: 7,
            tol_axiom: 1e-8,
            tol_identity: 1e-6,
            cluster_tol: 1e-5,
            constancy_tol: 1e-6,
            fd_step: 1e-4,
            identities: None,
            format: OutputFormat::Json,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 10 {
            return Err(Error::InvalidConfig(format!(
                "sample count must be at least 10, got {}",
                self.samples
            )));
        }
        for (name, v) in [
            ("tol-axiom", self.tol_axiom),
            ("tol-identity", self.tol_identity),
            ("cluster-tol", self.cluster_tol),
            ("constancy-tol", self.constancy_tol),
            ("fd-step", self.fd_step),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if let Some(ids) = &self.identities {
            for id in ids {
                crate::identities::find_spec(id)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomLine {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomSection {
    pub tolerance: f64,
    pub points: usize,
    pub axioms: Vec<AxiomLine>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HamiltonianSection {
    /// Max norm of the antiholomorphic derivative of X_D over the subsample.
    pub holomorphicity_residual: f64,
    /// Max |eta(X_D)| over the subsample (X_D must be horizontal).
    pub eta_horizontal_residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckSection {
    /// Max relative deviation between jet and finite-difference Riemann.
    pub ad_vs_fd_max_relative: f64,
    pub fd_step: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSection {
    pub cluster_tol: f64,
    pub min_xi_alignment: f64,
    pub per_point: Vec<SpectrumReport>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Timings {
    pub total_ms: f64,
    pub sections_ms: BTreeMap<String, f64>,
}

/// The full verification report. Identical input and seed produce
/// byte-identical JSON apart from the `timings` object.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub config: RunConfig,
    pub structure_name: String,
    pub n: usize,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub axioms: AxiomSection,
    pub identities: Vec<IdentityResidualReport>,
    pub hamiltonian: Option<HamiltonianSection>,
    pub crosscheck: CrosscheckSection,
    pub spectrum: SpectrumSection,
    pub classification: Classification,
    pub timings: Timings,
}

impl Report {
    /// True when no axiom failure and no identity Fail verdict occurred
    /// (precondition-unmet does not fail a run).
    pub fn scientific_pass(&self) -> bool {
        self.axioms.pass
            && self
                .identities
                .iter()
                .all(|r| r.verdict != Verdict::Fail)
    }

    /// Canonical JSON; `include_timings = false` gives the byte-stable form.
    pub fn to_json(&self, include_timings: bool) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if !include_timings {
            value.as_object_mut().expect("object").remove("timings");
        }
        serde_json::to_string_pretty(&value).expect("valid json") + "\n"
    }

    /// Markdown rendering of the same data.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# sasakilab report: {} (n = {})\n\n",
            self.structure_name, self.n
        ));
        out.push_str(&format!(
            "- tool version: {}\n- samples: {}\n- seed: {}\n\n",
            self.tool_version, self.config.samples, self.config.seed
        ));
        if !self.warnings.is_empty() {
            out.push_str("## Warnings\n\n");
            for w in &self.warnings {
                out.push_str(&format!("- {w}\n"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "## Axioms (tolerance {:.1e}, {} points): {}\n\n",
            self.axioms.tolerance,
            self.axioms.points,
            if self.axioms.pass { "pass" } else { "FAIL" }
        ));
        out.push_str("| axiom | max residual | verdict |\n|---|---|---|\n");
        for a in &self.axioms.axioms {
            out.push_str(&format!(
                "| {} | {:.3e} | {} |\n",
                a.name,
                a.max_residual,
                if a.pass { "pass" } else { "FAIL" }
            ));
        }
        out.push_str("\n## Identities\n\n");
        out.push_str("| id | verdict | max residual | mean residual | notes |\n|---|---|---|---|---|\n");
        for r in &self.identities {
            out.push_str(&format!(
                "| {} | {:?} | {} | {} | {} |\n",
                r.id,
                r.verdict,
                r.max_residual
                    .map_or("-".to_string(), |v| format!("{v:.3e}")),
                r.mean_residual
                    .map_or("-".to_string(), |v| format!("{v:.3e}")),
                r.notes.join("; ")
            ));
        }
        if let Some(h) = &self.hamiltonian {
            out.push_str(&format!(
                "\n## Hamiltonian field\n\n- holomorphicity residual: {:.6e}\n- eta(X_D) residual: {:.6e}\n",
                h.holomorphicity_residual, h.eta_horizontal_residual
            ));
        }
        out.push_str(&format!(
            "\n## Jet-vs-FD crosscheck\n\n- max relative deviation (h = {:.1e}): {:.3e}\n",
            self.crosscheck.fd_step, self.crosscheck.ad_vs_fd_max_relative
        ));
        out.push_str(&format!(
            "\n## Classification: {:?}\n\n",
            self.classification.verdict
        ));
        for e in &self.classification.evidence {
            out.push_str(&format!("- {e}\n"));
        }
        if !self.notes.is_empty() {
            out.push_str("\n## Notes\n\n");
            for n in &self.notes {
                out.push_str(&format!("- {n}\n"));
            }
        }
        out
    }

    pub fn render(&self) -> String {
        match self.config.format {
            OutputFormat::Json => self.to_json(true),
            OutputFormat::Md => self.to_markdown(),
        }
    }
}

fn load_candidate(config: &RunConfig) -> Result<(SolitonCandidate, Vec<String>)> {
    match &config.source {
        InputSource::Fixture { name } => {
            let f = fixture(name)?;
            Ok((f.candidate, f.notes))
        }
        InputSource::Manifold { path } => {
            let loaded = load_manifold(std::path::Path::new(path))?;
            let candidate = match loaded.psi {
                Some(psi) => SolitonCandidate::with_potential(loaded.structure, psi, None),
                None => SolitonCandidate::without_potential(loaded.structure),
            };
            Ok((candidate, loaded.warnings))
        }
    }
}

/// Run the full verification pipeline: axioms, identities, Hamiltonian
/// residuals, jet-vs-FD crosscheck, spectra, classification.
pub fn verify_run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let t_total = Instant::now();
    let mut timings = Timings::default();
    let (candidate, notes) = load_candidate(config)?;
    let s = &candidate.structure;
    let points = crate::sampling::sample_box_points(s.sample_box(), config.samples, config.seed);

    let t = Instant::now();
    let axiom_report = check_sasakian_axioms(s, &points, config.tol_axiom)?;
    timings
        .sections_ms
        .insert("axioms".into(), t.elapsed().as_secs_f64() * 1e3);
    let axioms = AxiomSection {
        tolerance: axiom_report.tolerance,
        points: axiom_report.points,
        axioms: axiom_report
            .names
            .iter()
            .zip(&axiom_report.max_residuals)
            .map(|(name, &max_residual)| AxiomLine {
                name: name.clone(),
                max_residual,
                pass: max_residual < axiom_report.tolerance,
            })
            .collect(),
        pass: axiom_report.pass(),
    };

    let t = Instant::now();
    let ids: Vec<&str> = match &config.identities {
        Some(filter) => registry()
            .iter()
            .map(|s| s.id)
            .filter(|id| filter.iter().any(|f| f == id))
            .collect(),
        None => registry().iter().map(|s| s.id).collect(),
    };
    let opts = RegistryOptions {
        tol: config.tol_identity,
        ..Default::default()
    };
    let identities = run_selected(&ids, &candidate, &points, config.seed, &opts)?;
    timings
        .sections_ms
        .insert("identities".into(), t.elapsed().as_secs_f64() * 1e3);

    // Hamiltonian residuals on a subsample
    let t = Instant::now();
    let hamiltonian = match &candidate.psi {
        Some(psi) => {
            let sub: Vec<Vec<f64>> = points.iter().take(8).cloned().collect();
            let hol = crate::sasaki::holomorphicity_residual(s, psi, &sub, config.seed)?;
            let mut eta_res = 0.0f64;
            for p in &sub {
                let h = crate::sasaki::hamiltonian_field_from_potential(
                    s,
                    psi,
                    p,
                    config.seed,
                )?;
                let eta_vals: Vec<f64> = s
                    .eta()
                    .iter()
                    .map(|e| crate::expr::eval(e, p))
                    .collect::<Result<_>>()?;
                let mut eta_xd = num_complex::Complex64::new(0.0, 0.0);
                for i in 0..s.dim() {
                    eta_xd += eta_vals[i] * h.x_d[i];
                }
                eta_res = eta_res.max(eta_xd.norm());
            }
            Some(HamiltonianSection {
                holomorphicity_residual: hol,
                eta_horizontal_residual: eta_res,
                points: sub.len(),
            })
        }
        None => None,
    };
    timings
        .sections_ms
        .insert("hamiltonian".into(), t.elapsed().as_secs_f64() * 1e3);

    // jet-vs-FD Riemann crosscheck on a subsample
    let t = Instant::now();
    let mut ad_vs_fd = 0.0f64;
    let sub: Vec<&Vec<f64>> = points.iter().take(10).collect();
    for p in &sub {
        let r = crate::tensor::riemann(s.metric(), p)?;
        let fd = crate::tensor::fd_oracle_riemann(s.metric(), p, config.fd_step)?;
        let scale = r.max_abs().max(1e-12);
        for (a, b) in r.components().iter().zip(fd.components()) {
            ad_vs_fd = ad_vs_fd.max((a - b).abs() / scale);
        }
    }
    let crosscheck = CrosscheckSection {
        ad_vs_fd_max_relative: ad_vs_fd,
        fd_step: config.fd_step,
        points: sub.len(),
    };
    timings
        .sections_ms
        .insert("crosscheck".into(), t.elapsed().as_secs_f64() * 1e3);

    // spectra and classification, reusing the identity evidence
    let t = Instant::now();
    let spectra: Vec<SpectrumReport> = crate::par::try_map_points(&points, |_, p| {
        ricci_spectrum(&candidate, p, config.seed, config.cluster_tol)
    })?;
    let n1_max_residual = {
        let firsts = [
            "soliton.n1.i",
            "soliton.n1.ii",
            "soliton.n1.iii",
            "soliton.n1.iv",
        ];
        let rs: Vec<f64> = identities
            .iter()
            .filter(|r| firsts.contains(&r.id.as_str()))
            .filter_map(|r| r.max_residual)
            .collect();
        if rs.len() == firsts.len() {
            Some(rs.into_iter().fold(0.0f64, f64::max))
        } else {
            None
        }
    };
    let tols = ClassifyTolerances {
        constancy: config.constancy_tol,
        cluster: config.cluster_tol,
        identity: config.tol_identity,
    };
    let mut classification = classify_spectra(
        &spectra,
        SolitonEvidence {
            has_potential: candidate.psi.is_some(),
            n1_max_residual,
        },
        s.n(),
        &tols,
    )?;
    if let Some((lambda, nu)) = eta_einstein_constants(&candidate, &points, config.seed, 1e-6)? {
        classification.evidence.push(format!(
            "eta-Einstein detected: Ric = {lambda:.6} g + {nu:.6} eta(x)eta, constant over the sample"
        ));
    }
    let min_xi_alignment = spectra
        .iter()
        .map(|s| s.xi_alignment)
        .fold(f64::INFINITY, f64::min);
    timings
        .sections_ms
        .insert("spectrum".into(), t.elapsed().as_secs_f64() * 1e3);

    timings.total_ms = t_total.elapsed().as_secs_f64() * 1e3;
    Ok(Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        structure_name: s.name().to_string(),
        n: s.n(),
        warnings: Vec::new(),
        notes,
        axioms,
        identities,
        hamiltonian,
        crosscheck,
        spectrum: SpectrumSection {
            cluster_tol: config.cluster_tol,
            min_xi_alignment,
            per_point: spectra,
        },
        classification,
        timings,
    })
}

/// Classification-only pipeline (cmd_classify).
pub fn classify_run(config: &RunConfig) -> Result<(Classification, String)> {
    config.validate()?;
    let (candidate, _) = load_candidate(config)?;
    let points = crate::sampling::sample_box_points(
        candidate.structure.sample_box(),
        config.samples,
        config.seed,
    );
    let tols = ClassifyTolerances {
        constancy: config.constancy_tol,
        cluster: config.cluster_tol,
        identity: config.tol_identity,
    };
    let (classification, spectra) =
        crate::spectral::classify(&candidate, &points, config.seed, &tols)?;
    // evidence table
    let mut table = String::new();
    let rank0 = spectra.first().map(|s| s.rank_ric_minus_g).unwrap_or(0);
    table.push_str(&format!(
        "verdict: {:?} (rank={}, R={:.6}, k={})\n",
        classification.verdict,
        rank0,
        classification.scalar_mean,
        classification
            .quantized_k
            .map_or("-".to_string(), |k| k.to_string())
    ));
    for e in &classification.evidence {
        table.push_str(&format!("  - {e}\n"));
    }
    Ok((classification, table))
}
