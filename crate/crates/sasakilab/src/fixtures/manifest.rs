//! Line-oriented manifold file format.
//!
//! ```text
//! # comment
//! [manifold] name=<str> n=<int> coords=x,y,z
//! [domain]   x=-2..2 ...
//! [metric]   g[i][j]=<expr>      (1-based, upper triangle, completion automatic)
//! [eta]      eta[i]=<expr>
//! [xi]       xi[i]=<expr>
//! [potential] psi=<expr>
//! [flags]    phi_sign=+1|-1
//! ```
//! Keys may follow the section header inline (whitespace-separated) for the
//! sections whose values contain no spaces, or appear one per line. Unknown
//! sections and keys are errors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, CoordExpr};
use crate::sasaki::{check_sasakian_axioms, SasakianStructure};
use crate::tensor::{Chart, MetricSpec};

/// A parsed manifold file, axiom-checked at load time.
#[derive(Debug, Clone)]
pub struct LoadedManifold {
    pub structure: SasakianStructure,
    pub psi: Option<CoordExpr>,
    /// Loader warnings. Axiom failures land here, not in errors: structures
    /// may be intentionally non-Sasakian for negative tests.
    pub warnings: Vec<String>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Manifest {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct RawManifest {
    name: Option<String>,
    n: Option<usize>,
    coords: Option<Vec<String>>,
    domain: BTreeMap<String, (f64, f64)>,
    metric: Vec<(usize, usize, String, usize)>,
    eta: BTreeMap<usize, (String, usize)>,
    xi: BTreeMap<usize, (String, usize)>,
    psi: Option<(String, usize)>,
    phi_sign: Option<f64>,
}

fn parse_range(s: &str, line: usize) -> Result<(f64, f64)> {
    let Some((lo, hi)) = s.split_once("..") else {
        return Err(err(line, format!("expected `lo..hi`, got `{s}`")));
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| err(line, format!("bad interval endpoint `{lo}`")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| err(line, format!("bad interval endpoint `{hi}`")))?;
    Ok((lo, hi))
}

/// Parse `name[i]` or `name[i][j]` (1-based indices).
fn parse_indexed(key: &str, name: &str, line: usize) -> Result<Vec<usize>> {
    let rest = key
        .strip_prefix(name)
        .ok_or_else(|| err(line, format!("expected `{name}[..]`, got `{key}`")))?;
    let mut out = Vec::new();
    let mut s = rest;
    while !s.is_empty() {
        let Some(stripped) = s.strip_prefix('[') else {
            return Err(err(line, format!("malformed index in `{key}`")));
        };
        let Some(end) = stripped.find(']') else {
            return Err(err(line, format!("unclosed index in `{key}`")));
        };
        let idx: usize = stripped[..end]
            .parse()
            .map_err(|_| err(line, format!("bad index in `{key}`")))?;
        if idx == 0 {
            return Err(err(line, format!("indices are 1-based in `{key}`")));
        }
        out.push(idx - 1);
        s = &stripped[end + 1..];
    }
    Ok(out)
}

fn assign(raw: &mut RawManifest, section: &str, key: &str, value: &str, line: usize) -> Result<()> {
    match section {
        "manifold" => match key {
            "name" => raw.name = Some(value.to_string()),
            "n" => {
                raw.n = Some(
                    value
                        .parse()
                        .map_err(|_| err(line, format!("bad integer n=`{value}`")))?,
                )
            }
            "coords" => {
                raw.coords = Some(value.split(',').map(|s| s.trim().to_string()).collect())
            }
            _ => return Err(err(line, format!("unknown key `{key}` in [manifold]"))),
        },
        "domain" => {
            raw.domain
                .insert(key.to_string(), parse_range(value, line)?);
        }
        "metric" => {
            let idx = parse_indexed(key, "g", line)?;
            if idx.len() != 2 {
                return Err(err(line, format!("metric key `{key}` needs two indices")));
            }
            raw.metric.push((idx[0], idx[1], value.to_string(), line));
        }
        "eta" => {
            let idx = parse_indexed(key, "eta", line)?;
            if idx.len() != 1 {
                return Err(err(line, format!("eta key `{key}` needs one index")));
            }
            raw.eta.insert(idx[0], (value.to_string(), line));
        }
        "xi" => {
            let idx = parse_indexed(key, "xi", line)?;
            if idx.len() != 1 {
                return Err(err(line, format!("xi key `{key}` needs one index")));
            }
            raw.xi.insert(idx[0], (value.to_string(), line));
        }
        "potential" => match key {
            "psi" => raw.psi = Some((value.to_string(), line)),
            _ => return Err(err(line, format!("unknown key `{key}` in [potential]"))),
        },
        "flags" => match key {
            "phi_sign" => {
                raw.phi_sign = Some(match value.trim() {
                    "+1" | "1" => 1.0,
                    "-1" => -1.0,
                    other => {
                        return Err(err(line, format!("phi_sign must be +1 or -1, got `{other}`")))
                    }
                })
            }
            _ => return Err(err(line, format!("unknown key `{key}` in [flags]"))),
        },
        other => return Err(err(line, format!("unknown section `[{other}]`"))),
    }
    Ok(())
}

/// Parse manifold text into a structure plus optional potential.
pub fn load_manifold_str(text: &str) -> Result<LoadedManifold> {
    let mut raw = RawManifest::default();
    let mut section: Option<String> = None;
    for (lineno, full_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match full_line.find('#') {
            Some(p) => &full_line[..p],
            None => full_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let mut rest = content;
        if let Some(stripped) = rest.strip_prefix('[') {
            let Some(end) = stripped.find(']') else {
                return Err(err(line, "unclosed section header"));
            };
            section = Some(stripped[..end].trim().to_string());
            rest = stripped[end + 1..].trim();
            if rest.is_empty() {
                continue;
            }
            // inline key=value pairs (no spaces in values)
            let sec = section.clone().expect("just set");
            for token in rest.split_whitespace() {
                let Some((k, v)) = token.split_once('=') else {
                    return Err(err(line, format!("expected key=value, got `{token}`")));
                };
                assign(&mut raw, &sec, k.trim(), v.trim(), line)?;
            }
            continue;
        }
        let Some(sec) = section.clone() else {
            return Err(err(line, "content before any [section] header"));
        };
        let Some((k, v)) = rest.split_once('=') else {
            return Err(err(line, format!("expected key=value, got `{rest}`")));
        };
        assign(&mut raw, &sec, k.trim(), v.trim(), line)?;
    }

    let name = raw.name.ok_or_else(|| err(0, "missing [manifold] name"))?;
    let n = raw.n.ok_or_else(|| err(0, "missing [manifold] n"))?;
    let coords = raw
        .coords
        .ok_or_else(|| err(0, "missing [manifold] coords"))?;
    let dim = 2 * n + 1;
    if coords.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "n = {n} needs {dim} coordinates, got {}",
            coords.len()
        )));
    }
    let mut domain = Vec::with_capacity(dim);
    for c in &coords {
        let Some(&range) = raw.domain.get(c) else {
            return Err(Error::DimensionMismatch(format!(
                "missing [domain] interval for coordinate `{c}`"
            )));
        };
        domain.push(range);
    }
    for k in raw.domain.keys() {
        if !coords.contains(k) {
            return Err(Error::DimensionMismatch(format!(
                "[domain] interval for undeclared coordinate `{k}`"
            )));
        }
    }
    let chart = Chart::new(coords.clone(), domain)?;

    let parse_at = |src: &str, line: usize| -> Result<CoordExpr> {
        parse_expr(src, &coords).map_err(|e| match e {
            Error::Parse { offset, message } => err(line, format!("{message} (byte {offset})")),
            Error::UnknownIdentifier { name, .. } => {
                err(line, format!("expression references undeclared coordinate or unknown identifier `{name}`"))
            }
            other => other,
        })
    };

    let mut entries = Vec::new();
    for (i, j, src, line) in &raw.metric {
        if *i >= dim || *j >= dim {
            return Err(Error::DimensionMismatch(format!(
                "metric entry g[{}][{}] out of range for dimension {dim}",
                i + 1,
                j + 1
            )));
        }
        if i > j {
            return Err(err(
                *line,
                format!("author the upper triangle: g[{}][{}]", i + 1, j + 1),
            ));
        }
        entries.push((*i, *j, parse_at(src, *line)?));
    }
    let metric = MetricSpec::new(chart, entries)?;

    let component_vec = |map: &BTreeMap<usize, (String, usize)>, what: &str| -> Result<Vec<CoordExpr>> {
        let mut out = Vec::with_capacity(dim);
        for i in 0..dim {
            match map.get(&i) {
                Some((src, line)) => out.push(parse_at(src, *line)?),
                None => {
                    return Err(Error::DimensionMismatch(format!(
                        "missing {what}[{}]",
                        i + 1
                    )))
                }
            }
        }
        for k in map.keys() {
            if *k >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "{what}[{}] out of range for dimension {dim}",
                    k + 1
                )));
            }
        }
        Ok(out)
    };
    let eta = component_vec(&raw.eta, "eta")?;
    let xi = component_vec(&raw.xi, "xi")?;
    let psi = match raw.psi {
        Some((src, line)) => Some(parse_at(&src, line)?),
        None => None,
    };

    let structure = SasakianStructure::new(
        name,
        n,
        metric,
        eta,
        xi,
        raw.phi_sign.unwrap_or(1.0),
    )?;

    // spot-check the axioms; failures are warnings, not errors
    let mut warnings = Vec::new();
    let points = crate::sampling::sample_box_points(structure.sample_box(), 12, 0xF1A7);
    match check_sasakian_axioms(&structure, &points, 1e-8) {
        Ok(report) => {
            if !report.pass() {
                for (name, res) in report.names.iter().zip(&report.max_residuals) {
                    if *res >= report.tolerance {
                        warnings.push(format!(
                            "axiom `{name}` residual {res:.3e} exceeds 1e-8 on a 12-point spot check"
                        ));
                    }
                }
            }
        }
        Err(e) => warnings.push(format!("axiom spot check aborted: {e}")),
    }

    Ok(LoadedManifold {
        structure,
        psi,
        warnings,
    })
}

/// Load a manifold file from disk.
pub fn load_manifold(path: &std::path::Path) -> Result<LoadedManifold> {
    let text = std::fs::read_to_string(path)?;
    load_manifold_str(&text)
}
