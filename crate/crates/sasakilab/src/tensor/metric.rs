//! Charts and metric specifications.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{eval_jet, CoordExpr, Jet};

/// A coordinate chart: names plus a closed domain box per coordinate.
#[derive(Debug, Clone)]
pub struct Chart {
    names: Vec<String>,
    domain: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(names: Vec<String>, domain: Vec<(f64, f64)>) -> Result<Chart> {
        if names.len() != domain.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinate names but {} domain intervals",
                names.len(),
                domain.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(Error::InvalidConfig(format!("duplicate coordinate `{n}`")));
            }
        }
        for (i, &(lo, hi)) in domain.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "empty domain interval for `{}`: {lo}..{hi}",
                    names[i]
                )));
            }
        }
        Ok(Chart { names, domain })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        self.contains_with_margin(point, 0.0)
    }

    /// True if `point` lies inside the box, at least `margin` from every face.
    pub fn contains_with_margin(&self, point: &[f64], margin: f64) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(&self.domain)
                .all(|(&x, &(lo, hi))| x >= lo + margin && x <= hi - margin)
    }

    pub fn check_contains(&self, point: &[f64]) -> Result<()> {
        if self.contains(point) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!("{point:?}")))
        }
    }
}

/// Symmetric metric component table over a chart. Only the upper triangle
/// is stored; completion is automatic.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    chart: Chart,
    /// Upper triangle, row-major: (0,0), (0,1), ..., (0,d-1), (1,1), ...
    upper: Vec<CoordExpr>,
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl MetricSpec {
    /// `entries` maps upper-triangle positions (i <= j, 0-based) to
    /// expressions; missing entries are zero.
    pub fn new(chart: Chart, entries: Vec<(usize, usize, CoordExpr)>) -> Result<MetricSpec> {
        let dim = chart.dim();
        let mut upper = vec![CoordExpr::Num(0.0); dim * (dim + 1) / 2];
        for (i, j, e) in entries {
            if i >= dim || j >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "metric index ({i},{j}) out of range for dimension {dim}"
                )));
            }
            if i > j {
                return Err(Error::InvalidConfig(format!(
                    "metric entry ({i},{j}): author the upper triangle (i <= j)"
                )));
            }
            if let Some(max) = e.max_coord() {
                if max >= dim {
                    return Err(Error::DimensionMismatch(format!(
                        "metric entry ({i},{j}) references coordinate index {max}"
                    )));
                }
            }
            upper[upper_index(dim, i, j)] = e;
        }
        Ok(MetricSpec { chart, upper })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn component(&self, i: usize, j: usize) -> &CoordExpr {
        &self.upper[upper_index(self.dim(), i, j)]
    }

    /// Evaluate all components as jets of `order` at `point` (symmetric
    /// completion applied). Checks the domain box.
    pub fn eval_jets(&self, point: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.chart.check_contains(point)?;
        let dim = self.dim();
        let mut out = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                out.push(eval_jet(self.component(i, j), point, order)?);
            }
        }
        Ok(out)
    }

    /// Evaluate the metric matrix and verify it is symmetric positive
    /// definite there.
    pub fn eval_matrix(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        self.chart.check_contains(point)?;
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = crate::expr::eval(self.component(i, j), point)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        if m.clone().cholesky().is_none() {
            return Err(Error::SingularMetric);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    pub fn euclidean(dim: usize) -> MetricSpec {
        let names: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        let chart = Chart::new(names, vec![(-10.0, 10.0); dim]).unwrap();
        let entries = (0..dim).map(|i| (i, i, CoordExpr::Num(1.0))).collect();
        MetricSpec::new(chart, entries).unwrap()
    }

    #[test]
    fn spd_check_rejects_degenerate() {
        let chart = Chart::new(
            vec!["x".into(), "y".into()],
            vec![(-1.0, 1.0), (-1.0, 1.0)],
        )
        .unwrap();
        let m = MetricSpec::new(
            chart,
            vec![(0, 0, CoordExpr::Num(1.0)), (1, 1, CoordExpr::Num(0.0))],
        )
        .unwrap();
        assert!(matches!(
            m.eval_matrix(&[0.0, 0.0]),
            Err(Error::SingularMetric)
        ));
    }

    #[test]
    fn domain_box_enforced() {
        let m = euclidean(2);
        assert!(m.eval_matrix(&[0.0, 0.0]).is_ok());
        assert!(matches!(
            m.eval_matrix(&[11.0, 0.0]),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn symmetric_completion() {
        let chart = Chart::new(
            vec!["x".into(), "y".into()],
            vec![(-2.0, 2.0), (-2.0, 2.0)],
        )
        .unwrap();
        let names = chart.names().to_vec();
        let m = MetricSpec::new(
            chart,
            vec![
                (0, 0, CoordExpr::Num(2.0)),
                (0, 1, parse_expr("x*y", &names).unwrap()),
                (1, 1, CoordExpr::Num(3.0)),
            ],
        )
        .unwrap();
        let g = m.eval_matrix(&[0.5, 0.25]).unwrap();
        assert_eq!(g[(1, 0)], 0.125);
        assert_eq!(g[(0, 1)], 0.125);
    }
}
