//! Soliton candidates: a Sasakian structure plus a basic potential.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, CoordExpr};
use crate::sasaki::structure::SasakianStructure;

/// A Sasakian structure with an optional basic potential psi and optional
/// normalization constant C1. Structures without a potential can still run
/// every curvature-only check; potential identities report
/// precondition-unmet.
#[derive(Debug, Clone)]
pub struct SolitonCandidate {
    pub structure: SasakianStructure,
    pub psi: Option<CoordExpr>,
    pub c1: Option<f64>,
}

impl SolitonCandidate {
    pub fn without_potential(structure: SasakianStructure) -> SolitonCandidate {
        SolitonCandidate {
            structure,
            psi: None,
            c1: None,
        }
    }

    pub fn with_potential(
        structure: SasakianStructure,
        psi: CoordExpr,
        c1: Option<f64>,
    ) -> SolitonCandidate {
        SolitonCandidate {
            structure,
            psi: Some(psi),
            c1,
        }
    }

    /// Max |xi(psi)| over the sample; the potential must be basic.
    pub fn basic_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        let Some(psi) = &self.psi else {
            return Ok(0.0);
        };
        let dim = self.structure.dim();
        let per_point = crate::par::try_map_points(points, |_, p| {
            let pj = eval_jet(psi, p, 1)?;
            let xi: Vec<f64> = self
                .structure
                .xi()
                .iter()
                .map(|e| crate::expr::eval(e, p))
                .collect::<Result<_>>()?;
            let v: f64 = (0..dim).map(|i| xi[i] * pj.partial_vars(&[i])).sum();
            Ok(v.abs())
        })?;
        Ok(per_point.into_iter().fold(0.0f64, f64::max))
    }

    /// Hard error when psi is present but not basic (tolerance `tol`).
    pub fn require_basic(&self, points: &[Vec<f64>], tol: f64) -> Result<()> {
        let r = self.basic_residual(points)?;
        if r > tol {
            return Err(Error::NonBasicPotential { residual: r, tol });
        }
        Ok(())
    }
}
