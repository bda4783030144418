//! Dense tensor component tables at a point: plain values and jets.
//!
//! Index layout is row-major with contravariant indices first, covariant
//! after. Covariant-derivative indices are appended last, matching the
//! comma convention `T_{ij,k}`.

use crate::expr::Jet;

/// Numeric tensor components at a point.
#[derive(Debug, Clone)]
pub struct TensorValue {
    dim: usize,
    con: usize,
    cov: usize,
    comps: Vec<f64>,
}

impl TensorValue {
    pub fn new(dim: usize, con: usize, cov: usize, comps: Vec<f64>) -> TensorValue {
        assert_eq!(comps.len(), dim.pow((con + cov) as u32));
        TensorValue {
            dim,
            con,
            cov,
            comps,
        }
    }

    pub fn zeros(dim: usize, con: usize, cov: usize) -> TensorValue {
        TensorValue::new(dim, con, cov, vec![0.0; dim.pow((con + cov) as u32)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// (covariant rank, contravariant rank)
    pub fn valence(&self) -> (usize, usize) {
        (self.cov, self.con)
    }

    pub fn rank(&self) -> usize {
        self.con + self.cov
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.comps
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.comps[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let k = self.flat_index(idx);
        self.comps[k] = v;
    }

    /// Max absolute component.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Tensor with jet components (value + derivatives), same layout.
#[derive(Debug, Clone)]
pub struct JetTensor {
    dim: usize,
    con: usize,
    cov: usize,
    order: usize,
    comps: Vec<Jet>,
}

impl JetTensor {
    pub fn new(dim: usize, con: usize, cov: usize, comps: Vec<Jet>) -> JetTensor {
        assert_eq!(comps.len(), dim.pow((con + cov) as u32));
        let order = comps.iter().map(|j| j.order()).min().unwrap_or(0);
        JetTensor {
            dim,
            con,
            cov,
            order,
            comps,
        }
    }

    pub fn from_scalar(jet: Jet) -> JetTensor {
        let dim = jet.dim();
        JetTensor::new(dim, 0, 0, vec![jet])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn con(&self) -> usize {
        self.con
    }

    pub fn cov(&self) -> usize {
        self.cov
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.con + self.cov
    }

    pub fn comps(&self) -> &[Jet] {
        &self.comps
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.comps[self.flat_index(idx)]
    }

    /// Drop derivative information, keeping point values.
    pub fn values(&self) -> TensorValue {
        TensorValue::new(
            self.dim,
            self.con,
            self.cov,
            self.comps.iter().map(|j| j.value()).collect(),
        )
    }
}

/// Iterate over all multi-indices of `rank` indices in `dim` dimensions,
/// row-major order.
pub fn index_iter(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0usize; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}
