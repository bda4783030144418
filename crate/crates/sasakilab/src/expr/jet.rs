//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the value of an expression together with all partial
//! derivatives up to order [`MAX_ORDER`] with respect to the chart
//! coordinates. Arithmetic on jets propagates derivatives exactly (to
//! rounding); there is no truncation error for the orders carried.
//!
//! Internally coefficients are stored Taylor-normalized, `c_alpha =
//! d^alpha f / alpha!`, over the graded-lex multi-index basis, so that
//! multiplication is a plain truncated convolution.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Highest derivative order carried by a jet. Two covariant derivatives of
/// the curvature tensor need four metric derivatives, so 4 is enough for
/// every operation in the workbench.
pub const MAX_ORDER: usize = 4;

/// Index tables for multivariate Taylor arithmetic in `dim` variables,
/// truncated at total degree [`MAX_ORDER`]. Built once per dimension.
#[derive(Debug)]
pub struct JetTable {
    dim: usize,
    /// Multi-indices sorted by (total degree, lex). Indices of degree <= k
    /// form a prefix.
    indices: Vec<Vec<u8>>,
    /// `count_by_order[k]` = number of multi-indices with degree <= k.
    count_by_order: Vec<usize>,
    /// alpha! for each multi-index.
    factorials: Vec<f64>,
    /// Products (ia, ib, ic) with deg(a)+deg(b) <= MAX_ORDER and
    /// indices[ia] + indices[ib] = indices[ic], sorted by deg(a)+deg(b).
    products: Vec<(u32, u32, u32)>,
    /// `products_by_order[k]` = number of product entries with total degree <= k.
    products_by_order: Vec<usize>,
    /// Position of alpha + e_i for each (alpha, i) when within order, else usize::MAX.
    shift_up: Vec<usize>,
    position: HashMap<Vec<u8>, usize>,
}

fn enumerate_indices(dim: usize, order: usize) -> Vec<Vec<u8>> {
    fn rec(all: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, pos: usize, remaining: u8) {
        if pos == current.len() {
            all.push(current.clone());
            return;
        }
        for v in 0..=remaining {
            current[pos] = v;
            rec(all, current, pos + 1, remaining - v);
        }
        current[pos] = 0;
    }
    let mut all: Vec<Vec<u8>> = Vec::new();
    let mut current = vec![0u8; dim];
    rec(&mut all, &mut current, 0, order as u8);
    all.sort_by_key(|ix| (ix.iter().map(|&v| v as usize).sum::<usize>(), ix.clone()));
    all
}

impl JetTable {
    fn build(dim: usize) -> Self {
        let indices = enumerate_indices(dim, MAX_ORDER);
        let degree = |ix: &[u8]| ix.iter().map(|&v| v as usize).sum::<usize>();
        let mut position = HashMap::new();
        for (i, ix) in indices.iter().enumerate() {
            position.insert(ix.clone(), i);
        }
        let mut count_by_order = vec![0usize; MAX_ORDER + 1];
        for ix in &indices {
            for k in degree(ix)..=MAX_ORDER {
                count_by_order[k] += 1;
            }
        }
        let mut factorials = Vec::with_capacity(indices.len());
        for ix in &indices {
            let mut f = 1.0f64;
            for &v in ix {
                for t in 1..=v as u64 {
                    f *= t as f64;
                }
            }
            factorials.push(f);
        }
        let mut products: Vec<(u32, u32, u32, usize)> = Vec::new();
        for (ia, a) in indices.iter().enumerate() {
            for (ib, b) in indices.iter().enumerate() {
                let total = degree(a) + degree(b);
                if total > MAX_ORDER {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(&x, &y)| x + y).collect();
                let ic = position[&sum];
                products.push((ia as u32, ib as u32, ic as u32, total));
            }
        }
        products.sort_by_key(|&(_, _, _, t)| t);
        let mut products_by_order = vec![0usize; MAX_ORDER + 1];
        for &(_, _, _, t) in &products {
            for k in t..=MAX_ORDER {
                products_by_order[k] += 1;
            }
        }
        let mut shift_up = vec![usize::MAX; indices.len() * dim];
        for (i, ix) in indices.iter().enumerate() {
            for v in 0..dim {
                if degree(ix) + 1 <= MAX_ORDER {
                    let mut up = ix.clone();
                    up[v] += 1;
                    shift_up[i * dim + v] = position[&up];
                }
            }
        }
        JetTable {
            dim,
            indices,
            count_by_order,
            factorials,
            products: products.into_iter().map(|(a, b, c, _)| (a, b, c)).collect(),
            products_by_order,
            shift_up,
            position,
        }
    }

    /// Shared table for `dim` variables.
    pub fn get(dim: usize) -> Arc<JetTable> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<JetTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet table cache poisoned");
        guard
            .entry(dim)
            .or_insert_with(|| Arc::new(JetTable::build(dim)))
            .clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff_count(&self, order: usize) -> usize {
        self.count_by_order[order]
    }
}

/// Value plus partial derivatives of an expression at a point, up to `order`.
#[derive(Debug, Clone)]
pub struct Jet {
    table: Arc<JetTable>,
    order: usize,
    /// Taylor-normalized coefficients over the graded basis prefix.
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(dim: usize, order: usize, value: f64) -> Jet {
        let table = JetTable::get(dim);
        let mut coeffs = vec![0.0; table.coeff_count(order)];
        coeffs[0] = value;
        Jet {
            table,
            order,
            coeffs,
        }
    }

    /// The jet of the `var`-th coordinate function at `value`.
    pub fn variable(dim: usize, order: usize, var: usize, value: f64) -> Jet {
        let mut jet = Jet::constant(dim, order, value);
        if order >= 1 {
            let mut e = vec![0u8; dim];
            e[var] = 1;
            let pos = jet.table.position[&e];
            jet.coeffs[pos] = 1.0;
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    /// Plain value (order-0 coefficient).
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Partial derivative for the multi-index `alpha` (one entry per
    /// coordinate), e.g. `[1, 2, 0]` is d^3/dx dy^2.
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        assert_eq!(alpha.len(), self.dim(), "multi-index length mismatch");
        let degree: usize = alpha.iter().map(|&v| v as usize).sum();
        if degree > self.order {
            panic!("partial of degree {degree} on an order-{} jet", self.order);
        }
        let pos = self.table.position[&alpha.to_vec()];
        self.coeffs[pos] * self.table.factorials[pos]
    }

    /// Partial derivative named by a list of variable indices, e.g.
    /// `[0, 0, 1]` is d^3/dx^2 dy. Order of the list does not matter.
    pub fn partial_vars(&self, vars: &[usize]) -> f64 {
        let mut alpha = vec![0u8; self.dim()];
        for &v in vars {
            alpha[v] += 1;
        }
        self.partial(&alpha)
    }

    /// The jet of the partial derivative d/dx_v, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let n = self.table.coeff_count(order);
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            let up = self.table.shift_up[i * self.dim() + var];
            debug_assert!(up != usize::MAX);
            let mult = self.table.indices[up][var] as f64;
            coeffs[i] = self.coeffs[up] * mult;
        }
        Jet {
            table: self.table.clone(),
            order,
            coeffs,
        }
    }

    /// Truncate to a lower order (no-op if already at or below).
    pub fn truncated(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            table: self.table.clone(),
            order,
            coeffs: self.coeffs[..self.table.coeff_count(order)].to_vec(),
        }
    }

    fn common_order(&self, other: &Jet) -> usize {
        assert_eq!(self.dim(), other.dim(), "jet dimension mismatch");
        self.order.min(other.order)
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let order = self.common_order(other);
        let n = self.table.coeff_count(order);
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            coeffs[i] = self.coeffs[i] + other.coeffs[i];
        }
        Jet {
            table: self.table.clone(),
            order,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        let order = self.common_order(other);
        let n = self.table.coeff_count(order);
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            coeffs[i] = self.coeffs[i] - other.coeffs[i];
        }
        Jet {
            table: self.table.clone(),
            order,
            coeffs,
        }
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            table: self.table.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scaled(&self, other: &Jet, s: f64) -> Jet {
        let order = self.common_order(other);
        let n = self.table.coeff_count(order);
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            coeffs[i] = self.coeffs[i] + s * other.coeffs[i];
        }
        Jet {
            table: self.table.clone(),
            order,
            coeffs,
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.common_order(other);
        let n = self.table.coeff_count(order);
        let mut coeffs = vec![0.0; n];
        let limit = self.table.products_by_order[order];
        for &(ia, ib, ic) in &self.table.products[..limit] {
            coeffs[ic as usize] += self.coeffs[ia as usize] * other.coeffs[ib as usize];
        }
        Jet {
            table: self.table.clone(),
            order,
            coeffs,
        }
    }

    /// Compose a univariate analytic map with this jet. `outer[k]` must hold
    /// f^(k)(value)/k! for k = 0..=order.
    pub fn compose(&self, outer: &[f64]) -> Jet {
        debug_assert!(outer.len() > self.order);
        // hatted series: self with constant term removed
        let mut hat = self.clone();
        hat.coeffs[0] = 0.0;
        // Horner: c0 + h*(c1 + h*(c2 + ...))
        let mut acc = Jet::constant(self.dim(), self.order, outer[self.order]);
        for k in (0..self.order).rev() {
            acc = hat.mul(&acc);
            acc.coeffs[0] += outer[k];
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet> {
        let u = self.value();
        if u == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let mut outer = [0.0; MAX_ORDER + 1];
        let mut p = 1.0 / u;
        for c in outer.iter_mut().take(self.order + 1) {
            *c = p;
            p *= -1.0 / u;
        }
        Ok(self.compose(&outer))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut outer = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, c) in outer.iter_mut().enumerate().take(self.order + 1) {
            if k > 0 {
                fact *= k as f64;
            }
            *c = e / fact;
        }
        self.compose(&outer)
    }

    pub fn log(&self) -> Result<Jet> {
        let u = self.value();
        if u <= 0.0 {
            return Err(Error::Domain(format!("log of non-positive value {u}")));
        }
        let mut outer = [0.0; MAX_ORDER + 1];
        outer[0] = u.ln();
        // d^k log = (-1)^(k-1) (k-1)! / u^k ; normalized: (-1)^(k-1)/(k u^k)
        let mut pw = u;
        for (k, c) in outer.iter_mut().enumerate().take(self.order + 1).skip(1) {
            *c = if k % 2 == 1 { 1.0 } else { -1.0 } / (k as f64 * pw);
            pw *= u;
        }
        Ok(self.compose(&outer))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let u = self.value();
        if u < 0.0 {
            return Err(Error::Domain(format!("sqrt of negative value {u}")));
        }
        if u == 0.0 && self.order >= 1 {
            return Err(Error::Domain("sqrt derivative at zero".into()));
        }
        self.powf_unchecked(0.5)
    }

    /// u^r for positive base, exact derivative coefficients.
    pub fn powf(&self, r: f64) -> Result<Jet> {
        if self.value() <= 0.0 {
            return Err(Error::Domain(format!(
                "non-integer power of non-positive base {}",
                self.value()
            )));
        }
        self.powf_unchecked(r)
    }

    fn powf_unchecked(&self, r: f64) -> Result<Jet> {
        let u = self.value();
        let mut outer = [0.0; MAX_ORDER + 1];
        // binom(r, k) * u^(r - k)
        let mut coeff = 1.0;
        for (k, c) in outer.iter_mut().enumerate().take(self.order + 1) {
            if k > 0 {
                coeff *= (r - (k as f64 - 1.0)) / k as f64;
            }
            *c = coeff * u.powf(r - k as f64);
        }
        Ok(self.compose(&outer))
    }

    /// Integer power by repeated multiplication (exact for polynomials).
    pub fn powi(&self, mut m: i64) -> Result<Jet> {
        if m < 0 {
            return self.powi(-m)?.recip();
        }
        let mut result = Jet::constant(self.dim(), self.order, 1.0);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = result.mul(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let mut outer = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, o) in outer.iter_mut().enumerate().take(self.order + 1) {
            if k > 0 {
                fact *= k as f64;
            }
            *o = cycle[k % 4] / fact;
        }
        self.compose(&outer)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let mut outer = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, o) in outer.iter_mut().enumerate().take(self.order + 1) {
            if k > 0 {
                fact *= k as f64;
            }
            *o = cycle[k % 4] / fact;
        }
        self.compose(&outer)
    }

    pub fn tan(&self) -> Result<Jet> {
        self.sin().div(&self.cos())
    }

    pub fn sinh(&self) -> Jet {
        let (sh, ch) = (self.value().sinh(), self.value().cosh());
        let cycle = [sh, ch];
        let mut outer = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, o) in outer.iter_mut().enumerate().take(self.order + 1) {
            if k > 0 {
                fact *= k as f64;
            }
            *o = cycle[k % 2] / fact;
        }
        self.compose(&outer)
    }

    pub fn cosh(&self) -> Jet {
        let (sh, ch) = (self.value().sinh(), self.value().cosh());
        let cycle = [ch, sh];
        let mut outer = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, o) in outer.iter_mut().enumerate().take(self.order + 1) {
            if k > 0 {
                fact *= k as f64;
            }
            *o = cycle[k % 2] / fact;
        }
        self.compose(&outer)
    }

    /// True if every derivative coefficient of order >= 1 is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0.0)
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
            "{a} vs {b}"
        );
    }

    #[test]
    fn bilinear_product() {
        // x*y at (3, 5): value 15, dx=5, dy=3, dxdy=1, dxx=dyy=0
        let x = Jet::variable(2, 2, 0, 3.0);
        let y = Jet::variable(2, 2, 1, 5.0);
        let p = x.mul(&y);
        assert_eq!(p.value(), 15.0);
        assert_eq!(p.partial(&[1, 0]), 5.0);
        assert_eq!(p.partial(&[0, 1]), 3.0);
        assert_eq!(p.partial(&[1, 1]), 1.0);
        assert_eq!(p.partial(&[2, 0]), 0.0);
        assert_eq!(p.partial(&[0, 2]), 0.0);
    }

    #[test]
    fn exp_all_orders() {
        let x = Jet::variable(1, 4, 0, 0.0);
        let e = x.exp();
        for k in 0..=4u8 {
            assert_close(e.partial(&[k]), 1.0, 1e-15);
        }
    }

    #[test]
    fn quotient_rule() {
        // f = x / (1 + y), d^2 f / dx dy at (2, 1) = -1/4
        let x = Jet::variable(2, 3, 0, 2.0);
        let y = Jet::variable(2, 3, 1, 1.0);
        let one = Jet::constant(2, 3, 1.0);
        let f = x.div(&one.add(&y)).unwrap();
        assert_close(f.value(), 1.0, 1e-15);
        assert_close(f.partial(&[1, 1]), -0.25, 1e-14);
        assert_close(f.partial(&[0, 2]), 2.0 * 2.0 / 8.0, 1e-14);
    }

    #[test]
    fn derivative_jet_consistency() {
        // d/dx of sin(x*y) as a jet equals y*cos(x*y)
        let x = Jet::variable(2, 4, 0, 0.7);
        let y = Jet::variable(2, 4, 1, -1.3);
        let s = x.mul(&y).sin();
        let ds = s.derivative(0);
        let expected = y.truncated(3).mul(&x.mul(&y).truncated(3).cos());
        for (a, b) in ds.coeffs.iter().zip(&expected.coeffs) {
            assert_close(*a, *b, 1e-13);
        }
    }

    #[test]
    fn division_by_zero_reported() {
        let x = Jet::variable(1, 2, 0, 0.0);
        assert!(x.recip().is_err());
        assert!(Jet::constant(1, 2, -1.0).log().is_err());
        assert!(Jet::constant(1, 2, -1.0).sqrt().is_err());
    }

    #[test]
    fn order_restriction_consistency() {
        // order-k jet restricted to orders <= k-1 equals the order-(k-1) jet
        let x = Jet::variable(3, 4, 0, 0.4);
        let y = Jet::variable(3, 4, 1, 0.9);
        let z = Jet::variable(3, 4, 2, -0.2);
        let f4 = x.mul(&y).sin().add(&z.exp().mul(&y));
        let x3 = Jet::variable(3, 3, 0, 0.4);
        let y3 = Jet::variable(3, 3, 1, 0.9);
        let z3 = Jet::variable(3, 3, 2, -0.2);
        let f3 = x3.mul(&y3).sin().add(&z3.exp().mul(&y3));
        let t = f4.truncated(3);
        for (a, b) in t.coeffs.iter().zip(&f3.coeffs) {
            assert_close(*a, *b, 1e-15);
        }
    }

    #[test]
    fn negative_integer_power() {
        // x^-2 at 2: value 1/4, d = -2/8 = -0.25, d2 = 6/16
        let x = Jet::variable(1, 2, 0, 2.0);
        let p = x.powi(-2).unwrap();
        assert_close(p.value(), 0.25, 1e-15);
        assert_close(p.partial(&[1]), -0.25, 1e-15);
        assert_close(p.partial(&[2]), 6.0 / 16.0, 1e-15);
    }
}
