//! Jet evaluation of coordinate expressions.

use super::ast::{BinOp, CoordExpr};
use super::jet::{Jet, MAX_ORDER};
use crate::error::{Error, Result};

/// Evaluate `expr` at `point` carrying all partial derivatives up to
/// `order` (0..=4). Differentiation is exact to rounding: arithmetic is
/// performed on truncated Taylor coefficients, not finite differences.
pub fn eval_jet(expr: &CoordExpr, point: &[f64], order: usize) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(Error::JetOrder {
            requested: order,
            max: MAX_ORDER,
        });
    }
    if let Some(max) = expr.max_coord() {
        if max >= point.len() {
            return Err(Error::DimensionMismatch(format!(
                "expression references coordinate {max} but point has {} entries",
                point.len()
            )));
        }
    }
    let jet = eval_rec(expr, point, order)?;
    if !jet.all_finite() {
        return Err(Error::NonFinite);
    }
    Ok(jet)
}

/// Plain evaluation (order-0 fast path through the same code).
pub fn eval(expr: &CoordExpr, point: &[f64]) -> Result<f64> {
    Ok(eval_jet(expr, point, 0)?.value())
}

fn eval_rec(expr: &CoordExpr, point: &[f64], order: usize) -> Result<Jet> {
    let dim = point.len();
    let jet = match expr {
        CoordExpr::Num(v) => Jet::constant(dim, order, *v),
        CoordExpr::Const(c) => Jet::constant(dim, order, c.value()),
        CoordExpr::Coord(i) => Jet::variable(dim, order, *i, point[*i]),
        CoordExpr::Neg(e) => eval_rec(e, point, order)?.neg(),
        CoordExpr::Bin(op, a, b) => {
            let ja = eval_rec(a, point, order)?;
            match op {
                BinOp::Add => ja.add(&eval_rec(b, point, order)?),
                BinOp::Sub => ja.sub(&eval_rec(b, point, order)?),
                BinOp::Mul => ja.mul(&eval_rec(b, point, order)?),
                BinOp::Div => ja.div(&eval_rec(b, point, order)?)?,
                BinOp::Pow => eval_pow(&ja, b, point, order)?,
            }
        }
        CoordExpr::Call(f, e) => {
            let j = eval_rec(e, point, order)?;
            match f {
                super::ast::Func::Sin => j.sin(),
                super::ast::Func::Cos => j.cos(),
                super::ast::Func::Tan => j.tan()?,
                super::ast::Func::Exp => j.exp(),
                super::ast::Func::Log => j.log()?,
                super::ast::Func::Sqrt => j.sqrt()?,
                super::ast::Func::Sinh => j.sinh(),
                super::ast::Func::Cosh => j.cosh(),
            }
        }
    };
    if !jet.all_finite() {
        return Err(Error::NonFinite);
    }
    Ok(jet)
}

/// `^` dispatch: integer exponents (literal or constant-valued) use exact
/// repeated multiplication; anything else requires a positive base.
fn eval_pow(base: &Jet, exponent: &CoordExpr, point: &[f64], order: usize) -> Result<Jet> {
    if let CoordExpr::Num(v) = exponent {
        if let Some(k) = as_integer(*v) {
            return base.powi(k);
        }
    }
    if let CoordExpr::Neg(inner) = exponent {
        if let CoordExpr::Num(v) = inner.as_ref() {
            if let Some(k) = as_integer(*v) {
                return base.powi(-k);
            }
        }
    }
    let je = eval_rec(exponent, point, order)?;
    if je.is_constant() {
        if let Some(k) = as_integer(je.value()) {
            return base.powi(k);
        }
    }
    // general a^b = exp(b log a), demands a > 0 at the point
    if base.value() <= 0.0 {
        return Err(Error::Domain(format!(
            "exponent is not an integer and base {} is not positive",
            base.value()
        )));
    }
    Ok(je.mul(&base.log()?).exp())
}

fn as_integer(v: f64) -> Option<i64> {
    if v.fract() == 0.0 && v.abs() <= 2f64.powi(40) {
        Some(v as i64)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_expr;
    use super::*;

    fn chart(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Central finite-difference oracle for first and second partials.
    fn fd_first(expr: &CoordExpr, point: &[f64], i: usize, h: f64) -> f64 {
        let mut pp = point.to_vec();
        let mut pm = point.to_vec();
        pp[i] += h;
        pm[i] -= h;
        (eval(expr, &pp).unwrap() - eval(expr, &pm).unwrap()) / (2.0 * h)
    }

    fn fd_second(expr: &CoordExpr, point: &[f64], i: usize, j: usize, h: f64) -> f64 {
        if i == j {
            let mut pp = point.to_vec();
            let mut pm = point.to_vec();
            pp[i] += h;
            pm[i] -= h;
            (eval(expr, &pp).unwrap() - 2.0 * eval(expr, point).unwrap()
                + eval(expr, &pm).unwrap())
                / (h * h)
        } else {
            let mut a = point.to_vec();
            let mut b = point.to_vec();
            let mut c = point.to_vec();
            let mut d = point.to_vec();
            a[i] += h;
            a[j] += h;
            b[i] += h;
            b[j] -= h;
            c[i] -= h;
            c[j] += h;
            d[i] -= h;
            d[j] -= h;
            (eval(expr, &a).unwrap() - eval(expr, &b).unwrap() - eval(expr, &c).unwrap()
                + eval(expr, &d).unwrap())
                / (4.0 * h * h)
        }
    }

    #[test]
    fn sin_squared_matches_finite_differences() {
        let c = chart(&["x"]);
        let expr = parse_expr("sin(x)^2", &c).unwrap();
        let p = [std::f64::consts::FRAC_PI_4];
        let jet = eval_jet(&expr, &p, 2).unwrap();
        let d1 = fd_first(&expr, &p, 0, 1e-4);
        let d2 = fd_second(&expr, &p, 0, 0, 1e-4);
        assert!((jet.partial(&[1]) - d1).abs() / d1.abs().max(1.0) < 1e-6);
        assert!((jet.partial(&[2]) - d2).abs() / d2.abs().max(1.0) < 1e-6);
    }

    #[test]
    fn trivial_examples() {
        let c = chart(&["x", "y"]);
        let expr = parse_expr("sin(x)^2 + y", &c).unwrap();
        assert_eq!(eval(&expr, &[0.0, 2.0]).unwrap(), 2.0);
        let expr = parse_expr("pi/2", &[]).unwrap();
        assert!((eval(&expr, &[]).unwrap() - 1.5707963267948966).abs() < 1e-15);
    }

    #[test]
    fn bilinear_second_order() {
        let c = chart(&["x", "y"]);
        let expr = parse_expr("x*y", &c).unwrap();
        let jet = eval_jet(&expr, &[3.0, 5.0], 2).unwrap();
        assert_eq!(jet.value(), 15.0);
        assert_eq!(jet.partial(&[1, 0]), 5.0);
        assert_eq!(jet.partial(&[0, 1]), 3.0);
        assert_eq!(jet.partial(&[1, 1]), 1.0);
        assert_eq!(jet.partial(&[2, 0]), 0.0);
    }

    #[test]
    fn exp_jet_all_ones() {
        let c = chart(&["x"]);
        let expr = parse_expr("exp(x)", &c).unwrap();
        let jet = eval_jet(&expr, &[0.0], 4).unwrap();
        for k in 0..=4u8 {
            assert!((jet.partial(&[k]) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn domain_errors_surface() {
        let c = chart(&["x"]);
        let log = parse_expr("log(x)", &c).unwrap();
        assert!(matches!(
            eval_jet(&log, &[-1.0], 1),
            Err(Error::Domain(_))
        ));
        let division = parse_expr("1/x", &c).unwrap();
        assert!(eval_jet(&division, &[0.0], 1).is_err());
        let frac_pow = parse_expr("x^0.5", &c).unwrap();
        assert!(eval_jet(&frac_pow, &[-2.0], 1).is_err());
        assert!(eval_jet(&frac_pow, &[4.0], 1).is_ok());
    }

    #[test]
    fn fractional_power_positive_base() {
        let c = chart(&["x"]);
        let expr = parse_expr("x^1.5", &c).unwrap();
        let jet = eval_jet(&expr, &[4.0], 2).unwrap();
        assert!((jet.value() - 8.0).abs() < 1e-12);
        assert!((jet.partial(&[1]) - 3.0).abs() < 1e-12);
        assert!((jet.partial(&[2]) - 0.375).abs() < 1e-12);
    }

    #[test]
    fn variable_exponent() {
        let c = chart(&["x", "y"]);
        let expr = parse_expr("x^y", &c).unwrap();
        let jet = eval_jet(&expr, &[2.0, 3.0], 1).unwrap();
        assert!((jet.value() - 8.0).abs() < 1e-12);
        // d/dy x^y = x^y ln x
        assert!((jet.partial(&[0, 1]) - 8.0 * 2f64.ln()).abs() < 1e-12);
        assert!(eval_jet(&expr, &[-2.0, 3.5], 1).is_err());
    }
}
