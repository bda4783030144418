//! Coordinate-expression AST.

use std::fmt;

/// Binary operators, lowest precedence first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
}

/// Reserved named constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
        }
    }
}

/// Parsed coordinate expression. Coordinates are referenced by their index
/// in the enclosing chart.
#[derive(Debug, Clone, PartialEq)]
pub enum CoordExpr {
    Num(f64),
    Const(NamedConst),
    Coord(usize),
    Neg(Box<CoordExpr>),
    Bin(BinOp, Box<CoordExpr>, Box<CoordExpr>),
    Call(Func, Box<CoordExpr>),
}

impl CoordExpr {
    pub fn num(v: f64) -> CoordExpr {
        CoordExpr::Num(v)
    }

    pub fn coord(i: usize) -> CoordExpr {
        CoordExpr::Coord(i)
    }

    pub fn bin(op: BinOp, a: CoordExpr, b: CoordExpr) -> CoordExpr {
        CoordExpr::Bin(op, Box::new(a), Box::new(b))
    }

    /// Highest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            CoordExpr::Num(_) | CoordExpr::Const(_) => None,
            CoordExpr::Coord(i) => Some(*i),
            CoordExpr::Neg(e) | CoordExpr::Call(_, e) => e.max_coord(),
            CoordExpr::Bin(_, a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            CoordExpr::Bin(op, _, _) => op.precedence(),
            CoordExpr::Neg(_) => 3,
            _ => 5,
        }
    }

    /// Render against a chart, producing text that parses back to an equal AST.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        self.render_into(&mut out, names);
        out
    }

    fn render_into(&self, out: &mut String, names: &[String]) {
        match self {
            CoordExpr::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    // negative literals only arise from programmatic construction
                    out.push_str(&format!("(0 - {})", -v));
                } else {
                    out.push_str(&format!("{v}"));
                }
            }
            CoordExpr::Const(c) => out.push_str(c.name()),
            CoordExpr::Coord(i) => out.push_str(&names[*i]),
            CoordExpr::Neg(e) => {
                out.push('-');
                self.render_child(e, true, out, names);
            }
            CoordExpr::Bin(op, a, b) => {
                // left child needs parens when strictly weaker; for the
                // right child equal precedence also needs parens on the
                // left-associative ops (and on Pow the roles flip).
                let (lp, rp) = match op {
                    BinOp::Pow => (a.precedence() <= op.precedence(), b.precedence() < op.precedence()),
                    _ => (a.precedence() < op.precedence(), b.precedence() <= op.precedence()),
                };
                Self::paren_if(lp, a, out, names);
                out.push_str(op.symbol());
                Self::paren_if(rp, b, out, names);
            }
            CoordExpr::Call(f, e) => {
                out.push_str(f.name());
                out.push('(');
                e.render_into(out, names);
                out.push(')');
            }
        }
    }

    fn render_child(&self, child: &CoordExpr, _tight: bool, out: &mut String, names: &[String]) {
        Self::paren_if(child.precedence() < self.precedence(), child, out, names);
    }

    fn paren_if(parens: bool, e: &CoordExpr, out: &mut String, names: &[String]) {
        if parens {
            out.push('(');
            e.render_into(out, names);
            out.push(')');
        } else {
            e.render_into(out, names);
        }
    }
}

impl fmt::Display for CoordExpr {
    /// Display with synthetic coordinate names `c0, c1, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max = self.max_coord().map_or(0, |m| m + 1);
        let names: Vec<String> = (0..max).map(|i| format!("c{i}")).collect();
        f.write_str(&self.render(&names))
    }
}
