//! Expression DSL: parsing and exact higher-order forward differentiation.

pub mod ast;
pub mod eval;
pub mod jet;
pub mod parse;

pub use ast::{BinOp, CoordExpr, Func, NamedConst};
pub use eval::{eval, eval_jet};
pub use jet::{Jet, JetTable, MAX_ORDER};
pub use parse::parse_expr;
