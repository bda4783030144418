//! Riemannian objects computed at points of a chart.

pub mod curvature;
pub mod deriv;
pub mod geodesic;
pub mod metric;
pub mod value;

pub use curvature::{
    christoffel, fd_oracle_riemann, ricci, riemann, scalar, CurvatureJets,
};
pub use deriv::{
    cov_deriv, cov_deriv_jets, hessian, hessian_jets, laplacian, lie_derivative, MetricField,
    RicciField, RiemannField, ScalarCurvatureField, ScalarExprField, TensorField,
};
pub use geodesic::{distance_estimate, geodesic_integrate, GeodesicPath, ShootingOptions};
pub use metric::{Chart, MetricSpec};
pub use value::{index_iter, JetTensor, TensorValue};
