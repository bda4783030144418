//! Tensor-engine checks against closed-form oracles: flat space, the round
//! 2-sphere in polar coordinates, and the round 3-sphere in a stereographic
//! chart.

use sasakilab::expr::{parse_expr, CoordExpr};
use sasakilab::tensor::{
    christoffel, cov_deriv, distance_estimate, fd_oracle_riemann, geodesic_integrate, hessian,
    laplacian, lie_derivative, ricci, riemann, scalar, Chart, CurvatureJets, MetricSpec,
    RicciField, RiemannField, ScalarCurvatureField, ShootingOptions, TensorField,
};
use sasakilab::Error;

fn chart(names: &[&str], lo: f64, hi: f64) -> Chart {
    Chart::new(
        names.iter().map(|s| s.to_string()).collect(),
        vec![(lo, hi); names.len()],
    )
    .unwrap()
}

fn metric_from(names: &[&str], lo: f64, hi: f64, entries: &[(usize, usize, &str)]) -> MetricSpec {
    let ch = chart(names, lo, hi);
    let nm = ch.names().to_vec();
    let parsed = entries
        .iter()
        .map(|&(i, j, e)| (i, j, parse_expr(e, &nm).unwrap()))
        .collect();
    MetricSpec::new(ch, parsed).unwrap()
}

fn euclidean3() -> MetricSpec {
    metric_from(
        &["x", "y", "z"],
        -10.0,
        10.0,
        &[(0, 0, "1"), (1, 1, "1"), (2, 2, "1")],
    )
}

fn sphere2() -> MetricSpec {
    // round unit 2-sphere, polar chart away from the poles
    metric_from(
        &["theta", "phi"],
        0.2,
        2.9,
        &[(0, 0, "1"), (1, 1, "sin(theta)^2")],
    )
}

/// Unit 3-sphere in a stereographic chart: g = 4 delta / (1+|u|^2)^2.
fn sphere3_metric() -> MetricSpec {
    let e = "4/(1 + x^2 + y^2 + z^2)^2";
    metric_from(&["x", "y", "z"], -16.0, 16.0, &[(0, 0, e), (1, 1, e), (2, 2, e)])
}

#[test]
fn flat_chart_is_flat() {
    let m = euclidean3();
    let p = [0.3, -1.2, 2.0];
    let gam = christoffel(&m, &p).unwrap();
    assert!(gam.max_abs() < 1e-14);
    let r = riemann(&m, &p).unwrap();
    assert!(r.max_abs() < 1e-14);
    let ric = ricci(&m, &p).unwrap();
    assert!(ric.max_abs() < 1e-14);
    assert!(scalar(&m, &p).unwrap().abs() < 1e-14);
}

#[test]
fn sphere2_closed_forms() {
    let m = sphere2();
    let theta = std::f64::consts::FRAC_PI_3;
    let p = [theta, 0.7];
    let gam = christoffel(&m, &p).unwrap();
    // Gamma^theta_{phi phi} = -sin theta cos theta = -sqrt(3)/4
    let expected = -theta.sin() * theta.cos();
    assert!((gam.get(&[0, 1, 1]) - expected).abs() < 1e-12);
    assert!((expected - (-3f64.sqrt() / 4.0)).abs() < 1e-15);
    // R_{theta phi phi theta} = sin^2 theta (and the pair-swapped slot is its negative)
    let r = riemann(&m, &p).unwrap();
    let s2 = theta.sin().powi(2);
    assert!((r.get(&[0, 1, 1, 0]) - s2).abs() < 1e-12);
    assert!((r.get(&[0, 1, 0, 1]) + s2).abs() < 1e-12);
    // Ric = g, R = 2
    let ric = ricci(&m, &p).unwrap();
    assert!((ric.get(&[0, 0]) - 1.0).abs() < 1e-12);
    assert!((ric.get(&[1, 1]) - s2).abs() < 1e-12);
    assert!((scalar(&m, &p).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn degenerate_metric_reports_singular() {
    let m = metric_from(&["x", "y"], -1.0, 1.0, &[(0, 0, "1"), (1, 1, "0")]);
    assert!(matches!(
        christoffel(&m, &[0.0, 0.0]),
        Err(Error::SingularMetric)
    ));
}

#[test]
fn sphere3_einstein_and_sectional() {
    let m = sphere3_metric();
    let p = [0.31, -0.42, 0.22];
    let ric = ricci(&m, &p).unwrap();
    let g = m.eval_matrix(&p).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((ric.get(&[i, j]) - 2.0 * g[(i, j)]).abs() < 1e-10);
        }
    }
    assert!((scalar(&m, &p).unwrap() - 6.0).abs() < 1e-10);

    // sectional curvature 1 on random coordinate planes:
    // K = R(u,v,v,u) / (|u|^2 |v|^2 - g(u,v)^2)
    let r = riemann(&m, &p).unwrap();
    let u = [1.0, 0.25, -0.5];
    let v = [-0.3, 1.0, 0.8];
    let mut num = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    num += r.get(&[i, j, k, l]) * u[i] * v[j] * v[k] * u[l];
                }
            }
        }
    }
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += g[(i, j)] * a[i] * b[j];
            }
        }
        s
    };
    let den = ip(&u, &u) * ip(&v, &v) - ip(&u, &v).powi(2);
    assert!((num / den - 1.0).abs() < 1e-10);
}

#[test]
fn riemann_symmetries_and_first_bianchi() {
    let m = sphere3_metric();
    let p = [0.5, 0.1, -0.7];
    let r = riemann(&m, &p).unwrap();
    let scale = r.max_abs();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let v = r.get(&[i, j, k, l]);
                    assert!((v + r.get(&[j, i, k, l])).abs() < 1e-10 * scale);
                    assert!((v + r.get(&[i, j, l, k])).abs() < 1e-10 * scale);
                    assert!((v - r.get(&[k, l, i, j])).abs() < 1e-10 * scale);
                    let bianchi =
                        v + r.get(&[j, k, i, l]) + r.get(&[k, i, j, l]);
                    assert!(bianchi.abs() < 1e-10 * scale);
                }
            }
        }
    }
}

#[test]
fn ad_vs_fd_riemann() {
    let m = sphere3_metric();
    let p = [0.4, 0.3, -0.2];
    let r = riemann(&m, &p).unwrap();
    let fd = fd_oracle_riemann(&m, &p, 1e-4).unwrap();
    let scale = r.max_abs();
    for (a, b) in r.components().iter().zip(fd.components()) {
        assert!((a - b).abs() < 1e-5 * scale, "{a} vs {b}");
    }
    // flat chart: FD oracle is zero to rounding
    let e = euclidean3();
    let fd = fd_oracle_riemann(&e, &[0.1, 0.2, 0.3], 1e-4).unwrap();
    assert!(fd.max_abs() < 1e-9);
    // h = 0 is a precondition error
    assert!(fd_oracle_riemann(&m, &p, 0.0).is_err());
    // boundary proximity is a precondition error
    assert!(fd_oracle_riemann(&m, &[15.9999, 0.0, 0.0], 1e-3).is_err());
}

#[test]
fn metric_compatibility_and_scalar_gradient() {
    let m = sphere3_metric();
    let p = [0.8, -0.3, 0.5];
    // nabla g = 0
    let dg = cov_deriv(&sasakilab::tensor::MetricField, &m, &p, 1).unwrap();
    assert!(dg.max_abs() < 1e-10);
    // nabla R = 0 on the homogeneous sphere
    let dr = cov_deriv(&ScalarCurvatureField, &m, &p, 1).unwrap();
    assert!(dr.max_abs() < 1e-9);
}

#[test]
fn contracted_second_bianchi() {
    // On a non-homogeneous metric: R_{ij,j} = R_{,i}/2 (full-range traces).
    let names = ["x", "y", "z"];
    let m = metric_from(
        &names,
        -2.0,
        2.0,
        &[
            (0, 0, "1 + 0.3*sin(x)*cos(y)"),
            (1, 1, "1 + 0.2*exp(0.3*z)"),
            (2, 2, "1 + 0.1*x^2"),
            (0, 1, "0.05*x*y"),
        ],
    );
    let p = [0.4, -0.3, 0.6];
    let dric = cov_deriv(&RicciField, &m, &p, 1).unwrap(); // Ric_{ij,k}
    let dscal = cov_deriv(&ScalarCurvatureField, &m, &p, 1).unwrap(); // R_{,i}
    let ginv = m.eval_matrix(&p).unwrap().try_inverse().unwrap();
    for i in 0..3 {
        let mut div = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                div += ginv[(j, k)] * dric.get(&[i, j, k]);
            }
        }
        let res = div - 0.5 * dscal.get(&[i]);
        assert!(res.abs() < 1e-8, "contracted Bianchi residual {res}");
    }
}

#[test]
fn ricci_identity_commutator() {
    // [nabla_i, nabla_j] on a one-form: T_{k,ij} - T_{k,ji} = -R^m_{ijk} T_m.
    let names = ["x", "y", "z"];
    let m = metric_from(
        &names,
        -2.0,
        2.0,
        &[
            (0, 0, "1 + 0.2*y^2"),
            (1, 1, "1 + 0.1*sin(z)"),
            (2, 2, "1 + 0.15*x^2"),
        ],
    );
    let p = [0.5, 0.2, -0.4];
    // the one-form df for f = sin(x) y + z^2
    struct DfField(CoordExpr);
    impl TensorField for DfField {
        fn valence(&self) -> (usize, usize) {
            (0, 1)
        }
        fn eval_jets(
            &self,
            metric: &MetricSpec,
            point: &[f64],
            order: usize,
        ) -> sasakilab::Result<sasakilab::tensor::JetTensor> {
            metric.chart().check_contains(point)?;
            let f = sasakilab::expr::eval_jet(&self.0, point, order + 1)?;
            let comps = (0..metric.dim()).map(|i| f.derivative(i)).collect();
            Ok(sasakilab::tensor::JetTensor::new(metric.dim(), 0, 1, comps))
        }
    }
    let nm: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let f = parse_expr("sin(x)*y + z^2", &nm).unwrap();
    let field = DfField(f.clone());
    let second = cov_deriv(&field, &m, &p, 2).unwrap(); // T_{k,i,j}
    let omega = cov_deriv(&ScalarExprFieldLocal(&f), &m, &p, 1).unwrap(); // T_k = f_{,k}
    let bundle = CurvatureJets::new(&m, &p, 2).unwrap();
    let r = bundle.riemann_jets().unwrap().values();
    let ginv = m.eval_matrix(&p).unwrap().try_inverse().unwrap();
    // With derivative indices appended innermost-first, T_{k,i,j} = nabla_j
    // nabla_i T_k, and the commutator satisfies
    //   T_{k,i,j} - T_{k,j,i} = R^m_{ijk} T_m.
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let comm = second.get(&[k, i, j]) - second.get(&[k, j, i]);
                // R^m_{ijk} = g^{ml} R_{ijkl}
                let mut action = 0.0;
                for mm in 0..3 {
                    for l in 0..3 {
                        action += ginv[(mm, l)] * r.get(&[i, j, k, l]) * omega.get(&[mm]);
                    }
                }
                assert!(
                    (comm - action).abs() < 1e-8,
                    "Ricci identity residual {} at ({k},{i},{j})",
                    comm - action
                );
            }
        }
    }

    struct ScalarExprFieldLocal<'a>(&'a CoordExpr);
    impl TensorField for ScalarExprFieldLocal<'_> {
        fn valence(&self) -> (usize, usize) {
            (0, 0)
        }
        fn eval_jets(
            &self,
            metric: &MetricSpec,
            point: &[f64],
            order: usize,
        ) -> sasakilab::Result<sasakilab::tensor::JetTensor> {
            metric.chart().check_contains(point)?;
            Ok(sasakilab::tensor::JetTensor::from_scalar(
                sasakilab::expr::eval_jet(self.0, point, order)?,
            ))
        }
    }
}

#[test]
fn hessian_laplacian_flat() {
    let m = euclidean3();
    let nm: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let f = parse_expr("x^2 + y^2 + z^2", &nm).unwrap();
    let p = [0.3, 0.6, -0.2];
    let h = hessian(&f, &m, &p).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { 2.0 } else { 0.0 };
            assert!((h.get(&[i, j]) - expected).abs() < 1e-12);
        }
    }
    assert!((laplacian(&f, &m, &p).unwrap() - 6.0).abs() < 1e-12);
}

#[test]
fn hessian_vs_finite_differences_on_sphere() {
    let m = sphere2();
    let nm: Vec<String> = ["theta", "phi"].iter().map(|s| s.to_string()).collect();
    let f = parse_expr("theta", &nm).unwrap();
    let p = [1.1, 0.4];
    let h = hessian(&f, &m, &p).unwrap();
    // FD oracle: Hess f(i,j) = d_i d_j f - Gamma^k_{ij} d_k f with FD Christoffel
    let step = 1e-4;
    let gam = |q: &[f64]| christoffel(&m, q).unwrap();
    let g0 = gam(&p);
    // f = theta: d_theta f = 1, d_phi f = 0, d_i d_j f = 0
    for i in 0..2 {
        for j in 0..2 {
            let expected = -g0.get(&[0, i, j]);
            assert!(
                (h.get(&[i, j]) - expected).abs() < 1e-6,
                "hessian {} vs fd {}",
                h.get(&[i, j]),
                expected
            );
        }
    }
    let _ = step;
}

#[test]
fn killing_field_on_sphere2() {
    // rotation field d_phi is Killing for the round metric
    let m = sphere2();
    let nm: Vec<String> = ["theta", "phi"].iter().map(|s| s.to_string()).collect();
    let x = [parse_expr("0", &nm).unwrap(), parse_expr("1", &nm).unwrap()];
    let l = lie_derivative(&m, &x, &[0.9, 1.3]).unwrap();
    assert!(l.max_abs() < 1e-12);
    // a non-Killing field has nonzero Lie derivative
    let x = [parse_expr("theta", &nm).unwrap(), parse_expr("0", &nm).unwrap()];
    let l = lie_derivative(&m, &x, &[0.9, 1.3]).unwrap();
    assert!(l.max_abs() > 0.1);
}

#[test]
fn geodesics_flat_and_sphere() {
    // flat: straight line, distance 5
    let m = euclidean3();
    let d = distance_estimate(&m, &[0.0, 0.0, 0.0], &[3.0, 4.0, 0.0], &ShootingOptions::default())
        .unwrap();
    assert!((d - 5.0).abs() < 1e-6, "flat distance {d}");

    // y outside the domain box
    assert!(matches!(
        distance_estimate(&m, &[0.0; 3], &[11.0, 0.0, 0.0], &ShootingOptions::default()),
        Err(Error::OutsideDomain(_))
    ));

    // unit-speed geodesic on the 3-sphere keeps speed and stays on a great circle
    let m3 = sphere3_metric();
    let x0 = [0.0, 0.0, 0.0];
    // |v|_g = 1 at the origin needs euclidean norm 1/2 (g = 4 delta there)
    let v0 = [0.5, 0.0, 0.0];
    let path = geodesic_integrate(&m3, &x0, &v0, 1.0, 400).unwrap();
    assert!(path.max_speed_drift < 1e-10);
    // great circle through the chart origin: u(t) = tan(t/2) e1
    let (end, _) = path.states.last().unwrap();
    assert!((end[0] - (0.5f64).tan()).abs() < 1e-8);
    assert!(end[1].abs() < 1e-12 && end[2].abs() < 1e-12);
}

#[test]
fn sphere2_great_circle_distance() {
    // points at angle pi/3 on the unit 2-sphere, stereographic chart
    let e = "4/(1 + x^2 + y^2)^2";
    let m = metric_from(&["x", "y"], -4.0, 4.0, &[(0, 0, e), (1, 1, e)]);
    // chart origin is a pole of the projection; angle theta maps to radius tan(theta/2)
    let x = [0.0, 0.0];
    let theta: f64 = std::f64::consts::FRAC_PI_3;
    let y = [(theta / 2.0).tan(), 0.0];
    let d = distance_estimate(&m, &x, &y, &ShootingOptions::default()).unwrap();
    assert!((d - theta).abs() < 1e-4, "great-circle distance {d} vs {theta}");
}
