//! Fixture-level checks: axioms, transverse quantities, frames, the
//! Hamiltonian field, and the manifold loader.

use sasakilab::expr::parse_expr;
use sasakilab::fixtures::{fixture, fixture_manifest_text, load_manifold_str};
use sasakilab::sampling::sample_box_points;
use sasakilab::sasaki::{
    basic_laplacian, check_sasakian_axioms, hamiltonian_field_from_potential,
    holomorphicity_residual, horizontal_frame, transverse_ricci, transverse_scalar,
};
use sasakilab::tensor::{laplacian, scalar};
use sasakilab::Error;

#[test]
fn all_fixtures_pass_axioms() {
    for name in ["sphere3", "sphere5", "heisenberg3", "heisenberg5"] {
        let f = fixture(name).unwrap();
        let s = f.structure();
        let points = sample_box_points(s.sample_box(), 40, 7);
        let report = check_sasakian_axioms(s, &points, 1e-8).unwrap();
        assert!(
            report.pass(),
            "{name}: axiom residuals {:?}",
            report
                .names
                .iter()
                .zip(&report.max_residuals)
                .collect::<Vec<_>>()
        );
    }
}

#[test]
fn dhom_passes_axioms_and_is_eta_einstein() {
    let f = fixture("sphere3.dhom(2)").unwrap();
    let s = f.structure();
    let points = sample_box_points(s.sample_box(), 30, 11);
    let report = check_sasakian_axioms(s, &points, 1e-8).unwrap();
    assert!(report.pass(), "axiom residuals {:?}", report.max_residuals);
    // eta-Einstein with horizontal Ricci eigenvalue 0 and R = 2; lambda^T = 2
    for p in points.iter().take(6) {
        assert!((scalar(s.metric(), p).unwrap() - 2.0).abs() < 1e-8);
        let frame = horizontal_frame(s, p, 3).unwrap();
        let rt = transverse_ricci(s, p, &frame).unwrap();
        // Ric^T = 2 g^T: frame components = 2 delta
        for a in 0..2 {
            for b in 0..2 {
                let expected = if a == b { 2.0 } else { 0.0 };
                assert!((rt.get(&[a, b]) - expected).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn flat_contact_structure_fails_d_eta_axiom() {
    // R^3 with eta = dz, xi = d/dz, euclidean metric: not Sasakian
    let text = "\
[manifold] name=flat n=1 coords=x,y,z
[domain] x=-2..2 y=-2..2 z=-2..2
[metric]
g[1][1]=1
g[2][2]=1
g[3][3]=1
[eta]
eta[1]=0
eta[2]=0
eta[3]=1
[xi]
xi[1]=0
xi[2]=0
xi[3]=1
";
    let loaded = load_manifold_str(text).unwrap();
    // The flat structure is caught by the phi axioms: phi = -nabla xi
    // vanishes identically, so d eta = 0 = 2g(., phi .) holds trivially and
    // the contradiction surfaces in phi^2 = -Id + xi (x) eta instead.
    assert!(
        loaded.warnings.iter().any(|w| w.contains("phi_squared")),
        "warnings: {:?}",
        loaded.warnings
    );
    let points = sample_box_points(loaded.structure.sample_box(), 10, 5);
    let report = check_sasakian_axioms(&loaded.structure, &points, 1e-8).unwrap();
    assert!(!report.pass());
    // Ric(., xi) = 2n eta also fails: flat space has Ric = 0
    let ridx = report.names.iter().position(|n| n == "ricci_xi").unwrap();
    assert!(report.max_residuals[ridx] > 0.5);
    let idx = report.names.iter().position(|n| n == "phi_squared").unwrap();
    assert!(report.max_residuals[idx] > 0.5);
}

#[test]
fn transverse_quantities_on_spheres_and_heisenberg() {
    // sphere3: Ric^T = 4 g^T, R^T = 8; sphere5: Ric^T = 6 g^T, R^T = 24
    for (name, lam, rt_expected) in [("sphere3", 4.0, 8.0), ("sphere5", 6.0, 24.0)] {
        let f = fixture(name).unwrap();
        let s = f.structure();
        let points = sample_box_points(s.sample_box(), 8, 13);
        for p in &points {
            let frame = horizontal_frame(s, p, 1).unwrap();
            let rt = transverse_ricci(s, p, &frame).unwrap();
            let hdim = 2 * s.n();
            for a in 0..hdim {
                for b in 0..hdim {
                    let expected = if a == b { lam } else { 0.0 };
                    assert!(
                        (rt.get(&[a, b]) - expected).abs() < 1e-9,
                        "{name} Ric^T[{a}{b}] = {}",
                        rt.get(&[a, b])
                    );
                }
            }
            let rts = transverse_scalar(s, p, &frame).unwrap();
            assert!((rts - rt_expected).abs() < 1e-9);
            // definition consistency: R^T = R + 2n
            let r = scalar(s.metric(), p).unwrap();
            assert!((rts - (r + 2.0 * s.n() as f64)).abs() < 1e-9);
        }
    }
    // heisenberg3: transversely flat, Ric^T = 0
    let f = fixture("heisenberg3").unwrap();
    let s = f.structure();
    for p in sample_box_points(s.sample_box(), 8, 17) {
        let frame = horizontal_frame(s, &p, 1).unwrap();
        let rt = transverse_ricci(s, &p, &frame).unwrap();
        assert!(rt.max_abs() < 1e-10, "Ric^T max {}", rt.max_abs());
        assert!((scalar(s.metric(), &p).unwrap() + 2.0).abs() < 1e-10);
    }
}

#[test]
fn frames_are_orthonormal_deterministic_and_horizontal() {
    let f = fixture("sphere5").unwrap();
    let s = f.structure();
    let p = vec![0.2, -0.3, 0.4, 0.1, -0.2];
    let frame = horizontal_frame(s, &p, 42).unwrap();
    assert_eq!(frame.vectors.len(), 4);
    let g = s.metric().eval_matrix(&p).unwrap();
    let eta: Vec<f64> = s
        .eta()
        .iter()
        .map(|e| sasakilab::expr::eval(e, &p).unwrap())
        .collect();
    for (a, va) in frame.vectors.iter().enumerate() {
        let eta_v: f64 = (0..5).map(|i| eta[i] * va[i]).sum();
        assert!(eta_v.abs() < 1e-12, "eta(e_{a}) = {eta_v}");
        for (b, vb) in frame.vectors.iter().enumerate() {
            let mut ip = 0.0;
            for i in 0..5 {
                for j in 0..5 {
                    ip += g[(i, j)] * va[i] * vb[j];
                }
            }
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((ip - expected).abs() < 1e-10, "gram[{a}{b}] = {ip}");
        }
    }
    // determinism
    let frame2 = horizontal_frame(s, &p, 42).unwrap();
    assert_eq!(frame.vectors, frame2.vectors);
    // different seed gives a different frame
    let frame3 = horizontal_frame(s, &p, 43).unwrap();
    assert_ne!(frame.vectors, frame3.vectors);
}

#[test]
fn basic_laplacian_agrees_with_full_laplacian() {
    let f = fixture("heisenberg3").unwrap();
    let s = f.structure();
    let names = s.metric().chart().names().to_vec();
    let psi = f.candidate.psi.clone().unwrap();
    for p in sample_box_points(s.sample_box(), 6, 23) {
        let frame = horizontal_frame(s, &p, 2).unwrap();
        let lap_b = basic_laplacian(&psi, s, &p, &frame, 1e-8).unwrap();
        let lap = laplacian(&psi, s.metric(), &p).unwrap();
        assert!((lap_b - lap).abs() < 1e-8, "{lap_b} vs {lap}");
    }
    // constant potential: zero
    let c = parse_expr("2", &names).unwrap();
    let p = vec![0.1, 0.2, 0.3];
    let frame = horizontal_frame(s, &p, 2).unwrap();
    assert!(basic_laplacian(&c, s, &p, &frame, 1e-8).unwrap().abs() < 1e-12);
    // non-basic input is a hard error
    let zf = parse_expr("z", &names).unwrap();
    assert!(matches!(
        basic_laplacian(&zf, s, &p, &frame, 1e-8),
        Err(Error::NonBasicPotential { .. })
    ));
}

#[test]
fn hamiltonian_field_of_constant_potential_is_vertical() {
    let f = fixture("sphere3").unwrap();
    let s = f.structure();
    let names = s.metric().chart().names().to_vec();
    let psi = parse_expr("3", &names).unwrap();
    let p = vec![0.3, -0.2, 0.5];
    let h = hamiltonian_field_from_potential(s, &psi, &p, 9).unwrap();
    for c in &h.x_d {
        assert!(c.norm() < 1e-14);
    }
    assert!((h.eta_x.im + 3.0).abs() < 1e-14 && h.eta_x.re.abs() < 1e-14);
    // X = -3i xi
    let xi: Vec<f64> = s
        .xi()
        .iter()
        .map(|e| sasakilab::expr::eval(e, &p).unwrap())
        .collect();
    for i in 0..3 {
        assert!((h.x_full[i].im + 3.0 * xi[i]).abs() < 1e-12);
    }
    // holomorphicity residual of a constant potential vanishes
    let res = holomorphicity_residual(s, &psi, &[p], 9).unwrap();
    assert!(res < 1e-13, "residual {res}");
}

#[test]
fn hamiltonian_field_real_part_is_half_gradient() {
    // For real psi, Re X_D = (1/2) grad^T psi.
    let f = fixture("heisenberg3").unwrap();
    let s = f.structure();
    let psi = f.candidate.psi.clone().unwrap();
    let p = vec![0.4, -0.3, 0.2];
    let h = hamiltonian_field_from_potential(s, &psi, &p, 5).unwrap();
    // grad psi in chart components: g^{ij} d_j psi (psi basic => horizontal)
    let g = s.metric().eval_matrix(&p).unwrap();
    let ginv = g.try_inverse().unwrap();
    let pj = sasakilab::expr::eval_jet(&psi, &p, 1).unwrap();
    for i in 0..3 {
        let grad_i: f64 = (0..3).map(|j| ginv[(i, j)] * pj.partial_vars(&[j])).sum();
        assert!(
            (h.x_d[i].re - 0.5 * grad_i).abs() < 1e-10,
            "component {i}: {} vs {}",
            h.x_d[i].re,
            0.5 * grad_i
        );
    }
    // Heisenberg gaussian potential: finite holomorphicity residual, recorded
    let res = holomorphicity_residual(s, &psi, &[p], 5).unwrap();
    assert!(res.is_finite());
}

#[test]
fn manifest_round_trip_and_errors() {
    // byte-for-byte reproduction of the sphere3 manifest gives the same
    // structure values
    let text = fixture_manifest_text("sphere3").unwrap();
    let a = load_manifold_str(text).unwrap();
    let b = fixture("sphere3").unwrap();
    let points = sample_box_points(&[(-1.2, 1.2), (-1.2, 1.2), (-1.2, 1.2)], 100, 3);
    for p in &points {
        let ga = a.structure.metric().eval_matrix(p).unwrap();
        let gb = b.structure().metric().eval_matrix(p).unwrap();
        assert_eq!(ga, gb);
        for i in 0..3 {
            let ea = sasakilab::expr::eval(&a.structure.eta()[i], p).unwrap();
            let eb = sasakilab::expr::eval(&b.structure().eta()[i], p).unwrap();
            assert_eq!(ea, eb);
            let xa = sasakilab::expr::eval(&a.structure.xi()[i], p).unwrap();
            let xb = sasakilab::expr::eval(&b.structure().xi()[i], p).unwrap();
            assert_eq!(xa, xb);
        }
    }

    // dimension mismatch: 2x2 metric with n=1
    let bad = "\
[manifold] name=bad n=1 coords=x,y
[domain] x=-1..1 y=-1..1
[metric]
g[1][1]=1
g[2][2]=1
";
    assert!(matches!(
        load_manifold_str(bad),
        Err(Error::DimensionMismatch(_))
    ));

    // parse error inside an expression, located at its line
    let bad2 = "\
[manifold] name=bad2 n=1 coords=x,y,z
[domain] x=-1..1 y=-1..1 z=-1..1
[metric]
g[1][1]=x +* y
";
    match load_manifold_str(bad2) {
        Err(Error::Manifest { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected manifest error, got {other:?}"),
    }

    // unknown key is an error
    let bad3 = "\
[manifold] name=bad3 n=1 coords=x,y,z volume=3
";
    assert!(load_manifold_str(bad3).is_err());

    // unknown fixture name
    assert!(matches!(
        fixture("nope"),
        Err(Error::UnknownFixture(_))
    ));
}

#[test]
fn heisenberg_gaussian_coefficient_solves_ricci_potential_residual() {
    // c = (n+1)/2: Hess psi = (2n+2) g^T on the contact distribution
    for (name, expected_c, expected_r) in [("heisenberg3", 1.0, -2.0), ("heisenberg5", 1.5, -4.0)]
    {
        let f = fixture(name).unwrap();
        let s = f.structure();
        let n = s.n() as f64;
        let psi = f.candidate.psi.clone().unwrap();
        // fixture notes record the solved coefficient
        assert!(
            f.notes.iter().any(|note| note.contains("coefficient")),
            "{name} notes: {:?}",
            f.notes
        );
        // basepoint constant supplied as C1 = R(0) = -2n
        assert!((f.candidate.c1.unwrap() - expected_r).abs() < 1e-9);
        // residual of (Ric - 2n g + Hess psi) on horizontal frames < 1e-9
        let points = sample_box_points(s.sample_box(), 10, 31);
        for p in &points {
            let frame = horizontal_frame(s, p, 7).unwrap();
            let bundle =
                sasakilab::tensor::CurvatureJets::new(s.metric(), p, 2).unwrap();
            let ric = bundle.ricci_jets().unwrap().values();
            let fj = sasakilab::expr::eval_jet(&psi, p, 2).unwrap();
            let hess = sasakilab::tensor::hessian_jets(&fj, &bundle).unwrap().values();
            let dim = s.dim();
            for a in 0..2 * s.n() {
                for b in 0..2 * s.n() {
                    let ea = &frame.vectors[a];
                    let eb = &frame.vectors[b];
                    let mut r_ab = 0.0;
                    let mut h_ab = 0.0;
                    for i in 0..dim {
                        for j in 0..dim {
                            r_ab += ric.get(&[i, j]) * ea[i] * eb[j];
                            h_ab += hess.get(&[i, j]) * ea[i] * eb[j];
                        }
                    }
                    let delta = if a == b { 1.0 } else { 0.0 };
                    let res = r_ab - 2.0 * n * delta + h_ab;
                    assert!(res.abs() < 1e-9, "{name} residual {res}");
                    // and the Hessian itself is (2n+2) delta
                    assert!((h_ab - (2.0 * n + 2.0) * delta).abs() < 1e-8);
                }
            }
        }
        // solved coefficient matches the closed form (n+1)/2
        let notes = f.notes.join(" ");
        let c_str = notes
            .split("c = ")
            .nth(1)
            .unwrap()
            .split_whitespace()
            .next()
            .unwrap();
        let c: f64 = c_str.parse().unwrap();
        assert!((c - expected_c).abs() < 1e-9, "{name} c = {c}");
    }
}
