use sasakilab::fixtures::fixture;
use sasakilab::sampling::sample_box_points;
use sasakilab::spectral::{classify, ricci_spectrum, ClassifyTolerances};

fn main() {
    for name in ["sphere3", "sphere5", "heisenberg3", "sphere3.dhom(2)"] {
        let f = fixture(name).unwrap();
        let pts = sample_box_points(f.structure().sample_box(), 16, 7);
        let spec = ricci_spectrum(&f.candidate, &pts[0], 42, 1e-6).unwrap();
        println!(
            "== {name}: eigs {:?} rank {} xi_align {:.6} in_range {}",
            spec.eigenvalues
                .iter()
                .map(|v| (v * 1e6).round() / 1e6)
                .collect::<Vec<_>>(),
            spec.rank_ric_minus_g,
            spec.xi_alignment,
            spec.in_range_1_2n
        );
        let t0 = std::time::Instant::now();
        let (cls, _) = classify(&f.candidate, &pts, 42, &ClassifyTolerances::default()).unwrap();
        println!("   verdict {:?} ({:?})", cls.verdict, t0.elapsed());
        for e in &cls.evidence {
            println!("   - {e}");
        }
    }
}
