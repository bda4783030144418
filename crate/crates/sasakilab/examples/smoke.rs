use sasakilab::fixtures::fixture;
use sasakilab::identities::{run_all, RegistryOptions};
use sasakilab::sampling::sample_box_points;

fn main() {
    for name in ["sphere3", "sphere5", "heisenberg3"] {
        let f = fixture(name).unwrap();
        let pts = sample_box_points(f.structure().sample_box(), 20, 7);
        let t0 = std::time::Instant::now();
        let reports = run_all(&f.candidate, &pts, 42, &RegistryOptions::default()).unwrap();
        println!("== {name}  ({:?})", t0.elapsed());
        for r in &reports {
            println!(
                "  {:26} {:?}  max={:?}  values={:?}",
                r.id, r.verdict, r.max_residual, r.values
            );
        }
    }
}
