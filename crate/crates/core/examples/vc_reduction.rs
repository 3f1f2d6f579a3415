//! Generates the VC reduction of a satisfiable instance and checks its
//! completeness certificate.

use littlestone::dimensions::{is_shattered, vc_dimension};
use littlestone::labelcover::generators::planted_satisfiable;
use littlestone::reductions::{vc_completeness_certificate, vc_reduction, ReductionParams};

fn main() {
    let (l, sigma) = planted_satisfiable(21, 3, 3, 2, 0.5);
    let params = ReductionParams {
        r: Some(2),
        ell: Some(1),
        seed: 7,
        ..Default::default()
    };
    let out = vc_reduction(&l, &params).unwrap();
    println!(
        "universe={} concepts={} blocks={:?}",
        out.class.n_elements(),
        out.class.len(),
        out.partition().blocks
    );
    for test in &out.plan().seed_sets {
        println!(
            "  seed-set {:02b}: matched={:?} tested={:?}",
            test.seed_set, test.matched, test.tested
        );
    }
    let cert = vc_completeness_certificate(&out, &sigma).unwrap();
    let labels: Vec<&str> = cert
        .iter()
        .map(|&x| out.class.universe().label(x))
        .collect();
    println!(
        "certificate {{{}}} shattered: {}",
        labels.join(", "),
        is_shattered(&out.class, &cert).unwrap().is_some()
    );
    println!(
        "exact vc of the output: {:?}",
        vc_dimension(&out.class).value()
    );
}
