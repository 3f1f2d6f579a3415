//! Exact VC dimension of a few standard families, with shattering witnesses.

use littlestone::concept::families::{power_set, singletons, thresholds};
use littlestone::dimensions::{is_shattered, vc_dimension};

fn main() {
    for (name, class) in [
        ("power set of 3", power_set(3)),
        ("singletons over 5", singletons(5)),
        ("thresholds over 1..7", thresholds(7)),
    ] {
        let (vc, witness) = vc_dimension(&class).into_parts().expect("nonempty class");
        let labels: Vec<&str> = witness
            .set
            .iter()
            .map(|&x| class.universe().label(x))
            .collect();
        println!("{name}: vc={vc} shattered={{{}}}", labels.join(","));
        for (mask, &c) in witness.assignments.iter().enumerate() {
            println!(
                "  subset mask {mask:0width$b} realized by concept {c}",
                width = witness.set.len().max(1)
            );
        }
    }

    let t = thresholds(7);
    let pair = [0, 1];
    println!(
        "thresholds shatter {{1,2}}: {}",
        is_shattered(&t, &pair).unwrap().is_some()
    );
}
