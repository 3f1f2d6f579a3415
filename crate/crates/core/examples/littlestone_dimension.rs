//! Littlestone's dimension, the `LS ≤ d` decision procedure, and the
//! certifying mistake tree.

use littlestone::concept::families::thresholds;
use littlestone::dimensions::{ls_at_most_counted, ls_dimension, verify_mistake_tree};

fn main() {
    let class = thresholds(7);
    for d in 0..=4 {
        let (answer, nodes) = ls_at_most_counted(&class, d);
        println!("LS <= {d}: {answer} ({nodes} nodes)");
    }

    let (ls, tree) = ls_dimension(&class).into_parts().expect("nonempty class");
    println!(
        "ls={ls}, tree verifies: {}",
        verify_mistake_tree(&class, &tree).unwrap()
    );
    for leaf in tree.leaves() {
        let path: Vec<String> = tree
            .path_labels(&leaf)
            .into_iter()
            .map(|(x, b)| format!("{}={}", class.universe().label(x), b as u8))
            .collect();
        println!("  {} -> concept {}", path.join(" "), tree.witness(&leaf));
    }
}
