//! Generates the Littlestone reduction and its depth-2rk completeness tree.

use littlestone::dimensions::verify_mistake_tree;
use littlestone::labelcover::generators::planted_satisfiable;
use littlestone::reductions::{
    ls_completeness_tree, ls_reduction, threshold_projection, ReductionParams,
};

fn main() {
    println!(
        "threshold projection of {{(0,0),(1,0),(1,1)}} with k=2: {:?}",
        threshold_projection(&[(0, 0), (1, 0), (1, 1)], 2, 2)
    );

    let (l, sigma) = planted_satisfiable(5, 2, 3, 2, 0.6);
    let params = ReductionParams {
        r: Some(2),
        ell: Some(1),
        k: Some(1),
        seed: 3,
        ..Default::default()
    };
    let out = ls_reduction(&l, &params).unwrap();
    println!(
        "universe={} concepts={}",
        out.class.n_elements(),
        out.class.len()
    );
    let tree = ls_completeness_tree(&out, &sigma).unwrap();
    println!(
        "tree depth={} valid={}",
        tree.depth(),
        verify_mistake_tree(&out.class, &tree).unwrap()
    );
    let first_leaf = vec![false; tree.depth()];
    for (x, b) in tree.path_labels(&first_leaf) {
        println!("  {} -> {}", out.class.universe().label(x), b as u8);
    }
}
