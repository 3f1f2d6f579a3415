//! Label Cover instances: value, exact optimum, tests, block partitions.

use littlestone::labelcover::generators::{planted_satisfiable, shifted_parallel};
use littlestone::labelcover::{
    brute_force_optimum, partition_blocks, passes_test, value, PartialAssignment,
};

fn main() {
    let (l, planted) = planted_satisfiable(11, 3, 3, 2, 0.5);
    println!(
        "planted instance: n={} |E|={} q={}",
        l.n(),
        l.edges().len(),
        l.alphabet_size()
    );
    println!(
        "  value of planted assignment: {}",
        value(&l, &planted).unwrap()
    );
    let zeros = PartialAssignment::from_dense(&vec![0; l.n()]);
    println!(
        "  value of all-zero assignment: {:.3}",
        value(&l, &zeros).unwrap()
    );
    let everything: Vec<usize> = (0..l.n()).collect();
    println!(
        "  all-zero passes the full test: {}",
        passes_test(&l, &zeros, &everything)
    );

    let p = partition_blocks(&l, 2, 1).unwrap();
    println!(
        "  partition into 2 blocks: {:?} sizes_ok={} edges_ok={}",
        p.blocks, p.quality.sizes_ok, p.quality.edges_ok
    );

    let low = shifted_parallel(1, 2, 3, 16);
    let (val, _) = brute_force_optimum(&low, 1 << 20).unwrap();
    println!("shifted instance: |E|={} val={val}", low.edges().len());
    println!("{}", serde_json::to_string(&l).unwrap());
}
